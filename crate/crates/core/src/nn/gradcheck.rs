//! Central finite-difference gradient checking.
//!
//! The numeric side only ever calls the module's forward pass, so it stays
//! independent of every hand-derived backward it is used to verify.

use std::cell::RefCell;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::param::Parametrized;

/// Outcome of checking one sampled coordinate.
#[derive(Debug, Clone)]
pub struct CoordCheck {
    pub param: String,
    pub index_in_param: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_error: f64,
}

/// Relative error with a unit floor so near-zero gradients compare sanely.
pub fn rel_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}

/// Check `n_coords` randomly sampled parameter coordinates of `module`
/// against central finite differences of `loss`.
///
/// Analytic gradients must already be accumulated in the module's `grad`
/// buffers; `loss` must run a fresh forward pass each call. A coordinate
/// that fails is resampled up to `resamples` times (a finite step can cross
/// a ReLU kink, where the numeric derivative is off); a systematic backward
/// bug fails every resample.
pub fn check_params<M: Parametrized>(
    module: &RefCell<M>,
    loss: impl Fn(&M) -> f64,
    n_coords: usize,
    eps: f64,
    tol: f64,
    resamples: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<CoordCheck>, CoordCheck> {
    let total: usize = {
        let mut n = 0;
        module.borrow_mut().visit_params(&mut |p| n += p.len());
        n
    };
    assert!(total > 0, "module has no parameters");

    let mut results = Vec::with_capacity(n_coords);
    'coords: for _ in 0..n_coords {
        let mut last_fail: Option<CoordCheck> = None;
        for _attempt in 0..=resamples {
            let flat = rng.gen_range(0..total);
            let check = check_one(module, &loss, flat, eps);
            if check.rel_error <= tol {
                results.push(check);
                continue 'coords;
            }
            last_fail = Some(check);
        }
        return Err(last_fail.unwrap());
    }
    Ok(results)
}

fn check_one<M: Parametrized>(
    module: &RefCell<M>,
    loss: &impl Fn(&M) -> f64,
    flat: usize,
    eps: f64,
) -> CoordCheck {
    let (name, idx, analytic, orig) = inspect(module, flat);

    write_flat(module, flat, orig + eps);
    let up = loss(&module.borrow());
    write_flat(module, flat, orig - eps);
    let down = loss(&module.borrow());
    write_flat(module, flat, orig);

    let numeric = (up - down) / (2.0 * eps);
    CoordCheck {
        param: name,
        index_in_param: idx,
        analytic,
        numeric,
        rel_error: rel_error(analytic, numeric),
    }
}

fn inspect<M: Parametrized>(module: &RefCell<M>, mut flat: usize) -> (String, usize, f64, f64) {
    let mut out = None;
    module.borrow_mut().visit_params(&mut |p| {
        if out.is_none() {
            if flat < p.len() {
                out = Some((
                    p.name().to_string(),
                    flat,
                    p.grad.as_slice().unwrap()[flat],
                    p.value.as_slice().unwrap()[flat],
                ));
            } else {
                flat -= p.len();
            }
        }
    });
    out.expect("flat index out of range")
}

fn write_flat<M: Parametrized>(module: &RefCell<M>, mut flat: usize, value: f64) {
    let mut done = false;
    module.borrow_mut().visit_params(&mut |p| {
        if !done {
            if flat < p.len() {
                p.value.as_slice_mut().unwrap()[flat] = value;
                done = true;
            } else {
                flat -= p.len();
            }
        }
    });
    assert!(done, "flat index out of range");
}
