//! Minimal neural-network substrate: parameters with accumulated gradients,
//! affine layers, the 4-layer reduction stack, Adam, and seeded init.
//!
//! Everything is f64 on `ndarray`; matrix products go through `ndarray`'s
//! GEMM so batched passes stay fast. Backward passes are hand-derived and
//! validated against central finite differences (see `gradcheck`).

pub mod adam;
pub mod gradcheck;
pub mod linear;
pub mod mlp;
pub mod param;

pub use adam::Adam;
pub use linear::Linear;
pub use mlp::Mlp;
pub use param::{Param, ParamVisitor, Parametrized};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Uniform fan-in initialization: U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
pub fn fan_in_uniform(rng: &mut ChaCha8Rng, fan_in: usize, n: usize) -> Vec<f64> {
    let bound = 1.0 / (fan_in.max(1) as f64).sqrt();
    (0..n).map(|_| rng.gen_range(-bound..bound)).collect()
}

/// ReLU applied elementwise in place.
pub fn relu_inplace(x: &mut ndarray::Array2<f64>) {
    x.mapv_inplace(|v| v.max(0.0));
}

/// Gradient of ReLU given pre-activations: 1 where z > 0 else 0.
pub fn relu_backward(grad: &mut ndarray::Array2<f64>, pre: &ndarray::Array2<f64>) {
    ndarray::Zip::from(grad).and(pre).for_each(|g, &z| {
        if z <= 0.0 {
            *g = 0.0;
        }
    });
}
