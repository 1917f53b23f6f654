//! Sliding-window sample construction.
//!
//! A window with first target month `t` reads inputs from months
//! `[t - window, t - 1]` and predicts months `[t, t + 2]`. Windows advance
//! by one month. A sample belongs to the split containing `t`, and all
//! three target months must lie inside that split; inputs may reach back
//! into earlier splits.

use ndarray::{s, Array3};

use crate::config::ExperimentConfig;
use crate::data::records::SplitAssignment;
use crate::error::{Error, Result};
use crate::types::MonthIndex;

/// First-target months per split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPlans {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

impl SplitPlans {
    pub fn total(&self) -> usize {
        self.train.len() + self.val.len() + self.test.len()
    }

    /// Largest first-target month used by train or validation; bounds how
    /// many months the training loop must reduce each epoch.
    pub fn max_fit_target(&self) -> usize {
        self.train
            .iter()
            .chain(self.val.iter())
            .copied()
            .max()
            .unwrap_or(0)
    }
}

/// Enumerate valid windows and assign them to splits.
pub fn plan_windows(
    total_months: usize,
    window: usize,
    horizon: usize,
    assignment: &SplitAssignment,
) -> Result<SplitPlans> {
    let mut plans = SplitPlans {
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
    };
    if total_months >= window + horizon {
        for t in window..=(total_months - horizon) {
            let last_target = t + horizon - 1;
            for (range, bucket) in [
                (assignment.train, &mut plans.train),
                (assignment.val, &mut plans.val),
                (assignment.test, &mut plans.test),
            ] {
                if range.contains(t) && range.contains(last_target) {
                    bucket.push(t);
                }
            }
        }
    }
    if plans.total() == 0 {
        return Err(Error::Config(format!(
            "no valid window samples: {total_months} months with window {window} and horizon {horizon}"
        )));
    }
    Ok(plans)
}

/// One materialized training instance.
#[derive(Debug, Clone)]
pub struct WindowSample {
    /// (window, N, D)
    pub inputs: Array3<f64>,
    /// (horizon, N, 3) normalized log labels
    pub targets: Array3<f64>,
    pub first_target_month: MonthIndex,
}

/// Slice one sample out of the embedding panel `z` (T, N, D) and the
/// normalized label panel (T, N, 3).
pub fn materialize_sample(
    z: &Array3<f64>,
    labels_norm: &Array3<f64>,
    t: usize,
    window: usize,
    horizon: usize,
) -> WindowSample {
    let inputs = z.slice(s![t - window..t, .., ..]).to_owned();
    let targets = labels_norm.slice(s![t..t + horizon, .., ..]).to_owned();
    WindowSample {
        inputs,
        targets,
        first_target_month: MonthIndex(t),
    }
}

/// Materialize every sample of every split.
pub fn build_windows(
    z: &Array3<f64>,
    labels_norm: &Array3<f64>,
    config: &ExperimentConfig,
    assignment: &SplitAssignment,
) -> Result<(Vec<WindowSample>, Vec<WindowSample>, Vec<WindowSample>)> {
    let total_months = z.shape()[0];
    let plans = plan_windows(total_months, config.window_size, config.horizon, assignment)?;
    let mat = |ts: &[usize]| {
        ts.iter()
            .map(|&t| materialize_sample(z, labels_norm, t, config.window_size, config.horizon))
            .collect()
    };
    Ok((mat(&plans.train), mat(&plans.val), mat(&plans.test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SplitSpec;
    use crate::data::split::assign_splits;
    use proptest::prelude::*;

    #[test]
    fn ten_month_panel_has_two_samples() {
        // valid first-target months are exactly {6, 7}
        let assignment = assign_splits(10, &SplitSpec::new(3, 2, 5)).unwrap();
        let plans = plan_windows(10, 6, 3, &assignment).unwrap();
        assert!(plans.train.is_empty());
        assert!(plans.val.is_empty());
        assert_eq!(plans.test, vec![6, 7]);
    }

    #[test]
    fn paper_shaped_counts() {
        let assignment = assign_splits(67, &SplitSpec::new(51, 8, 8)).unwrap();
        let plans = plan_windows(67, 6, 3, &assignment).unwrap();
        assert_eq!(plans.train.len(), 43);
        assert_eq!(plans.val.len(), 6);
        assert_eq!(plans.test.len(), 6);
        assert_eq!(plans.train.first(), Some(&6));
        assert_eq!(plans.train.last(), Some(&48));
        assert_eq!(plans.val, vec![51, 52, 53, 54, 55, 56]);
        assert_eq!(plans.test, vec![59, 60, 61, 62, 63, 64]);
    }

    #[test]
    fn too_short_panel_is_error() {
        let assignment = assign_splits(8, &SplitSpec::new(4, 2, 2)).unwrap();
        assert!(plan_windows(8, 6, 3, &assignment).is_err());
    }

    #[test]
    fn materialized_shapes_and_leakage() {
        let t_total = 12;
        let n = 3;
        let d = 5;
        let z = Array3::from_shape_fn((t_total, n, d), |(t, r, k)| {
            (t * 100 + r * 10 + k) as f64
        });
        let labels = Array3::from_shape_fn((t_total, n, 3), |(t, r, k)| {
            (t * 100 + r * 10 + k) as f64
        });
        let s = materialize_sample(&z, &labels, 6, 6, 3);
        assert_eq!(s.inputs.shape(), &[6, 3, 5]);
        assert_eq!(s.targets.shape(), &[3, 3, 3]);
        // newest input month is 5, first target month is 6
        assert_eq!(s.inputs[[5, 0, 0]], 500.0);
        assert_eq!(s.targets[[0, 0, 0]], 600.0);
    }

    /// Brute-force enumerator written independently of plan_windows: walk
    /// every month, check window fit and split containment directly.
    fn brute_force(
        total: usize,
        window: usize,
        horizon: usize,
        a: &SplitAssignment,
    ) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
        let mut out = (Vec::new(), Vec::new(), Vec::new());
        for t in 0..total {
            if t < window {
                continue;
            }
            if t + horizon > total {
                continue;
            }
            let inside = |r: crate::data::records::MonthRange| {
                (t..t + horizon).all(|m| r.contains(m))
            };
            if inside(a.train) {
                out.0.push(t);
            } else if inside(a.val) {
                out.1.push(t);
            } else if inside(a.test) {
                out.2.push(t);
            }
        }
        out
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn matches_brute_force_enumeration(
            window in 3usize..=12,
            tr in 6usize..=20,
            va in 3usize..=10,
            te in 3usize..=10,
        ) {
            let total = tr + va + te;
            let assignment = assign_splits(total, &SplitSpec::new(tr, va, te)).unwrap();
            let expected = brute_force(total, window, 3, &assignment);
            match plan_windows(total, window, 3, &assignment) {
                Ok(plans) => {
                    prop_assert_eq!(plans.train, expected.0);
                    prop_assert_eq!(plans.val, expected.1);
                    prop_assert_eq!(plans.test, expected.2);
                }
                Err(_) => {
                    prop_assert!(expected.0.is_empty() && expected.1.is_empty() && expected.2.is_empty());
                }
            }
        }
    }
}
