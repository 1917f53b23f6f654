//! Label transformation: log(1 + y) then z-score, statistics from the
//! training split only.

use crate::error::{Error, Result};
use crate::types::{LabelTriple, NUM_TARGETS};

use super::records::NormStats;

/// Fit per-target mean/std of log-transformed labels. Zero variance is
/// replaced by 1 so constant targets normalize to zero instead of blowing up.
pub fn fit_label_stats(train_labels: &[LabelTriple]) -> Result<NormStats> {
    if train_labels.is_empty() {
        return Err(Error::Domain("cannot fit label stats on no labels".into()));
    }
    let mut mean = [0.0; NUM_TARGETS];
    let mut std = [0.0; NUM_TARGETS];
    for t in 0..NUM_TARGETS {
        let logs: Vec<f64> = train_labels
            .iter()
            .map(|l| {
                let v = l.as_array()[t];
                v.ln_1p()
            })
            .collect();
        let m = super::summary::mean(&logs);
        let s = super::summary::population_std(&logs);
        mean[t] = m;
        std[t] = if s > 0.0 { s } else { 1.0 };
    }
    Ok(NormStats {
        label_mean: mean,
        label_std: std,
        feature_mean: Vec::new(),
        feature_std: Vec::new(),
    })
}

/// y' = (log(1 + y) - mu) / sigma per target. Errors on negative raw values.
pub fn transform_labels(raw: &LabelTriple, stats: &NormStats) -> Result<LabelTriple> {
    raw.validate_raw()?;
    let a = raw.as_array();
    let mut out = [0.0; NUM_TARGETS];
    for t in 0..NUM_TARGETS {
        out[t] = (a[t].ln_1p() - stats.label_mean[t]) / stats.label_std[t];
    }
    Ok(LabelTriple::from_array(out))
}

/// Inverse of [`transform_labels`]: y = exp(y' sigma + mu) - 1.
pub fn inverse_transform_labels(normalized: &LabelTriple, stats: &NormStats) -> LabelTriple {
    let a = normalized.as_array();
    let mut out = [0.0; NUM_TARGETS];
    for t in 0..NUM_TARGETS {
        out[t] = (a[t] * stats.label_std[t] + stats.label_mean[t]).exp_m1();
    }
    LabelTriple::from_array(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_with_identity_stats_maps_to_zero() {
        let stats = NormStats::identity();
        let out = transform_labels(&LabelTriple::new(0.0, 0.0, 0.0), &stats).unwrap();
        assert_eq!(out.as_array(), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn two_point_zscores() {
        // raw {0, e - 1} -> log1p {0, 1} -> mean 0.5, population std 0.5
        let labels = vec![
            LabelTriple::new(0.0, 0.0, 0.0),
            LabelTriple::new(std::f64::consts::E - 1.0, 0.0, 0.0),
        ];
        let stats = fit_label_stats(&labels).unwrap();
        assert!((stats.label_mean[0] - 0.5).abs() < 1e-12);
        assert!((stats.label_std[0] - 0.5).abs() < 1e-12);
        let lo = transform_labels(&labels[0], &stats).unwrap();
        let hi = transform_labels(&labels[1], &stats).unwrap();
        assert!((lo.reservation_days + 1.0).abs() < 1e-12);
        assert!((hi.reservation_days - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_variance_uses_unit_sigma() {
        let labels = vec![LabelTriple::new(5.0, 5.0, 5.0); 4];
        let stats = fit_label_stats(&labels).unwrap();
        assert_eq!(stats.label_std, [1.0; 3]);
        let z = transform_labels(&labels[0], &stats).unwrap();
        assert_eq!(z.as_array(), [0.0; 3]);
    }

    #[test]
    fn negative_raw_rejected() {
        let stats = NormStats::identity();
        assert!(transform_labels(&LabelTriple::new(-1.0, 0.0, 0.0), &stats).is_err());
    }

    #[test]
    fn round_trip_specific_value() {
        let stats = NormStats {
            label_mean: [2.0, 5.0, 1.0],
            label_std: [0.7, 2.0, 1.3],
            feature_mean: vec![],
            feature_std: vec![],
        };
        let raw = LabelTriple::new(1234.5, 1234.5, 1234.5);
        let back = inverse_transform_labels(&transform_labels(&raw, &stats).unwrap(), &stats);
        for (a, b) in raw.as_array().iter().zip(back.as_array()) {
            assert!((a - b).abs() <= 1e-9 * a.abs());
        }
    }

    proptest! {
        // forward then inverse is identity within 1e-9 relative
        #[test]
        fn round_trip_random(
            v in prop::collection::vec(0.0f64..1e7, 3),
            mu in prop::collection::vec(-3.0f64..3.0, 3),
            sd in prop::collection::vec(0.1f64..4.0, 3),
        ) {
            let stats = NormStats {
                label_mean: [mu[0], mu[1], mu[2]],
                label_std: [sd[0], sd[1], sd[2]],
                feature_mean: vec![],
                feature_std: vec![],
            };
            let raw = LabelTriple::new(v[0], v[1], v[2]);
            let back = inverse_transform_labels(&transform_labels(&raw, &stats).unwrap(), &stats);
            for (a, b) in raw.as_array().iter().zip(back.as_array()) {
                prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
            }
        }
    }
}
