//! Region-month aggregation of listing records.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::types::{MonthIndex, RegionId};

use super::records::{
    AirbnbRegionSummary, BinarySummary, CategoricalSummary, ListingRecord, NumericStats,
    NumericSummary,
};
use super::schema::{LISTING_BINARY, LISTING_CATEGORICAL, LISTING_NUMERIC};

/// Mean of a non-empty slice.
pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Population standard deviation (divide by n). The whole crate uses this
/// convention; zero-variance cases are handled by callers that normalize.
pub fn population_std(values: &[f64]) -> f64 {
    let m = mean(values);
    (values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / values.len() as f64).sqrt()
}

/// Median; even-length inputs average the two middle values.
pub fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Linear-interpolation quantile of a non-empty slice, q in [0, 1].
pub fn quantile_linear(values: &[f64], q: f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Summarize all listings of one region-month: categorical value counts,
/// binary true counts, numeric {mean, std, median, min, max}. With-data
/// counts exclude missing values; missingness is data, not an error.
pub fn summarize_airbnb(
    region: &RegionId,
    month: MonthIndex,
    listings: &[ListingRecord],
) -> Result<AirbnbRegionSummary> {
    for l in listings {
        if l.region != *region || l.month != month {
            return Err(Error::Domain(format!(
                "listing {} belongs to {}@{}, not {}@{}",
                l.listing_id, l.region, l.month, region, month
            )));
        }
    }

    let mut categorical = BTreeMap::new();
    for var in LISTING_CATEGORICAL {
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        let mut with_data = 0;
        for l in listings {
            if let Some(v) = l.categorical(var.key) {
                *counts.entry(v.to_string()).or_insert(0) += 1;
                with_data += 1;
            }
        }
        categorical.insert(var.key.to_string(), CategoricalSummary { with_data, counts });
    }

    let mut binary = BTreeMap::new();
    for var in LISTING_BINARY {
        let mut true_count = 0;
        let mut with_data = 0;
        for l in listings {
            if let Some(v) = l.binary(var.key) {
                with_data += 1;
                if v {
                    true_count += 1;
                }
            }
        }
        binary.insert(var.key.to_string(), BinarySummary { with_data, true_count });
    }

    let mut numeric = BTreeMap::new();
    for var in LISTING_NUMERIC {
        let values: Vec<f64> = listings.iter().filter_map(|l| l.numeric(var.key)).collect();
        let stats = if values.is_empty() {
            None
        } else {
            Some(NumericStats {
                mean: mean(&values),
                std: population_std(&values),
                median: median(&values),
                min: values.iter().cloned().fold(f64::INFINITY, f64::min),
                max: values.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            })
        };
        numeric.insert(
            var.key.to_string(),
            NumericSummary {
                with_data: values.len(),
                stats,
            },
        );
    }

    let summary = AirbnbRegionSummary {
        region: region.clone(),
        month,
        total_listings: listings.len(),
        categorical,
        binary,
        numeric,
    };
    summary.validate()?;
    Ok(summary)
}
