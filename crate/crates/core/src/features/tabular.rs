//! Raw tabular features for the no-LLM baseline path.
//!
//! Listing features are aggregated at the region level: numeric variables
//! as means over listings with data, categorical variables one-hot encoded
//! on the training-split vocabulary and summed (value counts), binary
//! variables as true counts. Accessibility and human-flow variables pass
//! through as-is when those modalities are active. Everything is z-scored
//! on training statistics.

use std::collections::BTreeSet;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::config::Modality;
use crate::data::load::Panel;
use crate::data::records::MonthRange;
use crate::data::schema::{LISTING_BINARY, LISTING_CATEGORICAL, LISTING_NUMERIC};
use crate::error::{Error, Result};

/// Column layout of the baseline feature vector, frozen from the training
/// split. Categorical vocabularies only contain values seen in training;
/// unseen values at val/test map to an all-zero one-hot (and are logged).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub columns: Vec<String>,
    pub modalities: Vec<Modality>,
}

impl FeatureSchema {
    pub fn width(&self) -> usize {
        self.columns.len()
    }
}

/// Build the schema from training months only.
pub fn build_feature_schema(
    panel: &Panel,
    train: MonthRange,
    modalities: &BTreeSet<Modality>,
) -> Result<FeatureSchema> {
    if train.last >= panel.months {
        return Err(Error::Config(format!(
            "training range ends at {} but panel has {} months",
            train.last, panel.months
        )));
    }
    let mut columns = Vec::new();
    if modalities.contains(&Modality::Accessibility) {
        if let Some(first) = panel.accessibility.first().and_then(|row| row.first()) {
            for name in first.values.keys() {
                columns.push(format!("acc.{name}"));
            }
        }
    }
    if modalities.contains(&Modality::HumanFlow) {
        if let Some(first) = panel.human_flow.first().and_then(|row| row.first()) {
            for name in first.values.keys() {
                columns.push(format!("hf.{name}"));
            }
        }
    }
    if modalities.contains(&Modality::Airbnb) {
        columns.push("airbnb.total_listings".to_string());
        for var in LISTING_NUMERIC {
            columns.push(format!("airbnb.num.{}", var.key));
        }
        for var in LISTING_BINARY {
            columns.push(format!("airbnb.bin.{}", var.key));
        }
        for var in LISTING_CATEGORICAL {
            // training vocabulary, sorted for stable column order
            let mut vocab: BTreeSet<String> = BTreeSet::new();
            for m in train.first..=train.last {
                for cell in &panel.listings[m] {
                    for listing in cell {
                        if let Some(v) = listing.categorical(var.key) {
                            vocab.insert(v.to_string());
                        }
                    }
                }
            }
            for value in vocab {
                columns.push(format!("airbnb.cat.{}={value}", var.key));
            }
        }
    }
    Ok(FeatureSchema {
        columns,
        modalities: modalities.iter().copied().collect(),
    })
}

/// Raw (un-normalized) feature vector for one region-month cell.
pub fn feature_vector(panel: &Panel, month: usize, region_pos: usize, schema: &FeatureSchema) -> Vec<f64> {
    let listings = &panel.listings[month][region_pos];
    let mut unseen: Vec<String> = Vec::new();
    let mut out = Vec::with_capacity(schema.columns.len());
    for column in &schema.columns {
        let v = if let Some(name) = column.strip_prefix("acc.") {
            panel.accessibility[month][region_pos]
                .values
                .get(name)
                .copied()
                .unwrap_or(0.0)
        } else if let Some(name) = column.strip_prefix("hf.") {
            panel.human_flow[month][region_pos]
                .values
                .get(name)
                .copied()
                .unwrap_or(0.0)
        } else if column == "airbnb.total_listings" {
            listings.len() as f64
        } else if let Some(key) = column.strip_prefix("airbnb.num.") {
            let values: Vec<f64> = listings.iter().filter_map(|l| l.numeric(key)).collect();
            if values.is_empty() {
                0.0
            } else {
                crate::data::summary::mean(&values)
            }
        } else if let Some(key) = column.strip_prefix("airbnb.bin.") {
            listings
                .iter()
                .filter(|l| l.binary(key) == Some(true))
                .count() as f64
        } else if let Some(rest) = column.strip_prefix("airbnb.cat.") {
            let (key, value) = rest.split_once('=').expect("categorical column shape");
            listings
                .iter()
                .filter(|l| l.categorical(key) == Some(value))
                .count() as f64
        } else {
            0.0
        };
        out.push(v);
    }
    // note values outside the training vocabulary
    for var in LISTING_CATEGORICAL {
        for l in listings {
            if let Some(v) = l.categorical(var.key) {
                let col = format!("airbnb.cat.{}={v}", var.key);
                if schema.modalities.contains(&Modality::Airbnb)
                    && !schema.columns.contains(&col)
                {
                    unseen.push(col);
                }
            }
        }
    }
    if !unseen.is_empty() {
        unseen.sort();
        unseen.dedup();
        log::info!(
            "month {month}: categorical values outside training vocabulary mapped to zero: {}",
            unseen.join(", ")
        );
    }
    out
}

/// Feature matrix over all cells, row = month * N + region, z-scored on the
/// training months. Returns the matrix and the (mean, std) used.
pub fn feature_matrix(
    panel: &Panel,
    schema: &FeatureSchema,
    train: MonthRange,
) -> (Array2<f64>, Vec<f64>, Vec<f64>) {
    let n = panel.regions.len();
    let width = schema.width();
    let mut raw = Array2::zeros((panel.months * n, width));
    for m in 0..panel.months {
        for r in 0..n {
            let v = feature_vector(panel, m, r, schema);
            for (c, val) in v.into_iter().enumerate() {
                raw[[m * n + r, c]] = val;
            }
        }
    }
    // train-only statistics
    let train_rows: Vec<usize> = (train.first..=train.last)
        .flat_map(|m| (0..n).map(move |r| m * n + r))
        .collect();
    let mut mean = vec![0.0; width];
    let mut std = vec![0.0; width];
    for c in 0..width {
        let values: Vec<f64> = train_rows.iter().map(|&row| raw[[row, c]]).collect();
        let mu = crate::data::summary::mean(&values);
        let sigma = crate::data::summary::population_std(&values);
        mean[c] = mu;
        std[c] = if sigma > 0.0 { sigma } else { 1.0 };
    }
    for ((_, c), v) in raw.indexed_iter_mut() {
        *v = (*v - mean[c]) / std[c];
    }
    (raw, mean, std)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::records::ListingRecord;
    use crate::data::{generate_synthetic, load_panel, DatasetPaths, SchemaMap, SignalSpec};
    use crate::types::MonthIndex;

    fn synth_panel() -> Panel {
        let dir = tempfile::tempdir().unwrap();
        generate_synthetic(dir.path(), 5, 14, 21, &SignalSpec::default()).unwrap();
        load_panel(&DatasetPaths::in_dir(dir.path()), &SchemaMap::default()).unwrap()
    }

    #[test]
    fn vocabulary_from_train_months_only() {
        let mut panel = synth_panel();
        // plant a categorical value that exists only after training months
        let region = panel.regions[0].clone();
        let mut l = ListingRecord::new("LX", region, MonthIndex(12));
        l.property_type = Some("Castle".to_string());
        panel.listings[12][0].push(l);
        let train = MonthRange { first: 0, last: 9 };
        let schema =
            build_feature_schema(&panel, train, &[Modality::Airbnb].into_iter().collect())
                .unwrap();
        assert!(
            !schema.columns.iter().any(|c| c.contains("Castle")),
            "unseen value leaked into vocabulary"
        );
        // the unseen value contributes nothing (all-zero one-hot)
        let v = feature_vector(&panel, 12, 0, &schema);
        assert_eq!(v.len(), schema.width());
    }

    #[test]
    fn column_count_is_numeric_plus_vocab_sizes() {
        let panel = synth_panel();
        let train = MonthRange {
            first: 0,
            last: panel.months - 1,
        };
        let schema =
            build_feature_schema(&panel, train, &[Modality::Airbnb].into_iter().collect())
                .unwrap();
        let vocab_total: usize = schema
            .columns
            .iter()
            .filter(|c| c.starts_with("airbnb.cat."))
            .count();
        assert_eq!(
            schema.width(),
            1 + LISTING_NUMERIC.len() + LISTING_BINARY.len() + vocab_total
        );
    }

    #[test]
    fn zscoring_uses_train_stats() {
        let panel = synth_panel();
        let train = MonthRange { first: 0, last: 9 };
        let schema = build_feature_schema(
            &panel,
            train,
            &[Modality::Airbnb, Modality::HumanFlow].into_iter().collect(),
        )
        .unwrap();
        let (matrix, mean, std) = feature_matrix(&panel, &schema, train);
        // training rows of each column have mean ~0 and std ~1 (or constant 0)
        let n = panel.regions.len();
        for c in 0..schema.width() {
            let mut values = Vec::new();
            for m in 0..=9 {
                for r in 0..n {
                    values.push(matrix[[m * n + r, c]]);
                }
            }
            let mu = crate::data::summary::mean(&values);
            assert!(mu.abs() < 1e-9, "column {c} train mean {mu}");
        }
        assert_eq!(mean.len(), schema.width());
        assert!(std.iter().all(|s| *s > 0.0));
    }
}
