//! Region selection and chronological splitting.

use std::collections::{BTreeMap, BTreeSet};

use crate::config::SplitSpec;
use crate::error::{Error, Result};
use crate::types::RegionId;

use super::records::{MonthRange, SplitAssignment};
use super::summary::quantile_linear;

/// Result of active-region selection.
#[derive(Debug, Clone)]
pub struct RegionSelection {
    pub selected: BTreeSet<RegionId>,
    /// The 75th-percentile threshold the means were compared against.
    pub threshold: f64,
    pub total_regions: usize,
}

/// Keep regions whose mean listing count strictly exceeds the 75th
/// percentile (linear-interpolation quantile) of the per-region means.
pub fn select_active_regions(means: &BTreeMap<RegionId, f64>) -> Result<RegionSelection> {
    if means.len() < 4 {
        return Err(Error::Config(format!(
            "region selection needs at least 4 regions, got {}",
            means.len()
        )));
    }
    let values: Vec<f64> = means.values().copied().collect();
    let threshold = quantile_linear(&values, 0.75);
    let selected = means
        .iter()
        .filter(|(_, &m)| m > threshold)
        .map(|(r, _)| r.clone())
        .collect();
    Ok(RegionSelection {
        selected,
        threshold,
        total_regions: means.len(),
    })
}

/// Contiguous chronological train/val/test ranges; the counts must cover the
/// panel exactly.
pub fn assign_splits(total_months: usize, split: &SplitSpec) -> Result<SplitAssignment> {
    if split.total() != total_months {
        return Err(Error::Config(format!(
            "split ({}, {}, {}) sums to {}, dataset has {total_months} months",
            split.train_months,
            split.val_months,
            split.test_months,
            split.total()
        )));
    }
    if split.train_months == 0 || split.val_months == 0 || split.test_months == 0 {
        return Err(Error::Config("every split must hold at least one month".into()));
    }
    let train = MonthRange {
        first: 0,
        last: split.train_months - 1,
    };
    let val = MonthRange {
        first: split.train_months,
        last: split.train_months + split.val_months - 1,
    };
    let test = MonthRange {
        first: val.last + 1,
        last: total_months - 1,
    };
    Ok(SplitAssignment { train, val, test })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn region(code: &str) -> RegionId {
        RegionId::new(code).unwrap()
    }

    #[test]
    fn selection_hand_example() {
        let means: BTreeMap<_, _> = [
            (region("A"), 30.0),
            (region("B"), 10.0),
            (region("C"), 22.0),
            (region("D"), 5.0),
        ]
        .into_iter()
        .collect();
        let sel = select_active_regions(&means).unwrap();
        assert_eq!(sel.threshold, 24.0);
        assert_eq!(sel.selected.len(), 1);
        assert!(sel.selected.contains(&region("A")));
    }

    #[test]
    fn equal_means_select_nothing() {
        let means: BTreeMap<_, _> = (0..6)
            .map(|i| (region(&format!("R{i}")), 7.0))
            .collect();
        let sel = select_active_regions(&means).unwrap();
        assert!(sel.selected.is_empty());
    }

    #[test]
    fn selection_is_order_invariant() {
        // BTreeMap canonicalizes order; feed the same data keyed differently
        let mut a = BTreeMap::new();
        let mut b = BTreeMap::new();
        let data = [("X", 4.0), ("Y", 9.0), ("Z", 1.0), ("W", 16.0), ("V", 25.0)];
        for (k, v) in data {
            a.insert(region(k), v);
        }
        for (k, v) in data.iter().rev() {
            b.insert(region(k), *v);
        }
        assert_eq!(
            select_active_regions(&a).unwrap().selected,
            select_active_regions(&b).unwrap().selected
        );
    }

    #[test]
    fn too_few_regions_rejected() {
        let means: BTreeMap<_, _> = [(region("A"), 1.0), (region("B"), 2.0)]
            .into_iter()
            .collect();
        assert!(select_active_regions(&means).is_err());
    }

    #[test]
    fn paper_shaped_split() {
        let s = assign_splits(67, &SplitSpec::new(51, 8, 8)).unwrap();
        assert_eq!(s.train, MonthRange { first: 0, last: 50 });
        assert_eq!(s.val, MonthRange { first: 51, last: 58 });
        assert_eq!(s.test, MonthRange { first: 59, last: 66 });
    }

    #[test]
    fn small_split() {
        let s = assign_splits(12, &SplitSpec::new(6, 3, 3)).unwrap();
        assert_eq!(s.train, MonthRange { first: 0, last: 5 });
        assert_eq!(s.val, MonthRange { first: 6, last: 8 });
        assert_eq!(s.test, MonthRange { first: 9, last: 11 });
    }

    #[test]
    fn sum_mismatch_rejected() {
        assert!(assign_splits(10, &SplitSpec::new(6, 3, 3)).is_err());
    }
}
