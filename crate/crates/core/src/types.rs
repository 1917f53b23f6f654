//! Domain types shared across the pipeline: regions, calendar months and the
//! three forecast targets.
//!
//! All data in this crate lives on the region-month grid. A [`RegionId`]
//! identifies one administrative district (dong), a [`MonthIndex`] one
//! calendar month relative to the dataset start, and a [`LabelTriple`] the
//! three market indicators predicted for each cell.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Opaque identifier of one administrative district (dong).
///
/// Codes are non-empty, unique within a dataset and stable across months.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RegionId(String);

impl RegionId {
    pub fn new(code: impl Into<String>) -> Result<Self> {
        let code = code.into();
        if code.is_empty() {
            return Err(Error::Domain("region code must be non-empty".into()));
        }
        Ok(RegionId(code))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RegionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A calendar month, parsed from and rendered as `YYYY-MM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CalendarMonth {
    pub year: i32,
    pub month: u8,
}

impl CalendarMonth {
    pub fn new(year: i32, month: u8) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::MonthParse(format!("{year}-{month:02}")));
        }
        Ok(CalendarMonth { year, month })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::MonthParse(s.to_string());
        let (y, m) = s.split_once('-').ok_or_else(bad)?;
        if y.len() != 4 || m.len() != 2 {
            return Err(bad());
        }
        let year: i32 = y.parse().map_err(|_| bad())?;
        let month: u8 = m.parse().map_err(|_| bad())?;
        CalendarMonth::new(year, month).map_err(|_| bad())
    }

    /// Whole months from `self` to `other`; negative if `other` is earlier.
    pub fn months_until(&self, other: &CalendarMonth) -> i64 {
        (other.year as i64 - self.year as i64) * 12 + (other.month as i64 - self.month as i64)
    }

    /// The month `k` whole months after `self`.
    pub fn plus_months(&self, k: usize) -> CalendarMonth {
        let total = self.year as i64 * 12 + (self.month as i64 - 1) + k as i64;
        CalendarMonth {
            year: (total.div_euclid(12)) as i32,
            month: (total.rem_euclid(12) + 1) as u8,
        }
    }
}

impl fmt::Display for CalendarMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

/// Zero-based month offset from the dataset's start month.
///
/// Panels are gap-free by construction: index and calendar are bijective
/// given the start month, so the index doubles as an array position.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct MonthIndex(pub usize);

impl MonthIndex {
    pub fn get(&self) -> usize {
        self.0
    }
}

impl fmt::Display for MonthIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Number of whole months between `start` and `month`.
///
/// Errors if `month` is before `start`.
pub fn month_index_from_calendar(start: &CalendarMonth, month: &CalendarMonth) -> Result<MonthIndex> {
    let diff = start.months_until(month);
    if diff < 0 {
        return Err(Error::MonthRange {
            start: start.to_string(),
            month: month.to_string(),
        });
    }
    Ok(MonthIndex(diff as usize))
}

/// Calendar month at offset `index` from `start`. Inverse of
/// [`month_index_from_calendar`].
pub fn calendar_of(start: &CalendarMonth, index: MonthIndex) -> CalendarMonth {
    start.plus_months(index.0)
}

/// Number of forecast targets (reservation days, revenue, reservations).
pub const NUM_TARGETS: usize = 3;

/// Canonical target names, in tensor axis order.
pub const TARGET_NAMES: [&str; NUM_TARGETS] = ["reservation_days", "revenue", "num_reservations"];

/// The three forecast targets for one region-month.
///
/// Values are reals: raw counts are integers but aggregates and normalized
/// values are fractional.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct LabelTriple {
    pub reservation_days: f64,
    pub revenue: f64,
    pub num_reservations: f64,
}

impl LabelTriple {
    pub fn new(reservation_days: f64, revenue: f64, num_reservations: f64) -> Self {
        LabelTriple {
            reservation_days,
            revenue,
            num_reservations,
        }
    }

    pub fn as_array(&self) -> [f64; NUM_TARGETS] {
        [self.reservation_days, self.revenue, self.num_reservations]
    }

    pub fn from_array(a: [f64; NUM_TARGETS]) -> Self {
        LabelTriple::new(a[0], a[1], a[2])
    }

    /// Raw-space labels must be finite and non-negative.
    pub fn validate_raw(&self) -> Result<()> {
        for (name, v) in TARGET_NAMES.iter().zip(self.as_array()) {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Domain(format!(
                    "label {name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn month_index_identity() {
        let start = CalendarMonth::parse("2017-01").unwrap();
        assert_eq!(
            month_index_from_calendar(&start, &start).unwrap(),
            MonthIndex(0)
        );
    }

    #[test]
    fn month_index_dataset_span() {
        // 67 months in total implies indices 0..66.
        let start = CalendarMonth::parse("2017-01").unwrap();
        let end = CalendarMonth::parse("2022-07").unwrap();
        assert_eq!(
            month_index_from_calendar(&start, &end).unwrap(),
            MonthIndex(66)
        );
    }

    #[test]
    fn month_index_across_year_boundary() {
        let start = CalendarMonth::parse("2017-11").unwrap();
        let month = CalendarMonth::parse("2018-02").unwrap();
        assert_eq!(
            month_index_from_calendar(&start, &month).unwrap(),
            MonthIndex(3)
        );
    }

    #[test]
    fn month_before_start_is_range_error() {
        let start = CalendarMonth::parse("2018-01").unwrap();
        let month = CalendarMonth::parse("2017-12").unwrap();
        assert!(month_index_from_calendar(&start, &month).is_err());
    }

    #[test]
    fn bad_calendar_strings_rejected() {
        for s in ["2017", "2017-13", "17-01", "2017-1", "2017-00", "x"] {
            assert!(CalendarMonth::parse(s).is_err(), "accepted {s:?}");
        }
    }

    #[test]
    fn empty_region_rejected() {
        assert!(RegionId::new("").is_err());
    }

    #[test]
    fn negative_label_rejected() {
        let l = LabelTriple::new(1.0, -0.5, 2.0);
        assert!(l.validate_raw().is_err());
    }

    proptest! {
        // Round-trip: index -> calendar -> index for offsets 0..1000.
        #[test]
        fn month_round_trip(k in 0usize..1000, y in 1990i32..2100, m in 1u8..=12) {
            let start = CalendarMonth::new(y, m).unwrap();
            let cal = calendar_of(&start, MonthIndex(k));
            let idx = month_index_from_calendar(&start, &cal).unwrap();
            prop_assert_eq!(idx, MonthIndex(k));
        }
    }
}
