//! Record types at the region-month grain.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::types::{MonthIndex, RegionId};

/// One listing in one month. Any feature may be missing.
#[derive(Debug, Clone, PartialEq)]
pub struct ListingRecord {
    pub listing_id: String,
    pub region: RegionId,
    pub month: MonthIndex,
    pub available_days: Option<f64>,
    pub blocked_days: Option<f64>,
    pub property_type: Option<String>,
    pub listing_type: Option<String>,
    pub bedrooms: Option<f64>,
    pub bathrooms: Option<f64>,
    pub max_guests: Option<f64>,
    pub response_rate: Option<f64>,
    pub response_time: Option<String>,
    pub superhost: Option<bool>,
    pub cancellation_policy: Option<String>,
    pub checkin_time: Option<String>,
    pub checkout_time: Option<String>,
    pub minimum_stay: Option<f64>,
    pub num_photos: Option<f64>,
    pub instantbook: Option<bool>,
    pub pets_allowed: Option<bool>,
    pub property_manager: Option<bool>,
    pub overall_rating: Option<f64>,
    pub num_reviews: Option<f64>,
}

impl ListingRecord {
    /// A record with every feature missing.
    pub fn new(listing_id: impl Into<String>, region: RegionId, month: MonthIndex) -> Self {
        ListingRecord {
            listing_id: listing_id.into(),
            region,
            month,
            available_days: None,
            blocked_days: None,
            property_type: None,
            listing_type: None,
            bedrooms: None,
            bathrooms: None,
            max_guests: None,
            response_rate: None,
            response_time: None,
            superhost: None,
            cancellation_policy: None,
            checkin_time: None,
            checkout_time: None,
            minimum_stay: None,
            num_photos: None,
            instantbook: None,
            pets_allowed: None,
            property_manager: None,
            overall_rating: None,
            num_reviews: None,
        }
    }

    pub fn numeric(&self, key: &str) -> Option<f64> {
        match key {
            "available_days" => self.available_days,
            "blocked_days" => self.blocked_days,
            "bedrooms" => self.bedrooms,
            "bathrooms" => self.bathrooms,
            "max_guests" => self.max_guests,
            "response_rate" => self.response_rate,
            "minimum_stay" => self.minimum_stay,
            "num_photos" => self.num_photos,
            "overall_rating" => self.overall_rating,
            "num_reviews" => self.num_reviews,
            _ => None,
        }
    }

    pub fn categorical(&self, key: &str) -> Option<&str> {
        match key {
            "property_type" => self.property_type.as_deref(),
            "listing_type" => self.listing_type.as_deref(),
            "response_time" => self.response_time.as_deref(),
            "cancellation_policy" => self.cancellation_policy.as_deref(),
            "checkin_time" => self.checkin_time.as_deref(),
            "checkout_time" => self.checkout_time.as_deref(),
            _ => None,
        }
    }

    pub fn binary(&self, key: &str) -> Option<bool> {
        match key {
            "superhost" => self.superhost,
            "instantbook" => self.instantbook,
            "pets_allowed" => self.pets_allowed,
            "property_manager" => self.property_manager,
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for key in crate::data::schema::LISTING_NUMERIC {
            if let Some(v) = self.numeric(key.key) {
                if !v.is_finite() {
                    return Err(Error::Domain(format!(
                        "listing {} field {} is not finite",
                        self.listing_id, key.key
                    )));
                }
            }
        }
        if let (Some(a), Some(b)) = (self.available_days, self.blocked_days) {
            if a + b > 31.0 {
                return Err(Error::Domain(format!(
                    "listing {}: available + blocked days {} exceeds 31",
                    self.listing_id,
                    a + b
                )));
            }
        }
        Ok(())
    }
}

/// Named numeric variables for one region-month; shared shape of the
/// accessibility and human-flow tables.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericRecord {
    pub region: RegionId,
    pub month: MonthIndex,
    pub values: BTreeMap<String, f64>,
}

impl NumericRecord {
    pub fn zero_filled(region: RegionId, month: MonthIndex, names: &[String]) -> Self {
        NumericRecord {
            region,
            month,
            values: names.iter().map(|n| (n.clone(), 0.0)).collect(),
        }
    }

    pub fn validate(&self, table: &str) -> Result<()> {
        for (name, v) in &self.values {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::Domain(format!(
                    "{table} variable {name} for {}@{} must be finite and >= 0, got {v}",
                    self.region, self.month
                )));
            }
        }
        Ok(())
    }
}

pub type AccessibilityRecord = NumericRecord;
pub type HumanFlowRecord = NumericRecord;

/// Population statistics of one numeric listing feature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericStats {
    pub mean: f64,
    pub std: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NumericSummary {
    pub with_data: usize,
    /// None when no listing carried the feature.
    pub stats: Option<NumericStats>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CategoricalSummary {
    pub with_data: usize,
    pub counts: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BinarySummary {
    pub with_data: usize,
    pub true_count: usize,
}

/// Statistical summary of all listings in one region-month, the source of
/// the Airbnb prompt.
#[derive(Debug, Clone, PartialEq)]
pub struct AirbnbRegionSummary {
    pub region: RegionId,
    pub month: MonthIndex,
    pub total_listings: usize,
    pub categorical: BTreeMap<String, CategoricalSummary>,
    pub binary: BTreeMap<String, BinarySummary>,
    pub numeric: BTreeMap<String, NumericSummary>,
}

impl AirbnbRegionSummary {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Domain(msg));
        for (k, c) in &self.categorical {
            if c.with_data > self.total_listings {
                return bad(format!("categorical {k}: with_data exceeds total"));
            }
            if c.counts.values().sum::<usize>() != c.with_data {
                return bad(format!("categorical {k}: counts do not sum to with_data"));
            }
        }
        for (k, b) in &self.binary {
            if b.with_data > self.total_listings || b.true_count > b.with_data {
                return bad(format!("binary {k}: counts inconsistent"));
            }
        }
        for (k, n) in &self.numeric {
            if n.with_data > self.total_listings {
                return bad(format!("numeric {k}: with_data exceeds total"));
            }
            if let Some(s) = &n.stats {
                if !(s.min <= s.median && s.median <= s.max) || s.std < 0.0 {
                    return bad(format!("numeric {k}: stats out of order"));
                }
            }
        }
        Ok(())
    }
}

/// Train-split normalization statistics. Label stats are over
/// log-transformed values; feature stats exist only on the tabular path.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NormStats {
    pub label_mean: [f64; 3],
    pub label_std: [f64; 3],
    #[serde(default)]
    pub feature_mean: Vec<f64>,
    #[serde(default)]
    pub feature_std: Vec<f64>,
}

impl NormStats {
    pub fn identity() -> Self {
        NormStats {
            label_mean: [0.0; 3],
            label_std: [1.0; 3],
            feature_mean: Vec::new(),
            feature_std: Vec::new(),
        }
    }
}

/// Contiguous inclusive month range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct MonthRange {
    pub first: usize,
    pub last: usize,
}

impl MonthRange {
    pub fn contains(&self, m: usize) -> bool {
        self.first <= m && m <= self.last
    }

    pub fn len(&self) -> usize {
        self.last - self.first + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Chronological train/validation/test ranges covering all months.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SplitAssignment {
    pub train: MonthRange,
    pub val: MonthRange,
    pub test: MonthRange,
}
