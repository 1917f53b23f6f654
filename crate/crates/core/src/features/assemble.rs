//! Concatenation of reduced modality embeddings and the expanded label
//! history into one region-month embedding.

use std::collections::BTreeMap;
use std::ops::Range;

use crate::config::{ExperimentConfig, Modality};
use crate::error::{Error, Result};
use crate::types::{MonthIndex, RegionId};

/// One segment of the concatenated embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment {
    Modality(Modality),
    Label,
}

/// Fixed segment order under a config: active modalities in canonical order
/// (accessibility, human flow, airbnb), label history last. Inactive
/// modalities are skipped and the total width shrinks accordingly.
#[derive(Debug, Clone)]
pub struct SegmentLayout {
    segments: Vec<(Segment, Range<usize>)>,
    width: usize,
}

impl SegmentLayout {
    pub fn for_config(config: &ExperimentConfig) -> SegmentLayout {
        let mut segments = Vec::new();
        let mut offset = 0;
        for m in Modality::ALL {
            if config.modalities.contains(&m) {
                let w = config.dims.for_modality(m);
                segments.push((Segment::Modality(m), offset..offset + w));
                offset += w;
            }
        }
        segments.push((Segment::Label, offset..offset + config.dims.label));
        offset += config.dims.label;
        SegmentLayout {
            segments,
            width: offset,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn segments(&self) -> &[(Segment, Range<usize>)] {
        &self.segments
    }

    pub fn range_of(&self, segment: Segment) -> Option<Range<usize>> {
        self.segments
            .iter()
            .find(|(s, _)| *s == segment)
            .map(|(_, r)| r.clone())
    }
}

/// Concatenated embedding of one region-month.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMonthEmbedding {
    pub region: RegionId,
    pub month: MonthIndex,
    pub vector: Vec<f64>,
}

/// Concatenate reduced parts and the expanded label in canonical order.
/// Every active modality must be present with the configured width.
pub fn assemble_region_month(
    region: &RegionId,
    month: MonthIndex,
    parts: &BTreeMap<Modality, Vec<f64>>,
    expanded_label: &[f64],
    config: &ExperimentConfig,
) -> Result<RegionMonthEmbedding> {
    let layout = SegmentLayout::for_config(config);
    let mut vector = vec![0.0; layout.width()];
    for (segment, range) in layout.segments() {
        match segment {
            Segment::Modality(m) => {
                let part = parts.get(m).ok_or_else(|| {
                    Error::Assembly(format!("missing reduced part for modality {m}"))
                })?;
                if part.len() != range.len() {
                    return Err(Error::Assembly(format!(
                        "part for {m} has length {}, expected {}",
                        part.len(),
                        range.len()
                    )));
                }
                vector[range.clone()].copy_from_slice(part);
            }
            Segment::Label => {
                if expanded_label.len() != range.len() {
                    return Err(Error::Assembly(format!(
                        "expanded label has length {}, expected {}",
                        expanded_label.len(),
                        range.len()
                    )));
                }
                vector[range.clone()].copy_from_slice(expanded_label);
            }
        }
    }
    Ok(RegionMonthEmbedding {
        region: region.clone(),
        month,
        vector,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::default_config;

    fn region() -> RegionId {
        RegionId::new("D001").unwrap()
    }

    #[test]
    fn full_config_width_228() {
        let config = default_config();
        let layout = SegmentLayout::for_config(&config);
        assert_eq!(layout.width(), 228);
        assert_eq!(
            layout.range_of(Segment::Modality(Modality::Accessibility)),
            Some(0..48)
        );
        assert_eq!(
            layout.range_of(Segment::Modality(Modality::HumanFlow)),
            Some(48..96)
        );
        assert_eq!(
            layout.range_of(Segment::Modality(Modality::Airbnb)),
            Some(96..224)
        );
        assert_eq!(layout.range_of(Segment::Label), Some(224..228));
    }

    #[test]
    fn single_modality_width_52() {
        let mut config = default_config();
        config.modalities = [Modality::HumanFlow].into_iter().collect();
        let layout = SegmentLayout::for_config(&config);
        assert_eq!(layout.width(), 52);
        assert_eq!(
            layout.range_of(Segment::Modality(Modality::HumanFlow)),
            Some(0..48)
        );
        assert_eq!(layout.range_of(Segment::Modality(Modality::Airbnb)), None);
    }

    #[test]
    fn assembly_recovers_segments() {
        let config = default_config();
        let mut parts = BTreeMap::new();
        parts.insert(Modality::Accessibility, vec![1.0; 48]);
        parts.insert(Modality::HumanFlow, vec![2.0; 48]);
        parts.insert(Modality::Airbnb, vec![3.0; 128]);
        let label = vec![4.0; 4];
        let e =
            assemble_region_month(&region(), MonthIndex(5), &parts, &label, &config).unwrap();
        assert_eq!(e.vector.len(), 228);
        let layout = SegmentLayout::for_config(&config);
        for (seg, range) in layout.segments() {
            let expect = match seg {
                Segment::Modality(Modality::Accessibility) => 1.0,
                Segment::Modality(Modality::HumanFlow) => 2.0,
                Segment::Modality(Modality::Airbnb) => 3.0,
                Segment::Label => 4.0,
            };
            assert!(e.vector[range.clone()].iter().all(|v| *v == expect));
        }
    }

    #[test]
    fn missing_part_is_error() {
        let config = default_config();
        let mut parts = BTreeMap::new();
        parts.insert(Modality::Accessibility, vec![1.0; 48]);
        let err =
            assemble_region_month(&region(), MonthIndex(0), &parts, &[0.0; 4], &config);
        assert!(err.is_err());
    }

    #[test]
    fn mismatched_length_is_error() {
        let config = default_config();
        let mut parts = BTreeMap::new();
        parts.insert(Modality::Accessibility, vec![1.0; 47]);
        parts.insert(Modality::HumanFlow, vec![2.0; 48]);
        parts.insert(Modality::Airbnb, vec![3.0; 128]);
        let err =
            assemble_region_month(&region(), MonthIndex(0), &parts, &[0.0; 4], &config);
        assert!(err.is_err());
    }
}
