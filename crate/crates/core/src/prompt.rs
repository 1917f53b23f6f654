//! Text prompt rendering for region-month records.
//!
//! Every prompt is a deterministic function of its record: variables render
//! in the frozen order of `data::schema`, counts without decimals, measured
//! values with exactly two. Golden files pin the exact bytes.

use crate::data::records::{AirbnbRegionSummary, NumericRecord};
use crate::data::schema::{
    Render, ACCESSIBILITY_VARS, AGE_BANDS, HUMAN_FLOW_VARS, LISTING_BINARY, LISTING_CATEGORICAL,
    LISTING_NUMERIC,
};
use crate::types::{CalendarMonth, MonthIndex, RegionId};

pub const BLOCK_SEPARATOR: &str =
    "-----------------------------------------------------------";

/// Which of the three per-region-month prompts this is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PromptKind {
    Accessibility,
    HumanFlow,
    Airbnb,
}

impl PromptKind {
    /// Directory name used when dumping prompts to disk.
    pub fn dir_name(&self) -> &'static str {
        match self {
            PromptKind::Accessibility => "accessibility",
            PromptKind::HumanFlow => "human_flow",
            PromptKind::Airbnb => "airbnb",
        }
    }
}

/// One rendered prompt.
#[derive(Debug, Clone, PartialEq)]
pub struct Prompt {
    pub kind: PromptKind,
    pub region: RegionId,
    pub month: MonthIndex,
    pub text: String,
}

/// Counts render without decimals when integral; measured values always get
/// two decimal places.
fn fmt_value(v: f64, render: Render) -> String {
    match render {
        Render::Integer if v.fract() == 0.0 => format!("{v:.0}"),
        _ => format!("{v:.2}"),
    }
}

fn header(calendar: &CalendarMonth, region: &RegionId, title: &str) -> String {
    format!("[{calendar} | {region}] {title}:")
}

/// Variables not in the canonical schema render after it, sorted by key.
fn extra_lines(record: &NumericRecord, canonical: &[&str], out: &mut String) {
    for (key, value) in &record.values {
        if !canonical.contains(&key.as_str()) {
            out.push_str(&format!("{key}: {}\n", fmt_value(*value, Render::Real2)));
        }
    }
}

/// Accessibility prompt: one value line per variable, with total road count
/// and total length sharing a line.
pub fn render_accessibility(record: &NumericRecord, calendar: &CalendarMonth) -> Prompt {
    let mut text = header(calendar, &record.region, "Accessibility Summary");
    text.push('\n');
    let value = |key: &str| record.values.get(key).copied().unwrap_or(0.0);
    let mut i = 0;
    while i < ACCESSIBILITY_VARS.len() {
        let var = &ACCESSIBILITY_VARS[i];
        if var.key == "total_roads" {
            let length = &ACCESSIBILITY_VARS[i + 1];
            debug_assert_eq!(length.key, "total_road_length");
            text.push_str(&format!(
                "{}: {}, {}: {}\n",
                var.display,
                fmt_value(value(var.key), var.render),
                length.display,
                fmt_value(value(length.key), length.render),
            ));
            i += 2;
            continue;
        }
        text.push_str(&format!(
            "{}: {}\n",
            var.display,
            fmt_value(value(var.key), var.render)
        ));
        i += 1;
    }
    let canonical: Vec<&str> = ACCESSIBILITY_VARS.iter().map(|v| v.key).collect();
    extra_lines(record, &canonical, &mut text);
    Prompt {
        kind: PromptKind::Accessibility,
        region: record.region.clone(),
        month: record.month,
        text,
    }
}

/// Human-flow prompt: total population, the age/gender grid one line per
/// band, then foreign long/short stayers.
pub fn render_human_flow(record: &NumericRecord, calendar: &CalendarMonth) -> Prompt {
    let mut text = header(calendar, &record.region, "Human Flow Summary");
    text.push('\n');
    let value = |key: &str| record.values.get(key).copied().unwrap_or(0.0);
    text.push_str(&format!(
        "Total Domestic Floating Population: {}\n",
        fmt_value(value("hf_total"), Render::Real2)
    ));
    for band in AGE_BANDS {
        let male = value(&format!("hf_{band}_male"));
        let female = value(&format!("hf_{band}_female"));
        text.push_str(&format!(
            "Domestic Floating Population by Age and Gender {band} Male: {}, Female: {}\n",
            fmt_value(male, Render::Real2),
            fmt_value(female, Render::Real2),
        ));
    }
    text.push_str(&format!(
        "Long-Term Foreign Residents: {}\n",
        fmt_value(value("hf_foreign_longterm"), Render::Real2)
    ));
    text.push_str(&format!(
        "Short-Term Foreign Visitors: {}\n",
        fmt_value(value("hf_foreign_shortterm"), Render::Real2)
    ));
    let canonical: Vec<&str> = HUMAN_FLOW_VARS.iter().map(|v| v.key).collect();
    extra_lines(record, &canonical, &mut text);
    Prompt {
        kind: PromptKind::HumanFlow,
        region: record.region.clone(),
        month: record.month,
        text,
    }
}

/// Airbnb prompt following the structured template: count header, then the
/// Category / Binary / Numerical blocks with separator lines.
pub fn render_airbnb(summary: &AirbnbRegionSummary, calendar: &CalendarMonth) -> Prompt {
    let mut text = header(calendar, &summary.region, "Airbnb Feature Summary");
    text.push('\n');
    text.push_str(&format!("Total number of AirBnBs: {}\n", summary.total_listings));
    text.push('\n');

    text.push_str("Category Column Attributes:\n");
    if summary.total_listings > 0 {
        for var in LISTING_CATEGORICAL {
            let Some(cat) = summary.categorical.get(var.key) else {
                continue;
            };
            text.push_str(&format!(
                "Category: {} Information: Total number with data: {}\n",
                var.display, cat.with_data
            ));
            for (value, count) in &cat.counts {
                text.push_str(&format!("  - {value}: {count}\n"));
            }
        }
    }
    text.push_str(BLOCK_SEPARATOR);
    text.push('\n');

    text.push_str("Binary Column Attributes:\n");
    if summary.total_listings > 0 {
        for var in LISTING_BINARY {
            let Some(bin) = summary.binary.get(var.key) else {
                continue;
            };
            text.push_str(&format!(
                "{} Information: Total number with data: {}\n",
                var.display, bin.with_data
            ));
            text.push_str(&format!(
                "  - Number of {}: {}\n",
                var.display, bin.true_count
            ));
        }
    }
    text.push_str(BLOCK_SEPARATOR);
    text.push('\n');

    text.push_str("Numerical Column Attributes:\n");
    if summary.total_listings > 0 {
        for var in LISTING_NUMERIC {
            let Some(num) = summary.numeric.get(var.key) else {
                continue;
            };
            text.push_str(&format!(
                "{} Information: Total number with data: {}\n",
                var.display, num.with_data
            ));
            // a variable nobody carried keeps its with-data line but has no
            // statistics to report
            if let Some(stats) = &num.stats {
                text.push_str(&format!("  - Mean: {}\n", fmt_value(stats.mean, Render::Real2)));
                text.push_str(&format!(
                    "  - Std Dev: {}\n",
                    fmt_value(stats.std, Render::Real2)
                ));
                text.push_str(&format!(
                    "  - Median: {}\n",
                    fmt_value(stats.median, Render::Real2)
                ));
                text.push_str(&format!("  - Min: {}\n", fmt_value(stats.min, Render::Real2)));
                text.push_str(&format!("  - Max: {}\n", fmt_value(stats.max, Render::Real2)));
            }
        }
    }

    Prompt {
        kind: PromptKind::Airbnb,
        region: summary.region.clone(),
        month: summary.month,
        text,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::records::{
        BinarySummary, CategoricalSummary, NumericStats, NumericSummary,
    };
    use crate::data::summarize_airbnb;
    use crate::data::records::ListingRecord;
    use std::collections::BTreeMap;

    fn region() -> RegionId {
        RegionId::new("D001").unwrap()
    }

    fn month() -> CalendarMonth {
        CalendarMonth::parse("2019-03").unwrap()
    }

    fn record(values: &[(&str, f64)]) -> NumericRecord {
        NumericRecord {
            region: region(),
            month: MonthIndex(2),
            values: values
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect(),
        }
    }

    #[test]
    fn accessibility_example_sentence() {
        let rec = record(&[("total_roads", 102.0), ("total_road_length", 15032.77)]);
        let p = render_accessibility(&rec, &month());
        assert!(
            p.text
                .contains("Total number of roads in the dong: 102, Total length: 15032.77"),
            "{}",
            p.text
        );
        assert!(p.text.starts_with("[2019-03 | D001] Accessibility Summary:\n"));
    }

    #[test]
    fn accessibility_zero_record_formats() {
        let rec = record(&[]);
        let p = render_accessibility(&rec, &month());
        assert!(p.text.contains("Total number of roads in the dong: 0, Total length: 0.00"));
        assert!(p.text.contains("Number of tunnels: 0\n"));
    }

    #[test]
    fn human_flow_example_sentence() {
        let rec = record(&[("hf_20s_male", 687.54), ("hf_20s_female", 555.01)]);
        let p = render_human_flow(&rec, &month());
        assert!(
            p.text.contains(
                "Domestic Floating Population by Age and Gender 20s Male: 687.54, Female: 555.01"
            ),
            "{}",
            p.text
        );
    }

    #[test]
    fn human_flow_zero_visitors() {
        let rec = record(&[]);
        let p = render_human_flow(&rec, &month());
        assert!(p.text.contains("Short-Term Foreign Visitors: 0.00\n"));
    }

    #[test]
    fn renders_are_deterministic() {
        let rec = record(&[("total_roads", 10.0), ("bridges", 2.0)]);
        let a = render_accessibility(&rec, &month());
        let b = render_accessibility(&rec, &month());
        assert_eq!(a.text, b.text);
    }

    #[test]
    fn airbnb_template_hand_golden() {
        // one categorical, one binary, one numeric variable, stats by hand
        let mut categorical = BTreeMap::new();
        categorical.insert(
            "property_type".to_string(),
            CategoricalSummary {
                with_data: 3,
                counts: [("Apt".to_string(), 2), ("House".to_string(), 1)]
                    .into_iter()
                    .collect(),
            },
        );
        let mut binary = BTreeMap::new();
        binary.insert(
            "superhost".to_string(),
            BinarySummary {
                with_data: 3,
                true_count: 2,
            },
        );
        let mut numeric = BTreeMap::new();
        numeric.insert(
            "bedrooms".to_string(),
            NumericSummary {
                with_data: 3,
                stats: Some(NumericStats {
                    mean: 2.0,
                    std: 0.816496580927726,
                    median: 2.0,
                    min: 1.0,
                    max: 3.0,
                }),
            },
        );
        let summary = AirbnbRegionSummary {
            region: region(),
            month: MonthIndex(2),
            total_listings: 3,
            categorical,
            binary,
            numeric,
        };
        let p = render_airbnb(&summary, &month());
        let expected = "\
[2019-03 | D001] Airbnb Feature Summary:
Total number of AirBnBs: 3

Category Column Attributes:
Category: Property Type Information: Total number with data: 3
  - Apt: 2
  - House: 1
-----------------------------------------------------------
Binary Column Attributes:
Airbnb Superhost Information: Total number with data: 3
  - Number of Airbnb Superhost: 2
-----------------------------------------------------------
Numerical Column Attributes:
Bedrooms Information: Total number with data: 3
  - Mean: 2.00
  - Std Dev: 0.82
  - Median: 2.00
  - Min: 1.00
  - Max: 3.00
";
        assert_eq!(p.text, expected);
    }

    #[test]
    fn airbnb_empty_summary() {
        let summary = AirbnbRegionSummary {
            region: region(),
            month: MonthIndex(2),
            total_listings: 0,
            categorical: BTreeMap::new(),
            binary: BTreeMap::new(),
            numeric: BTreeMap::new(),
        };
        let p = render_airbnb(&summary, &month());
        let expected = "\
[2019-03 | D001] Airbnb Feature Summary:
Total number of AirBnBs: 0

Category Column Attributes:
-----------------------------------------------------------
Binary Column Attributes:
-----------------------------------------------------------
Numerical Column Attributes:
";
        assert_eq!(p.text, expected);
    }

    #[test]
    fn airbnb_full_summary_matches_template_grammar() {
        let mut listings = Vec::new();
        for i in 0..4 {
            let mut l = ListingRecord::new(format!("L{i}"), region(), MonthIndex(2));
            l.property_type = Some(if i < 2 { "Apartment" } else { "House" }.to_string());
            l.superhost = if i == 3 { None } else { Some(i % 2 == 0) };
            l.bedrooms = Some(1.0 + i as f64);
            l.num_reviews = Some(10.0 * i as f64);
            listings.push(l);
        }
        let summary = summarize_airbnb(&region(), MonthIndex(2), &listings).unwrap();
        let p = render_airbnb(&summary, &month());

        let pattern = concat!(
            r"^\[\d{4}-\d{2} \| [^\]]+\] Airbnb Feature Summary:\n",
            r"Total number of AirBnBs: \d+\n",
            r"\n",
            r"Category Column Attributes:\n",
            r"(Category: [^\n]+ Information: Total number with data: \d+\n(  - [^\n]+: \d+\n)*)*",
            r"-{59}\n",
            r"Binary Column Attributes:\n",
            r"([^\n]+ Information: Total number with data: \d+\n  - Number of [^\n]+: \d+\n)*",
            r"-{59}\n",
            r"Numerical Column Attributes:\n",
            r"([^\n]+ Information: Total number with data: \d+\n",
            r"(  - Mean: -?\d+\.\d{2}\n  - Std Dev: \d+\.\d{2}\n  - Median: -?\d+\.\d{2}\n",
            r"  - Min: -?\d+\.\d{2}\n  - Max: -?\d+\.\d{2}\n)?)*$",
        );
        let grammar = regex::Regex::new(pattern).unwrap();
        assert!(grammar.is_match(&p.text), "prompt does not match grammar:\n{}", p.text);
    }

    #[test]
    fn small_value_change_alters_text() {
        // values on the 2-decimal grid: a bump of >= 0.01 must change output
        let a = record(&[("total_road_length", 15032.77)]);
        let b = record(&[("total_road_length", 15032.78)]);
        assert_ne!(
            render_accessibility(&a, &month()).text,
            render_accessibility(&b, &month()).text
        );
    }
}
