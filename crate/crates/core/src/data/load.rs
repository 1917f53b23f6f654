//! CSV ingestion: the four raw tables, densified to a gap-free
//! region-by-month panel.
//!
//! Windowing correctness depends on month contiguity, so densification
//! happens here: missing accessibility/human-flow cells are zero-filled and
//! flagged, missing listing months yield empty listing sets.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::types::{month_index_from_calendar, CalendarMonth, LabelTriple, MonthIndex, RegionId};

use super::records::{ListingRecord, NumericRecord};
use super::schema::{LABEL_COLUMNS, LISTING_FEATURE_COLUMNS};

/// Paths of the four tables.
#[derive(Debug, Clone)]
pub struct DatasetPaths {
    pub listings: PathBuf,
    pub accessibility: PathBuf,
    pub human_flow: PathBuf,
    pub labels: PathBuf,
}

impl DatasetPaths {
    /// The standard file names under one dataset directory.
    pub fn in_dir(dir: &Path) -> Self {
        DatasetPaths {
            listings: dir.join("listings.csv"),
            accessibility: dir.join("accessibility.csv"),
            human_flow: dir.join("human_flow.csv"),
            labels: dir.join("labels.csv"),
        }
    }
}

/// Binds source column names to canonical variable names, one table per
/// section; unmapped columns resolve to themselves.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default)]
pub struct SchemaMap {
    pub listings: BTreeMap<String, String>,
    pub accessibility: BTreeMap<String, String>,
    pub human_flow: BTreeMap<String, String>,
    pub labels: BTreeMap<String, String>,
}

impl SchemaMap {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&text).map_err(|e| Error::Toml(e.to_string()))
    }

    fn canonical<'a>(map: &'a BTreeMap<String, String>, source: &'a str) -> &'a str {
        // mapping entries are canonical = "source"; invert on lookup
        for (canonical, src) in map {
            if src == source {
                return canonical;
            }
        }
        source
    }
}

/// Dense region-by-month panel of all four tables.
///
/// `listings[m][r]`, `accessibility[m][r]`, `human_flow[m][r]` and
/// `labels[m][r]` index month `m` and region position `r` in `regions`
/// (sorted by region code).
#[derive(Debug, Clone)]
pub struct Panel {
    pub start: CalendarMonth,
    pub months: usize,
    pub regions: Vec<RegionId>,
    pub listings: Vec<Vec<Vec<ListingRecord>>>,
    pub accessibility: Vec<Vec<NumericRecord>>,
    pub human_flow: Vec<Vec<NumericRecord>>,
    pub labels: Vec<Vec<LabelTriple>>,
    /// Cells (month, region position) that were zero-filled.
    pub missing_accessibility: BTreeSet<(usize, usize)>,
    pub missing_human_flow: BTreeSet<(usize, usize)>,
    pub missing_labels: BTreeSet<(usize, usize)>,
}

impl Panel {
    pub fn region_position(&self, region: &RegionId) -> Option<usize> {
        self.regions.binary_search(region).ok()
    }

    pub fn calendar(&self, month: usize) -> CalendarMonth {
        self.start.plus_months(month)
    }

    /// Mean listing count per region over all months.
    pub fn mean_listing_counts(&self) -> BTreeMap<RegionId, f64> {
        let mut out = BTreeMap::new();
        for (r, region) in self.regions.iter().enumerate() {
            let total: usize = (0..self.months).map(|m| self.listings[m][r].len()).sum();
            out.insert(region.clone(), total as f64 / self.months as f64);
        }
        out
    }

    /// Restrict the panel to `keep`, preserving region order.
    pub fn filter_regions(&self, keep: &BTreeSet<RegionId>) -> Panel {
        let positions: Vec<usize> = self
            .regions
            .iter()
            .enumerate()
            .filter(|(_, r)| keep.contains(r))
            .map(|(i, _)| i)
            .collect();
        let remap = |set: &BTreeSet<(usize, usize)>| {
            set.iter()
                .filter_map(|(m, r)| positions.iter().position(|p| p == r).map(|nr| (*m, nr)))
                .collect()
        };
        Panel {
            start: self.start,
            months: self.months,
            regions: positions.iter().map(|&i| self.regions[i].clone()).collect(),
            listings: self
                .listings
                .iter()
                .map(|row| positions.iter().map(|&i| row[i].clone()).collect())
                .collect(),
            accessibility: self
                .accessibility
                .iter()
                .map(|row| positions.iter().map(|&i| row[i].clone()).collect())
                .collect(),
            human_flow: self
                .human_flow
                .iter()
                .map(|row| positions.iter().map(|&i| row[i].clone()).collect())
                .collect(),
            labels: self
                .labels
                .iter()
                .map(|row| positions.iter().map(|&i| row[i].clone()).collect())
                .collect(),
            missing_accessibility: remap(&self.missing_accessibility),
            missing_human_flow: remap(&self.missing_human_flow),
            missing_labels: remap(&self.missing_labels),
        }
    }
}

struct RawTable {
    /// (region, calendar month) -> row values by column position
    rows: Vec<(RegionId, CalendarMonth, csv::StringRecord, usize)>,
    headers: Vec<String>,
}

fn read_table(path: &Path, map: &BTreeMap<String, String>) -> Result<RawTable> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(false)
        .from_path(path)
        .map_err(|e| Error::Ingest {
            file: path.to_path_buf(),
            row: 0,
            message: e.to_string(),
        })?;
    let headers: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| SchemaMap::canonical(map, h).to_string())
        .collect();
    let region_col = headers
        .iter()
        .position(|h| h == "region")
        .ok_or_else(|| Error::Ingest {
            file: path.to_path_buf(),
            row: 1,
            message: "missing required column: region".into(),
        })?;
    let month_col = headers
        .iter()
        .position(|h| h == "month")
        .ok_or_else(|| Error::Ingest {
            file: path.to_path_buf(),
            row: 1,
            message: "missing required column: month".into(),
        })?;

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row_no = i + 2; // header is row 1
        let record = record?;
        let region = RegionId::new(record.get(region_col).unwrap_or("")).map_err(|e| {
            Error::Ingest {
                file: path.to_path_buf(),
                row: row_no,
                message: e.to_string(),
            }
        })?;
        let month = CalendarMonth::parse(record.get(month_col).unwrap_or("")).map_err(|e| {
            Error::Ingest {
                file: path.to_path_buf(),
                row: row_no,
                message: e.to_string(),
            }
        })?;
        rows.push((region, month, record, row_no));
    }
    Ok(RawTable { rows, headers })
}

fn parse_f64(path: &Path, row: usize, col: &str, raw: &str) -> Result<f64> {
    raw.trim().parse::<f64>().map_err(|_| Error::Ingest {
        file: path.to_path_buf(),
        row,
        message: format!("column {col}: cannot parse number from {raw:?}"),
    })
}

fn parse_opt_f64(path: &Path, row: usize, col: &str, raw: &str) -> Result<Option<f64>> {
    if raw.trim().is_empty() {
        return Ok(None);
    }
    parse_f64(path, row, col, raw).map(Some)
}

fn parse_opt_bool(path: &Path, row: usize, col: &str, raw: &str) -> Result<Option<bool>> {
    match raw.trim() {
        "" => Ok(None),
        "true" | "True" | "TRUE" | "1" => Ok(Some(true)),
        "false" | "False" | "FALSE" | "0" => Ok(Some(false)),
        other => Err(Error::Ingest {
            file: path.to_path_buf(),
            row,
            message: format!("column {col}: cannot parse boolean from {other:?}"),
        }),
    }
}

fn parse_opt_string(raw: &str) -> Option<String> {
    let t = raw.trim();
    if t.is_empty() {
        None
    } else {
        Some(t.to_string())
    }
}

/// Load and densify the four tables into a [`Panel`].
///
/// The month range is the union across files; the region universe is the
/// union of regions seen anywhere.
pub fn load_panel(paths: &DatasetPaths, schema: &SchemaMap) -> Result<Panel> {
    let listings_raw = read_table(&paths.listings, &schema.listings)?;
    let acc_raw = read_table(&paths.accessibility, &schema.accessibility)?;
    let hf_raw = read_table(&paths.human_flow, &schema.human_flow)?;
    let labels_raw = read_table(&paths.labels, &schema.labels)?;

    // listings: reject columns that are neither keys nor canonical features
    for h in &listings_raw.headers {
        if h != "region"
            && h != "month"
            && h != "listing_id"
            && !LISTING_FEATURE_COLUMNS.contains(&h.as_str())
        {
            return Err(Error::Ingest {
                file: paths.listings.clone(),
                row: 1,
                message: format!("unknown column {h:?}"),
            });
        }
    }
    for h in &labels_raw.headers {
        if h != "region" && h != "month" && !LABEL_COLUMNS.contains(&h.as_str()) {
            return Err(Error::Ingest {
                file: paths.labels.clone(),
                row: 1,
                message: format!("unknown column {h:?}"),
            });
        }
    }

    // global month range and region universe
    let mut all_months: Vec<CalendarMonth> = Vec::new();
    let mut regions: BTreeSet<RegionId> = BTreeSet::new();
    for table in [&listings_raw, &acc_raw, &hf_raw, &labels_raw] {
        for (region, month, _, _) in &table.rows {
            all_months.push(*month);
            regions.insert(region.clone());
        }
    }
    let start = *all_months
        .iter()
        .min()
        .ok_or_else(|| Error::Domain("dataset contains no rows".into()))?;
    let end = *all_months.iter().max().unwrap();
    let months = start.months_until(&end) as usize + 1;
    let regions: Vec<RegionId> = regions.into_iter().collect();
    let n = regions.len();
    let pos_of = |r: &RegionId| regions.binary_search(r).unwrap();

    // listings
    let mut listings: Vec<Vec<Vec<ListingRecord>>> = vec![vec![Vec::new(); n]; months];
    {
        let headers = &listings_raw.headers;
        let id_col = headers
            .iter()
            .position(|h| h == "listing_id")
            .ok_or_else(|| Error::Ingest {
                file: paths.listings.clone(),
                row: 1,
                message: "missing required column: listing_id".into(),
            })?;
        let col = |name: &str| headers.iter().position(|h| h == name);
        let mut seen: HashSet<(RegionId, usize, String)> = HashSet::new();
        for (region, month, record, row_no) in &listings_raw.rows {
            let m = month_index_from_calendar(&start, month)?.get();
            let id = record.get(id_col).unwrap_or("").trim().to_string();
            if id.is_empty() {
                return Err(Error::Ingest {
                    file: paths.listings.clone(),
                    row: *row_no,
                    message: "empty listing_id".into(),
                });
            }
            if !seen.insert((region.clone(), m, id.clone())) {
                return Err(Error::Ingest {
                    file: paths.listings.clone(),
                    row: *row_no,
                    message: format!(
                        "duplicate listing row ({region}, {month}, {id})"
                    ),
                });
            }
            let mut l = ListingRecord::new(id, region.clone(), MonthIndex(m));
            let path = &paths.listings;
            let get = |name: &str| col(name).and_then(|c| record.get(c)).unwrap_or("");
            l.available_days = parse_opt_f64(path, *row_no, "available_days", get("available_days"))?;
            l.blocked_days = parse_opt_f64(path, *row_no, "blocked_days", get("blocked_days"))?;
            l.property_type = parse_opt_string(get("property_type"));
            l.listing_type = parse_opt_string(get("listing_type"));
            l.bedrooms = parse_opt_f64(path, *row_no, "bedrooms", get("bedrooms"))?;
            l.bathrooms = parse_opt_f64(path, *row_no, "bathrooms", get("bathrooms"))?;
            l.max_guests = parse_opt_f64(path, *row_no, "max_guests", get("max_guests"))?;
            l.response_rate = parse_opt_f64(path, *row_no, "response_rate", get("response_rate"))?;
            l.response_time = parse_opt_string(get("response_time"));
            l.superhost = parse_opt_bool(path, *row_no, "superhost", get("superhost"))?;
            l.cancellation_policy = parse_opt_string(get("cancellation_policy"));
            l.checkin_time = parse_opt_string(get("checkin_time"));
            l.checkout_time = parse_opt_string(get("checkout_time"));
            l.minimum_stay = parse_opt_f64(path, *row_no, "minimum_stay", get("minimum_stay"))?;
            l.num_photos = parse_opt_f64(path, *row_no, "num_photos", get("num_photos"))?;
            l.instantbook = parse_opt_bool(path, *row_no, "instantbook", get("instantbook"))?;
            l.pets_allowed = parse_opt_bool(path, *row_no, "pets_allowed", get("pets_allowed"))?;
            l.property_manager =
                parse_opt_bool(path, *row_no, "property_manager", get("property_manager"))?;
            l.overall_rating = parse_opt_f64(path, *row_no, "overall_rating", get("overall_rating"))?;
            l.num_reviews = parse_opt_f64(path, *row_no, "num_reviews", get("num_reviews"))?;
            l.validate().map_err(|e| Error::Ingest {
                file: paths.listings.clone(),
                row: *row_no,
                message: e.to_string(),
            })?;
            listings[m][pos_of(region)].push(l);
        }
    }

    // numeric tables
    let load_numeric = |raw: &RawTable,
                        path: &Path,
                        table: &str|
     -> Result<(Vec<Vec<Option<NumericRecord>>>, Vec<String>)> {
        let var_names: Vec<String> = raw
            .headers
            .iter()
            .filter(|h| *h != "region" && *h != "month")
            .cloned()
            .collect();
        let mut grid: Vec<Vec<Option<NumericRecord>>> = vec![vec![None; n]; months];
        for (region, month, record, row_no) in &raw.rows {
            let m = month_index_from_calendar(&start, month)?.get();
            let r = pos_of(region);
            if grid[m][r].is_some() {
                return Err(Error::Ingest {
                    file: path.to_path_buf(),
                    row: *row_no,
                    message: format!("duplicate {table} row for ({region}, {month})"),
                });
            }
            let mut values = BTreeMap::new();
            for (h, raw_v) in raw.headers.iter().zip(record.iter()) {
                if h == "region" || h == "month" {
                    continue;
                }
                values.insert(h.clone(), parse_f64(path, *row_no, h, raw_v)?);
            }
            let rec = NumericRecord {
                region: region.clone(),
                month: MonthIndex(m),
                values,
            };
            rec.validate(table).map_err(|e| Error::Ingest {
                file: path.to_path_buf(),
                row: *row_no,
                message: e.to_string(),
            })?;
            grid[m][r] = Some(rec);
        }
        Ok((grid, var_names))
    };

    let (acc_grid, acc_names) = load_numeric(&acc_raw, &paths.accessibility, "accessibility")?;
    let (hf_grid, hf_names) = load_numeric(&hf_raw, &paths.human_flow, "human flow")?;

    let mut missing_accessibility = BTreeSet::new();
    let mut accessibility = Vec::with_capacity(months);
    for (m, row) in acc_grid.into_iter().enumerate() {
        let mut out = Vec::with_capacity(n);
        for (r, cell) in row.into_iter().enumerate() {
            match cell {
                Some(rec) => out.push(rec),
                None => {
                    missing_accessibility.insert((m, r));
                    out.push(NumericRecord::zero_filled(
                        regions[r].clone(),
                        MonthIndex(m),
                        &acc_names,
                    ));
                }
            }
        }
        accessibility.push(out);
    }
    let mut missing_human_flow = BTreeSet::new();
    let mut human_flow = Vec::with_capacity(months);
    for (m, row) in hf_grid.into_iter().enumerate() {
        let mut out = Vec::with_capacity(n);
        for (r, cell) in row.into_iter().enumerate() {
            match cell {
                Some(rec) => out.push(rec),
                None => {
                    missing_human_flow.insert((m, r));
                    out.push(NumericRecord::zero_filled(
                        regions[r].clone(),
                        MonthIndex(m),
                        &hf_names,
                    ));
                }
            }
        }
        human_flow.push(out);
    }

    // labels
    let mut label_grid: Vec<Vec<Option<LabelTriple>>> = vec![vec![None; n]; months];
    {
        let headers = &labels_raw.headers;
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Ingest {
                    file: paths.labels.clone(),
                    row: 1,
                    message: format!("missing required column: {name}"),
                })
        };
        let (c_rd, c_rev, c_nr) = (
            col("reservation_days")?,
            col("revenue")?,
            col("num_reservations")?,
        );
        for (region, month, record, row_no) in &labels_raw.rows {
            let m = month_index_from_calendar(&start, month)?.get();
            let r = pos_of(region);
            if label_grid[m][r].is_some() {
                return Err(Error::Ingest {
                    file: paths.labels.clone(),
                    row: *row_no,
                    message: format!("duplicate labels row for ({region}, {month})"),
                });
            }
            let v = |c: usize, name: &str| {
                parse_f64(&paths.labels, *row_no, name, record.get(c).unwrap_or(""))
            };
            let triple = LabelTriple::new(
                v(c_rd, "reservation_days")?,
                v(c_rev, "revenue")?,
                v(c_nr, "num_reservations")?,
            );
            triple.validate_raw().map_err(|e| Error::Ingest {
                file: paths.labels.clone(),
                row: *row_no,
                message: e.to_string(),
            })?;
            label_grid[m][r] = Some(triple);
        }
    }
    let mut missing_labels = BTreeSet::new();
    let mut labels = Vec::with_capacity(months);
    for (m, row) in label_grid.into_iter().enumerate() {
        let mut out = Vec::with_capacity(n);
        for (r, cell) in row.into_iter().enumerate() {
            match cell {
                Some(t) => out.push(t),
                None => {
                    missing_labels.insert((m, r));
                    out.push(LabelTriple::default());
                }
            }
        }
        labels.push(out);
    }
    if !missing_labels.is_empty() {
        log::warn!(
            "{} label cells missing; zero-filled and flagged",
            missing_labels.len()
        );
    }

    Ok(Panel {
        start,
        months,
        regions,
        listings,
        accessibility,
        human_flow,
        labels,
        missing_accessibility,
        missing_human_flow,
        missing_labels,
    })
}
