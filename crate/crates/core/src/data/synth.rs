//! Schema-compatible synthetic dataset generator.
//!
//! Labels follow a documented closed form per region `i`, month `m` and
//! target `k`:
//!
//! ```text
//! core(i, m)    = label_base[i] + trend_slope[i] * m
//!                 + season_amplitude * sin(2*pi*m/12 + phase[i])
//! signal(i, m)  = hf_contribution * sum_v coeff_v * hf_v(i, m)
//! label_k(i, m) = max(0, target_scale_k * (core + signal + eps_k)),
//!                 eps_k ~ N(0, label_noise_std^2)
//! ```
//!
//! with `target_scale = (0.6, 150.0, 0.35)`. The designated human-flow
//! variables `hf_v` evolve smoothly (their own trend, 12-month seasonality
//! and small noise), so the label signal is recoverable from human-flow
//! history but only noisily from label history. With zero noise and zero
//! `hf_contribution`, labels equal the trend + seasonality closed form
//! exactly.
//!
//! Generation is deterministic given the seed; rerunning produces
//! byte-identical files.

use std::f64::consts::TAU;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::types::{CalendarMonth, RegionId};

use super::schema::{ACCESSIBILITY_VARS, HUMAN_FLOW_VARS, LISTING_FEATURE_COLUMNS};

/// Scales mapping the shared core process onto the three targets.
pub const TARGET_SCALES: [f64; 3] = [0.6, 150.0, 0.35];

/// Shape of the planted signal.
#[derive(Debug, Clone)]
pub struct SignalSpec {
    /// Std of the per-(region, month, target) label noise.
    pub label_noise_std: f64,
    /// Scale of the linear human-flow contribution; 0 removes it.
    pub hf_contribution: f64,
    /// Designated human-flow variables and their coefficients.
    pub hf_signal_vars: Vec<(String, f64)>,
    /// Range of per-region label trend slopes.
    pub trend_slope_range: (f64, f64),
    pub season_amplitude: f64,
    /// Std of the noise on the designated human-flow variables.
    pub hf_noise_std: f64,
    /// Probability that an optional listing feature is missing.
    pub listing_missing_rate: f64,
}

impl Default for SignalSpec {
    fn default() -> Self {
        SignalSpec {
            label_noise_std: 6.0,
            hf_contribution: 0.08,
            hf_signal_vars: vec![
                ("hf_foreign_shortterm".to_string(), 1.0),
                ("hf_20s_female".to_string(), 0.6),
            ],
            trend_slope_range: (-0.5, 0.5),
            season_amplitude: 5.0,
            hf_noise_std: 4.0,
            listing_missing_rate: 0.05,
        }
    }
}

/// Per-region parameters drawn by the generator; returned so tests can
/// evaluate the closed form independently.
#[derive(Debug, Clone)]
pub struct SynthRegionParams {
    pub region: RegionId,
    pub listing_level: f64,
    pub label_base: f64,
    pub trend_slope: f64,
    pub phase: f64,
}

#[derive(Debug, Clone)]
pub struct SynthSummary {
    pub regions: Vec<SynthRegionParams>,
    pub start: CalendarMonth,
    pub months: usize,
}

const SYNTH_START: &str = "2019-01";

struct HfVarParams {
    base: f64,
    slope: f64,
    amp: f64,
    phase: f64,
}

/// Deterministic core process (no noise, no human-flow term).
pub fn core_process(params: &SynthRegionParams, month: usize, spec: &SignalSpec) -> f64 {
    params.label_base
        + params.trend_slope * month as f64
        + spec.season_amplitude * (TAU * month as f64 / 12.0 + params.phase).sin()
}

fn fmt(v: f64) -> String {
    // full-precision round-trip form keeps reruns byte-identical and lets
    // tests compare parsed values exactly
    format!("{v}")
}

/// Generate the four tables under `out_dir`.
pub fn generate_synthetic(
    out_dir: &Path,
    regions: usize,
    months: usize,
    seed: u64,
    spec: &SignalSpec,
) -> Result<SynthSummary> {
    if regions < 4 {
        return Err(Error::Config(format!(
            "synthetic generation needs at least 4 regions, got {regions}"
        )));
    }
    // default window (6) + horizon (3) + 3
    if months < 12 {
        return Err(Error::Config(format!(
            "synthetic generation needs at least 12 months, got {months}"
        )));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let start = CalendarMonth::parse(SYNTH_START).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // region parameters, drawn in region order
    let mut region_params = Vec::with_capacity(regions);
    for i in 0..regions {
        let region = RegionId::new(format!("D{:03}", i + 1)).unwrap();
        let listing_level = rng.gen_range(4.0..44.0);
        let label_base = 15.0 + 0.9 * listing_level + rng.gen_range(0.0..15.0);
        let trend_slope = rng.gen_range(spec.trend_slope_range.0..spec.trend_slope_range.1);
        let phase = rng.gen_range(0.0..TAU);
        region_params.push(SynthRegionParams {
            region,
            listing_level,
            label_base,
            trend_slope,
            phase,
        });
    }

    // human-flow variable parameters per region
    let hf_keys: Vec<&str> = HUMAN_FLOW_VARS.iter().map(|v| v.key).collect();
    let mut hf_params: Vec<Vec<HfVarParams>> = Vec::with_capacity(regions);
    for _ in 0..regions {
        let mut per_var = Vec::with_capacity(hf_keys.len());
        for key in &hf_keys {
            let designated = spec.hf_signal_vars.iter().any(|(k, _)| k == key);
            let (base, slope, amp) = if designated {
                (
                    rng.gen_range(250.0..750.0),
                    rng.gen_range(-2.5..2.5),
                    90.0,
                )
            } else {
                (rng.gen_range(100.0..900.0), rng.gen_range(-0.5..0.5), 15.0)
            };
            per_var.push(HfVarParams {
                base,
                slope,
                amp,
                phase: rng.gen_range(0.0..TAU),
            });
        }
        hf_params.push(per_var);
    }

    // accessibility: near-static per region
    let acc_keys: Vec<&str> = ACCESSIBILITY_VARS.iter().map(|v| v.key).collect();
    let mut acc_base: Vec<Vec<f64>> = Vec::with_capacity(regions);
    for p in &region_params {
        let mut per_var = Vec::with_capacity(acc_keys.len());
        for key in &acc_keys {
            let v = match *key {
                "total_road_length" => rng.gen_range(4000.0..30000.0),
                "bus_boarding" | "bus_alighting" | "subway_boarding" | "subway_alighting" => {
                    rng.gen_range(1000.0..80000.0) + 200.0 * p.listing_level
                }
                "road_nodes_near_listings" => rng.gen_range(10.0..300.0),
                "total_roads" => rng.gen_range(40.0..400.0),
                "tunnels" | "bridges" => rng.gen_range(0.0..6.0),
                _ => rng.gen_range(2.0..120.0), // per road type counts
            };
            per_var.push(v.floor());
        }
        acc_base.push(per_var);
    }

    // precompute human-flow values so labels can reference them
    let mut hf_values: Vec<Vec<Vec<f64>>> = vec![vec![vec![0.0; hf_keys.len()]; months]; regions];
    for (i, per_var) in hf_params.iter().enumerate() {
        for m in 0..months {
            for (v, p) in per_var.iter().enumerate() {
                let designated = spec
                    .hf_signal_vars
                    .iter()
                    .any(|(k, _)| k == hf_keys[v]);
                let noise_std = if designated { spec.hf_noise_std } else { 3.0 };
                let noise: f64 = sample_normal(&mut rng) * noise_std;
                let val =
                    p.base + p.slope * m as f64 + p.amp * (TAU * m as f64 / 12.0 + p.phase).sin()
                        + noise;
                hf_values[i][m][v] = val.max(0.0);
            }
        }
    }
    // hf_total = sum of the age/gender grid
    let total_idx = hf_keys.iter().position(|k| *k == "hf_total").unwrap();
    for region in hf_values.iter_mut() {
        for row in region.iter_mut() {
            let sum: f64 = hf_keys
                .iter()
                .enumerate()
                .filter(|(_, k)| k.ends_with("_male") || k.ends_with("_female"))
                .map(|(v, _)| row[v])
                .sum();
            row[total_idx] = sum;
        }
    }

    // labels
    let mut label_rows: Vec<(String, String, [f64; 3])> = Vec::new();
    for (i, p) in region_params.iter().enumerate() {
        for m in 0..months {
            let core = core_process(p, m, spec);
            let mut signal = 0.0;
            for (key, coeff) in &spec.hf_signal_vars {
                if let Some(v) = hf_keys.iter().position(|k| k == key) {
                    signal += coeff * hf_values[i][m][v];
                }
            }
            signal *= spec.hf_contribution;
            let mut labels = [0.0; 3];
            for (k, scale) in TARGET_SCALES.iter().enumerate() {
                let eps = sample_normal(&mut rng) * spec.label_noise_std;
                labels[k] = (scale * (core + signal + eps)).max(0.0);
            }
            label_rows.push((
                p.region.to_string(),
                start.plus_months(m).to_string(),
                labels,
            ));
        }
    }

    // listings
    let property_types = ["Apartment", "House", "Condo", "Villa"];
    let listing_types = ["Entire home/apt", "Private room", "Shared room"];
    let response_times = ["within an hour", "within a day", "a few days or more"];
    let policies = ["Flexible", "Moderate", "Strict"];
    let checkins = ["14:00", "15:00", "16:00"];
    let checkouts = ["10:00", "11:00", "12:00"];

    let mut listing_lines: Vec<String> = Vec::new();
    for p in &region_params {
        for m in 0..months {
            let seasonal = 1.0 + 0.15 * (TAU * m as f64 / 12.0 + p.phase).sin();
            let count = (p.listing_level * seasonal + sample_normal(&mut rng)).round().max(1.0)
                as usize;
            for k in 0..count {
                let available = rng.gen_range(0..29) as f64;
                let blocked = rng.gen_range(0..(31 - available as i64 + 1)) as f64;
                let mut fields = vec![
                    format!("L{}-{:04}", p.region, k + 1),
                    p.region.to_string(),
                    start.plus_months(m).to_string(),
                    fmt(available),
                    fmt(blocked),
                ];
                // draw every feature, then independently blank some out
                let push_opt = |rng: &mut ChaCha8Rng, fields: &mut Vec<String>, v: String| {
                    if rng.gen_bool(spec.listing_missing_rate) {
                        fields.push(String::new());
                    } else {
                        fields.push(v);
                    }
                };
                let v = property_types[rng.gen_range(0..property_types.len())].to_string();
                push_opt(&mut rng, &mut fields, v);
                let v = listing_types[rng.gen_range(0..listing_types.len())].to_string();
                push_opt(&mut rng, &mut fields, v);
                let v = fmt(rng.gen_range(1..5) as f64);
                push_opt(&mut rng, &mut fields, v);
                let v = fmt(rng.gen_range(2..6) as f64 * 0.5);
                push_opt(&mut rng, &mut fields, v);
                let v = fmt(rng.gen_range(2..9) as f64);
                push_opt(&mut rng, &mut fields, v);
                let v = fmt((rng.gen_range(50.0..100.0f64) * 10.0).round() / 10.0);
                push_opt(&mut rng, &mut fields, v);
                let v = response_times[rng.gen_range(0..response_times.len())].to_string();
                push_opt(&mut rng, &mut fields, v);
                let v = rng.gen_bool(0.3).to_string();
                push_opt(&mut rng, &mut fields, v);
                let v = policies[rng.gen_range(0..policies.len())].to_string();
                push_opt(&mut rng, &mut fields, v);
                let v = checkins[rng.gen_range(0..checkins.len())].to_string();
                push_opt(&mut rng, &mut fields, v);
                let v = checkouts[rng.gen_range(0..checkouts.len())].to_string();
                push_opt(&mut rng, &mut fields, v);
                let v = fmt(rng.gen_range(1..8) as f64);
                push_opt(&mut rng, &mut fields, v);
                let v = fmt(rng.gen_range(5..41) as f64);
                push_opt(&mut rng, &mut fields, v);
                let v = rng.gen_bool(0.5).to_string();
                push_opt(&mut rng, &mut fields, v);
                let v = rng.gen_bool(0.2).to_string();
                push_opt(&mut rng, &mut fields, v);
                let v = rng.gen_bool(0.25).to_string();
                push_opt(&mut rng, &mut fields, v);
                let v = fmt((rng.gen_range(3.5..5.0f64) * 100.0).round() / 100.0);
                push_opt(&mut rng, &mut fields, v);
                let v = fmt(rng.gen_range(0..200) as f64);
                push_opt(&mut rng, &mut fields, v);
                listing_lines.push(fields.join(","));
            }
        }
    }

    // write the four files
    let write = |name: &str, header: String, lines: Vec<String>| -> Result<()> {
        let path = out_dir.join(name);
        let mut f = std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        writeln!(f, "{header}").map_err(|e| Error::io(&path, e))?;
        for line in lines {
            writeln!(f, "{line}").map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    };

    let listing_header = {
        let mut cols = vec!["listing_id", "region", "month"];
        cols.extend_from_slice(LISTING_FEATURE_COLUMNS);
        cols.join(",")
    };
    write("listings.csv", listing_header, listing_lines)?;

    let acc_header = {
        let mut cols = vec!["region".to_string(), "month".to_string()];
        cols.extend(acc_keys.iter().map(|k| k.to_string()));
        cols.join(",")
    };
    let mut acc_lines = Vec::new();
    for (i, p) in region_params.iter().enumerate() {
        for m in 0..months {
            let mut fields = vec![p.region.to_string(), start.plus_months(m).to_string()];
            for (v, key) in acc_keys.iter().enumerate() {
                // ridership drifts slightly with the season; roads are static
                let val = if key.contains("boarding") || key.contains("alighting") {
                    (acc_base[i][v] * (1.0 + 0.05 * (TAU * m as f64 / 12.0).sin())).floor()
                } else {
                    acc_base[i][v]
                };
                fields.push(fmt(val));
            }
            acc_lines.push(fields.join(","));
        }
    }
    write("accessibility.csv", acc_header, acc_lines)?;

    let hf_header = {
        let mut cols = vec!["region".to_string(), "month".to_string()];
        cols.extend(hf_keys.iter().map(|k| k.to_string()));
        cols.join(",")
    };
    let mut hf_lines = Vec::new();
    for (i, p) in region_params.iter().enumerate() {
        for m in 0..months {
            let mut fields = vec![p.region.to_string(), start.plus_months(m).to_string()];
            for v in 0..hf_keys.len() {
                fields.push(fmt((hf_values[i][m][v] * 100.0).round() / 100.0));
            }
            hf_lines.push(fields.join(","));
        }
    }
    write("human_flow.csv", hf_header, hf_lines)?;

    let mut label_lines = Vec::new();
    for (region, month, labels) in label_rows {
        label_lines.push(format!(
            "{region},{month},{},{},{}",
            fmt(labels[0]),
            fmt(labels[1]),
            fmt(labels[2])
        ));
    }
    write(
        "labels.csv",
        "region,month,reservation_days,revenue,num_reservations".to_string(),
        label_lines,
    )?;

    Ok(SynthSummary {
        regions: region_params,
        start,
        months,
    })
}

/// Standard normal via Box-Muller on the raw ChaCha stream; keeps sampling
/// stable across dependency versions.
fn sample_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (TAU * u2).cos()
}
