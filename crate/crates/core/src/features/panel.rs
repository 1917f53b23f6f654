//! Model-ready tensors for one dataset: backend embeddings (or tabular
//! features) per region-month plus normalized and lagged labels.
//!
//! Rows of the per-modality matrices are month-major: row `m * N + r` holds
//! region position `r` in month `m`. These tensors are fixed across the
//! training loop; only the reduction heads on top of them change.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use ndarray::{Array2, Array3};

use crate::config::Modality;
use crate::data::records::NormStats;
use crate::error::{Error, Result};
use crate::types::{CalendarMonth, RegionId};

use super::tabular::FeatureSchema;

/// Everything the trainer needs, detached from the raw panel.
#[derive(Debug, Clone)]
pub struct PanelTensors {
    pub regions: Vec<RegionId>,
    pub start: CalendarMonth,
    pub months: usize,
    /// Backend embeddings per active modality, shape (T * N, 3072).
    pub embeddings: BTreeMap<Modality, Array2<f64>>,
    /// Z-scored raw features on the tabular path, shape (T * N, F).
    pub tabular: Option<Array2<f64>>,
    /// Normalized log labels, shape (T, N, 3).
    pub labels_norm: Array3<f64>,
    /// Previous month's normalized labels per position, month 0 reads zeros
    /// (the training mean in normalized space).
    pub labels_lag: Array3<f64>,
    pub norm_stats: NormStats,
    pub feature_schema: Option<FeatureSchema>,
}

impl PanelTensors {
    pub fn num_regions(&self) -> usize {
        self.regions.len()
    }

    pub fn row(&self, month: usize, region_pos: usize) -> usize {
        month * self.num_regions() + region_pos
    }
}

/// Lag labels by one month along the time axis, zero-filling month 0.
pub fn lag_labels(labels_norm: &Array3<f64>) -> Array3<f64> {
    let mut lag = Array3::zeros(labels_norm.raw_dim());
    let t = labels_norm.shape()[0];
    if t > 1 {
        lag.slice_mut(ndarray::s![1.., .., ..])
            .assign(&labels_norm.slice(ndarray::s![..t - 1, .., ..]));
    }
    lag
}

const CACHE_MAGIC: &[u8; 8] = b"DCPANEL1";

/// Materialize the embedded panel to a binary cache so later stages can
/// skip the embedding pass: a JSON header followed by raw little-endian
/// f32 tensors.
pub fn write_panel_cache(tensors: &PanelTensors, path: &Path) -> Result<()> {
    #[derive(serde::Serialize)]
    struct Header<'a> {
        regions: Vec<String>,
        start: String,
        months: usize,
        modalities: Vec<&'a Modality>,
        embedding_dim: usize,
        tabular_width: Option<usize>,
        norm_stats: &'a NormStats,
        feature_schema: &'a Option<FeatureSchema>,
    }
    let header = Header {
        regions: tensors.regions.iter().map(|r| r.to_string()).collect(),
        start: tensors.start.to_string(),
        months: tensors.months,
        modalities: tensors.embeddings.keys().collect(),
        embedding_dim: crate::embed::EMBEDDING_DIM,
        tabular_width: tensors.tabular.as_ref().map(|t| t.ncols()),
        norm_stats: &tensors.norm_stats,
        feature_schema: &tensors.feature_schema,
    };
    let header_json = serde_json::to_vec(&header)
        .map_err(|e| Error::Checkpoint(format!("cannot encode panel header: {e}")))?;

    let mut f = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(CACHE_MAGIC).map_err(|e| Error::io(path, e))?;
    f.write_all(&(header_json.len() as u64).to_le_bytes())
        .map_err(|e| Error::io(path, e))?;
    f.write_all(&header_json).map_err(|e| Error::io(path, e))?;

    let mut write_f32 = |data: &[f64]| -> Result<()> {
        let mut buf = Vec::with_capacity(data.len() * 4);
        for v in data {
            buf.extend_from_slice(&(*v as f32).to_le_bytes());
        }
        f.write_all(&buf).map_err(|e| Error::io(path, e))
    };
    for m in tensors.embeddings.values() {
        write_f32(m.as_slice().expect("contiguous"))?;
    }
    if let Some(t) = &tensors.tabular {
        write_f32(t.as_slice().expect("contiguous"))?;
    }
    write_f32(tensors.labels_norm.as_slice().expect("contiguous"))?;
    write_f32(tensors.labels_lag.as_slice().expect("contiguous"))?;
    Ok(())
}

/// Read a panel cache written by [`write_panel_cache`].
pub fn read_panel_cache(path: &Path) -> Result<PanelTensors> {
    #[derive(serde::Deserialize)]
    struct Header {
        regions: Vec<String>,
        start: String,
        months: usize,
        modalities: Vec<Modality>,
        embedding_dim: usize,
        tabular_width: Option<usize>,
        norm_stats: NormStats,
        feature_schema: Option<FeatureSchema>,
    }
    let bad = |m: String| Error::Checkpoint(format!("panel cache {}: {m}", path.display()));
    let mut f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut magic = [0u8; 8];
    f.read_exact(&mut magic).map_err(|e| Error::io(path, e))?;
    if &magic != CACHE_MAGIC {
        return Err(bad("bad magic".into()));
    }
    let mut len8 = [0u8; 8];
    f.read_exact(&mut len8).map_err(|e| Error::io(path, e))?;
    let mut header_json = vec![0u8; u64::from_le_bytes(len8) as usize];
    f.read_exact(&mut header_json).map_err(|e| Error::io(path, e))?;
    let header: Header = serde_json::from_slice(&header_json)
        .map_err(|e| bad(format!("cannot parse header: {e}")))?;
    if header.embedding_dim != crate::embed::EMBEDDING_DIM {
        return Err(bad(format!("embedding dim {} unsupported", header.embedding_dim)));
    }

    let n = header.regions.len();
    let rows = header.months * n;
    let mut read_f32 = |count: usize| -> Result<Vec<f64>> {
        let mut buf = vec![0u8; count * 4];
        f.read_exact(&mut buf).map_err(|e| Error::io(path, e))?;
        Ok(buf
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
            .collect())
    };
    let mut embeddings = BTreeMap::new();
    for m in header.modalities {
        let data = read_f32(rows * header.embedding_dim)?;
        embeddings.insert(
            m,
            Array2::from_shape_vec((rows, header.embedding_dim), data).unwrap(),
        );
    }
    let tabular = match header.tabular_width {
        Some(w) => Some(Array2::from_shape_vec((rows, w), read_f32(rows * w)?).unwrap()),
        None => None,
    };
    let labels_norm =
        Array3::from_shape_vec((header.months, n, 3), read_f32(rows * 3)?).unwrap();
    let labels_lag =
        Array3::from_shape_vec((header.months, n, 3), read_f32(rows * 3)?).unwrap();

    let regions = header
        .regions
        .into_iter()
        .map(RegionId::new)
        .collect::<Result<Vec<_>>>()?;
    Ok(PanelTensors {
        regions,
        start: CalendarMonth::parse(&header.start)?,
        months: header.months,
        embeddings,
        tabular,
        labels_norm,
        labels_lag,
        norm_stats: header.norm_stats,
        feature_schema: header.feature_schema,
    })
}
