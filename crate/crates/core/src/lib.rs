//! Regional short-term-rental trend forecasting.
//!
//! The pipeline turns region-month records into text prompts, embeds them
//! through a pluggable backend, reduces the embeddings through fully
//! connected heads, concatenates them into regional embeddings, and feeds
//! sliding windows of those into RNN/LSTM/Transformer forecasters that
//! predict reservation days, revenue and reservation counts three months
//! ahead. An experiment harness covers baselines, modality ablations and
//! hyperparameter sweeps on synthetic desk-scale data.

pub mod config;
pub mod data;
pub mod embed;
pub mod error;
pub mod features;
pub mod nn;
pub mod prompt;
pub mod types;

pub use config::{default_config, Architecture, EmbeddingDims, ExperimentConfig, Modality};
pub use error::{Error, Result};
pub use types::{
    calendar_of, month_index_from_calendar, CalendarMonth, LabelTriple, MonthIndex, RegionId,
};
