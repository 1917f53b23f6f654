//! Data ingestion, aggregation, normalization, splitting, and the synthetic
//! dataset generator.

pub mod load;
pub mod normalize;
pub mod records;
pub mod schema;
pub mod split;
pub mod summary;
pub mod synth;

pub use load::{load_panel, DatasetPaths, Panel, SchemaMap};
pub use normalize::{fit_label_stats, inverse_transform_labels, transform_labels};
pub use records::{
    AirbnbRegionSummary, BinarySummary, CategoricalSummary, HumanFlowRecord, ListingRecord,
    MonthRange, NormStats, NumericRecord, NumericStats, NumericSummary, SplitAssignment,
};
pub use split::{assign_splits, select_active_regions, RegionSelection};
pub use summary::summarize_airbnb;
pub use synth::{generate_synthetic, SignalSpec, SynthSummary};
