//! Feature assembly: reduction-head plumbing, label expansion targets,
//! regional embedding concatenation, sliding windows, and the raw tabular
//! baseline features.

pub mod assemble;
pub mod panel;
pub mod tabular;
pub mod windows;

pub use assemble::{assemble_region_month, RegionMonthEmbedding, Segment, SegmentLayout};
pub use panel::{lag_labels, read_panel_cache, write_panel_cache, PanelTensors};
pub use tabular::{build_feature_schema, feature_matrix, feature_vector, FeatureSchema};
pub use windows::{build_windows, materialize_sample, plan_windows, SplitPlans, WindowSample};
