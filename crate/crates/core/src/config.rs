//! Experiment configuration: the knobs every other module consumes.
//!
//! Configs serialize to a TOML file with nested sections (`[model]`,
//! `[dims]`, `[loss_weights]`, `[split]`, `[train]`) and support dotted-key
//! overrides such as `model.architecture=TRANSFORMER` applied after load.
//! Every CLI run echoes the fully resolved config before doing anything.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sequence architecture of the forecaster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Architecture {
    RNN,
    LSTM,
    TRANSFORMER,
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Architecture::RNN => write!(f, "RNN"),
            Architecture::LSTM => write!(f, "LSTM"),
            Architecture::TRANSFORMER => write!(f, "TRANSFORMER"),
        }
    }
}

impl FromStr for Architecture {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "RNN" => Ok(Architecture::RNN),
            "LSTM" => Ok(Architecture::LSTM),
            "TRANSFORMER" => Ok(Architecture::TRANSFORMER),
            other => Err(Error::Config(format!("unknown architecture {other:?}"))),
        }
    }
}

/// One of the three embedded input modalities.
///
/// The label-history channel is always present and is not a modality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Modality {
    #[serde(rename = "ACCESSIBILITY")]
    Accessibility,
    #[serde(rename = "HUMAN_FLOW")]
    HumanFlow,
    #[serde(rename = "AIRBNB")]
    Airbnb,
}

impl Modality {
    pub const ALL: [Modality; 3] = [
        Modality::Accessibility,
        Modality::HumanFlow,
        Modality::Airbnb,
    ];

    pub fn all_set() -> BTreeSet<Modality> {
        Modality::ALL.iter().copied().collect()
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modality::Accessibility => write!(f, "ACCESSIBILITY"),
            Modality::HumanFlow => write!(f, "HUMAN_FLOW"),
            Modality::Airbnb => write!(f, "AIRBNB"),
        }
    }
}

impl FromStr for Modality {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "ACCESSIBILITY" => Ok(Modality::Accessibility),
            "HUMAN_FLOW" => Ok(Modality::HumanFlow),
            "AIRBNB" => Ok(Modality::Airbnb),
            other => Err(Error::Config(format!("unknown modality {other:?}"))),
        }
    }
}

/// Per-segment widths of the concatenated regional embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingDims {
    pub accessibility: usize,
    pub human_flow: usize,
    pub airbnb: usize,
    pub label: usize,
}

impl EmbeddingDims {
    pub fn new(accessibility: usize, human_flow: usize, airbnb: usize, label: usize) -> Self {
        EmbeddingDims {
            accessibility,
            human_flow,
            airbnb,
            label,
        }
    }

    pub fn total(&self) -> usize {
        self.accessibility + self.human_flow + self.airbnb + self.label
    }

    pub fn for_modality(&self, m: Modality) -> usize {
        match m {
            Modality::Accessibility => self.accessibility,
            Modality::HumanFlow => self.human_flow,
            Modality::Airbnb => self.airbnb,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.accessibility == 0 || self.human_flow == 0 || self.airbnb == 0 || self.label == 0 {
            return Err(Error::Config("embedding dims must all be > 0".into()));
        }
        Ok(())
    }
}

impl Default for EmbeddingDims {
    fn default() -> Self {
        EmbeddingDims::new(48, 48, 128, 4)
    }
}

/// Weights of the three per-target losses in the total loss.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl LossWeights {
    pub fn as_array(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    pub fn validate(&self) -> Result<()> {
        let w = self.as_array();
        if w.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Config("loss weights must be finite and >= 0".into()));
        }
        if w.iter().all(|v| *v == 0.0) {
            return Err(Error::Config("loss weights must not all be zero".into()));
        }
        Ok(())
    }
}

impl Default for LossWeights {
    // The weights are set equally; equality, not magnitude, is what matters.
    fn default() -> Self {
        LossWeights {
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
        }
    }
}

/// Chronological month counts for train/validation/test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_months: usize,
    pub val_months: usize,
    pub test_months: usize,
}

impl SplitSpec {
    pub fn new(train_months: usize, val_months: usize, test_months: usize) -> Self {
        SplitSpec {
            train_months,
            val_months,
            test_months,
        }
    }

    pub fn total(&self) -> usize {
        self.train_months + self.val_months + self.test_months
    }
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec::new(51, 8, 8)
    }
}

/// Training-loop hyperparameters. These are artifact knobs, not part of the
/// experiment identity, and have fixed defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainOptions {
    pub learning_rate: f64,
    pub max_epochs: usize,
    pub patience: usize,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            learning_rate: 1e-3,
            max_epochs: 500,
            patience: 20,
        }
    }
}

/// The fully resolved configuration of one experiment run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub window_size: usize,
    /// Months predicted per sample; fixed at 3.
    pub horizon: usize,
    /// Window advance per sample; fixed at 1.
    pub stride: usize,
    pub dims: EmbeddingDims,
    pub loss_weights: LossWeights,
    pub seed: u64,
    pub architecture: Architecture,
    /// Active input modalities. Empty means a label-history-only run.
    pub modalities: BTreeSet<Modality>,
    /// When false, the prompt/embedding stages are bypassed and raw tabular
    /// features feed a single affine projection instead.
    pub use_llm_embedding: bool,
    pub split: SplitSpec,
    pub train: TrainOptions,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        default_config()
    }
}

/// The reference configuration: 6-month window, 3-month horizon, stride 1,
/// dims (48, 48, 128, 4), equal loss weights, seed 43, LSTM, all modalities,
/// LLM embeddings on, split (51, 8, 8).
pub fn default_config() -> ExperimentConfig {
    ExperimentConfig {
        window_size: 6,
        horizon: 3,
        stride: 1,
        dims: EmbeddingDims::default(),
        loss_weights: LossWeights::default(),
        seed: 43,
        architecture: Architecture::LSTM,
        modalities: Modality::all_set(),
        use_llm_embedding: true,
        split: SplitSpec::default(),
        train: TrainOptions::default(),
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_size < 1 {
            return Err(Error::Config("window_size must be >= 1".into()));
        }
        if self.horizon != 3 {
            return Err(Error::Config(format!(
                "horizon is fixed at 3, got {}",
                self.horizon
            )));
        }
        if self.stride != 1 {
            return Err(Error::Config(format!(
                "stride is fixed at 1, got {}",
                self.stride
            )));
        }
        self.dims.validate()?;
        self.loss_weights.validate()?;
        Ok(())
    }

    /// Width of the concatenated region-month embedding under this config:
    /// active modality segments plus the label segment.
    pub fn embedding_width(&self) -> usize {
        let mods: usize = self
            .modalities
            .iter()
            .map(|m| self.dims.for_modality(*m))
            .sum();
        mods + self.dims.label
    }

    /// Resolved config as a TOML document (the canonical on-disk layout).
    pub fn to_toml_string(&self) -> Result<String> {
        let doc = ConfigDoc::from(self.clone());
        toml::to_string(&doc).map_err(|e| Error::Toml(e.to_string()))
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let doc: ConfigDoc = toml::from_str(text).map_err(|e| Error::Toml(e.to_string()))?;
        let config: ExperimentConfig = doc.into();
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::load_with_overrides(path, &[])
    }

    /// Load a config file and apply `key=value` overrides on the raw TOML
    /// tree before deserializing, so overrides obey the file grammar.
    pub fn load_with_overrides(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_with_overrides(&text, overrides)
    }

    pub fn parse_with_overrides(text: &str, overrides: &[String]) -> Result<Self> {
        let mut value: toml::Value =
            toml::from_str(text).map_err(|e| Error::Toml(e.to_string()))?;
        for ov in overrides {
            apply_override(&mut value, ov)?;
        }
        let doc: ConfigDoc = value
            .try_into()
            .map_err(|e: toml::de::Error| Error::Toml(e.to_string()))?;
        let config: ExperimentConfig = doc.into();
        config.validate()?;
        Ok(config)
    }
}

/// Apply one `dotted.key=value` override to a TOML tree.
pub fn apply_override(root: &mut toml::Value, spec: &str) -> Result<()> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override {spec:?} is not key=value")))?;
    let segments: Vec<&str> = path.split('.').collect();
    if segments.iter().any(|s| s.is_empty()) {
        return Err(Error::Config(format!("override key {path:?} is malformed")));
    }
    let mut node = root;
    for seg in &segments[..segments.len() - 1] {
        let table = node
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override path {path:?} crosses a non-table")))?;
        node = table
            .entry((*seg).to_string())
            .or_insert_with(|| toml::Value::Table(Default::default()));
    }
    let table = node
        .as_table_mut()
        .ok_or_else(|| Error::Config(format!("override path {path:?} crosses a non-table")))?;
    // Parse the value as TOML if possible so numbers/bools/arrays work;
    // fall back to a plain string (covers bare enum names).
    let parsed: toml::Value = match format!("v = {raw}").parse::<toml::Value>() {
        Ok(toml::Value::Table(mut t)) => t.remove("v").unwrap(),
        _ => toml::Value::String(raw.to_string()),
    };
    table.insert(segments[segments.len() - 1].to_string(), parsed);
    Ok(())
}

// On-disk layout: scalars grouped under [model], the rest in their own
// sections. Kept separate from ExperimentConfig so the file format can stay
// stable independently of the in-memory shape.
#[derive(Debug, Serialize, Deserialize)]
struct ConfigDoc {
    #[serde(default)]
    model: ModelSection,
    #[serde(default)]
    dims: EmbeddingDims,
    #[serde(default)]
    loss_weights: LossWeights,
    #[serde(default)]
    split: SplitSpec,
    #[serde(default)]
    train: TrainOptions,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(default)]
struct ModelSection {
    window_size: usize,
    horizon: usize,
    stride: usize,
    seed: u64,
    architecture: Architecture,
    modalities: Vec<Modality>,
    use_llm_embedding: bool,
}

impl Default for ModelSection {
    fn default() -> Self {
        let c = default_config();
        ModelSection {
            window_size: c.window_size,
            horizon: c.horizon,
            stride: c.stride,
            seed: c.seed,
            architecture: c.architecture,
            modalities: c.modalities.into_iter().collect(),
            use_llm_embedding: c.use_llm_embedding,
        }
    }
}

impl From<ExperimentConfig> for ConfigDoc {
    fn from(c: ExperimentConfig) -> Self {
        ConfigDoc {
            model: ModelSection {
                window_size: c.window_size,
                horizon: c.horizon,
                stride: c.stride,
                seed: c.seed,
                architecture: c.architecture,
                modalities: c.modalities.into_iter().collect(),
                use_llm_embedding: c.use_llm_embedding,
            },
            dims: c.dims,
            loss_weights: c.loss_weights,
            split: c.split,
            train: c.train,
        }
    }
}

impl From<ConfigDoc> for ExperimentConfig {
    fn from(d: ConfigDoc) -> Self {
        ExperimentConfig {
            window_size: d.model.window_size,
            horizon: d.model.horizon,
            stride: d.model.stride,
            dims: d.dims,
            loss_weights: d.loss_weights,
            seed: d.model.seed,
            architecture: d.model.architecture,
            modalities: d.model.modalities.into_iter().collect(),
            use_llm_embedding: d.model.use_llm_embedding,
            split: d.split,
            train: d.train,
        }
    }
}
