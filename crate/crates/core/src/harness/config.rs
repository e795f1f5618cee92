//! Declarative experiment description (versioned JSON).

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::generator::GeneratorParams;
use crate::harness::split::{SplitFractions, SplitMode};
use crate::nn::model::Adaptations;
use crate::nn::tape::Aggregation;
use crate::nodeid::Fnv128;
use crate::oracles::{TaskId, Thresholds};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DataSource {
    /// Three independent circulant graphs (seeds `s`, `s+1`, `s+2`) for
    /// train, validation and test, labeled by the oracles.
    Synthetic {
        generator: GeneratorParams,
        #[serde(default)]
        thresholds: Thresholds,
    },
    /// An edge CSV plus a node label CSV, split by first transaction time.
    Files {
        edges: PathBuf,
        labels: PathBuf,
        #[serde(default = "default_split_mode")]
        split: SplitMode,
        #[serde(default)]
        fractions: SplitFractions,
    },
}

fn default_split_mode() -> SplitMode {
    SplitMode::TemporalNodes
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSettings {
    #[serde(default = "default_layers")]
    pub num_layers: usize,
    #[serde(default = "default_hidden")]
    pub hidden_dim: usize,
    #[serde(default = "default_aggregation")]
    pub aggregation: Aggregation,
    #[serde(default = "default_weight")]
    pub minority_class_weight: f64,
    #[serde(default = "default_true")]
    pub residual: bool,
    #[serde(default)]
    pub use_edge_features: bool,
}

impl Default for ModelSettings {
    fn default() -> Self {
        Self {
            num_layers: default_layers(),
            hidden_dim: default_hidden(),
            aggregation: default_aggregation(),
            minority_class_weight: default_weight(),
            residual: true,
            use_edge_features: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainingSettings {
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default = "default_hops")]
    pub hops: usize,
    #[serde(default)]
    pub neighbor_cap: Option<usize>,
    #[serde(default = "default_patience")]
    pub patience: usize,
    /// Without ego IDs, run every step on the whole training graph and
    /// read out the batch rows (no ego sampling).
    #[serde(default = "default_true")]
    pub full_graph_without_ego: bool,
    /// Single-threaded, fixed-order reductions (always the case here; kept
    /// so configs state the requirement explicitly).
    #[serde(default = "default_true")]
    pub determinism: bool,
}

impl Default for TrainingSettings {
    fn default() -> Self {
        Self {
            epochs: default_epochs(),
            batch_size: default_batch(),
            learning_rate: default_lr(),
            hops: default_hops(),
            neighbor_cap: None,
            patience: default_patience(),
            full_graph_without_ego: true,
            determinism: true,
        }
    }
}

fn default_layers() -> usize {
    6
}
fn default_hidden() -> usize {
    24
}
fn default_aggregation() -> Aggregation {
    Aggregation::Sum
}
fn default_weight() -> f64 {
    1.0
}
fn default_true() -> bool {
    true
}
fn default_epochs() -> usize {
    100
}
fn default_batch() -> usize {
    128
}
fn default_lr() -> f64 {
    5e-3
}
fn default_hops() -> usize {
    3
}
fn default_patience() -> usize {
    20
}
fn default_schema() -> u32 {
    CONFIG_SCHEMA_VERSION
}
fn default_tasks() -> Vec<TaskId> {
    TaskId::ALL.to_vec()
}
fn default_seeds() -> Vec<u64> {
    vec![0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub data: DataSource,
    #[serde(default = "default_tasks")]
    pub tasks: Vec<TaskId>,
    #[serde(default)]
    pub model: ModelSettings,
    #[serde(default)]
    pub adaptations: Adaptations,
    #[serde(default)]
    pub training: TrainingSettings,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
}

impl ExperimentConfig {
    pub fn synthetic(generator: GeneratorParams) -> Self {
        Self {
            schema_version: CONFIG_SCHEMA_VERSION,
            data: DataSource::Synthetic {
                generator,
                thresholds: Thresholds::default(),
            },
            tasks: default_tasks(),
            model: ModelSettings::default(),
            adaptations: Adaptations::NONE,
            training: TrainingSettings::default(),
            seeds: default_seeds(),
        }
    }

    /// Checks invariants; returns non-fatal warnings.
    pub fn validate(&self) -> Result<Vec<String>, HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return bad(format!(
                "schema_version {} unsupported (expected {CONFIG_SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.tasks.is_empty() {
            return bad("tasks must not be empty".into());
        }
        if self.seeds.is_empty() {
            return bad("seeds must not be empty".into());
        }
        if self.model.hidden_dim == 0 {
            return bad("model.hidden_dim must be at least 1".into());
        }
        if !(self.model.minority_class_weight > 0.0 && self.model.minority_class_weight.is_finite())
        {
            return bad("model.minority_class_weight must be positive".into());
        }
        let t = &self.training;
        if t.batch_size == 0 {
            return bad("training.batch_size must be at least 1".into());
        }
        if !(t.learning_rate > 0.0 && t.learning_rate.is_finite()) {
            return bad("training.learning_rate must be positive".into());
        }
        if t.hops == 0 {
            return bad("training.hops must be at least 1".into());
        }
        if t.neighbor_cap == Some(0) {
            return bad("training.neighbor_cap must be at least 1".into());
        }
        match &self.data {
            DataSource::Synthetic { generator, .. } => {
                generator.validate().map_err(HarnessError::Config)?
            }
            DataSource::Files {
                split, fractions, ..
            } => {
                if *split != SplitMode::TemporalNodes {
                    return bad(
                        "file data with node labels supports only the temporal_nodes split".into(),
                    );
                }
                fractions.validate()?;
            }
        }
        let mut warnings = Vec::new();
        if self.uses_ego_batches() && t.hops < self.model.num_layers {
            warnings.push(format!(
                "hops ({}) < num_layers ({}): receptive field exceeds the sampled neighborhood",
                t.hops, self.model.num_layers
            ));
        }
        Ok(warnings)
    }

    /// Ego IDs always need per-center subgraphs; other variants only when
    /// whole-graph steps are disabled.
    pub fn uses_ego_batches(&self) -> bool {
        self.adaptations.ego_ids || !self.training.full_graph_without_ego
    }

    /// Stable 128-bit hash of the canonical JSON form.
    pub fn hash(&self) -> String {
        let mut h = Fnv128::new(0);
        h.write(
            serde_json::to_string(self)
                .expect("config serializes")
                .as_bytes(),
        );
        format!("{:032x}", h.finish())
    }

    pub fn task_names(&self) -> Vec<String> {
        self.tasks.iter().map(|t| t.column().to_string()).collect()
    }
}
