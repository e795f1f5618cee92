//! Versioned JSON checkpoints: model config plus parameters keyed by path.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::NnError;
use crate::nn::matrix::Matrix;
use crate::nn::model::{GnnModel, ModelConfig};
use crate::nn::params::ParamStore;

pub const CHECKPOINT_FORMAT: &str = "mgnn-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: String,
    pub version: u32,
    pub config: ModelConfig,
    pub params: BTreeMap<String, Matrix>,
}

impl Checkpoint {
    pub fn new(config: &ModelConfig, store: &ParamStore) -> Self {
        Self {
            format: CHECKPOINT_FORMAT.to_string(),
            version: CHECKPOINT_VERSION,
            config: config.clone(),
            params: store.to_map(),
        }
    }

    /// Rebuilds the parameter store and binds a model to it.
    pub fn restore(&self) -> Result<(GnnModel, ParamStore), NnError> {
        if self.format != CHECKPOINT_FORMAT || self.version != CHECKPOINT_VERSION {
            return Err(NnError::Checkpoint(format!(
                "unsupported checkpoint {} v{}",
                self.format, self.version
            )));
        }
        // Register in the order a fresh model would, so parameter ids line up.
        let (_, fresh) = GnnModel::init(self.config.clone(), 0)?;
        let mut store = ParamStore::new();
        for id in fresh.ids() {
            let name = fresh.name(id);
            let value = self
                .params
                .get(name)
                .ok_or_else(|| NnError::Checkpoint(format!("missing parameter {name}")))?;
            if value.len() != value.rows() * value.cols() {
                return Err(NnError::Checkpoint(format!(
                    "parameter {name} has inconsistent data length"
                )));
            }
            store.insert(name, value.clone());
        }
        if self.params.len() != store.len() {
            let extra = self
                .params
                .keys()
                .find(|k| store.id(k).is_err())
                .cloned()
                .unwrap_or_default();
            return Err(NnError::UnknownParameter(extra));
        }
        let model = GnnModel::bind(self.config.clone(), &store)?;
        Ok((model, store))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("checkpoint serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, NnError> {
        serde_json::from_str(s).map_err(|e| NnError::Checkpoint(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<(), NnError> {
        std::fs::write(path, self.to_json())
            .map_err(|e| NnError::Checkpoint(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self, NnError> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| NnError::Checkpoint(format!("{}: {e}", path.display())))?;
        Self::from_json(&s)
    }
}
