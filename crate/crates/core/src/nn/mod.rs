//! Minimal reverse-mode autodiff and the message-passing model built on it.

pub mod checkpoint;
pub mod constructive;
pub mod gradcheck;
pub mod matrix;
pub mod model;
pub mod params;
pub mod tape;

pub use checkpoint::Checkpoint;
pub use gradcheck::{grad_check, GradCheckReport};
pub use matrix::Matrix;
pub use model::{
    Adaptations, GnnLayerConfig, GnnModel, GraphTensors, ModelConfig, MpLayer, ParamSource, Readout,
};
pub use params::{AdamConfig, AdamState, ParamId, ParamStore};
pub use tape::{Aggregation, Segments, Tape, Var};
