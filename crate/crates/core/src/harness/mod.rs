//! Datasets, ego batching, training, evaluation and ablations.

pub mod ablation;
pub mod config;
pub mod data;
pub mod ego;
pub mod metrics;
pub mod split;
pub mod train;

pub use ablation::{cumulative_variants, run_ablation, Adaptation};
pub use config::{DataSource, ExperimentConfig, ModelSettings, TrainingSettings};
pub use data::{Dataset, SplitData};
pub use ego::{sample_ego, EgoSubgraph, NeighborCap};
pub use metrics::{
    export_metrics, Confusion, ExportFormat, MetricsReport, MetricsTable, SeedResult,
};
pub use split::{
    temporal_edge_split, temporal_node_split, SplitFractions, SplitMode, SplitSpec, TemporalSplit,
};
pub use train::{evaluate, train, train_seed, train_threaded, Batcher, Evaluation, SeedOutcome};
