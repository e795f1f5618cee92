//! Cumulative adaptation ablations.

use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::harness::config::ExperimentConfig;
use crate::harness::data::Dataset;
use crate::harness::metrics::MetricsTable;
use crate::harness::train::train;
use crate::nn::model::Adaptations;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adaptation {
    ReverseMp,
    Ports,
    EgoIds,
}

impl Adaptation {
    pub const SEQUENCE: [Adaptation; 3] =
        [Adaptation::ReverseMp, Adaptation::Ports, Adaptation::EgoIds];

    fn enable(self, a: &mut Adaptations) {
        match self {
            Adaptation::ReverseMp => a.reverse_mp = true,
            Adaptation::Ports => a.ports = true,
            Adaptation::EgoIds => a.ego_ids = true,
        }
    }
}

/// Adaptation sets for the baseline and every cumulative prefix of `sequence`.
pub fn cumulative_variants(base: Adaptations, sequence: &[Adaptation]) -> Vec<Adaptations> {
    let mut out = vec![base];
    let mut cur = base;
    for a in sequence {
        a.enable(&mut cur);
        out.push(cur);
    }
    out
}

/// One row per cumulative prefix, all trained on the same data.
pub fn run_ablation(
    base: &ExperimentConfig,
    sequence: &[Adaptation],
    data: &Dataset,
    progress: &mut dyn FnMut(&str),
) -> Result<MetricsTable, HarnessError> {
    let mut table = MetricsTable::new(base.task_names());
    for adaptations in cumulative_variants(base.adaptations, sequence) {
        let cfg = ExperimentConfig {
            adaptations,
            ..base.clone()
        };
        progress(&format!("variant {}", adaptations.label()));
        let (report, _) = train(&cfg, data, progress)?;
        table.rows.push(report);
    }
    Ok(table)
}
