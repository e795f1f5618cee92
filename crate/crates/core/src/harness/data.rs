//! Labeled train/validation/test splits ready for training.

use crate::error::HarnessError;
use crate::generator::{generate_split_graphs, GeneratorParams};
use crate::graph::{DirectedMultigraph, NodeId};
use crate::harness::config::DataSource;
use crate::harness::metrics::minority_class;
use crate::harness::split::{temporal_node_split, SplitFractions};
use crate::io::{read_edge_csv, read_labels_csv};
use crate::nn::matrix::Matrix;
use crate::oracles::{label_all, LabelMatrix, TaskId, Thresholds};
use crate::ports::{assign_ports, PortAssignment};

/// One split: the graph the model sees, its ports, node labels and the
/// nodes scored in this split.
#[derive(Debug, Clone)]
pub struct SplitData {
    pub graph: DirectedMultigraph,
    pub ports: PortAssignment,
    /// Row-major `num_nodes x num_tasks` binary labels.
    pub labels: Vec<u8>,
    pub num_tasks: usize,
    pub mask: Vec<NodeId>,
}

impl SplitData {
    pub fn new(
        graph: DirectedMultigraph,
        all: &LabelMatrix,
        tasks: &[TaskId],
        mask: Vec<NodeId>,
    ) -> Self {
        let ports = assign_ports(&graph);
        let mut labels = Vec::with_capacity(graph.num_nodes() * tasks.len());
        for v in 0..graph.num_nodes() {
            labels.extend(tasks.iter().map(|&t| all.get(v, t)));
        }
        Self {
            graph,
            ports,
            labels,
            num_tasks: tasks.len(),
            mask,
        }
    }

    pub fn label(&self, v: NodeId, task: usize) -> u8 {
        self.labels[v * self.num_tasks + task]
    }

    /// Float targets for `rows`.
    pub fn targets(&self, rows: &[NodeId]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * self.num_tasks);
        for &v in rows {
            data.extend(
                self.labels[v * self.num_tasks..(v + 1) * self.num_tasks]
                    .iter()
                    .map(|&y| f64::from(y)),
            );
        }
        Matrix::from_vec(rows.len(), self.num_tasks, data)
    }

    /// Positive-label ratio per task over the mask.
    pub fn positive_ratios(&self) -> Vec<f64> {
        (0..self.num_tasks)
            .map(|t| {
                let pos = self.mask.iter().filter(|&&v| self.label(v, t) == 1).count();
                pos as f64 / self.mask.len().max(1) as f64
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub tasks: Vec<TaskId>,
    /// Train, validation, test.
    pub splits: [SplitData; 3],
}

impl Dataset {
    /// Three independent generated graphs, every node scored.
    pub fn synthetic(params: &GeneratorParams, tasks: &[TaskId], thresholds: Thresholds) -> Self {
        let graphs = generate_split_graphs(params, 3);
        let splits: Vec<SplitData> = graphs
            .into_iter()
            .map(|g| {
                let labels = label_all(&g, thresholds);
                let mask = (0..g.num_nodes()).collect();
                SplitData::new(g, &labels, tasks, mask)
            })
            .collect();
        let splits: [SplitData; 3] = splits
            .try_into()
            .unwrap_or_else(|_| unreachable!("three split graphs"));
        Self {
            tasks: tasks.to_vec(),
            splits,
        }
    }

    /// One labeled graph split by node first-transaction time into cumulative snapshots.
    pub fn temporal_nodes(
        g: &DirectedMultigraph,
        labels: &LabelMatrix,
        tasks: &[TaskId],
        fractions: SplitFractions,
    ) -> Result<Self, HarnessError> {
        if labels.num_nodes() != g.num_nodes() {
            return Err(HarnessError::Config(format!(
                "label rows ({}) differ from graph nodes ({})",
                labels.num_nodes(),
                g.num_nodes()
            )));
        }
        let split = temporal_node_split(g, fractions)?;
        let [s0, s1, s2] = split.snapshots;
        let [m0, m1, m2] = split.masks;
        Ok(Self {
            tasks: tasks.to_vec(),
            splits: [
                SplitData::new(s0, labels, tasks, m0),
                SplitData::new(s1, labels, tasks, m1),
                SplitData::new(s2, labels, tasks, m2),
            ],
        })
    }

    /// The same labeled graph in every split, every node scored.
    pub fn whole_graph(
        g: DirectedMultigraph,
        labels: &LabelMatrix,
        tasks: &[TaskId],
    ) -> Result<Self, HarnessError> {
        if labels.num_nodes() != g.num_nodes() {
            return Err(HarnessError::Config(format!(
                "label rows ({}) differ from graph nodes ({})",
                labels.num_nodes(),
                g.num_nodes()
            )));
        }
        let mask: Vec<NodeId> = (0..g.num_nodes()).collect();
        let split = SplitData::new(g, labels, tasks, mask);
        Ok(Self {
            tasks: tasks.to_vec(),
            splits: [split.clone(), split.clone(), split],
        })
    }

    pub fn load(source: &DataSource, tasks: &[TaskId]) -> Result<Self, HarnessError> {
        match source {
            DataSource::Synthetic {
                generator,
                thresholds,
            } => Ok(Self::synthetic(generator, tasks, *thresholds)),
            DataSource::Files {
                edges,
                labels,
                fractions,
                ..
            } => {
                let g = read_edge_csv(edges)?.graph;
                let l = read_labels_csv(labels)?;
                Self::temporal_nodes(&g, &l, tasks, *fractions)
            }
        }
    }

    pub fn train(&self) -> &SplitData {
        &self.splits[0]
    }

    /// Minority class per task from the training split's ratio.
    pub fn minority_classes(&self) -> Vec<u8> {
        self.train()
            .positive_ratios()
            .into_iter()
            .map(minority_class)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_splits_are_distinct_graphs() {
        let d = Dataset::synthetic(
            &GeneratorParams::new(200, 6.0, 11.1, 4),
            &TaskId::ALL,
            Thresholds::default(),
        );
        assert_ne!(d.splits[0].graph, d.splits[1].graph);
        assert_eq!(d.splits[2].mask.len(), 200);
        let t = d.splits[0].targets(&[3, 7]);
        assert_eq!(t.shape(), (2, 11));
        assert_eq!(d.minority_classes()[TaskId::C6.index()], 0);
    }

    #[test]
    fn task_subset_selects_columns() {
        let d = Dataset::synthetic(
            &GeneratorParams::new(100, 6.0, 11.1, 4),
            &[TaskId::DegOut],
            Thresholds::default(),
        );
        let g = &d.splits[0].graph;
        for v in 0..100 {
            assert_eq!(
                d.splits[0].label(v, 0),
                u8::from(g.degree_out(v).unwrap() > 3)
            );
        }
    }
}
