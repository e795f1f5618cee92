//! Train/validation/test splits: independent graphs or cumulative temporal
//! snapshots cut at edge- or node-level timestamp quantiles.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::graph::{DirectedMultigraph, EdgeId, EdgeRecord, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitMode {
    IndependentGraphs,
    TemporalEdges,
    TemporalNodes,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitFractions {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl Default for SplitFractions {
    fn default() -> Self {
        Self {
            train: 0.6,
            val: 0.2,
            test: 0.2,
        }
    }
}

impl SplitFractions {
    pub fn new(train: f64, val: f64, test: f64) -> Self {
        Self { train, val, test }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let parts = [self.train, self.val, self.test];
        if parts.iter().any(|f| !f.is_finite() || *f < 0.0) {
            return Err(HarnessError::Fractions(format!(
                "{parts:?} must be non-negative"
            )));
        }
        if (parts.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(HarnessError::Fractions(format!("{parts:?} must sum to 1")));
        }
        Ok(())
    }

    /// Cut positions `(c1, c2)` for `count` ordered items.
    pub fn cuts(&self, count: usize) -> (usize, usize) {
        let c1 = (count as f64 * self.train).round() as usize;
        let c2 = (count as f64 * (self.train + self.val)).round() as usize;
        (c1.min(count), c2.clamp(c1, count))
    }
}

/// Cut times and sizes of a temporal split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub mode: SplitMode,
    pub fractions: SplitFractions,
    pub t1: i64,
    pub t2: i64,
    pub sizes: [usize; 3],
}

/// Cumulative snapshots with per-split masks.
///
/// Snapshot edges are renumbered by their position in the `(timestamp, id)`
/// order, so every snapshot is a prefix of `order`.
#[derive(Debug, Clone)]
pub struct TemporalSplit {
    pub spec: SplitSpec,
    /// Snapshot edge position -> original edge id.
    pub order: Vec<EdgeId>,
    /// Train, validation and test snapshot graphs (cumulative).
    pub snapshots: [DirectedMultigraph; 3],
    /// Original edge ids (edge mode) or node ids (node mode) owned by each split.
    pub masks: [Vec<usize>; 3],
}

impl TemporalSplit {
    /// Edge positions of split `k` inside its snapshot (edge mode).
    pub fn local_edge_range(&self, k: usize) -> Range<usize> {
        let start: usize = self.spec.sizes[..k].iter().sum();
        start..start + self.spec.sizes[k]
    }
}

fn sorted_edges(g: &DirectedMultigraph) -> Vec<EdgeId> {
    let mut order: Vec<EdgeId> = (0..g.num_edges()).collect();
    order.sort_by_key(|&e| (g.edge(e).timestamp, e));
    order
}

fn prefix_graph(g: &DirectedMultigraph, order: &[EdgeId], len: usize) -> DirectedMultigraph {
    let records = order[..len]
        .iter()
        .enumerate()
        .map(|(i, &e)| EdgeRecord {
            id: i,
            ..g.edge(e).clone()
        })
        .collect();
    let out = DirectedMultigraph::from_records(g.num_nodes(), records);
    match g.node_features() {
        Some(f) => out.with_node_features(f.to_vec()).expect("same node count"),
        None => out,
    }
}

/// Edge-level split: edges sorted by timestamp (ties by edge id) and cut at
/// cumulative fractions. The train snapshot holds train edges only, the
/// validation snapshot train + validation edges, the test snapshot all edges.
pub fn temporal_edge_split(
    g: &DirectedMultigraph,
    fractions: SplitFractions,
) -> Result<TemporalSplit, HarnessError> {
    fractions.validate()?;
    let m = g.num_edges();
    if m < 3 {
        return Err(HarnessError::TooFewEdges {
            edges: m,
            splits: 3,
        });
    }
    let order = sorted_edges(g);
    let (c1, c2) = fractions.cuts(m);
    let ts = |pos: usize| {
        if pos == 0 {
            i64::MIN
        } else {
            g.edge(order[pos - 1]).timestamp
        }
    };
    let spec = SplitSpec {
        mode: SplitMode::TemporalEdges,
        fractions,
        t1: ts(c1),
        t2: ts(c2),
        sizes: [c1, c2 - c1, m - c2],
    };
    let masks = [
        order[..c1].to_vec(),
        order[c1..c2].to_vec(),
        order[c2..].to_vec(),
    ];
    let snapshots = [
        prefix_graph(g, &order, c1),
        prefix_graph(g, &order, c2),
        prefix_graph(g, &order, m),
    ];
    Ok(TemporalSplit {
        spec,
        order,
        snapshots,
        masks,
    })
}

/// Node-level split: nodes ordered by their first transaction (isolated
/// nodes last, ties by node id) and cut at cumulative fractions. Snapshot
/// `k` holds every edge up to the first-transaction time of the last node
/// of split `k`.
pub fn temporal_node_split(
    g: &DirectedMultigraph,
    fractions: SplitFractions,
) -> Result<TemporalSplit, HarnessError> {
    fractions.validate()?;
    let m = g.num_edges();
    if m < 3 {
        return Err(HarnessError::TooFewEdges {
            edges: m,
            splits: 3,
        });
    }
    let n = g.num_nodes();
    let mut first = vec![i64::MAX; n];
    for e in g.edges() {
        first[e.src] = first[e.src].min(e.timestamp);
        first[e.dst] = first[e.dst].min(e.timestamp);
    }
    let mut nodes: Vec<NodeId> = (0..n).collect();
    nodes.sort_by_key(|&v| (first[v], v));
    let (c1, c2) = fractions.cuts(n);
    let cut_time = |pos: usize| {
        if pos == 0 {
            i64::MIN
        } else {
            first[nodes[pos - 1]]
        }
    };
    let (t1, t2) = (cut_time(c1), cut_time(c2));
    let order = sorted_edges(g);
    let upto = |t: i64| order.partition_point(|&e| g.edge(e).timestamp <= t);
    let spec = SplitSpec {
        mode: SplitMode::TemporalNodes,
        fractions,
        t1,
        t2,
        sizes: [c1, c2 - c1, n - c2],
    };
    let masks = [
        nodes[..c1].to_vec(),
        nodes[c1..c2].to_vec(),
        nodes[c2..].to_vec(),
    ];
    let snapshots = [
        prefix_graph(g, &order, upto(t1)),
        prefix_graph(g, &order, upto(t2)),
        prefix_graph(g, &order, m),
    ];
    Ok(TemporalSplit {
        spec,
        order,
        snapshots,
        masks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EdgeInput;

    fn chain(ts: &[i64]) -> DirectedMultigraph {
        let n = ts.len() + 1;
        DirectedMultigraph::build(
            n,
            ts.iter()
                .enumerate()
                .map(|(i, &t)| EdgeInput::new(i, i + 1, t))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn sixty_twenty_twenty_on_ten_edges() {
        let g = chain(&[9, 3, 7, 1, 0, 5, 8, 2, 6, 4]);
        let s = temporal_edge_split(&g, SplitFractions::default()).unwrap();
        assert_eq!(
            s.masks.iter().map(Vec::len).collect::<Vec<_>>(),
            vec![6, 2, 2]
        );
        assert_eq!(s.spec.sizes, [6, 2, 2]);
        assert_eq!(s.snapshots[2].num_edges(), 10);
        assert_eq!(s.snapshots[0].num_edges(), 6);
        assert_eq!((s.spec.t1, s.spec.t2), (5, 7));
        assert!(s.snapshots[0]
            .edges()
            .iter()
            .all(|e| e.timestamp <= s.spec.t1));
        assert_eq!(s.local_edge_range(1), 6..8);
    }

    #[test]
    fn equal_timestamps_keep_edge_id_order() {
        let g = chain(&[4; 10]);
        let s = temporal_edge_split(&g, SplitFractions::default()).unwrap();
        assert_eq!(s.masks[0], (0..6).collect::<Vec<_>>());
        assert_eq!(s.masks[2], vec![8, 9]);
    }

    #[test]
    fn too_few_edges() {
        let g = chain(&[1, 2]);
        assert!(matches!(
            temporal_edge_split(&g, SplitFractions::default()),
            Err(HarnessError::TooFewEdges {
                edges: 2,
                splits: 3
            })
        ));
    }

    #[test]
    fn bad_fractions() {
        let g = chain(&[1, 2, 3]);
        assert!(temporal_edge_split(&g, SplitFractions::new(0.5, 0.2, 0.2)).is_err());
    }

    #[test]
    fn node_split_sizes() {
        // 20 nodes on a path, first-seen time = index
        let g = chain(&(0..19).collect::<Vec<i64>>());
        let s = temporal_node_split(&g, SplitFractions::new(0.65, 0.15, 0.20)).unwrap();
        assert_eq!(s.spec.sizes, [13, 3, 4]);
        assert_eq!(s.masks[0], (0..13).collect::<Vec<_>>());
        assert!(s.spec.t1 <= s.spec.t2);
        assert!(s.snapshots[0]
            .edges()
            .iter()
            .all(|e| e.timestamp <= s.spec.t1));
    }
}
