//! Directed multigraph storage with dual adjacency indices.
//!
//! Nodes are dense indices in `0..n`. Edges are timestamped, may carry a
//! feature vector, and may be parallel (same `src`, `dst`). Each node keeps an
//! outgoing and an incoming list of `(neighbor, edge_id)` pairs in edge-id
//! order, so both directions can be traversed without scanning the edge list.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// Dense node index in `0..n`.
pub type NodeId = usize;

/// Dense edge index in `0..m`.
pub type EdgeId = usize;

/// A single directed transaction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub id: EdgeId,
    pub src: NodeId,
    pub dst: NodeId,
    pub timestamp: i64,
    #[serde(default)]
    pub features: Vec<f64>,
}

/// Edge as supplied to [`DirectedMultigraph::build`]; the id is optional and
/// defaults to the insertion position.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeInput {
    pub id: Option<EdgeId>,
    pub src: NodeId,
    pub dst: NodeId,
    pub timestamp: i64,
    pub features: Vec<f64>,
}

impl EdgeInput {
    pub fn new(src: NodeId, dst: NodeId, timestamp: i64) -> Self {
        Self {
            id: None,
            src,
            dst,
            timestamp,
            features: Vec::new(),
        }
    }

    pub fn with_features(mut self, features: Vec<f64>) -> Self {
        self.features = features;
        self
    }

    pub fn with_id(mut self, id: EdgeId) -> Self {
        self.id = Some(id);
        self
    }
}

/// Direction selector used by degree/fan statistics and labelers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    In,
    Out,
}

/// Immutable directed multigraph.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedMultigraph {
    n: usize,
    edges: Vec<EdgeRecord>,
    out_adj: Vec<Vec<(NodeId, EdgeId)>>,
    in_adj: Vec<Vec<(NodeId, EdgeId)>>,
    node_features: Option<Vec<Vec<f64>>>,
}

impl DirectedMultigraph {
    /// Builds a graph from `n` nodes and a list of edges.
    ///
    /// Edge ids are either all absent (assigned by insertion order) or, when
    /// given, must be a permutation of `0..m`. The `edges` vector is stored
    /// sorted by id, which equals insertion order when ids are absent.
    pub fn build(n: usize, edges: Vec<EdgeInput>) -> Result<Self, GraphError> {
        let m = edges.len();
        let explicit = edges.iter().filter(|e| e.id.is_some()).count();
        if explicit != 0 && explicit != m {
            return Err(GraphError::MixedEdgeIds);
        }
        let mut slots: Vec<Option<EdgeRecord>> = vec![None; m];
        for (pos, e) in edges.into_iter().enumerate() {
            if e.src >= n {
                return Err(GraphError::NodeOutOfRange { node: e.src, n });
            }
            if e.dst >= n {
                return Err(GraphError::NodeOutOfRange { node: e.dst, n });
            }
            let id = e.id.unwrap_or(pos);
            if id >= m {
                return Err(GraphError::EdgeIdNotDense { id, m });
            }
            if slots[id].is_some() {
                return Err(GraphError::DuplicateEdgeId(id));
            }
            slots[id] = Some(EdgeRecord {
                id,
                src: e.src,
                dst: e.dst,
                timestamp: e.timestamp,
                features: e.features,
            });
        }
        let edges: Vec<EdgeRecord> = slots.into_iter().map(|s| s.expect("dense ids")).collect();
        Ok(Self::from_records(n, edges))
    }

    /// Builds from records whose ids are already `0..m` in order.
    pub(crate) fn from_records(n: usize, edges: Vec<EdgeRecord>) -> Self {
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for e in &edges {
            debug_assert!(e.src < n && e.dst < n);
            out_adj[e.src].push((e.dst, e.id));
            in_adj[e.dst].push((e.src, e.id));
        }
        Self {
            n,
            edges,
            out_adj,
            in_adj,
            node_features: None,
        }
    }

    /// Attaches per-node feature vectors (one row per node).
    pub fn with_node_features(mut self, features: Vec<Vec<f64>>) -> Result<Self, GraphError> {
        if features.len() != self.n {
            return Err(GraphError::NodeFeatureRows {
                rows: features.len(),
                n: self.n,
            });
        }
        self.node_features = Some(features);
        Ok(self)
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[EdgeRecord] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> &EdgeRecord {
        &self.edges[e]
    }

    pub fn node_features(&self) -> Option<&[Vec<f64>]> {
        self.node_features.as_deref()
    }

    /// Width of edge feature vectors (0 if there are no edges).
    pub fn edge_feature_dim(&self) -> usize {
        self.edges.first().map_or(0, |e| e.features.len())
    }

    /// Outgoing `(dst, edge_id)` pairs of `v` in edge-id order.
    pub fn out_edges(&self, v: NodeId) -> &[(NodeId, EdgeId)] {
        &self.out_adj[v]
    }

    /// Incoming `(src, edge_id)` pairs of `v` in edge-id order.
    pub fn in_edges(&self, v: NodeId) -> &[(NodeId, EdgeId)] {
        &self.in_adj[v]
    }

    fn check(&self, v: NodeId) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfRange { node: v, n: self.n })
        }
    }

    /// Number of incoming edges, parallel edges counted separately.
    pub fn degree_in(&self, v: NodeId) -> Result<usize, GraphError> {
        self.check(v)?;
        Ok(self.in_adj[v].len())
    }

    /// Number of outgoing edges, parallel edges counted separately.
    pub fn degree_out(&self, v: NodeId) -> Result<usize, GraphError> {
        self.check(v)?;
        Ok(self.out_adj[v].len())
    }

    pub fn degree(&self, v: NodeId, dir: Direction) -> Result<usize, GraphError> {
        match dir {
            Direction::In => self.degree_in(v),
            Direction::Out => self.degree_out(v),
        }
    }

    /// Number of distinct incoming neighbors.
    pub fn fan_in(&self, v: NodeId) -> Result<usize, GraphError> {
        self.check(v)?;
        Ok(distinct(&self.in_adj[v]))
    }

    /// Number of distinct outgoing neighbors.
    pub fn fan_out(&self, v: NodeId) -> Result<usize, GraphError> {
        self.check(v)?;
        Ok(distinct(&self.out_adj[v]))
    }

    pub fn fan(&self, v: NodeId, dir: Direction) -> Result<usize, GraphError> {
        match dir {
            Direction::In => self.fan_in(v),
            Direction::Out => self.fan_out(v),
        }
    }

    /// Sorted, deduplicated out-neighbor set of every node.
    pub fn out_neighbor_sets(&self) -> Vec<Vec<NodeId>> {
        self.out_adj.iter().map(|adj| sorted_unique(adj)).collect()
    }

    /// Sorted, deduplicated in-neighbor set of every node.
    pub fn in_neighbor_sets(&self) -> Vec<Vec<NodeId>> {
        self.in_adj.iter().map(|adj| sorted_unique(adj)).collect()
    }

    /// Sorted neighbor set ignoring direction (excluding `v` itself).
    pub fn undirected_neighbors(&self, v: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self.out_adj[v]
            .iter()
            .chain(self.in_adj[v].iter())
            .map(|&(u, _)| u)
            .filter(|&u| u != v)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Returns the graph with nodes relabeled by `perm` (old id -> new id).
    /// Edge ids and edge order are preserved.
    pub fn permute_nodes(&self, perm: &[NodeId]) -> Self {
        assert_eq!(perm.len(), self.n);
        let edges = self
            .edges
            .iter()
            .map(|e| EdgeRecord {
                src: perm[e.src],
                dst: perm[e.dst],
                ..e.clone()
            })
            .collect();
        let mut g = Self::from_records(self.n, edges);
        if let Some(feats) = &self.node_features {
            let mut moved = vec![Vec::new(); self.n];
            for (old, row) in feats.iter().enumerate() {
                moved[perm[old]] = row.clone();
            }
            g.node_features = Some(moved);
        }
        g
    }

    /// Returns a copy with every edge feature vector replaced.
    pub fn with_edge_features(&self, features: Vec<Vec<f64>>) -> Self {
        assert_eq!(features.len(), self.edges.len());
        let edges = self
            .edges
            .iter()
            .zip(features)
            .map(|(e, f)| EdgeRecord {
                features: f,
                ..e.clone()
            })
            .collect();
        let mut g = Self::from_records(self.n, edges);
        g.node_features = self.node_features.clone();
        g
    }
}

fn distinct(adj: &[(NodeId, EdgeId)]) -> usize {
    adj.iter().map(|&(u, _)| u).collect::<HashSet<_>>().len()
}

fn sorted_unique(adj: &[(NodeId, EdgeId)]) -> Vec<NodeId> {
    let mut out: Vec<NodeId> = adj.iter().map(|&(u, _)| u).collect();
    out.sort_unstable();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn edges(list: &[(usize, usize)]) -> Vec<EdgeInput> {
        list.iter()
            .enumerate()
            .map(|(t, &(s, d))| EdgeInput::new(s, d, t as i64))
            .collect()
    }

    #[test]
    fn single_edge() {
        let g = DirectedMultigraph::build(2, edges(&[(0, 1)])).unwrap();
        assert_eq!(g.out_edges(0), &[(1, 0)]);
        assert_eq!(g.in_edges(1), &[(0, 0)]);
        assert!(g.out_edges(1).is_empty());
    }

    #[test]
    fn empty_graph() {
        let g = DirectedMultigraph::build(1, vec![]).unwrap();
        assert_eq!(g.num_edges(), 0);
        assert!(g.out_edges(0).is_empty() && g.in_edges(0).is_empty());
        assert_eq!(g.degree_in(0).unwrap(), 0);
    }

    #[test]
    fn ego_counterexample_left_has_18_edges() {
        // u = 0 joined both ways to a..f = 1..6; blue 3-cycles a->b->c->a, d->e->f->d.
        let mut list = Vec::new();
        for x in 1..=6 {
            list.push((0, x));
            list.push((x, 0));
        }
        list.extend([(1, 2), (2, 3), (3, 1), (4, 5), (5, 6), (6, 4)]);
        let g = DirectedMultigraph::build(7, edges(&list)).unwrap();
        assert_eq!(g.num_edges(), 18);
    }

    #[test]
    fn rejects_bad_endpoints_and_ids() {
        assert!(matches!(
            DirectedMultigraph::build(2, edges(&[(0, 2)])),
            Err(GraphError::NodeOutOfRange { node: 2, n: 2 })
        ));
        let dup = vec![
            EdgeInput::new(0, 1, 0).with_id(0),
            EdgeInput::new(1, 0, 1).with_id(0),
        ];
        assert!(matches!(
            DirectedMultigraph::build(2, dup),
            Err(GraphError::DuplicateEdgeId(0))
        ));
        let mixed = vec![EdgeInput::new(0, 1, 0).with_id(1), EdgeInput::new(1, 0, 1)];
        assert!(DirectedMultigraph::build(2, mixed).is_err());
    }

    #[test]
    fn explicit_ids_reorder_edges() {
        let list = vec![
            EdgeInput::new(0, 1, 5).with_id(1),
            EdgeInput::new(1, 0, 7).with_id(0),
        ];
        let g = DirectedMultigraph::build(2, list).unwrap();
        assert_eq!(g.edge(0).timestamp, 7);
        assert_eq!(g.edge(1).src, 0);
    }

    #[test]
    fn degree_and_fan_statistics() {
        // Degree-in = 4 example: two parallel edges from node 1 plus single edges from 2 and 3.
        let g = DirectedMultigraph::build(4, edges(&[(1, 0), (1, 0), (2, 0), (3, 0)])).unwrap();
        assert_eq!(g.degree_in(0).unwrap(), 4);
        assert_eq!(g.fan_in(0).unwrap(), 3);
        // Fan-out = 2 example: two parallel pairs.
        let g = DirectedMultigraph::build(3, edges(&[(0, 1), (0, 1), (0, 2), (0, 2)])).unwrap();
        assert_eq!(g.degree_out(0).unwrap(), 4);
        assert_eq!(g.fan_out(0).unwrap(), 2);
        // Reverse MP example: a->c, a->d, b->d.
        let g = DirectedMultigraph::build(4, edges(&[(0, 2), (0, 3), (1, 3)])).unwrap();
        assert_eq!(g.degree_out(0).unwrap(), 2);
        assert_eq!(g.degree_out(1).unwrap(), 1);
        assert!(g.degree_in(9).is_err());
        assert!(g.fan_out(4).is_err());
    }

    #[test]
    fn node_both_in_and_out_neighbor_counts_twice() {
        let g = DirectedMultigraph::build(2, edges(&[(0, 1), (1, 0)])).unwrap();
        assert_eq!(g.fan_in(0).unwrap(), 1);
        assert_eq!(g.fan_out(0).unwrap(), 1);
        assert_eq!(g.undirected_neighbors(0), vec![1]);
    }

    #[test]
    fn k_parallel_edges_from_one_source() {
        let g = DirectedMultigraph::build(2, edges(&[(0, 1); 5])).unwrap();
        assert_eq!(g.fan_in(1).unwrap(), 1);
        assert_eq!(g.degree_in(1).unwrap(), 5);
    }
}
