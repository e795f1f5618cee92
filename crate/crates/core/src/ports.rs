//! Multigraph port numbering.
//!
//! At every node, incoming edges are grouped by source node and outgoing edges
//! by destination node. Groups are ordered by their earliest timestamp (ties:
//! smaller neighbor id first) and numbered from 1, so parallel edges share a
//! port and the largest in-port of a node equals its fan-in.

use serde::{Deserialize, Serialize};

use crate::graph::{DirectedMultigraph, EdgeId, NodeId};

/// Per-edge `(in_port, out_port)` pairs. `in_port` is the port at the
/// destination, `out_port` the port at the source.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PortAssignment {
    pub in_port: Vec<u32>,
    pub out_port: Vec<u32>,
}

impl PortAssignment {
    pub fn num_edges(&self) -> usize {
        self.in_port.len()
    }

    pub fn get(&self, e: EdgeId) -> (u32, u32) {
        (self.in_port[e], self.out_port[e])
    }
}

/// Computes the port assignment of `g`. Runs in `O(m log m)`.
pub fn assign_ports(g: &DirectedMultigraph) -> PortAssignment {
    let m = g.num_edges();
    let mut in_port = vec![0u32; m];
    let mut out_port = vec![0u32; m];
    for v in 0..g.num_nodes() {
        number_groups(g, g.in_edges(v), &mut in_port);
        number_groups(g, g.out_edges(v), &mut out_port);
    }
    PortAssignment { in_port, out_port }
}

fn number_groups(g: &DirectedMultigraph, adj: &[(NodeId, EdgeId)], ports: &mut [u32]) {
    if adj.is_empty() {
        return;
    }
    // (neighbor, earliest timestamp)
    let mut groups: Vec<(NodeId, i64)> = Vec::new();
    let mut sorted: Vec<(NodeId, EdgeId)> = adj.to_vec();
    sorted.sort_unstable();
    for &(u, e) in &sorted {
        let t = g.edge(e).timestamp;
        match groups.last_mut() {
            Some((last, first)) if *last == u => *first = (*first).min(t),
            _ => groups.push((u, t)),
        }
    }
    groups.sort_by_key(|&(u, t)| (t, u));
    let mut rank: Vec<(NodeId, u32)> = groups
        .iter()
        .enumerate()
        .map(|(i, &(u, _))| (u, i as u32 + 1))
        .collect();
    rank.sort_unstable();
    for &(u, e) in adj {
        let i = rank
            .binary_search_by_key(&u, |&(w, _)| w)
            .expect("neighbor grouped");
        ports[e] = rank[i].1;
    }
}

/// Appends `(in_port, out_port)` as two real columns to every edge's features.
pub fn ports_as_edge_features(g: &DirectedMultigraph, p: &PortAssignment) -> Vec<Vec<f64>> {
    g.edges()
        .iter()
        .map(|e| {
            let mut f = e.features.clone();
            f.push(f64::from(p.in_port[e.id]));
            f.push(f64::from(p.out_port[e.id]));
            f
        })
        .collect()
}
