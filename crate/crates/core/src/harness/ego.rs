//! k-hop ego subgraphs and their batching into one disjoint union.

use std::collections::{HashMap, VecDeque};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::GraphError;
use crate::graph::{DirectedMultigraph, EdgeId, EdgeRecord, NodeId};
use crate::nn::matrix::Matrix;
use crate::nn::model::GraphTensors;
use crate::ports::PortAssignment;

/// Per-node uniform neighbor subsampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NeighborCap {
    pub cap: usize,
    pub seed: u64,
}

/// Induced subgraph on the nodes within `hops` undirected hops of `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct EgoSubgraph {
    pub center: NodeId,
    /// Local id -> global id, in BFS order; the center is local 0.
    pub nodes: Vec<NodeId>,
    /// Local edge id -> global edge id, ascending.
    pub edges: Vec<EdgeId>,
    /// Local graph with remapped endpoints and dense local edge ids.
    pub graph: DirectedMultigraph,
}

impl EgoSubgraph {
    /// Binary ego feature: 1 at the center, 0 elsewhere.
    pub fn ego_flag(&self) -> Vec<f64> {
        let mut f = vec![0.0; self.nodes.len()];
        f[0] = 1.0;
        f
    }

    /// Port pairs of the local edges, copied from the full graph.
    pub fn inherited_ports(&self, full: &PortAssignment) -> PortAssignment {
        PortAssignment {
            in_port: self.edges.iter().map(|&e| full.in_port[e]).collect(),
            out_port: self.edges.iter().map(|&e| full.out_port[e]).collect(),
        }
    }
}

fn capped_neighbors(g: &DirectedMultigraph, v: NodeId, cap: Option<NeighborCap>) -> Vec<NodeId> {
    let all = g.undirected_neighbors(v);
    match cap {
        Some(c) if all.len() > c.cap => {
            let mut rng =
                ChaCha8Rng::seed_from_u64(c.seed ^ (v as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let mut idx = sample(&mut rng, all.len(), c.cap).into_vec();
            idx.sort_unstable();
            idx.into_iter().map(|i| all[i]).collect()
        }
        _ => all,
    }
}

/// BFS over edges in both directions from `center`, up to `hops` hops.
pub fn sample_ego(
    g: &DirectedMultigraph,
    center: NodeId,
    hops: usize,
    cap: Option<NeighborCap>,
) -> Result<EgoSubgraph, GraphError> {
    if center >= g.num_nodes() {
        return Err(GraphError::NodeOutOfRange {
            node: center,
            n: g.num_nodes(),
        });
    }
    let mut local: HashMap<NodeId, usize> = HashMap::new();
    let mut nodes = vec![center];
    local.insert(center, 0);
    let mut queue = VecDeque::from([(center, 0usize)]);
    while let Some((v, dist)) = queue.pop_front() {
        if dist == hops {
            continue;
        }
        for u in capped_neighbors(g, v, cap) {
            if let std::collections::hash_map::Entry::Vacant(e) = local.entry(u) {
                e.insert(nodes.len());
                nodes.push(u);
                queue.push_back((u, dist + 1));
            }
        }
    }
    let mut edges: Vec<EdgeId> = Vec::new();
    for &v in &nodes {
        for &(w, e) in g.out_edges(v) {
            if local.contains_key(&w) {
                edges.push(e);
            }
        }
    }
    edges.sort_unstable();
    let records = edges
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            let r = g.edge(e);
            EdgeRecord {
                id: i,
                src: local[&r.src],
                dst: local[&r.dst],
                timestamp: r.timestamp,
                features: r.features.clone(),
            }
        })
        .collect();
    let graph = DirectedMultigraph::from_records(nodes.len(), records);
    Ok(EgoSubgraph {
        center,
        nodes,
        edges,
        graph,
    })
}

/// Disjoint union of ego subgraphs ready for a forward pass.
#[derive(Debug, Clone)]
pub struct EgoBatch {
    pub tensors: GraphTensors,
    /// Row of each center in the union, in input order.
    pub center_rows: Vec<usize>,
    pub centers: Vec<NodeId>,
}

/// Feature layout for tensors built from a graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureLayout {
    pub ports: bool,
    pub ego_flag: bool,
    pub edge_features: bool,
}

/// Node input: constant 1, then the graph's node features (if any).
fn node_row(g: &DirectedMultigraph, v: NodeId, out: &mut Vec<f64>) {
    out.push(1.0);
    if let Some(f) = g.node_features() {
        out.extend_from_slice(&f[v]);
    }
}

/// Raw node input width for `g` (constant column plus node features).
pub fn node_input_dim(g: &DirectedMultigraph) -> usize {
    1 + g
        .node_features()
        .and_then(|f| f.first())
        .map_or(0, Vec::len)
}

fn edge_row(
    g: &DirectedMultigraph,
    ports: &PortAssignment,
    e: EdgeId,
    layout: FeatureLayout,
    out: &mut Vec<f64>,
) {
    if layout.edge_features {
        out.extend_from_slice(&g.edge(e).features);
    }
    if layout.ports {
        out.push(f64::from(ports.in_port[e]));
        out.push(f64::from(ports.out_port[e]));
    }
}

fn edge_width(g: &DirectedMultigraph, layout: FeatureLayout) -> usize {
    (if layout.edge_features {
        g.edge_feature_dim()
    } else {
        0
    }) + if layout.ports { 2 } else { 0 }
}

/// Whole-graph tensors (no ego flag column unless `ego_center` is given).
pub fn full_graph_tensors(
    g: &DirectedMultigraph,
    ports: &PortAssignment,
    layout: FeatureLayout,
    ego_center: Option<NodeId>,
) -> GraphTensors {
    let n = g.num_nodes();
    let mut nx = Vec::new();
    for v in 0..n {
        node_row(g, v, &mut nx);
        if layout.ego_flag {
            nx.push(if ego_center == Some(v) { 1.0 } else { 0.0 });
        }
    }
    let node_cols = node_input_dim(g) + usize::from(layout.ego_flag);
    let mut ex = Vec::new();
    for e in 0..g.num_edges() {
        edge_row(g, ports, e, layout, &mut ex);
    }
    let src = g.edges().iter().map(|e| e.src).collect();
    let dst = g.edges().iter().map(|e| e.dst).collect();
    GraphTensors::new(
        n,
        src,
        dst,
        Matrix::from_vec(n, node_cols, nx),
        Matrix::from_vec(g.num_edges(), edge_width(g, layout), ex),
    )
}

/// Concatenates ego subgraphs of the full graph `g` into one batch; ports
/// and features are taken from the full graph.
pub fn batch_egos(
    g: &DirectedMultigraph,
    ports: &PortAssignment,
    egos: &[&EgoSubgraph],
    layout: FeatureLayout,
) -> EgoBatch {
    let total_nodes: usize = egos.iter().map(|e| e.nodes.len()).sum();
    let total_edges: usize = egos.iter().map(|e| e.edges.len()).sum();
    let node_cols = node_input_dim(g) + usize::from(layout.ego_flag);
    let mut nx = Vec::with_capacity(total_nodes * node_cols);
    let mut ex = Vec::with_capacity(total_edges * edge_width(g, layout));
    let mut src = Vec::with_capacity(total_edges);
    let mut dst = Vec::with_capacity(total_edges);
    let mut center_rows = Vec::with_capacity(egos.len());
    let mut offset = 0;
    for ego in egos {
        center_rows.push(offset);
        for (i, &v) in ego.nodes.iter().enumerate() {
            node_row(g, v, &mut nx);
            if layout.ego_flag {
                nx.push(if i == 0 { 1.0 } else { 0.0 });
            }
        }
        for (local, &e) in ego.edges.iter().enumerate() {
            let r = ego.graph.edge(local);
            src.push(offset + r.src);
            dst.push(offset + r.dst);
            edge_row(g, ports, e, layout, &mut ex);
        }
        offset += ego.nodes.len();
    }
    let tensors = GraphTensors::new(
        total_nodes,
        src,
        dst,
        Matrix::from_vec(total_nodes, node_cols, nx),
        Matrix::from_vec(total_edges, edge_width(g, layout), ex),
    );
    EgoBatch {
        tensors,
        center_rows,
        centers: egos.iter().map(|e| e.center).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::EdgeInput;
    use crate::ports::assign_ports;

    fn build(n: usize, list: &[(usize, usize)]) -> DirectedMultigraph {
        DirectedMultigraph::build(
            n,
            list.iter()
                .enumerate()
                .map(|(t, &(s, d))| EdgeInput::new(s, d, t as i64))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn three_hops_cover_small_diameter_graph() {
        let g = crate::nodeid::tests::bfs_example();
        let ego = sample_ego(&g, 0, 3, None).unwrap();
        assert_eq!(ego.nodes.len(), g.num_nodes());
        assert_eq!(ego.edges, (0..g.num_edges()).collect::<Vec<_>>());
        assert_eq!(ego.ego_flag().iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn isolated_center() {
        let g = build(3, &[(1, 2)]);
        let ego = sample_ego(&g, 0, 3, None).unwrap();
        assert_eq!(ego.nodes, vec![0]);
        assert!(ego.edges.is_empty());
    }

    #[test]
    fn out_of_range_center() {
        let g = build(2, &[]);
        assert!(sample_ego(&g, 2, 1, None).is_err());
    }

    #[test]
    fn cap_keeps_exactly_cap_neighbors_deterministically() {
        let g = build(6, &[(1, 0), (2, 0), (3, 0), (4, 0), (5, 0)]);
        let cap = Some(NeighborCap { cap: 2, seed: 7 });
        let a = sample_ego(&g, 0, 1, cap).unwrap();
        let b = sample_ego(&g, 0, 1, cap).unwrap();
        assert_eq!(a.nodes.len(), 3);
        assert_eq!(a, b);
    }

    #[test]
    fn hop_limit_respected() {
        // path 0 -> 1 -> 2 -> 3
        let g = build(4, &[(0, 1), (1, 2), (2, 3)]);
        let ego = sample_ego(&g, 0, 2, None).unwrap();
        assert_eq!(ego.nodes, vec![0, 1, 2]);
        assert_eq!(ego.edges, vec![0, 1]);
    }

    #[test]
    fn batch_offsets_and_inherited_ports() {
        let g = build(4, &[(0, 1), (1, 0), (2, 1), (3, 2), (0, 1)]);
        let p = assign_ports(&g);
        let layout = FeatureLayout {
            ports: true,
            ego_flag: true,
            edge_features: false,
        };
        let e0 = sample_ego(&g, 0, 1, None).unwrap();
        let e3 = sample_ego(&g, 3, 1, None).unwrap();
        let b = batch_egos(&g, &p, &[&e0, &e3], layout);
        assert_eq!(b.center_rows, vec![0, e0.nodes.len()]);
        assert_eq!(b.tensors.num_nodes, e0.nodes.len() + e3.nodes.len());
        assert_eq!(b.tensors.node_x.cols(), 2);
        let flags: f64 = (0..b.tensors.num_nodes)
            .map(|r| b.tensors.node_x.get(r, 1))
            .sum();
        assert_eq!(flags, 2.0);
        for (k, &e) in e0.edges.iter().chain(&e3.edges).enumerate() {
            assert_eq!(
                b.tensors.edge_x.row(k),
                &[f64::from(p.in_port[e]), f64::from(p.out_port[e])]
            );
        }
    }
}
