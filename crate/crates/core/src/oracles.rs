//! Exact node labels for the synthetic subgraph-detection tasks.
//!
//! Every labeler is an existence check over a small pattern, computed by
//! bounded enumeration on the simple graph underlying the multigraph
//! (parallel edges collapse, self-loops are ignored) except for the degree
//! tasks, which count edge multiplicity.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::OracleError;
use crate::graph::{DirectedMultigraph, Direction, NodeId};

/// The eleven synthetic tasks, in table-column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum TaskId {
    DegIn,
    DegOut,
    FanIn,
    FanOut,
    C2,
    C3,
    C4,
    C5,
    C6,
    ScatterGather,
    Biclique,
}

impl TaskId {
    pub const ALL: [TaskId; 11] = [
        TaskId::DegIn,
        TaskId::DegOut,
        TaskId::FanIn,
        TaskId::FanOut,
        TaskId::C2,
        TaskId::C3,
        TaskId::C4,
        TaskId::C5,
        TaskId::C6,
        TaskId::ScatterGather,
        TaskId::Biclique,
    ];

    /// The tasks not solved near-perfectly by partial adaptations.
    pub const COMPLEX: [TaskId; 5] = [
        TaskId::C4,
        TaskId::C5,
        TaskId::C6,
        TaskId::ScatterGather,
        TaskId::Biclique,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Short column name used in CSV headers.
    pub fn column(self) -> &'static str {
        match self {
            TaskId::DegIn => "deg_in",
            TaskId::DegOut => "deg_out",
            TaskId::FanIn => "fan_in",
            TaskId::FanOut => "fan_out",
            TaskId::C2 => "c2",
            TaskId::C3 => "c3",
            TaskId::C4 => "c4",
            TaskId::C5 => "c5",
            TaskId::C6 => "c6",
            TaskId::ScatterGather => "sg",
            TaskId::Biclique => "bc",
        }
    }

    pub fn cycle_length(self) -> Option<usize> {
        match self {
            TaskId::C2 => Some(2),
            TaskId::C3 => Some(3),
            TaskId::C4 => Some(4),
            TaskId::C5 => Some(5),
            TaskId::C6 => Some(6),
            _ => None,
        }
    }
}

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

impl From<TaskId> for String {
    fn from(t: TaskId) -> String {
        t.column().to_string()
    }
}

impl TryFrom<String> for TaskId {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl FromStr for TaskId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        TaskId::ALL
            .into_iter()
            .find(|t| t.column() == key)
            .or(match key.as_str() {
                "scatter_gather" | "s_g" => Some(TaskId::ScatterGather),
                "biclique" | "b_c" => Some(TaskId::Biclique),
                _ => None,
            })
            .ok_or_else(|| format!("unknown task '{s}'"))
    }
}

/// Thresholds for the count-based tasks; a node is positive when its count
/// is strictly greater than the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub degree: usize,
    pub fan: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self { degree: 3, fan: 3 }
    }
}

/// `n x 11` binary label matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelMatrix {
    n: usize,
    data: Vec<u8>,
}

impl LabelMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0; n * TaskId::ALL.len()],
        }
    }

    pub fn num_nodes(&self) -> usize {
        self.n
    }

    pub fn get(&self, v: NodeId, task: TaskId) -> u8 {
        self.data[v * TaskId::ALL.len() + task.index()]
    }

    pub fn set_column(&mut self, task: TaskId, column: &[u8]) {
        assert_eq!(column.len(), self.n);
        for (v, &y) in column.iter().enumerate() {
            self.data[v * TaskId::ALL.len() + task.index()] = y;
        }
    }

    pub fn column(&self, task: TaskId) -> Vec<u8> {
        (0..self.n).map(|v| self.get(v, task)).collect()
    }

    pub fn row(&self, v: NodeId) -> &[u8] {
        let w = TaskId::ALL.len();
        &self.data[v * w..(v + 1) * w]
    }

    /// Fraction of positive labels per task (0 for an empty graph).
    pub fn positive_ratios(&self) -> [f64; 11] {
        let mut out = [0.0; 11];
        if self.n == 0 {
            return out;
        }
        for t in TaskId::ALL {
            let pos = self.column(t).iter().filter(|&&y| y == 1).count();
            out[t.index()] = pos as f64 / self.n as f64;
        }
        out
    }
}

pub fn label_degree(g: &DirectedMultigraph, dir: Direction, threshold: usize) -> Vec<u8> {
    (0..g.num_nodes())
        .map(|v| u8::from(g.degree(v, dir).expect("in range") > threshold))
        .collect()
}

pub fn label_fan(g: &DirectedMultigraph, dir: Direction, threshold: usize) -> Vec<u8> {
    (0..g.num_nodes())
        .map(|v| u8::from(g.fan(v, dir).expect("in range") > threshold))
        .collect()
}

/// Sorted distinct out-neighbors per node with self-loops removed.
fn simple_out(g: &DirectedMultigraph) -> Vec<Vec<NodeId>> {
    let mut sets = g.out_neighbor_sets();
    for (v, s) in sets.iter_mut().enumerate() {
        s.retain(|&u| u != v);
    }
    sets
}

fn simple_in(g: &DirectedMultigraph) -> Vec<Vec<NodeId>> {
    let mut sets = g.in_neighbor_sets();
    for (v, s) in sets.iter_mut().enumerate() {
        s.retain(|&u| u != v);
    }
    sets
}

/// Labels nodes lying on a simple directed cycle with exactly `k` nodes.
pub fn label_cycles(g: &DirectedMultigraph, k: usize) -> Result<Vec<u8>, OracleError> {
    if !(2..=6).contains(&k) {
        return Err(OracleError::CycleLength(k));
    }
    let out = simple_out(g);
    let mut labels = vec![0u8; g.num_nodes()];
    let mut path = Vec::with_capacity(k);
    for start in 0..g.num_nodes() {
        path.clear();
        path.push(start);
        extend_cycle(&out, start, k, &mut path, &mut labels);
    }
    Ok(labels)
}

// Enumerates each cycle once, from its smallest node: every other node on
// the path must be larger than `start`.
fn extend_cycle(
    out: &[Vec<NodeId>],
    start: NodeId,
    k: usize,
    path: &mut Vec<NodeId>,
    labels: &mut [u8],
) {
    let last = *path.last().expect("non-empty path");
    if path.len() == k {
        if out[last].binary_search(&start).is_ok() {
            for &v in path.iter() {
                labels[v] = 1;
            }
        }
        return;
    }
    for &next in &out[last] {
        if next > start && !path.contains(&next) {
            path.push(next);
            extend_cycle(out, start, k, path, labels);
            path.pop();
        }
    }
}

/// Labels sinks of a scatter-gather pattern: a source `u != v` with at least
/// two distinct intermediates `w` (not `u` or `v`) such that `u -> w -> v`.
pub fn label_scatter_gather(g: &DirectedMultigraph) -> Vec<u8> {
    let ins = simple_in(g);
    let n = g.num_nodes();
    let mut count = vec![0u32; n];
    let mut touched = Vec::new();
    let mut labels = vec![0u8; n];
    for v in 0..n {
        'sink: for &w in &ins[v] {
            for &u in &ins[w] {
                if u == v {
                    continue;
                }
                if count[u] == 0 {
                    touched.push(u);
                }
                count[u] += 1;
                if count[u] >= 2 {
                    labels[v] = 1;
                    break 'sink;
                }
            }
        }
        for u in touched.drain(..) {
            count[u] = 0;
        }
    }
    labels
}

/// Labels sinks of a directed `K_{2,2}`: two distinct sources each with an
/// edge to `v` and to a second sink `t`, sources and sinks disjoint.
pub fn label_biclique(g: &DirectedMultigraph) -> Vec<u8> {
    let ins = simple_in(g);
    let out = simple_out(g);
    let n = g.num_nodes();
    let mut count = vec![0u32; n];
    let mut touched = Vec::new();
    let mut labels = vec![0u8; n];
    for v in 0..n {
        'sink: for &s in &ins[v] {
            for &t in &out[s] {
                if t == v {
                    continue;
                }
                if count[t] == 0 {
                    touched.push(t);
                }
                count[t] += 1;
                if count[t] >= 2 {
                    labels[v] = 1;
                    break 'sink;
                }
            }
        }
        for t in touched.drain(..) {
            count[t] = 0;
        }
    }
    labels
}

/// Computes one task column.
pub fn label_task(g: &DirectedMultigraph, task: TaskId, th: Thresholds) -> Vec<u8> {
    match task {
        TaskId::DegIn => label_degree(g, Direction::In, th.degree),
        TaskId::DegOut => label_degree(g, Direction::Out, th.degree),
        TaskId::FanIn => label_fan(g, Direction::In, th.fan),
        TaskId::FanOut => label_fan(g, Direction::Out, th.fan),
        TaskId::ScatterGather => label_scatter_gather(g),
        TaskId::Biclique => label_biclique(g),
        cycle => label_cycles(g, cycle.cycle_length().expect("cycle task")).expect("valid k"),
    }
}

/// Computes all eleven task columns.
pub fn label_all(g: &DirectedMultigraph, th: Thresholds) -> LabelMatrix {
    let mut m = LabelMatrix::zeros(g.num_nodes());
    for t in TaskId::ALL {
        m.set_column(t, &label_task(g, t, th));
    }
    m
}

/// Slow brute-force labelers used to cross-check the fast ones. They read
/// only the raw edge list.
pub mod reference {
    use crate::graph::DirectedMultigraph;

    /// `adj[u][v]` is true when some edge `u -> v` with `u != v` exists.
    pub fn simple_adjacency(g: &DirectedMultigraph) -> Vec<Vec<bool>> {
        let n = g.num_nodes();
        let mut adj = vec![vec![false; n]; n];
        for e in g.edges() {
            if e.src != e.dst {
                adj[e.src][e.dst] = true;
            }
        }
        adj
    }

    /// Checks every `k`-node subset for a directed Hamiltonian cycle.
    pub fn cycles_by_subsets(g: &DirectedMultigraph, k: usize) -> Vec<u8> {
        let adj = simple_adjacency(g);
        let n = g.num_nodes();
        let mut labels = vec![0u8; n];
        let mut subset = Vec::with_capacity(k);
        subsets(n, k, 0, &mut subset, &mut |s| {
            if has_hamiltonian_cycle(&adj, s) {
                for &v in s {
                    labels[v] = 1;
                }
            }
        });
        labels
    }

    fn subsets(n: usize, k: usize, from: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for v in from..n {
            cur.push(v);
            subsets(n, k, v + 1, cur, f);
            cur.pop();
        }
    }

    // Fixes the first node and tries every ordering of the rest.
    fn has_hamiltonian_cycle(adj: &[Vec<bool>], nodes: &[usize]) -> bool {
        let mut rest: Vec<usize> = nodes[1..].to_vec();
        permute(&mut rest, 0, &mut |order| {
            let mut prev = nodes[0];
            for &v in order {
                if !adj[prev][v] {
                    return false;
                }
                prev = v;
            }
            adj[prev][nodes[0]]
        })
    }

    fn permute(items: &mut [usize], i: usize, ok: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if i == items.len() {
            return ok(items);
        }
        for j in i..items.len() {
            items.swap(i, j);
            if permute(items, i + 1, ok) {
                items.swap(i, j);
                return true;
            }
            items.swap(i, j);
        }
        false
    }

    /// Sink `v` is positive when some source `u != v` reaches it through two
    /// distinct intermediates outside `{u, v}`.
    pub fn scatter_gather_brute(g: &DirectedMultigraph) -> Vec<u8> {
        let adj = simple_adjacency(g);
        let n = g.num_nodes();
        (0..n)
            .map(|v| {
                let hit = (0..n).filter(|&u| u != v).any(|u| {
                    (0..n)
                        .filter(|&w| w != u && w != v && adj[u][w] && adj[w][v])
                        .count()
                        >= 2
                });
                u8::from(hit)
            })
            .collect()
    }

    /// Sink `v` is positive when some second sink `t` shares at least two
    /// sources with it, sources disjoint from `{v, t}`.
    pub fn biclique_brute(g: &DirectedMultigraph) -> Vec<u8> {
        let adj = simple_adjacency(g);
        let n = g.num_nodes();
        (0..n)
            .map(|v| {
                let hit = (0..n).filter(|&t| t != v).any(|t| {
                    (0..n)
                        .filter(|&s| s != v && s != t && adj[s][v] && adj[s][t])
                        .count()
                        >= 2
                });
                u8::from(hit)
            })
            .collect()
    }
}
