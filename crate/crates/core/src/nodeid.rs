//! Unique node IDs from an ego root, and 1-WL colour refinement.
//!
//! [`assign_unique_ids`] runs the synchronous BFS labeling that a message
//! passing network with ego IDs, port numbers and reverse message passing can
//! emulate: every active node proposes `id || out_port` to its out-neighbors
//! and `id || (n + in_port)` to its in-neighbors, and each newly reached node
//! keeps the smallest proposal. IDs are digit strings in base `2n`.
//!
//! [`wl_refine`] is the matching expressivity probe: colour refinement over
//! in-neighbors, optionally with port pairs on edges, out-neighbors, and a
//! distinct initial colour for the ego root.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::{DirectedMultigraph, NodeId};
use crate::ports::{assign_ports, PortAssignment};

/// Node ID as digits in base `2n`, most significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeIdLabel {
    pub digits: Vec<u32>,
}

impl NodeIdLabel {
    pub fn root() -> Self {
        Self { digits: vec![1] }
    }

    pub fn child(&self, digit: u32) -> Self {
        let mut digits = self.digits.clone();
        digits.push(digit);
        Self { digits }
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// Renders digits; concatenated when every digit is a single decimal
    /// character, dot-separated otherwise.
    pub fn render(&self) -> String {
        if self.digits.iter().all(|&d| d < 10) {
            self.digits.iter().map(|d| d.to_string()).collect()
        } else {
            self.digits
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join(".")
        }
    }
}

impl Ord for NodeIdLabel {
    // Numeric order in any base: shorter is smaller, then lexicographic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.digits
            .len()
            .cmp(&other.digits.len())
            .then_with(|| self.digits.cmp(&other.digits))
    }
}

impl PartialOrd for NodeIdLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for NodeIdLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Output of [`assign_unique_ids`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniqueIdAssignment {
    pub root: NodeId,
    /// Digit base, `2n`.
    pub base: usize,
    /// Label per node; `None` for nodes not connected to the root.
    pub labels: Vec<Option<NodeIdLabel>>,
    /// Round in which each node was labeled (root: 0).
    pub round: Vec<Option<usize>>,
    /// Distinct proposals each node received in its labeling round, ascending.
    pub proposals: Vec<Vec<NodeIdLabel>>,
    pub rounds: usize,
}

impl UniqueIdAssignment {
    pub fn unreachable(&self) -> Vec<NodeId> {
        (0..self.labels.len())
            .filter(|&v| self.labels[v].is_none())
            .collect()
    }

    /// Proposals that lost to a smaller one, per node.
    pub fn declined(&self) -> Vec<(NodeId, NodeIdLabel)> {
        let mut out = Vec::new();
        for (v, props) in self.proposals.iter().enumerate() {
            for p in props.iter().skip(1) {
                out.push((v, p.clone()));
            }
        }
        out
    }
}

/// Assigns BFS node IDs around `root`; edges are traversable in both
/// directions for reachability.
pub fn assign_unique_ids(
    g: &DirectedMultigraph,
    ports: &PortAssignment,
    root: NodeId,
) -> Result<UniqueIdAssignment, GraphError> {
    let n = g.num_nodes();
    if root >= n {
        return Err(GraphError::NodeOutOfRange { node: root, n });
    }
    let offset = n as u32;
    let mut labels: Vec<Option<NodeIdLabel>> = vec![None; n];
    let mut round: Vec<Option<usize>> = vec![None; n];
    let mut proposals: Vec<Vec<NodeIdLabel>> = vec![Vec::new(); n];
    labels[root] = Some(NodeIdLabel::root());
    round[root] = Some(0);
    let mut active = vec![root];
    let mut k = 0;
    while !active.is_empty() {
        k += 1;
        let mut inbox: BTreeMap<NodeId, Vec<NodeIdLabel>> = BTreeMap::new();
        for &v in &active {
            let id = labels[v].clone().expect("active nodes are labeled");
            for &(u, e) in g.out_edges(v) {
                if labels[u].is_none() {
                    inbox
                        .entry(u)
                        .or_default()
                        .push(id.child(ports.out_port[e]));
                }
            }
            for &(u, e) in g.in_edges(v) {
                if labels[u].is_none() {
                    inbox
                        .entry(u)
                        .or_default()
                        .push(id.child(offset + ports.in_port[e]));
                }
            }
        }
        active.clear();
        for (u, mut props) in inbox {
            props.sort();
            props.dedup();
            labels[u] = Some(props[0].clone());
            round[u] = Some(k);
            proposals[u] = props;
            active.push(u);
        }
    }
    Ok(UniqueIdAssignment {
        root,
        base: 2 * n,
        labels,
        round,
        proposals,
        rounds: k.saturating_sub(1),
    })
}

/// Options for [`wl_refine`].
#[derive(Debug, Clone, Copy, Default)]
pub struct WlExtras<'a> {
    /// Give this node a distinct initial colour.
    pub ego_root: Option<NodeId>,
    /// Include each edge's `(in_port, out_port)` with the neighbor colour.
    pub ports: Option<&'a PortAssignment>,
    /// Also refine over the multiset of out-neighbor colours.
    pub reverse: bool,
    /// Initial colours (e.g. hashed node IDs) mixed into round 0.
    pub initial: Option<&'a [u128]>,
}

/// Colours per round; `colors[0]` is the initial colouring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementColoring {
    pub colors: Vec<Vec<u128>>,
}

impl RefinementColoring {
    pub fn rounds(&self) -> usize {
        self.colors.len() - 1
    }

    pub fn last(&self) -> &[u128] {
        self.colors.last().expect("round 0 present")
    }

    /// Sorted colour multiset of the final round.
    pub fn multiset(&self) -> Vec<u128> {
        let mut c = self.last().to_vec();
        c.sort_unstable();
        c
    }

    /// Number of distinct colours in round `t`.
    pub fn num_classes(&self, t: usize) -> usize {
        let mut c = self.colors[t].clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    }
}

/// FNV-1a over 128 bits, keyed by folding the key into the offset basis.
#[derive(Debug, Clone)]
pub struct Fnv128 {
    state: u128,
}

impl Fnv128 {
    const OFFSET: u128 = 0x6c62272e07bb014262b821756295c58d;
    const PRIME: u128 = 0x0000000001000000000000000000013B;

    pub fn new(key: u64) -> Self {
        let mut h = Self {
            state: Self::OFFSET,
        };
        h.write(&key.to_le_bytes());
        h
    }

    pub fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.state ^= u128::from(b);
            self.state = self.state.wrapping_mul(Self::PRIME);
        }
    }

    pub fn write_u128(&mut self, x: u128) {
        self.write(&x.to_le_bytes());
    }

    pub fn finish(&self) -> u128 {
        self.state
    }
}

/// Hashes BFS node-ID labels into initial colours (unreachable nodes share one colour).
pub fn id_colors(ids: &UniqueIdAssignment) -> Vec<u128> {
    ids.labels
        .iter()
        .map(|l| {
            let mut h = Fnv128::new(0);
            match l {
                Some(l) => h.write(l.render().as_bytes()),
                None => h.write(b"-"),
            }
            h.finish()
        })
        .collect()
}

/// Runs `rounds` steps of colour refinement with the default hash key.
pub fn wl_refine(
    g: &DirectedMultigraph,
    rounds: usize,
    extras: WlExtras<'_>,
) -> RefinementColoring {
    wl_refine_keyed(g, rounds, extras, 0)
}

/// As [`wl_refine`], with an explicit hash key (rerun with another key to
/// rule out collisions).
pub fn wl_refine_keyed(
    g: &DirectedMultigraph,
    rounds: usize,
    extras: WlExtras<'_>,
    key: u64,
) -> RefinementColoring {
    let n = g.num_nodes();
    let init = |v: NodeId| {
        let mut h = Fnv128::new(key);
        h.write(b"init");
        h.write(&[u8::from(extras.ego_root == Some(v))]);
        if let Some(init) = extras.initial {
            h.write_u128(init[v]);
        }
        h.finish()
    };
    let mut colors = vec![(0..n).map(init).collect::<Vec<u128>>()];
    let port_of = |e: usize| {
        extras
            .ports
            .map_or((0, 0), |p| (p.in_port[e], p.out_port[e]))
    };
    for _ in 0..rounds {
        let prev = colors.last().expect("round present");
        let next = (0..n)
            .map(|v| {
                let mut h = Fnv128::new(key);
                h.write_u128(prev[v]);
                let mut ins: Vec<(u128, u32, u32)> = g
                    .in_edges(v)
                    .iter()
                    .map(|&(u, e)| {
                        let (a, b) = port_of(e);
                        (prev[u], a, b)
                    })
                    .collect();
                ins.sort_unstable();
                h.write(b"in");
                write_multiset(&mut h, &ins);
                if extras.reverse {
                    let mut outs: Vec<(u128, u32, u32)> = g
                        .out_edges(v)
                        .iter()
                        .map(|&(u, e)| {
                            let (a, b) = port_of(e);
                            (prev[u], a, b)
                        })
                        .collect();
                    outs.sort_unstable();
                    h.write(b"out");
                    write_multiset(&mut h, &outs);
                }
                h.finish()
            })
            .collect();
        colors.push(next);
    }
    RefinementColoring { colors }
}

/// Whether ego-rooted refinement separates root `a.1` of `a.0` from root
/// `b.1` of `b.0`: different root colours or different colour multisets
/// after `rounds` rounds. Ports, when enabled, come from timestamps.
pub fn ego_refinement_differs(
    a: (&DirectedMultigraph, NodeId),
    b: (&DirectedMultigraph, NodeId),
    rounds: usize,
    with_ports: bool,
    reverse: bool,
) -> bool {
    let run = |(g, root): (&DirectedMultigraph, NodeId)| {
        let ports = with_ports.then(|| assign_ports(g));
        let extras = WlExtras {
            ego_root: Some(root),
            ports: ports.as_ref(),
            reverse,
            initial: None,
        };
        let c = wl_refine(g, rounds, extras);
        (c.last()[root], c.multiset())
    };
    run(a) != run(b)
}

fn write_multiset(h: &mut Fnv128, items: &[(u128, u32, u32)]) {
    h.write(&(items.len() as u64).to_le_bytes());
    for &(c, a, b) in items {
        h.write_u128(c);
        h.write(&a.to_le_bytes());
        h.write(&b.to_le_bytes());
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::graph::EdgeInput;

    /// Five-node example: A=0, B1=1, B2=2, B3=3, C=4, with timestamps
    /// chosen to induce the example's port labels.
    pub(crate) fn bfs_example() -> DirectedMultigraph {
        let list = [
            (1, 0, 0), // B1->A (1,1)
            (0, 1, 1), // A->B1 (1,1)
            (0, 2, 2), // A->B2 (1,2)
            (3, 0, 3), // B3->A (2,1)
            (1, 4, 4), // B1->C (1,2)
            (2, 4, 5), // B2->C (2,1)
        ];
        DirectedMultigraph::build(
            5,
            list.iter()
                .map(|&(s, d, t)| EdgeInput::new(s, d, t))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn bfs_example_ports_match() {
        let g = bfs_example();
        let p = assign_ports(&g);
        let expect = [(1, 1), (1, 1), (1, 2), (2, 1), (1, 2), (2, 1)];
        for (e, &pair) in expect.iter().enumerate() {
            assert_eq!(p.get(e), pair, "edge {e}");
        }
    }

    #[test]
    fn bfs_example_labels() {
        let g = bfs_example();
        let p = assign_ports(&g);
        let a = assign_unique_ids(&g, &p, 0).unwrap();
        let shown: Vec<String> = a
            .labels
            .iter()
            .map(|l| l.as_ref().unwrap().render())
            .collect();
        assert_eq!(shown, vec!["1", "11", "12", "17", "112"]);
        let declined: Vec<(usize, String)> = a
            .declined()
            .into_iter()
            .map(|(v, l)| (v, l.render()))
            .collect();
        assert_eq!(
            declined,
            vec![(1, "16".to_string()), (4, "121".to_string())]
        );
        assert_eq!(a.base, 10);
        assert_eq!(a.rounds, 2);
    }

    #[test]
    fn single_node() {
        let g = DirectedMultigraph::build(1, vec![]).unwrap();
        let a = assign_unique_ids(&g, &assign_ports(&g), 0).unwrap();
        assert_eq!(a.labels, vec![Some(NodeIdLabel::root())]);
        assert!(assign_unique_ids(&g, &assign_ports(&g), 1).is_err());
    }

    #[test]
    fn unreachable_nodes_reported() {
        let g = DirectedMultigraph::build(3, vec![EdgeInput::new(1, 0, 0)]).unwrap();
        let a = assign_unique_ids(&g, &assign_ports(&g), 0).unwrap();
        assert_eq!(a.unreachable(), vec![2]);
        assert_eq!(a.labels[1].as_ref().unwrap().digits, vec![1, 4]);
    }

    #[test]
    fn label_order_is_numeric() {
        let a = NodeIdLabel { digits: vec![1, 9] };
        let b = NodeIdLabel {
            digits: vec![1, 1, 1],
        };
        let c = NodeIdLabel {
            digits: vec![1, 12],
        };
        assert!(a < b);
        assert!(a < c);
        assert_eq!(c.render(), "1.12");
    }

    #[test]
    fn zero_rounds_single_color() {
        let g = bfs_example();
        let c = wl_refine(&g, 0, WlExtras::default());
        assert_eq!(c.num_classes(0), 1);
    }

    #[test]
    fn refinement_is_monotone() {
        let g = bfs_example();
        let p = assign_ports(&g);
        let c = wl_refine(
            &g,
            4,
            WlExtras {
                ego_root: Some(0),
                ports: Some(&p),
                reverse: true,
                initial: None,
            },
        );
        for t in 0..4 {
            // every class at t+1 lies within a class at t
            let mut map = std::collections::HashMap::new();
            for v in 0..g.num_nodes() {
                let prev = *map.entry(c.colors[t + 1][v]).or_insert(c.colors[t][v]);
                assert_eq!(prev, c.colors[t][v]);
            }
            assert!(c.num_classes(t + 1) >= c.num_classes(t));
        }
    }
}
