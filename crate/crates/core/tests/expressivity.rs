use std::collections::{HashSet, VecDeque};

use mgnn_core::nodeid::{
    assign_unique_ids, ego_refinement_differs, id_colors, wl_refine, WlExtras,
};
use mgnn_core::{assign_ports, DirectedMultigraph, EdgeInput};
use proptest::prelude::*;

fn build(n: usize, edges: &[(usize, usize)]) -> DirectedMultigraph {
    DirectedMultigraph::build(
        n,
        edges
            .iter()
            .enumerate()
            .map(|(t, &(s, d))| EdgeInput::new(s, d, t as i64))
            .collect(),
    )
    .unwrap()
}

/// Hub 0 joined both ways to 1..=6, plus two 3-cycles (left) or one 6-cycle (right).
fn hub_pair() -> (DirectedMultigraph, DirectedMultigraph) {
    let mut spokes = Vec::new();
    for x in 1..=6 {
        spokes.push((0, x));
        spokes.push((x, 0));
    }
    let mut left = spokes.clone();
    left.extend([(1, 2), (2, 3), (3, 1), (4, 5), (5, 6), (6, 4)]);
    let mut right = spokes;
    right.extend([(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 1)]);
    (build(7, &left), build(7, &right))
}

#[test]
fn hub_pair_has_eighteen_edges() {
    let (l, r) = hub_pair();
    assert_eq!((l.num_edges(), r.num_edges()), (18, 18));
}

#[test]
fn ego_ids_alone_do_not_separate_hub_pair() {
    let (l, r) = hub_pair();
    for rounds in [7, 10] {
        assert!(!ego_refinement_differs(
            (&l, 0),
            (&r, 0),
            rounds,
            false,
            false
        ));
        assert!(!ego_refinement_differs(
            (&l, 0),
            (&r, 0),
            rounds,
            false,
            true
        ));
    }
}

#[test]
fn ports_and_reverse_separate_hub_pair() {
    let (l, r) = hub_pair();
    assert!(ego_refinement_differs((&l, 0), (&r, 0), 7, true, true));
}

#[test]
fn node_ids_as_features_separate_hub_pair() {
    let (l, r) = hub_pair();
    // standard in-neighbor refinement seeded with BFS IDs from the hub
    let run = |g: &DirectedMultigraph| {
        let ids = assign_unique_ids(g, &assign_ports(g), 0).unwrap();
        let init = id_colors(&ids);
        let c = wl_refine(
            g,
            7,
            WlExtras {
                ego_root: Some(0),
                ports: None,
                reverse: false,
                initial: Some(&init),
            },
        );
        (c.last()[0], c.multiset())
    };
    assert_ne!(run(&l), run(&r));
}

fn undirected_distances(g: &DirectedMultigraph, root: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; g.num_nodes()];
    dist[root] = Some(0);
    let mut q = VecDeque::from([root]);
    while let Some(v) = q.pop_front() {
        for u in g.undirected_neighbors(v) {
            if dist[u].is_none() {
                dist[u] = Some(dist[v].unwrap() + 1);
                q.push_back(u);
            }
        }
    }
    dist
}

/// Connected multigraph: random tree with random edge directions plus extra
/// edges (parallel edges and equal timestamps allowed), mean degree <= 6.
fn connected_multigraph() -> impl Strategy<Value = DirectedMultigraph> {
    (2usize..=32).prop_flat_map(|n| {
        let tree = prop::collection::vec(
            (any::<prop::sample::Index>(), any::<bool>(), 0i64..8),
            n - 1,
        );
        let extra = prop::collection::vec((0..n, 0..n, 0i64..8), 0..=2 * n);
        (Just(n), tree, extra).prop_map(|(n, tree, extra)| {
            let mut edges = Vec::new();
            for (i, (parent, flip, t)) in tree.into_iter().enumerate() {
                let child = i + 1;
                let p = parent.index(child);
                let (s, d) = if flip { (child, p) } else { (p, child) };
                edges.push(EdgeInput::new(s, d, t));
            }
            edges.extend(extra.into_iter().map(|(s, d, t)| EdgeInput::new(s, d, t)));
            DirectedMultigraph::build(n, edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bfs_ids_unique_with_distance_lengths(g in connected_multigraph()) {
        let ports = assign_ports(&g);
        for root in 0..g.num_nodes() {
            let a = assign_unique_ids(&g, &ports, root).unwrap();
            prop_assert!(a.unreachable().is_empty());
            let dist = undirected_distances(&g, root);
            let mut seen = HashSet::new();
            for (label, d) in a.labels.iter().zip(&dist) {
                let label = label.clone().unwrap();
                prop_assert_eq!(label.len(), d.unwrap() + 1);
                prop_assert!(seen.insert(label));
            }
        }
    }
}
