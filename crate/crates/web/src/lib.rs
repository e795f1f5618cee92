//! Browser bindings for three operations: generate a circulant ring and
//! label it, assign ports and BFS node IDs, and compare two rooted nodes
//! under colour refinement. Each returns a JSON string.

use mgnn_core::generator::{random_circulant, GeneratorParams};
use mgnn_core::io::{parse_edge_csv, EdgeList};
use mgnn_core::nodeid::{assign_unique_ids, id_colors, wl_refine, WlExtras};
use mgnn_core::oracles::label_all;
use mgnn_core::{assign_ports, TaskId, Thresholds};
use serde::Serialize;
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest ring the page will draw and label.
pub const MAX_DEMO_NODES: usize = 4096;

fn to_json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("plain data serializes")
}

fn parse(csv: &str) -> Result<EdgeList, String> {
    parse_edge_csv(csv.as_bytes(), "input").map_err(|e| e.to_string())
}

fn node(list: &EdgeList, name: &str) -> Result<usize, String> {
    list.resolve(name.trim())
        .ok_or_else(|| format!("no node '{}'", name.trim()))
}

/// Edges plus per-node labels and per-task positive ratios.
pub fn generate_ring_json(n: usize, d: f64, r: f64, seed: u64) -> Result<String, String> {
    if n > MAX_DEMO_NODES {
        return Err(format!("n must be at most {MAX_DEMO_NODES}"));
    }
    let params = GeneratorParams::new(n, d, r, seed);
    params.validate()?;
    let g = random_circulant(&params);
    let labels = label_all(&g, Thresholds::default());
    let ratios = labels.positive_ratios();
    let edges: Vec<[usize; 2]> = g.edges().iter().map(|e| [e.src, e.dst]).collect();
    let tasks: Vec<_> = TaskId::ALL
        .iter()
        .map(|t| json!({ "task": t.column(), "ratio": ratios[t.index()], "labels": labels.column(*t) }))
        .collect();
    Ok(to_json(&json!({ "n": n, "edges": edges, "tasks": tasks })))
}

/// Ports per edge, and node IDs with declined proposals from `root`.
pub fn node_ids_json(csv: &str, root: &str) -> Result<String, String> {
    let list = parse(csv)?;
    let g = &list.graph;
    let root = node(&list, root)?;
    let ports = assign_ports(g);
    let ids = assign_unique_ids(g, &ports, root).map_err(|e| e.to_string())?;
    let edges: Vec<_> = g
        .edges()
        .iter()
        .map(|e| {
            json!({
                "src": list.name(e.src),
                "dst": list.name(e.dst),
                "timestamp": e.timestamp,
                "in_port": ports.in_port[e.id],
                "out_port": ports.out_port[e.id],
            })
        })
        .collect();
    let nodes: Vec<_> = (0..g.num_nodes())
        .map(|v| {
            json!({
                "node": list.name(v),
                "id": ids.labels[v].as_ref().map(|l| l.render()),
                "round": ids.round[v],
                "declined": ids.proposals[v].iter().skip(1).map(|p| p.render()).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(to_json(
        &json!({ "root": list.name(root), "edges": edges, "nodes": nodes }),
    ))
}

/// Refinement settings for [`compare_rooted_json`].
#[derive(Debug, Clone, Copy, Default)]
pub struct Refinement {
    pub rounds: usize,
    pub ports: bool,
    pub reverse: bool,
    pub ids: bool,
}

/// Rooted refinement of `u` in the left graph and `v` in the right graph.
pub fn compare_rooted_json(
    left: &str,
    right: &str,
    u: &str,
    v: &str,
    opts: Refinement,
) -> Result<String, String> {
    let (l, r) = (parse(left)?, parse(right)?);
    let (u, v) = (node(&l, u)?, node(&r, v)?);
    let run = |list: &EdgeList, root: usize| -> Result<(u128, Vec<u128>, usize), String> {
        let g = &list.graph;
        let ports = assign_ports(g);
        let init = if opts.ids {
            Some(id_colors(
                &assign_unique_ids(g, &ports, root).map_err(|e| e.to_string())?,
            ))
        } else {
            None
        };
        let extras = WlExtras {
            ego_root: Some(root),
            ports: opts.ports.then_some(&ports),
            reverse: opts.reverse,
            initial: init.as_deref(),
        };
        let c = wl_refine(g, opts.rounds, extras);
        Ok((c.last()[root], c.multiset(), c.num_classes(c.rounds())))
    };
    let (a, b) = (run(&l, u)?, run(&r, v)?);
    Ok(to_json(&json!({
        "distinguished": (a.0, &a.1) != (b.0, &b.1),
        "left_classes": a.2,
        "right_classes": b.2,
    })))
}

#[wasm_bindgen]
pub fn generate_ring(n: usize, d: f64, r: f64, seed: u32) -> Result<String, JsError> {
    generate_ring_json(n, d, r, u64::from(seed)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn node_ids(csv: &str, root: &str) -> Result<String, JsError> {
    node_ids_json(csv, root).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn compare_rooted(
    left: &str,
    right: &str,
    u: &str,
    v: &str,
    rounds: usize,
    ports: bool,
    reverse: bool,
    ids: bool,
) -> Result<String, JsError> {
    compare_rooted_json(
        left,
        right,
        u,
        v,
        Refinement {
            rounds,
            ports,
            reverse,
            ids,
        },
    )
    .map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    const EXAMPLE: &str = "src,dst,timestamp\nB1,A,0\nA,B1,1\nA,B2,2\nB3,A,3\nB1,C,4\nB2,C,5\n";

    fn hub(cycles: &[(usize, usize)]) -> String {
        let mut rows = String::from("src,dst,timestamp\n");
        let mut t = 0;
        for x in 1..=6 {
            rows.push_str(&format!("0,{x},{t}\n{x},0,{}\n", t + 1));
            t += 2;
        }
        for (s, d) in cycles {
            rows.push_str(&format!("{s},{d},{t}\n"));
            t += 1;
        }
        rows
    }

    #[test]
    fn ring_has_edges_and_eleven_tasks() {
        let v: Value = serde_json::from_str(&generate_ring_json(64, 6.0, 3.0, 1).unwrap()).unwrap();
        assert_eq!(v["edges"].as_array().unwrap().len(), 192);
        assert_eq!(v["tasks"].as_array().unwrap().len(), 11);
        assert!(generate_ring_json(MAX_DEMO_NODES + 1, 6.0, 3.0, 1).is_err());
    }

    #[test]
    fn example_ids() {
        let v: Value = serde_json::from_str(&node_ids_json(EXAMPLE, "A").unwrap()).unwrap();
        let ids: Vec<&str> = v["nodes"]
            .as_array()
            .unwrap()
            .iter()
            .map(|n| n["id"].as_str().unwrap())
            .collect();
        assert_eq!(ids, ["11", "1", "12", "17", "112"]);
        assert!(node_ids_json(EXAMPLE, "Z").is_err());
    }

    #[test]
    fn hub_pair_comparison() {
        let left = hub(&[(1, 2), (2, 3), (3, 1), (4, 5), (5, 6), (6, 4)]);
        let right = hub(&[(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 1)]);
        let cmp = |ports, reverse, ids| {
            let opts = Refinement {
                rounds: 7,
                ports,
                reverse,
                ids,
            };
            let v: Value =
                serde_json::from_str(&compare_rooted_json(&left, &right, "0", "0", opts).unwrap())
                    .unwrap();
            v["distinguished"].as_bool().unwrap()
        };
        assert!(!cmp(false, true, false));
        assert!(cmp(true, true, false));
        assert!(cmp(false, false, true));
    }
}
