//! Seeded random circulant multigraph generator.
//!
//! Nodes sit on a ring. Each of the `floor(n*d/2)` edges draws its tail
//! uniformly and its head from a normal distribution centred on the tail
//! with standard deviation `r`, rounded with `floor(x + 1/2)` and wrapped
//! modulo `n`. Heads equal to the tail are redrawn, so the output has no
//! self-loops. Edge timestamps are the generation index.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::graph::{DirectedMultigraph, EdgeRecord};

/// Name of the PRNG stream recorded in sidecars and checkpoints.
pub const PRNG_NAME: &str = "ChaCha8Rng(rand_chacha 0.3)+StandardNormal(ziggurat, rand_distr 0.4)";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub n: usize,
    pub d: f64,
    pub r: f64,
    pub seed: u64,
}

impl GeneratorParams {
    pub fn new(n: usize, d: f64, r: f64, seed: u64) -> Self {
        Self { n, d, r, seed }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.n < 2 {
            return Err(format!("n must be at least 2, got {}", self.n));
        }
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(format!("d must be positive, got {}", self.d));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(format!("r must be positive, got {}", self.r));
        }
        Ok(())
    }

    pub fn num_edges(&self) -> usize {
        (self.n as f64 * self.d / 2.0).floor() as usize
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }
}

/// Generates `G_{n,d,r}` from `params.seed`.
///
/// # Panics
/// If the parameters are invalid (see [`GeneratorParams::validate`]).
pub fn random_circulant(params: &GeneratorParams) -> DirectedMultigraph {
    if let Err(msg) = params.validate() {
        panic!("invalid generator parameters: {msg}");
    }
    let n = params.n;
    let m = params.num_edges();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut edges = Vec::with_capacity(m);
    for id in 0..m {
        let tail = rng.gen_range(0..n);
        let head = loop {
            let z: f64 = StandardNormal.sample(&mut rng);
            let x = tail as f64 + params.r * z;
            let rounded = (x + 0.5).floor() as i64;
            let head = rounded.rem_euclid(n as i64) as usize;
            if head != tail {
                break head;
            }
        };
        edges.push(EdgeRecord {
            id,
            src: tail,
            dst: head,
            timestamp: id as i64,
            features: Vec::new(),
        });
    }
    DirectedMultigraph::from_records(n, edges)
}

/// Generates `k` independent graphs using seeds `seed, seed+1, ..`.
pub fn generate_split_graphs(params: &GeneratorParams, k: usize) -> Vec<DirectedMultigraph> {
    assert!(k >= 1, "k must be at least 1");
    (0..k as u64)
        .map(|i| random_circulant(&params.with_seed(params.seed.wrapping_add(i))))
        .collect()
}

/// Shortest distance between two positions on a ring of `n` nodes.
pub fn ring_distance(a: usize, b: usize, n: usize) -> usize {
    let diff = a.abs_diff(b);
    diff.min(n - diff)
}

/// JSON sidecar written next to generated edge lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSidecar {
    pub params: GeneratorParams,
    pub prng: String,
    pub num_nodes: usize,
    pub num_edges: usize,
}

impl GeneratorSidecar {
    pub fn new(params: &GeneratorParams, g: &DirectedMultigraph) -> Self {
        Self {
            params: *params,
            prng: PRNG_NAME.to_string(),
            num_nodes: g.num_nodes(),
            num_edges: g.num_edges(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_count_is_floor_nd_over_two() {
        let g = random_circulant(&GeneratorParams::new(8192, 6.0, 11.1, 3));
        assert_eq!(g.num_edges(), 24576);
        let g = random_circulant(&GeneratorParams::new(7, 1.5, 2.0, 3));
        assert_eq!(g.num_edges(), 5);
    }

    #[test]
    fn two_nodes_forced_pair() {
        for seed in 0..20 {
            let g = random_circulant(&GeneratorParams::new(2, 1.0, 0.3, seed));
            assert_eq!(g.num_edges(), 1);
            let e = g.edge(0);
            assert_eq!(e.dst, 1 - e.src);
        }
    }

    #[test]
    fn no_self_loops_and_timestamps_are_indices() {
        let g = random_circulant(&GeneratorParams::new(500, 6.0, 1.0, 9));
        for e in g.edges() {
            assert_ne!(e.src, e.dst);
            assert_eq!(e.timestamp, e.id as i64);
        }
    }

    #[test]
    fn seed_determinism() {
        let p = GeneratorParams::new(300, 4.0, 5.0, 42);
        assert_eq!(random_circulant(&p), random_circulant(&p));
        assert_ne!(random_circulant(&p), random_circulant(&p.with_seed(43)));
    }

    #[test]
    fn split_graphs_use_derived_seeds() {
        let p = GeneratorParams::new(100, 6.0, 3.0, 10);
        let gs = generate_split_graphs(&p, 3);
        assert_eq!(gs.len(), 3);
        assert_ne!(gs[0], gs[1]);
        assert_ne!(gs[1], gs[2]);
        assert_eq!(gs, generate_split_graphs(&p, 3));
        assert_eq!(generate_split_graphs(&p, 1)[0], random_circulant(&p));
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(GeneratorParams::new(1, 6.0, 1.0, 0).validate().is_err());
        assert!(GeneratorParams::new(10, 0.0, 1.0, 0).validate().is_err());
        assert!(GeneratorParams::new(10, 1.0, -1.0, 0).validate().is_err());
    }

    #[test]
    fn ring_distance_wraps() {
        assert_eq!(ring_distance(0, 9, 10), 1);
        assert_eq!(ring_distance(2, 7, 10), 5);
        assert_eq!(ring_distance(4, 4, 10), 0);
    }
}
