//! Central-difference gradient checking.

use std::rc::Rc;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::NnError;
use crate::graph::{DirectedMultigraph, EdgeInput};
use crate::nn::matrix::Matrix;
use crate::nn::model::{Adaptations, GnnModel, GraphTensors, ModelConfig, Readout};
use crate::nn::params::ParamStore;
use crate::nn::tape::{Aggregation, Tape, Var};
use crate::ports::assign_ports;

/// Parameter count above which a random subsample is checked.
pub const FULL_CHECK_LIMIT: usize = 10_000;

/// Denominator floor: gradients smaller than this are compared absolutely.
pub const RELATIVE_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    /// Path and flat index of the worst scalar.
    pub worst: Option<(String, usize)>,
    pub checked: usize,
    /// Scalars whose perturbation crossed a ReLU kink or changed a max argmax.
    pub skipped_kinks: usize,
}

/// `|a - b| / max(|a|, |b|, RELATIVE_FLOOR)`.
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(RELATIVE_FLOOR)
}

/// Compares reverse-mode gradients of `loss` against central differences
/// with step `eps`, over every parameter scalar (or `FULL_CHECK_LIMIT` of
/// them drawn with `seed`).
pub fn grad_check<F>(
    store: &ParamStore,
    loss: F,
    eps: f64,
    seed: u64,
) -> Result<GradCheckReport, NnError>
where
    F: Fn(&mut Tape, &ParamStore) -> Result<Var, NnError>,
{
    let mut tape = Tape::tracking_branches();
    let root = loss(&mut tape, store)?;
    let base_signature = tape.branch_signature();
    let grads = tape.backward(root).for_params(store);
    for (id, g) in store.ids().zip(&grads) {
        if !g.all_finite() {
            return Err(NnError::NonFiniteGradient(store.name(id).to_string()));
        }
    }
    drop(tape);

    let mut scalars: Vec<(usize, usize)> = Vec::new();
    for id in store.ids() {
        for j in 0..store.value(id).len() {
            scalars.push((id.index(), j));
        }
    }
    if scalars.len() > FULL_CHECK_LIMIT {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked = sample(&mut rng, scalars.len(), FULL_CHECK_LIMIT).into_vec();
        picked.sort_unstable();
        scalars = picked.into_iter().map(|i| scalars[i]).collect();
    }

    let ids: Vec<_> = store.ids().collect();
    let mut work = store.clone();
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        worst: None,
        checked: 0,
        skipped_kinks: 0,
    };
    let eval = |work: &ParamStore| -> Result<(f64, u64), NnError> {
        let mut t = Tape::tracking_branches();
        let v = loss(&mut t, work)?;
        Ok((t.value(v).get(0, 0), t.branch_signature()))
    };
    for (p, j) in scalars {
        let id = ids[p];
        let orig = work.value(id).data()[j];
        work.value_mut(id).data_mut()[j] = orig + eps;
        let (plus, sig_p) = eval(&work)?;
        work.value_mut(id).data_mut()[j] = orig - eps;
        let (minus, sig_m) = eval(&work)?;
        work.value_mut(id).data_mut()[j] = orig;
        if sig_p != base_signature || sig_m != base_signature {
            report.skipped_kinks += 1;
            continue;
        }
        let numeric = (plus - minus) / (2.0 * eps);
        let err = relative_error(grads[p].data()[j], numeric);
        report.checked += 1;
        if report.worst.is_none() || err > report.max_rel_error {
            report.max_rel_error = err;
            report.worst = Some((store.name(id).to_string(), j));
        }
    }
    Ok(report)
}

/// Layer configuration switches exercised by [`check_random_instance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerVariant {
    pub aggregation: Aggregation,
    pub reverse_mp: bool,
    pub ports: bool,
    pub edge_features: bool,
}

impl LayerVariant {
    /// Sum/max x reverse on/off x ports on/off, edge features on.
    pub fn all() -> Vec<LayerVariant> {
        let mut out = Vec::new();
        for aggregation in [Aggregation::Sum, Aggregation::Max] {
            for reverse_mp in [false, true] {
                for ports in [false, true] {
                    out.push(LayerVariant {
                        aggregation,
                        reverse_mp,
                        ports,
                        edge_features: true,
                    });
                }
            }
        }
        out
    }
}

/// Random 10-node multigraph with one raw edge feature.
pub fn random_check_graph(rng: &mut ChaCha8Rng) -> DirectedMultigraph {
    let n = 10;
    let m = rng.gen_range(12..=24);
    let edges = (0..m)
        .map(|_| {
            let s = rng.gen_range(0..n);
            let d = rng.gen_range(0..n);
            EdgeInput::new(s, d, rng.gen_range(0..50)).with_features(vec![rng.gen_range(-1.0..1.0)])
        })
        .collect();
    DirectedMultigraph::build(n, edges).expect("valid random graph")
}

/// Gradient check of a randomly initialized two-layer model with ego IDs
/// and node readout on a random 10-node multigraph.
pub fn check_random_instance(
    variant: LayerVariant,
    seed: u64,
    eps: f64,
) -> Result<GradCheckReport, NnError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_check_graph(&mut rng);
    let ports = assign_ports(&g);
    let center = rng.gen_range(0..g.num_nodes());
    let gt = GraphTensors::from_graph(
        &g,
        variant.ports.then_some(&ports),
        Some(center),
        variant.edge_features,
    );
    let config = ModelConfig {
        num_layers: 2,
        hidden_dim: 4,
        adaptations: Adaptations {
            reverse_mp: variant.reverse_mp,
            ports: variant.ports,
            ego_ids: true,
        },
        readout: Readout::Node,
        aggregation: variant.aggregation,
        minority_class_weight: rng.gen_range(1.0..3.0),
        node_in_dim: 1,
        edge_in_dim: g.edge_feature_dim(),
        use_edge_features: variant.edge_features,
        num_outputs: 3,
        residual: true,
    };
    let (model, store) = GnnModel::init(config, seed ^ 0x5eed)?;
    let rows: Rc<Vec<usize>> = Rc::new((0..g.num_nodes()).collect());
    let targets = Rc::new(Matrix::from_vec(
        rows.len(),
        3,
        (0..rows.len() * 3)
            .map(|_| f64::from(rng.gen_range(0..2u8)))
            .collect(),
    ));
    grad_check(
        &store,
        |tape, st| {
            let z = model.forward_nodes(tape, st, &gt, rows.clone())?;
            model.loss(tape, z, targets.clone())
        },
        eps,
        seed,
    )
}
