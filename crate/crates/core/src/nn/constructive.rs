//! Hand-set single-layer weights under which a message-passing layer outputs
//! an exact per-node statistic from constant input `h = 1`.
//!
//! * [`Construction::DegreeOut`]: sum aggregation with reverse MP; the
//!   update MLP selects `a_out`, the count of outgoing edges.
//! * [`Construction::FanIn`]: max aggregation over raw `in_port` features.
//! * [`Construction::FanOut`]: max aggregation over `out_port` in the
//!   reverse direction.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::NnError;
use crate::graph::DirectedMultigraph;
use crate::nn::matrix::Matrix;
use crate::nn::model::{GnnLayerConfig, GraphTensors, MpLayer, ParamSource};
use crate::nn::params::ParamStore;
use crate::nn::tape::{Aggregation, Tape};
use crate::ports::assign_ports;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    DegreeOut,
    FanIn,
    FanOut,
}

impl Construction {
    pub fn layer_config(self) -> GnnLayerConfig {
        let (aggregation, reverse_mp, edge_dim) = match self {
            Construction::DegreeOut => (Aggregation::Sum, true, 0),
            Construction::FanIn => (Aggregation::Max, false, 2),
            Construction::FanOut => (Aggregation::Max, true, 2),
        };
        GnnLayerConfig {
            in_dim: 1,
            hidden_dim: 1,
            edge_dim,
            aggregation,
            reverse_mp,
        }
    }

    /// The layer with every weight zeroed except the selecting ones.
    pub fn build(self) -> (MpLayer, ParamStore) {
        let mut store = ParamStore::new();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let layer = MpLayer::new(
            &mut ParamSource::Init {
                store: &mut store,
                rng: &mut rng,
            },
            "layer",
            self.layer_config(),
        )
        .expect("fresh parameters");
        for id in store.ids().collect::<Vec<_>>() {
            store
                .value_mut(id)
                .data_mut()
                .iter_mut()
                .for_each(|x| *x = 0.0);
        }
        let mut set = |name: &str, values: &[f64]| {
            let id = store.id(name).expect("constructed path");
            store.value_mut(id).data_mut().copy_from_slice(values);
        };
        match self {
            Construction::DegreeOut => {
                set("layer.msg_out.w_node", &[1.0]);
                set("layer.upd.0.w", &[0.0, 0.0, 1.0]);
            }
            Construction::FanIn => {
                set("layer.msg_in.w_edge", &[1.0, 0.0]);
                set("layer.upd.0.w", &[0.0, 1.0]);
            }
            Construction::FanOut => {
                set("layer.msg_out.w_edge", &[0.0, 1.0]);
                set("layer.upd.0.w", &[0.0, 0.0, 1.0]);
            }
        }
        set("layer.upd.1.w", &[1.0]);
        (layer, store)
    }

    /// One forward pass of the constructed layer on `g` (ports from timestamps).
    pub fn evaluate(self, g: &DirectedMultigraph) -> Result<Vec<f64>, NnError> {
        let (layer, store) = self.build();
        let ports = assign_ports(g);
        let use_ports = self.layer_config().edge_dim == 2;
        let gt = GraphTensors::from_graph(g, use_ports.then_some(&ports), None, false);
        let mut tape = Tape::new();
        let h = tape.constant(Matrix::filled(g.num_nodes(), 1, 1.0));
        let out = layer.forward(&mut tape, &store, h, &gt)?;
        Ok(tape.value(out).data().to_vec())
    }
}
