//! Message-passing layers and the GIN-style model with the three directed
//! multigraph adaptations.
//!
//! A layer computes, for every edge `(u, v)`,
//! `msg = relu(W_node h(u) + W_edge x(u,v) + b)` (a one-layer MLP on the
//! concatenation of source state and edge features), aggregates messages per
//! receiving node, and updates with a two-layer MLP:
//!
//! ```text
//! a_in(v)  = AGG_in  { msg_in(u, v)  : (u, v) in E }
//! a_out(v) = AGG_out { msg_out(w, v) : (v, w) in E }     (reverse MP only)
//! h'(v)    = MLP_upd(h(v) || a_in(v) [|| a_out(v)])
//! ```
//!
//! Port numbers enter as two extra raw edge feature columns and ego IDs as an
//! extra node input column; both are assembled by the caller into
//! [`GraphTensors`].

use std::rc::Rc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::NnError;
use crate::graph::DirectedMultigraph;
use crate::nn::matrix::Matrix;
use crate::nn::params::{init_uniform, ParamId, ParamStore};
use crate::nn::tape::{Aggregation, EdgeConvInputs, Segments, Tape, Var};
use crate::ports::PortAssignment;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Adaptations {
    pub reverse_mp: bool,
    pub ports: bool,
    pub ego_ids: bool,
}

impl Adaptations {
    pub const NONE: Adaptations = Adaptations {
        reverse_mp: false,
        ports: false,
        ego_ids: false,
    };
    pub const ALL: Adaptations = Adaptations {
        reverse_mp: true,
        ports: true,
        ego_ids: true,
    };

    /// Short label such as `GIN+rev+ports+ego`.
    pub fn label(&self) -> String {
        let mut s = String::from("GIN");
        if self.reverse_mp {
            s.push_str("+rev");
        }
        if self.ports {
            s.push_str("+ports");
        }
        if self.ego_ids {
            s.push_str("+ego");
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Readout {
    Node,
    Edge,
}

/// Configuration of one message-passing layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GnnLayerConfig {
    pub in_dim: usize,
    pub hidden_dim: usize,
    /// Width of the per-edge input features (raw features plus ports).
    pub edge_dim: usize,
    pub aggregation: Aggregation,
    pub reverse_mp: bool,
}

/// Whole-model configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub num_layers: usize,
    pub hidden_dim: usize,
    pub adaptations: Adaptations,
    pub readout: Readout,
    pub aggregation: Aggregation,
    pub minority_class_weight: f64,
    /// Raw node feature width, excluding the ego flag.
    pub node_in_dim: usize,
    /// Raw edge feature width, excluding port columns.
    pub edge_in_dim: usize,
    pub use_edge_features: bool,
    pub num_outputs: usize,
    /// Average each layer's output with its input.
    #[serde(default = "default_true")]
    pub residual: bool,
}

fn default_true() -> bool {
    true
}

impl ModelConfig {
    pub fn node_input_width(&self) -> usize {
        self.node_in_dim + usize::from(self.adaptations.ego_ids)
    }

    pub fn edge_input_width(&self) -> usize {
        let raw = if self.use_edge_features {
            self.edge_in_dim
        } else {
            0
        };
        raw + if self.adaptations.ports { 2 } else { 0 }
    }

    pub fn layer_config(&self) -> GnnLayerConfig {
        GnnLayerConfig {
            in_dim: self.hidden_dim,
            hidden_dim: self.hidden_dim,
            edge_dim: self.edge_input_width(),
            aggregation: self.aggregation,
            reverse_mp: self.adaptations.reverse_mp,
        }
    }

    pub fn validate(&self) -> Result<(), NnError> {
        let bad = |msg: &str| {
            Err(NnError::Shape {
                op: "model config",
                detail: msg.to_string(),
            })
        };
        if self.hidden_dim == 0 {
            return bad("hidden_dim must be at least 1");
        }
        if self.num_outputs == 0 {
            return bad("num_outputs must be at least 1");
        }
        if !(self.minority_class_weight > 0.0 && self.minority_class_weight.is_finite()) {
            return bad("minority_class_weight must be positive");
        }
        if self.node_input_width() == 0 {
            return bad("model needs at least one node input column");
        }
        Ok(())
    }
}

/// A graph (or disjoint union of graphs) prepared for the model.
#[derive(Debug, Clone)]
pub struct GraphTensors {
    pub num_nodes: usize,
    pub src: Rc<Vec<usize>>,
    pub dst: Rc<Vec<usize>>,
    /// Edge ids grouped by destination.
    pub in_segments: Rc<Segments>,
    /// Edge ids grouped by source.
    pub out_segments: Rc<Segments>,
    pub node_x: Matrix,
    pub edge_x: Rc<Matrix>,
}

impl GraphTensors {
    pub fn new(
        num_nodes: usize,
        src: Vec<usize>,
        dst: Vec<usize>,
        node_x: Matrix,
        edge_x: Matrix,
    ) -> Self {
        assert_eq!(src.len(), dst.len());
        assert_eq!(edge_x.rows(), src.len());
        assert_eq!(node_x.rows(), num_nodes);
        let in_segments = Rc::new(Segments::from_keys(num_nodes, &dst));
        let out_segments = Rc::new(Segments::from_keys(num_nodes, &src));
        Self {
            num_nodes,
            src: Rc::new(src),
            dst: Rc::new(dst),
            in_segments,
            out_segments,
            node_x,
            edge_x: Rc::new(edge_x),
        }
    }

    /// Tensors for a whole graph: constant node input `1`, optional ego
    /// column, raw edge features and/or port columns.
    pub fn from_graph(
        g: &DirectedMultigraph,
        ports: Option<&PortAssignment>,
        ego_center: Option<usize>,
        use_edge_features: bool,
    ) -> Self {
        let n = g.num_nodes();
        let node_cols = 1 + usize::from(ego_center.is_some());
        let mut node_x = Matrix::zeros(n, node_cols);
        for v in 0..n {
            node_x.set(v, 0, 1.0);
        }
        if let Some(c) = ego_center {
            node_x.set(c, 1, 1.0);
        }
        let raw = if use_edge_features {
            g.edge_feature_dim()
        } else {
            0
        };
        let cols = raw + if ports.is_some() { 2 } else { 0 };
        let mut edge_x = Matrix::zeros(g.num_edges(), cols);
        for e in g.edges() {
            let row = edge_x.row_mut(e.id);
            row[..raw].copy_from_slice(&e.features[..raw]);
            if let Some(p) = ports {
                row[raw] = f64::from(p.in_port[e.id]);
                row[raw + 1] = f64::from(p.out_port[e.id]);
            }
        }
        let src = g.edges().iter().map(|e| e.src).collect();
        let dst = g.edges().iter().map(|e| e.dst).collect();
        Self::new(n, src, dst, node_x, edge_x)
    }

    pub fn num_edges(&self) -> usize {
        self.src.len()
    }
}

/// Registers parameters under a path prefix, either freshly initialized or
/// looked up in an existing store.
pub enum ParamSource<'a> {
    Init {
        store: &'a mut ParamStore,
        rng: &'a mut ChaCha8Rng,
    },
    Lookup(&'a ParamStore),
}

impl ParamSource<'_> {
    fn get(
        &mut self,
        path: &str,
        rows: usize,
        cols: usize,
        fan_in: usize,
    ) -> Result<ParamId, NnError> {
        match self {
            ParamSource::Init { store, rng } => {
                Ok(store.insert(path, init_uniform(*rng, rows, cols, fan_in)))
            }
            ParamSource::Lookup(store) => {
                let id = store.id(path)?;
                if store.value(id).shape() != (rows, cols) {
                    return Err(NnError::Checkpoint(format!(
                        "parameter {path} has shape {:?}, expected {:?}",
                        store.value(id).shape(),
                        (rows, cols)
                    )));
                }
                Ok(id)
            }
        }
    }
}

/// Dense ReLU MLP; no activation after the last layer.
#[derive(Debug, Clone)]
pub struct Mlp {
    layers: Vec<(ParamId, ParamId)>,
}

impl Mlp {
    pub fn new(src: &mut ParamSource<'_>, prefix: &str, dims: &[usize]) -> Result<Self, NnError> {
        let mut layers = Vec::new();
        for (i, w) in dims.windows(2).enumerate() {
            let weight = src.get(&format!("{prefix}.{i}.w"), w[0], w[1], w[0])?;
            let bias = src.get(&format!("{prefix}.{i}.b"), 1, w[1], w[0])?;
            layers.push((weight, bias));
        }
        Ok(Self { layers })
    }

    pub fn forward(&self, tape: &mut Tape, store: &ParamStore, x: Var) -> Result<Var, NnError> {
        let mut h = x;
        for (i, &(w, b)) in self.layers.iter().enumerate() {
            let wv = tape.param(store, w);
            let bv = tape.param(store, b);
            h = tape.linear(h, wv, Some(bv))?;
            if i + 1 < self.layers.len() {
                h = tape.relu(h);
            }
        }
        Ok(h)
    }
}

#[derive(Debug, Clone)]
struct EdgeMessage {
    w_node: ParamId,
    w_edge: Option<ParamId>,
    bias: ParamId,
}

impl EdgeMessage {
    fn new(src: &mut ParamSource<'_>, prefix: &str, cfg: &GnnLayerConfig) -> Result<Self, NnError> {
        let fan_in = cfg.in_dim + cfg.edge_dim;
        Ok(Self {
            w_node: src.get(
                &format!("{prefix}.w_node"),
                cfg.in_dim,
                cfg.hidden_dim,
                fan_in,
            )?,
            w_edge: if cfg.edge_dim > 0 {
                Some(src.get(
                    &format!("{prefix}.w_edge"),
                    cfg.edge_dim,
                    cfg.hidden_dim,
                    fan_in,
                )?)
            } else {
                None
            },
            bias: src.get(&format!("{prefix}.b"), 1, cfg.hidden_dim, fan_in)?,
        })
    }

    fn aggregate(
        &self,
        tape: &mut Tape,
        store: &ParamStore,
        h: Var,
        inputs: EdgeConvInputs,
    ) -> Result<Var, NnError> {
        let w = tape.param(store, self.w_node);
        let hw = tape.linear(h, w, None)?;
        let we = self.w_edge.map(|id| tape.param(store, id));
        let b = tape.param(store, self.bias);
        tape.edge_conv(hw, we, b, inputs)
    }
}

/// One message-passing layer with optional reverse direction.
#[derive(Debug, Clone)]
pub struct MpLayer {
    pub config: GnnLayerConfig,
    msg_in: EdgeMessage,
    msg_out: Option<EdgeMessage>,
    update: Mlp,
}

impl MpLayer {
    pub fn new(
        src: &mut ParamSource<'_>,
        prefix: &str,
        config: GnnLayerConfig,
    ) -> Result<Self, NnError> {
        let msg_in = EdgeMessage::new(src, &format!("{prefix}.msg_in"), &config)?;
        let msg_out = if config.reverse_mp {
            Some(EdgeMessage::new(
                src,
                &format!("{prefix}.msg_out"),
                &config,
            )?)
        } else {
            None
        };
        let parts = 2 + usize::from(config.reverse_mp);
        let upd_in = config.in_dim + (parts - 1) * config.hidden_dim;
        let update = Mlp::new(
            src,
            &format!("{prefix}.upd"),
            &[upd_in, config.hidden_dim, config.hidden_dim],
        )?;
        Ok(Self {
            config,
            msg_in,
            msg_out,
            update,
        })
    }

    /// Returns `MLP_upd(h || a_in [|| a_out])` for every node.
    pub fn forward(
        &self,
        tape: &mut Tape,
        store: &ParamStore,
        h: Var,
        g: &GraphTensors,
    ) -> Result<Var, NnError> {
        if tape.value(h).shape() != (g.num_nodes, self.config.in_dim) {
            return Err(NnError::Shape {
                op: "mp_forward",
                detail: format!(
                    "node states {:?}, expected ({}, {})",
                    tape.value(h).shape(),
                    g.num_nodes,
                    self.config.in_dim
                ),
            });
        }
        if g.edge_x.cols() != self.config.edge_dim {
            return Err(NnError::Shape {
                op: "mp_forward",
                detail: format!(
                    "{} edge feature columns, layer expects {}",
                    g.edge_x.cols(),
                    self.config.edge_dim
                ),
            });
        }
        let a_in = self.msg_in.aggregate(
            tape,
            store,
            h,
            EdgeConvInputs {
                edge_x: g.edge_x.clone(),
                gather: g.src.clone(),
                segments: g.in_segments.clone(),
                aggregation: self.config.aggregation,
            },
        )?;
        let mut parts = vec![h, a_in];
        if let Some(out) = &self.msg_out {
            let a_out = out.aggregate(
                tape,
                store,
                h,
                EdgeConvInputs {
                    edge_x: g.edge_x.clone(),
                    gather: g.dst.clone(),
                    segments: g.out_segments.clone(),
                    aggregation: self.config.aggregation,
                },
            )?;
            parts.push(a_out);
        }
        let x = tape.concat(&parts)?;
        self.update.forward(tape, store, x)
    }
}

/// Full model: input encoder, message-passing stack, node or edge readout.
#[derive(Debug, Clone)]
pub struct GnnModel {
    pub config: ModelConfig,
    encoder: (ParamId, ParamId),
    layers: Vec<MpLayer>,
    edge_embed: Option<(ParamId, ParamId)>,
    readout: Mlp,
}

impl GnnModel {
    /// Fresh model with parameters drawn from `seed`.
    pub fn init(config: ModelConfig, seed: u64) -> Result<(Self, ParamStore), NnError> {
        config.validate()?;
        let mut store = ParamStore::new();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = Self::build(
            config,
            &mut ParamSource::Init {
                store: &mut store,
                rng: &mut rng,
            },
        )?;
        Ok((model, store))
    }

    /// Binds a model to existing parameters (e.g. from a checkpoint).
    pub fn bind(config: ModelConfig, store: &ParamStore) -> Result<Self, NnError> {
        config.validate()?;
        Self::build(config, &mut ParamSource::Lookup(store))
    }

    fn build(config: ModelConfig, src: &mut ParamSource<'_>) -> Result<Self, NnError> {
        let h = config.hidden_dim;
        let nin = config.node_input_width();
        let encoder = (
            src.get("encoder.w", nin, h, nin)?,
            src.get("encoder.b", 1, h, nin)?,
        );
        let mut layers = Vec::new();
        for l in 0..config.num_layers {
            layers.push(MpLayer::new(
                src,
                &format!("layers.{l}"),
                config.layer_config(),
            )?);
        }
        let (edge_embed, readout_in) = match config.readout {
            Readout::Node => (None, h),
            Readout::Edge => {
                let ein = config.edge_input_width();
                let embed = (
                    src.get("edge_embed.w", ein, h, ein)?,
                    src.get("edge_embed.b", 1, h, ein)?,
                );
                (Some(embed), 2 * h + h)
            }
        };
        let readout = Mlp::new(src, "readout", &[readout_in, h, config.num_outputs])?;
        Ok(Self {
            config,
            encoder,
            layers,
            edge_embed,
            readout,
        })
    }

    pub fn layers(&self) -> &[MpLayer] {
        &self.layers
    }

    /// Width of the edge readout input: both endpoint states plus the edge embedding.
    pub fn edge_readout_width(&self) -> usize {
        2 * self.config.hidden_dim
            + if self.edge_embed.is_some() {
                self.config.hidden_dim
            } else {
                0
            }
    }

    /// Final node states.
    pub fn embed(
        &self,
        tape: &mut Tape,
        store: &ParamStore,
        g: &GraphTensors,
    ) -> Result<Var, NnError> {
        if g.node_x.cols() != self.config.node_input_width() {
            return Err(NnError::Shape {
                op: "embed",
                detail: format!(
                    "{} node input columns, model expects {}",
                    g.node_x.cols(),
                    self.config.node_input_width()
                ),
            });
        }
        let x = tape.constant(g.node_x.clone());
        let (w, b) = (
            tape.param(store, self.encoder.0),
            tape.param(store, self.encoder.1),
        );
        let mut h = tape.linear(x, w, Some(b))?;
        h = tape.relu(h);
        for layer in &self.layers {
            let upd = layer.forward(tape, store, h, g)?;
            let act = tape.relu(upd);
            h = if self.config.residual {
                let sum = tape.add(h, act)?;
                tape.scale(sum, 0.5)
            } else {
                act
            };
        }
        Ok(h)
    }

    /// Node readout logits for the given rows.
    pub fn forward_nodes(
        &self,
        tape: &mut Tape,
        store: &ParamStore,
        g: &GraphTensors,
        rows: Rc<Vec<usize>>,
    ) -> Result<Var, NnError> {
        let h = self.embed(tape, store, g)?;
        self.readout_nodes(tape, store, h, rows)
    }

    pub fn readout_nodes(
        &self,
        tape: &mut Tape,
        store: &ParamStore,
        h: Var,
        rows: Rc<Vec<usize>>,
    ) -> Result<Var, NnError> {
        let picked = tape.gather_rows(h, rows)?;
        self.readout.forward(tape, store, picked)
    }

    /// Edge readout logits from `h(src) || h(dst) || embed(edge features)`.
    pub fn forward_edges(
        &self,
        tape: &mut Tape,
        store: &ParamStore,
        g: &GraphTensors,
        edges: Rc<Vec<usize>>,
    ) -> Result<Var, NnError> {
        let (ew, eb) = self.edge_embed.ok_or(NnError::Shape {
            op: "forward_edges",
            detail: "model was built with node readout".into(),
        })?;
        let h = self.embed(tape, store, g)?;
        let src: Vec<usize> = edges.iter().map(|&e| g.src[e]).collect();
        let dst: Vec<usize> = edges.iter().map(|&e| g.dst[e]).collect();
        let hs = tape.gather_rows(h, Rc::new(src))?;
        let hd = tape.gather_rows(h, Rc::new(dst))?;
        let ex = tape.constant(g.edge_x.as_ref().clone());
        let ex = tape.gather_rows(ex, edges)?;
        let (w, b) = (tape.param(store, ew), tape.param(store, eb));
        let emb = tape.linear(ex, w, Some(b))?;
        let x = tape.concat(&[hs, hd, emb])?;
        self.readout.forward(tape, store, x)
    }

    /// Weighted BCE against `targets` (same shape as `logits`).
    pub fn loss(&self, tape: &mut Tape, logits: Var, targets: Rc<Matrix>) -> Result<Var, NnError> {
        tape.weighted_bce(logits, targets, self.config.minority_class_weight)
    }
}
