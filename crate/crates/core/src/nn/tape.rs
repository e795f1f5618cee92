//! Matrix-level reverse-mode differentiation tape.
//!
//! Every operation appends a node holding its forward value; [`Tape::backward`]
//! walks the nodes in reverse and accumulates gradients. Message passing is a
//! single fused node ([`Tape::edge_conv`]) that keeps only the per-edge
//! messages for the backward pass.

use std::rc::Rc;

use crate::error::NnError;
use crate::nn::matrix::{gemm, Matrix};
use crate::nn::params::{ParamId, ParamStore};

/// Handle to a tape node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

/// Neighborhood aggregation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    Sum,
    Max,
}

/// Row groups (CSR): segment `s` owns `items[offsets[s]..offsets[s + 1]]`,
/// in ascending item order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segments {
    offsets: Vec<usize>,
    items: Vec<usize>,
}

impl Segments {
    /// Groups item `i` under segment `keys[i]`.
    pub fn from_keys(num_segments: usize, keys: &[usize]) -> Self {
        let mut offsets = vec![0usize; num_segments + 1];
        for &k in keys {
            offsets[k + 1] += 1;
        }
        for s in 0..num_segments {
            offsets[s + 1] += offsets[s];
        }
        let mut fill = offsets.clone();
        let mut items = vec![0usize; keys.len()];
        for (i, &k) in keys.iter().enumerate() {
            items[fill[k]] = i;
            fill[k] += 1;
        }
        Self { offsets, items }
    }

    pub fn num_segments(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn num_items(&self) -> usize {
        self.items.len()
    }

    pub fn segment(&self, s: usize) -> &[usize] {
        &self.items[self.offsets[s]..self.offsets[s + 1]]
    }
}

/// Constant inputs of a fused message-passing node.
#[derive(Debug, Clone)]
pub struct EdgeConvInputs {
    /// Per-edge raw features (`m x k`, `k` may be 0).
    pub edge_x: Rc<Matrix>,
    /// Row of the transformed node states each edge reads from.
    pub gather: Rc<Vec<usize>>,
    /// Edges grouped by receiving node.
    pub segments: Rc<Segments>,
    pub aggregation: Aggregation,
}

const NO_ARG: u32 = u32::MAX;

enum Op {
    Leaf,
    Param(ParamId),
    Linear {
        x: Var,
        w: Var,
        b: Option<Var>,
    },
    Relu(Var),
    Add(Var, Var),
    Scale(Var, f64),
    Concat(Vec<Var>),
    Gather {
        x: Var,
        idx: Rc<Vec<usize>>,
    },
    EdgeConv {
        hw: Var,
        w_edge: Option<Var>,
        bias: Var,
        inputs: EdgeConvInputs,
        msg: Matrix,
        argmax: Vec<u32>,
    },
    WeightedBce {
        logits: Var,
        targets: Rc<Matrix>,
        weight: f64,
    },
}

struct Node {
    value: Matrix,
    op: Op,
}

/// Records a forward computation.
pub struct Tape {
    nodes: Vec<Node>,
    track_branches: bool,
    branch_hash: u64,
}

impl Default for Tape {
    fn default() -> Self {
        Self::new()
    }
}

impl Tape {
    pub fn new() -> Self {
        Self {
            nodes: Vec::new(),
            track_branches: false,
            branch_hash: 0xcbf29ce484222325,
        }
    }

    /// Enables the branch signature used to detect ReLU kinks and argmax
    /// switches between two forward passes.
    pub fn tracking_branches() -> Self {
        Self {
            track_branches: true,
            ..Self::new()
        }
    }

    /// Hash of every ReLU activity pattern and max-aggregation argmax seen so
    /// far (only meaningful when tracking is enabled).
    pub fn branch_signature(&self) -> u64 {
        self.branch_hash
    }

    fn mix(&mut self, word: u64) {
        self.branch_hash ^= word;
        self.branch_hash = self.branch_hash.wrapping_mul(0x100000001b3);
    }

    fn push(&mut self, value: Matrix, op: Op) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    pub fn value(&self, v: Var) -> &Matrix {
        &self.nodes[v.0].value
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn constant(&mut self, value: Matrix) -> Var {
        self.push(value, Op::Leaf)
    }

    pub fn param(&mut self, store: &ParamStore, id: ParamId) -> Var {
        self.push(store.value(id).clone(), Op::Param(id))
    }

    /// `x * w (+ b)`, with `b` a `1 x cols` row broadcast over rows.
    pub fn linear(&mut self, x: Var, w: Var, b: Option<Var>) -> Result<Var, NnError> {
        let (xv, wv) = (self.value(x), self.value(w));
        if xv.cols() != wv.rows() {
            return Err(shape(
                "linear",
                format!("{:?} x {:?}", xv.shape(), wv.shape()),
            ));
        }
        let mut out = Matrix::zeros(xv.rows(), wv.cols());
        gemm(xv, false, wv, false, &mut out, 0.0);
        if let Some(b) = b {
            let bv = self.value(b);
            if bv.shape() != (1, out.cols()) {
                return Err(shape(
                    "linear bias",
                    format!("{:?} for {} outputs", bv.shape(), out.cols()),
                ));
            }
            let bias = bv.row(0).to_vec();
            for r in 0..out.rows() {
                for (o, bb) in out.row_mut(r).iter_mut().zip(&bias) {
                    *o += bb;
                }
            }
        }
        Ok(self.push(out, Op::Linear { x, w, b }))
    }

    pub fn relu(&mut self, x: Var) -> Var {
        let mut out = self.value(x).clone();
        out.data_mut().iter_mut().for_each(|v| *v = v.max(0.0));
        if self.track_branches {
            let words = mask_words(out.data().iter().map(|&v| v > 0.0));
            words.into_iter().for_each(|w| self.mix(w));
        }
        self.push(out, Op::Relu(x))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var, NnError> {
        let (av, bv) = (self.value(a), self.value(b));
        if av.shape() != bv.shape() {
            return Err(shape("add", format!("{:?} + {:?}", av.shape(), bv.shape())));
        }
        let mut out = av.clone();
        out.add_assign(bv);
        Ok(self.push(out, Op::Add(a, b)))
    }

    pub fn scale(&mut self, x: Var, s: f64) -> Var {
        let mut out = self.value(x).clone();
        out.data_mut().iter_mut().for_each(|v| *v *= s);
        self.push(out, Op::Scale(x, s))
    }

    /// Column-wise concatenation.
    pub fn concat(&mut self, parts: &[Var]) -> Result<Var, NnError> {
        let rows = self.value(parts[0]).rows();
        if parts.iter().any(|&p| self.value(p).rows() != rows) {
            return Err(shape("concat", "row counts differ".into()));
        }
        let cols: usize = parts.iter().map(|&p| self.value(p).cols()).sum();
        let mut out = Matrix::zeros(rows, cols);
        for r in 0..rows {
            let mut at = 0;
            for &p in parts {
                let src = self.nodes[p.0].value.row(r);
                out.row_mut(r)[at..at + src.len()].copy_from_slice(src);
                at += src.len();
            }
        }
        Ok(self.push(out, Op::Concat(parts.to_vec())))
    }

    /// Row selection `out[i] = x[idx[i]]`.
    pub fn gather_rows(&mut self, x: Var, idx: Rc<Vec<usize>>) -> Result<Var, NnError> {
        let xv = self.value(x);
        if let Some(&bad) = idx.iter().find(|&&i| i >= xv.rows()) {
            return Err(shape("gather_rows", format!("row {bad} of {}", xv.rows())));
        }
        let mut out = Matrix::zeros(idx.len(), xv.cols());
        for (i, &j) in idx.iter().enumerate() {
            out.row_mut(i).copy_from_slice(xv.row(j));
        }
        Ok(self.push(out, Op::Gather { x, idx }))
    }

    /// Fused message passing over one edge direction:
    /// `msg[e] = relu(hw[gather[e]] + edge_x[e] * w_edge + bias)`, then the
    /// configured aggregation of `msg` over each segment. Empty segments
    /// aggregate to zero; max ties go to the lowest edge index.
    pub fn edge_conv(
        &mut self,
        hw: Var,
        w_edge: Option<Var>,
        bias: Var,
        inputs: EdgeConvInputs,
    ) -> Result<Var, NnError> {
        let hwv = &self.nodes[hw.0].value;
        let h = hwv.cols();
        let m = inputs.gather.len();
        let k = inputs.edge_x.cols();
        if inputs.edge_x.rows() != m || inputs.segments.num_items() != m {
            return Err(shape(
                "edge_conv",
                format!("{} edges, {} feature rows", m, inputs.edge_x.rows()),
            ));
        }
        if self.value(bias).shape() != (1, h) {
            return Err(shape(
                "edge_conv bias",
                format!("{:?}", self.value(bias).shape()),
            ));
        }
        match w_edge {
            Some(w) if self.value(w).shape() != (k, h) => {
                return Err(shape(
                    "edge_conv edge weight",
                    format!("{:?} for {k} features", self.value(w).shape()),
                ));
            }
            None if k != 0 => {
                return Err(shape("edge_conv", "edge features without weight".into()))
            }
            _ => {}
        }
        if let Some(&bad) = inputs.gather.iter().find(|&&i| i >= hwv.rows()) {
            return Err(shape(
                "edge_conv gather",
                format!("row {bad} of {}", hwv.rows()),
            ));
        }
        let hwv = &self.nodes[hw.0].value;
        let bias_row = self.nodes[bias.0].value.row(0);
        let wv = w_edge.map(|w| &self.nodes[w.0].value);
        let mut msg = Matrix::zeros(m, h);
        for e in 0..m {
            let row = msg.row_mut(e);
            row.copy_from_slice(bias_row);
            if let Some(wv) = wv {
                for (j, &x) in inputs.edge_x.row(e).iter().enumerate() {
                    if x != 0.0 {
                        for (r, wj) in row.iter_mut().zip(wv.row(j)) {
                            *r += x * wj;
                        }
                    }
                }
            }
            for (r, s) in row.iter_mut().zip(hwv.row(inputs.gather[e])) {
                *r = (*r + s).max(0.0);
            }
        }
        let segs = &inputs.segments;
        let n = segs.num_segments();
        let mut out = Matrix::zeros(n, h);
        let mut argmax = Vec::new();
        match inputs.aggregation {
            Aggregation::Sum => {
                for v in 0..n {
                    let acc = out.row_mut(v);
                    for &e in segs.segment(v) {
                        for (a, x) in acc.iter_mut().zip(msg.row(e)) {
                            *a += x;
                        }
                    }
                }
            }
            Aggregation::Max => {
                argmax = vec![NO_ARG; n * h];
                for v in 0..n {
                    let acc = out.row_mut(v);
                    let arg = &mut argmax[v * h..(v + 1) * h];
                    for &e in segs.segment(v) {
                        for (c, &x) in msg.row(e).iter().enumerate() {
                            if arg[c] == NO_ARG || x > acc[c] {
                                acc[c] = x;
                                arg[c] = e as u32;
                            }
                        }
                    }
                }
            }
        }
        if self.track_branches {
            let words = mask_words(msg.data().iter().map(|&v| v > 0.0));
            words.into_iter().for_each(|w| self.mix(w));
            for &a in &argmax {
                self.mix(u64::from(a));
            }
        }
        Ok(self.push(
            out,
            Op::EdgeConv {
                hw,
                w_edge,
                bias,
                inputs,
                msg,
                argmax,
            },
        ))
    }

    /// Mean over all elements of `w*y*softplus(-z) + (1-y)*softplus(z)`.
    pub fn weighted_bce(
        &mut self,
        logits: Var,
        targets: Rc<Matrix>,
        weight: f64,
    ) -> Result<Var, NnError> {
        let z = self.value(logits);
        if z.shape() != targets.shape() {
            return Err(shape(
                "weighted_bce",
                format!("{:?} vs {:?}", z.shape(), targets.shape()),
            ));
        }
        if !z.all_finite() || !targets.all_finite() {
            return Err(NnError::NonFiniteInput("weighted_bce"));
        }
        let loss = weighted_bce_value(z.data(), targets.data(), weight);
        Ok(self.push(
            Matrix::from_vec(1, 1, vec![loss]),
            Op::WeightedBce {
                logits,
                targets,
                weight,
            },
        ))
    }

    /// Reverse pass from a `1 x 1` node.
    pub fn backward(&self, root: Var) -> Gradients {
        assert_eq!(
            self.value(root).shape(),
            (1, 1),
            "backward needs a scalar root"
        );
        let mut grads: Vec<Option<Matrix>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[root.0] = Some(Matrix::from_vec(1, 1, vec![1.0]));
        for i in (0..=root.0).rev() {
            let Some(g) = grads[i].take() else { continue };
            let node = &self.nodes[i];
            match &node.op {
                Op::Leaf | Op::Param(_) => {
                    grads[i] = Some(g);
                    continue;
                }
                Op::Linear { x, w, b } => {
                    let xv = self.value(*x);
                    let wv = self.value(*w);
                    let gx = slot(&mut grads, *x, xv.shape());
                    gemm(&g, false, wv, true, gx, 1.0);
                    let gw = slot(&mut grads, *w, wv.shape());
                    gemm(xv, true, &g, false, gw, 1.0);
                    if let Some(b) = b {
                        let gb = slot(&mut grads, *b, (1, g.cols()));
                        for r in 0..g.rows() {
                            for (a, x) in gb.row_mut(0).iter_mut().zip(g.row(r)) {
                                *a += x;
                            }
                        }
                    }
                }
                Op::Relu(x) => {
                    let gx = slot(&mut grads, *x, g.shape());
                    for ((a, gg), y) in gx
                        .data_mut()
                        .iter_mut()
                        .zip(g.data())
                        .zip(node.value.data())
                    {
                        if *y > 0.0 {
                            *a += gg;
                        }
                    }
                }
                Op::Add(a, b) => {
                    slot(&mut grads, *a, g.shape()).add_assign(&g);
                    slot(&mut grads, *b, g.shape()).add_assign(&g);
                }
                Op::Scale(x, s) => {
                    let gx = slot(&mut grads, *x, g.shape());
                    for (a, gg) in gx.data_mut().iter_mut().zip(g.data()) {
                        *a += s * gg;
                    }
                }
                Op::Concat(parts) => {
                    let mut at = 0;
                    for &p in parts {
                        let cols = self.value(p).cols();
                        let gp = slot(&mut grads, p, (g.rows(), cols));
                        for r in 0..g.rows() {
                            for (a, x) in gp.row_mut(r).iter_mut().zip(&g.row(r)[at..at + cols]) {
                                *a += x;
                            }
                        }
                        at += cols;
                    }
                }
                Op::Gather { x, idx } => {
                    let gx = slot(&mut grads, *x, self.value(*x).shape());
                    for (i, &j) in idx.iter().enumerate() {
                        for (a, x) in gx.row_mut(j).iter_mut().zip(g.row(i)) {
                            *a += x;
                        }
                    }
                }
                Op::EdgeConv {
                    hw,
                    w_edge,
                    bias,
                    inputs,
                    msg,
                    argmax,
                } => {
                    let h = msg.cols();
                    let segs = &inputs.segments;
                    // gradient w.r.t. pre-activation, masked by the ReLU
                    let mut gpre = Matrix::zeros(msg.rows(), h);
                    match inputs.aggregation {
                        Aggregation::Sum => {
                            for v in 0..segs.num_segments() {
                                for &e in segs.segment(v) {
                                    gpre.row_mut(e).copy_from_slice(g.row(v));
                                }
                            }
                        }
                        Aggregation::Max => {
                            for (slot_i, &e) in argmax.iter().enumerate() {
                                if e != NO_ARG {
                                    let (v, c) = (slot_i / h, slot_i % h);
                                    let cur = gpre.get(e as usize, c);
                                    gpre.set(e as usize, c, cur + g.get(v, c));
                                }
                            }
                        }
                    }
                    for (gp, y) in gpre.data_mut().iter_mut().zip(msg.data()) {
                        if *y <= 0.0 {
                            *gp = 0.0;
                        }
                    }
                    let ghw = slot(&mut grads, *hw, self.value(*hw).shape());
                    for (e, &src) in inputs.gather.iter().enumerate() {
                        for (a, x) in ghw.row_mut(src).iter_mut().zip(gpre.row(e)) {
                            *a += x;
                        }
                    }
                    let gb = slot(&mut grads, *bias, (1, h));
                    for e in 0..gpre.rows() {
                        for (a, x) in gb.row_mut(0).iter_mut().zip(gpre.row(e)) {
                            *a += x;
                        }
                    }
                    if let Some(w) = w_edge {
                        let gw = slot(&mut grads, *w, self.value(*w).shape());
                        gemm(&inputs.edge_x, true, &gpre, false, gw, 1.0);
                    }
                }
                Op::WeightedBce {
                    logits,
                    targets,
                    weight,
                } => {
                    let z = self.value(*logits);
                    let scale = g.get(0, 0) / z.len().max(1) as f64;
                    let gz = slot(&mut grads, *logits, z.shape());
                    for ((a, &zi), &yi) in
                        gz.data_mut().iter_mut().zip(z.data()).zip(targets.data())
                    {
                        *a += scale * (-weight * yi * sigmoid(-zi) + (1.0 - yi) * sigmoid(zi));
                    }
                }
            }
        }
        Gradients {
            grads,
            params: self.param_nodes(),
        }
    }

    fn param_nodes(&self) -> Vec<(usize, ParamId)> {
        self.nodes
            .iter()
            .enumerate()
            .filter_map(|(i, n)| match n.op {
                Op::Param(id) => Some((i, id)),
                _ => None,
            })
            .collect()
    }
}

/// Result of [`Tape::backward`].
pub struct Gradients {
    grads: Vec<Option<Matrix>>,
    params: Vec<(usize, ParamId)>,
}

impl Gradients {
    /// Gradient of a node, if it received any.
    pub fn get(&self, v: Var) -> Option<&Matrix> {
        self.grads[v.0].as_ref()
    }

    /// Gradients of every parameter in `store` order; parameters that did not
    /// take part in the forward pass get zeros.
    pub fn for_params(&self, store: &ParamStore) -> Vec<Matrix> {
        let mut out: Vec<Matrix> = store
            .ids()
            .map(|id| {
                let (r, c) = store.value(id).shape();
                Matrix::zeros(r, c)
            })
            .collect();
        for &(node, id) in &self.params {
            if let Some(g) = &self.grads[node] {
                out[id.index()].add_assign(g);
            }
        }
        out
    }
}

fn slot(grads: &mut [Option<Matrix>], v: Var, shape: (usize, usize)) -> &mut Matrix {
    grads[v.0].get_or_insert_with(|| Matrix::zeros(shape.0, shape.1))
}

fn shape(op: &'static str, detail: String) -> NnError {
    NnError::Shape { op, detail }
}

fn mask_words(bits: impl Iterator<Item = bool>) -> Vec<u64> {
    let mut words = Vec::new();
    let mut cur = 0u64;
    let mut count = 0;
    for b in bits {
        cur = (cur << 1) | u64::from(b);
        count += 1;
        if count == 64 {
            words.push(cur);
            cur = 0;
            count = 0;
        }
    }
    words.push(cur ^ ((count as u64) << 56));
    words
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Numerically stable `ln(1 + e^x)`.
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

pub(crate) fn weighted_bce_value(z: &[f64], y: &[f64], weight: f64) -> f64 {
    if z.is_empty() {
        return 0.0;
    }
    let total: f64 = z
        .iter()
        .zip(y)
        .map(|(&zi, &yi)| weight * yi * softplus(-zi) + (1.0 - yi) * softplus(zi))
        .sum();
    total / z.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tape_with(values: &[Matrix]) -> (Tape, Vec<Var>) {
        let mut t = Tape::new();
        let vars = values.iter().map(|m| t.constant(m.clone())).collect();
        (t, vars)
    }

    #[test]
    fn segments_group_in_item_order() {
        let s = Segments::from_keys(3, &[2, 0, 2, 1, 0]);
        assert_eq!(s.segment(0), &[1, 4]);
        assert_eq!(s.segment(1), &[3]);
        assert_eq!(s.segment(2), &[0, 2]);
        assert!(Segments::from_keys(2, &[]).segment(1).is_empty());
    }

    #[test]
    fn linear_gradient_matches_analytic() {
        // y = w * x with x = 2; loss = bce(y, target 0) -> dL/dw = 2 * dL/dy
        let (mut t, v) = tape_with(&[
            Matrix::from_vec(1, 1, vec![2.0]),
            Matrix::from_vec(1, 1, vec![0.3]),
        ]);
        let y = t.linear(v[0], v[1], None).unwrap();
        let loss = t
            .weighted_bce(y, Rc::new(Matrix::zeros(1, 1)), 1.0)
            .unwrap();
        let g = t.backward(loss);
        let dy = sigmoid(0.6);
        assert!((g.get(v[1]).unwrap().get(0, 0) - 2.0 * dy).abs() < 1e-15);
        assert!((g.get(v[0]).unwrap().get(0, 0) - 0.3 * dy).abs() < 1e-15);
    }

    #[test]
    fn bce_values() {
        let ln2 = std::f64::consts::LN_2;
        assert!((weighted_bce_value(&[0.0], &[1.0], 1.0) - ln2).abs() < 1e-15);
        assert!((weighted_bce_value(&[0.0], &[1.0], 3.0) - 3.0 * ln2).abs() < 1e-15);
        assert!((weighted_bce_value(&[0.0], &[0.0], 3.0) - ln2).abs() < 1e-15);
        let (mut t, v) = tape_with(&[Matrix::from_vec(1, 1, vec![f64::NAN])]);
        assert!(t
            .weighted_bce(v[0], Rc::new(Matrix::zeros(1, 1)), 1.0)
            .is_err());
    }

    #[test]
    fn softplus_is_stable() {
        assert!((softplus(1000.0) - 1000.0).abs() < 1e-12);
        assert!(softplus(-1000.0) >= 0.0 && softplus(-1000.0) < 1e-300);
        assert!((softplus(0.0) - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn max_tie_routes_gradient_to_lowest_edge() {
        // two edges into node 0 carrying identical messages
        let (mut t, v) = tape_with(&[Matrix::from_vec(2, 1, vec![1.5, 1.5]), Matrix::zeros(1, 1)]);
        let inputs = EdgeConvInputs {
            edge_x: Rc::new(Matrix::zeros(2, 0)),
            gather: Rc::new(vec![1, 0]),
            segments: Rc::new(Segments::from_keys(2, &[0, 0])),
            aggregation: Aggregation::Max,
        };
        let out = t.edge_conv(v[0], None, v[1], inputs).unwrap();
        assert_eq!(t.value(out).data(), &[1.5, 0.0]);
        let w = t.constant(Matrix::from_vec(1, 1, vec![1.0]));
        let picked = t.gather_rows(out, Rc::new(vec![0])).unwrap();
        let z = t.linear(picked, w, None).unwrap();
        let loss = t
            .weighted_bce(z, Rc::new(Matrix::zeros(1, 1)), 1.0)
            .unwrap();
        let g = t.backward(loss);
        // edge 0 reads row 1, edge 1 reads row 0: only row 1 receives gradient
        let ghw = g.get(v[0]).unwrap();
        assert_eq!(ghw.get(0, 0), 0.0);
        assert!(ghw.get(1, 0) > 0.0);
    }

    #[test]
    fn shape_errors() {
        let (mut t, v) = tape_with(&[Matrix::zeros(2, 3), Matrix::zeros(2, 3)]);
        assert!(t.linear(v[0], v[1], None).is_err());
        let c = t.constant(Matrix::zeros(3, 3));
        assert!(t.add(v[0], c).is_err());
        assert!(t.gather_rows(v[0], Rc::new(vec![5])).is_err());
    }
}
