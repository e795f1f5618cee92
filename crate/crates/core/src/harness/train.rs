//! Training with Adam and early stopping, and minority-class evaluation.

use std::rc::Rc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{HarnessError, NnError};
use crate::graph::NodeId;
use crate::harness::config::ExperimentConfig;
use crate::harness::data::{Dataset, SplitData};
use crate::harness::ego::{
    batch_egos, full_graph_tensors, node_input_dim, sample_ego, FeatureLayout, NeighborCap,
};
use crate::harness::metrics::{Confusion, MetricsReport, SeedResult};
use crate::nn::checkpoint::Checkpoint;
use crate::nn::model::{GnnModel, GraphTensors, ModelConfig, Readout};
use crate::nn::params::{AdamConfig, AdamState, ParamStore};
use crate::nn::tape::{sigmoid, Tape, Var};

/// Rows scored per forward pass during evaluation with ego batches.
const EVAL_EGO_BATCH: usize = 256;

/// Model configuration implied by an experiment and its data.
pub fn model_config(cfg: &ExperimentConfig, data: &Dataset) -> ModelConfig {
    let g = &data.train().graph;
    ModelConfig {
        num_layers: cfg.model.num_layers,
        hidden_dim: cfg.model.hidden_dim,
        adaptations: cfg.adaptations,
        readout: Readout::Node,
        aggregation: cfg.model.aggregation,
        minority_class_weight: cfg.model.minority_class_weight,
        node_in_dim: node_input_dim(g),
        edge_in_dim: g.edge_feature_dim(),
        use_edge_features: cfg.model.use_edge_features,
        num_outputs: data.tasks.len(),
        residual: cfg.model.residual,
    }
}

/// How node rows of a split are turned into logits.
pub struct Batcher {
    layout: FeatureLayout,
    ego: bool,
    hops: usize,
    cap: Option<NeighborCap>,
    full: Vec<Option<GraphTensors>>,
}

impl Batcher {
    pub fn new(cfg: &ExperimentConfig, data: &Dataset, seed: u64) -> Self {
        let layout = FeatureLayout {
            ports: cfg.adaptations.ports,
            ego_flag: cfg.adaptations.ego_ids,
            edge_features: cfg.model.use_edge_features,
        };
        let ego = cfg.uses_ego_batches();
        let full = data
            .splits
            .iter()
            .map(|s| (!ego).then(|| full_graph_tensors(&s.graph, &s.ports, layout, None)))
            .collect();
        Self {
            layout,
            ego,
            hops: cfg.training.hops,
            cap: cfg
                .training
                .neighbor_cap
                .map(|cap| NeighborCap { cap, seed }),
            full,
        }
    }

    pub fn uses_egos(&self) -> bool {
        self.ego
    }

    /// Logits (`rows.len() x tasks`) for nodes `rows` of split `k`.
    pub fn logits(
        &self,
        model: &GnnModel,
        store: &ParamStore,
        tape: &mut Tape,
        data: &Dataset,
        k: usize,
        rows: &[NodeId],
    ) -> Result<Var, HarnessError> {
        let split = &data.splits[k];
        if let Some(t) = &self.full[k] {
            return Ok(model.forward_nodes(tape, store, t, Rc::new(rows.to_vec()))?);
        }
        let egos = rows
            .iter()
            .map(|&v| sample_ego(&split.graph, v, self.hops, self.cap))
            .collect::<Result<Vec<_>, _>>()?;
        let refs: Vec<_> = egos.iter().collect();
        let batch = batch_egos(&split.graph, &split.ports, &refs, self.layout);
        Ok(model.forward_nodes(tape, store, &batch.tensors, Rc::new(batch.center_rows))?)
    }
}

/// Per-task confusion counts and minority F1 on one split's mask.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub confusion: Vec<Confusion>,
    pub f1: Vec<f64>,
}

impl Evaluation {
    pub fn mean_f1(&self) -> f64 {
        self.f1.iter().sum::<f64>() / self.f1.len().max(1) as f64
    }
}

/// Thresholds sigmoid(logit) at 0.5 and scores the minority class of each task.
pub fn evaluate(
    model: &GnnModel,
    store: &ParamStore,
    batcher: &Batcher,
    data: &Dataset,
    k: usize,
    minority: &[u8],
) -> Result<Evaluation, HarnessError> {
    let split: &SplitData = &data.splits[k];
    if split.mask.is_empty() {
        return Err(HarnessError::EmptyMask);
    }
    let t = data.tasks.len();
    let mut predicted = vec![Vec::with_capacity(split.mask.len()); t];
    let chunk = if batcher.uses_egos() {
        EVAL_EGO_BATCH
    } else {
        split.mask.len()
    };
    for rows in split.mask.chunks(chunk) {
        let mut tape = Tape::new();
        let z = batcher.logits(model, store, &mut tape, data, k, rows)?;
        let z = tape.value(z);
        for r in 0..rows.len() {
            for (task, p) in predicted.iter_mut().enumerate() {
                p.push(u8::from(sigmoid(z.get(r, task)) > 0.5));
            }
        }
    }
    let mut confusion = Vec::with_capacity(t);
    for (task, pred) in predicted.iter().enumerate() {
        let truth: Vec<u8> = split.mask.iter().map(|&v| split.label(v, task)).collect();
        confusion.push(Confusion::from_labels(pred, &truth, minority[task]));
    }
    let f1 = confusion.iter().map(Confusion::f1).collect();
    Ok(Evaluation { confusion, f1 })
}

/// Result of one seed: metrics plus the best-validation parameters.
#[derive(Debug, Clone)]
pub struct SeedOutcome {
    pub result: SeedResult,
    pub checkpoint: Checkpoint,
}

/// Trains one model; stops early after `patience` epochs without a
/// validation mean-F1 improvement and keeps the best-validation parameters.
pub fn train_seed(
    cfg: &ExperimentConfig,
    data: &Dataset,
    seed: u64,
    progress: &mut dyn FnMut(&str),
) -> Result<SeedOutcome, HarnessError> {
    let start = Instant::now();
    let mc = model_config(cfg, data);
    let (model, mut store) = GnnModel::init(mc.clone(), seed)?;
    let batcher = Batcher::new(cfg, data, seed);
    let minority = data.minority_classes();
    let mut adam = AdamState::new(&store, AdamConfig::default());
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x7261_6e64));
    let train = data.train();
    let mut order = train.mask.clone();
    let tc = &cfg.training;

    let mut loss_curve = Vec::new();
    let mut val_curve = Vec::new();
    let mut best: Option<(f64, usize, ParamStore, Vec<f64>)> = None;
    let mut since_best = 0;
    for epoch in 0..tc.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for rows in order.chunks(tc.batch_size) {
            let mut tape = Tape::new();
            let z = batcher.logits(&model, &store, &mut tape, data, 0, rows)?;
            let loss = model.loss(&mut tape, z, Rc::new(train.targets(rows)))?;
            let value = tape.value(loss).get(0, 0);
            if !value.is_finite() {
                return Err(HarnessError::Diverged { seed, epoch });
            }
            let grads = tape.backward(loss).for_params(&store);
            match adam.step(&mut store, &grads, tc.learning_rate) {
                Err(NnError::NonFiniteGradient(_)) => {
                    return Err(HarnessError::Diverged { seed, epoch })
                }
                other => other?,
            }
            total += value * rows.len() as f64;
        }
        loss_curve.push(total / order.len().max(1) as f64);
        let val = evaluate(&model, &store, &batcher, data, 1, &minority)?;
        let score = val.mean_f1();
        val_curve.push(score);
        progress(&format!(
            "seed {seed} epoch {epoch}: loss {:.4} val mean F1 {score:.4}",
            loss_curve[epoch]
        ));
        if best.as_ref().is_none_or(|b| score > b.0) {
            best = Some((score, epoch, store.clone(), val.f1));
            since_best = 0;
        } else {
            since_best += 1;
            if since_best >= tc.patience {
                break;
            }
        }
    }
    let (best_epoch, val_f1) = match best {
        Some((_, e, params, f1)) => {
            store = params;
            (e, f1)
        }
        None => (0, vec![f64::NAN; data.tasks.len()]),
    };
    let test = evaluate(&model, &store, &batcher, data, 2, &minority)?;
    let result = SeedResult {
        seed,
        test_f1: test.f1,
        val_f1,
        best_epoch,
        epochs_run: loss_curve.len(),
        final_train_loss: loss_curve.last().copied().unwrap_or(f64::NAN),
        loss_curve,
        val_curve,
        runtime_secs: start.elapsed().as_secs_f64(),
        diverged: None,
    };
    Ok(SeedOutcome {
        result,
        checkpoint: Checkpoint::new(&mc, &store),
    })
}

/// Trains every configured seed; a diverged seed is recorded, not fatal.
/// Returns the report and the checkpoint of the best seed by validation F1.
pub fn train(
    cfg: &ExperimentConfig,
    data: &Dataset,
    progress: &mut dyn FnMut(&str),
) -> Result<(MetricsReport, Option<Checkpoint>), HarnessError> {
    for w in cfg.validate()? {
        progress(&format!("warning: {w}"));
    }
    let mut outcomes = Vec::new();
    for &seed in &cfg.seeds {
        outcomes.push((seed, train_seed(cfg, data, seed, progress)));
    }
    collect_seeds(cfg, data, outcomes, progress)
}

/// Like [`train`] with seeds spread over up to `threads` worker threads.
/// Each seed is computed exactly as in the sequential run, so the report
/// does not depend on the thread count.
pub fn train_threaded(
    cfg: &ExperimentConfig,
    data: &Dataset,
    threads: usize,
    progress: &(dyn Fn(&str) + Sync),
) -> Result<(MetricsReport, Option<Checkpoint>), HarnessError> {
    let mut sink = |s: &str| progress(s);
    if threads <= 1 || cfg.seeds.len() <= 1 {
        return train(cfg, data, &mut sink);
    }
    for w in cfg.validate()? {
        progress(&format!("warning: {w}"));
    }
    let chunk = cfg.seeds.len().div_ceil(threads);
    let outcomes: Vec<(u64, Result<SeedOutcome, HarnessError>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = cfg
            .seeds
            .chunks(chunk)
            .map(|seeds| {
                scope.spawn(move || {
                    let mut sink = |s: &str| progress(s);
                    seeds
                        .iter()
                        .map(|&seed| (seed, train_seed(cfg, data, seed, &mut sink)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("seed worker panicked"))
            .collect()
    });
    collect_seeds(cfg, data, outcomes, &mut sink)
}

fn collect_seeds(
    cfg: &ExperimentConfig,
    data: &Dataset,
    outcomes: Vec<(u64, Result<SeedOutcome, HarnessError>)>,
    progress: &mut dyn FnMut(&str),
) -> Result<(MetricsReport, Option<Checkpoint>), HarnessError> {
    let mut seeds = Vec::new();
    let mut best: Option<(f64, Checkpoint)> = None;
    for (_, outcome) in outcomes {
        match outcome {
            Ok(out) => {
                let score =
                    out.result.val_f1.iter().sum::<f64>() / out.result.val_f1.len().max(1) as f64;
                if best.as_ref().is_none_or(|b| score > b.0) {
                    best = Some((score, out.checkpoint));
                }
                seeds.push(out.result);
            }
            Err(HarnessError::Diverged { seed, epoch }) => {
                progress(&format!("seed {seed} diverged at epoch {epoch}"));
                seeds.push(SeedResult {
                    seed,
                    test_f1: vec![f64::NAN; data.tasks.len()],
                    val_f1: vec![f64::NAN; data.tasks.len()],
                    best_epoch: 0,
                    epochs_run: epoch,
                    final_train_loss: f64::NAN,
                    loss_curve: Vec::new(),
                    val_curve: Vec::new(),
                    runtime_secs: 0.0,
                    diverged: Some(format!("non-finite loss at epoch {epoch}")),
                });
            }
            Err(e) => return Err(e),
        }
    }
    let report =
        MetricsReport::aggregate(cfg.adaptations.label(), cfg.task_names(), seeds, cfg.hash());
    Ok((report, best.map(|b| b.1)))
}
