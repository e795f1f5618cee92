use std::rc::Rc;

use mgnn_core::generator::{random_circulant, GeneratorParams};
use mgnn_core::harness::{
    evaluate, train, Batcher, Dataset, ExperimentConfig, MetricsReport, MetricsTable, SeedResult,
};
use mgnn_core::nn::{Adaptations, Aggregation, GnnModel, GraphTensors, ModelConfig, Readout, Tape};
use mgnn_core::oracles::label_all;
use mgnn_core::{assign_ports, TaskId, Thresholds};
use proptest::prelude::*;

#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

fn small_config(n: usize, tasks: Vec<TaskId>, layers: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::synthetic(GeneratorParams::new(n, 6.0, 11.1, 3));
    cfg.tasks = tasks;
    cfg.model.num_layers = layers;
    cfg.model.hidden_dim = 16;
    cfg.training.hops = layers;
    cfg
}

#[test]
fn overfits_degree_in_on_32_nodes() {
    let g = random_circulant(&GeneratorParams::new(32, 6.0, 11.1, 5));
    let labels = label_all(&g, Thresholds::default());
    let mut cfg = small_config(32, vec![TaskId::DegIn], 2);
    cfg.training.epochs = 200;
    cfg.training.patience = 200;
    cfg.training.batch_size = 32;
    cfg.training.learning_rate = 1e-2;
    let data = Dataset::whole_graph(g, &labels, &cfg.tasks).unwrap();
    assert!(data.train().positive_ratios()[0] > 0.0);
    let (report, ck) = train(&cfg, &data, &mut |_| {}).unwrap();
    assert_eq!(
        report.seeds[0].val_f1,
        vec![1.0],
        "{:?}",
        report.seeds[0].val_curve
    );
    let (model, store) = ck.unwrap().restore().unwrap();
    let batcher = Batcher::new(&cfg, &data, 0);
    let ev = evaluate(&model, &store, &batcher, &data, 0, &data.minority_classes()).unwrap();
    assert_eq!(ev.f1, vec![1.0]);
}

#[test]
fn rerun_with_same_seed_is_bit_identical() {
    for ego in [false, true] {
        let mut cfg = small_config(96, vec![TaskId::DegOut, TaskId::C3], 2);
        cfg.adaptations = Adaptations {
            reverse_mp: true,
            ports: true,
            ego_ids: ego,
        };
        cfg.training.epochs = 3;
        cfg.training.batch_size = 32;
        let data = Dataset::load(&cfg.data, &cfg.tasks).unwrap();
        let (a, _) = train(&cfg, &data, &mut |_| {}).unwrap();
        let (b, _) = train(&cfg, &data, &mut |_| {}).unwrap();
        let bits = |r: &MetricsReport| {
            r.seeds[0]
                .loss_curve
                .iter()
                .map(|x| x.to_bits())
                .collect::<Vec<_>>()
        };
        assert_eq!(bits(&a), bits(&b));
        assert_eq!(a.seeds[0].test_f1, b.seeds[0].test_f1);
    }
}

#[test]
fn five_seeds_populate_std() {
    let mut cfg = small_config(64, vec![TaskId::DegIn, TaskId::FanOut], 1);
    cfg.training.epochs = 2;
    cfg.seeds = vec![0, 1, 2, 3, 4];
    let data = Dataset::load(&cfg.data, &cfg.tasks).unwrap();
    let (report, _) = train(&cfg, &data, &mut |_| {}).unwrap();
    assert_eq!(report.seeds.len(), 5);
    assert_eq!(report.std_f1.len(), 2);
    for (m, s) in report.mean_f1.iter().zip(&report.std_f1) {
        assert!((0.0..=1.0).contains(m) && *s >= 0.0 && s.is_finite());
    }
    assert_eq!(report.config_hash, cfg.hash());
}

#[test]
fn empty_table_is_header_only_and_json_round_trips() {
    let tasks: Vec<String> = TaskId::ALL.iter().map(|t| t.column().to_string()).collect();
    let empty = MetricsTable::new(tasks.clone());
    assert_eq!(
        empty.to_csv_string(),
        format!("variant,{}\n", tasks.join(","))
    );
    let seed = SeedResult {
        seed: 1,
        test_f1: vec![1.0 / 3.0; 11],
        val_f1: vec![0.1; 11],
        best_epoch: 2,
        epochs_run: 5,
        final_train_loss: 0.123_456_789_012_345_6,
        loss_curve: vec![0.5, 0.25],
        val_curve: vec![0.3],
        runtime_secs: 1.5,
        diverged: None,
    };
    let mut table = MetricsTable::new(tasks.clone());
    table.rows.push(MetricsReport::aggregate(
        "GIN".into(),
        tasks,
        vec![seed],
        "abc".into(),
    ));
    let csv = table.to_csv_string();
    assert!(csv.lines().nth(1).unwrap().starts_with("GIN,0.3333,0.3333"));
    let back: MetricsTable = serde_json::from_str(&serde_json::to_string(&table).unwrap()).unwrap();
    assert_eq!(back, table);
}

#[test]
fn config_json_round_trip_and_unknown_fields() {
    let cfg = small_config(128, TaskId::ALL.to_vec(), 6);
    let text = serde_json::to_string_pretty(&cfg).unwrap();
    let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
    assert_eq!(back, cfg);
    assert_eq!(back.hash(), cfg.hash());
    let bad = text.replacen("\"seeds\"", "\"sedes\"", 1);
    assert!(serde_json::from_str::<ExperimentConfig>(&bad).is_err());
}

fn model_config(adaptations: Adaptations, aggregation: Aggregation) -> ModelConfig {
    ModelConfig {
        num_layers: 3,
        hidden_dim: 8,
        adaptations,
        readout: Readout::Node,
        aggregation,
        minority_class_weight: 1.0,
        node_in_dim: 1,
        edge_in_dim: 0,
        use_edge_features: false,
        num_outputs: 4,
        residual: true,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// Relabeling nodes permutes the outputs and nothing else.
    #[test]
    fn node_outputs_are_permutation_equivariant(
        seed in any::<u64>(),
        perm in Just((0..40usize).collect::<Vec<_>>()).prop_shuffle(),
        max in any::<bool>(),
        adapt in 0usize..8,
    ) {
        let g = random_circulant(&GeneratorParams::new(40, 4.0, 3.0, seed));
        let adaptations = Adaptations { reverse_mp: adapt & 1 != 0, ports: adapt & 2 != 0, ego_ids: adapt & 4 != 0 };
        let agg = if max { Aggregation::Max } else { Aggregation::Sum };
        let (model, store) = GnnModel::init(model_config(adaptations, agg), seed).unwrap();
        let center = (seed % 40) as usize;
        let run = |g: &mgnn_core::DirectedMultigraph, center: usize| {
            let ports = assign_ports(g);
            let gt = GraphTensors::from_graph(
                g,
                adaptations.ports.then_some(&ports),
                adaptations.ego_ids.then_some(center),
                false,
            );
            let mut tape = Tape::new();
            let z = model.forward_nodes(&mut tape, &store, &gt, Rc::new((0..40).collect())).unwrap();
            tape.value(z).clone()
        };
        let base = run(&g, center);
        let moved = run(&g.permute_nodes(&perm), perm[center]);
        for (v, &pv) in perm.iter().enumerate() {
            for c in 0..4 {
                prop_assert!((base.get(v, c) - moved.get(pv, c)).abs() < 1e-9);
            }
        }
    }
}
