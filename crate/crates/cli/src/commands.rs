use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use mgnn_core::generator::{random_circulant, GeneratorParams, GeneratorSidecar};
use mgnn_core::harness::metrics::mean_std;
use mgnn_core::harness::train::model_config;
use mgnn_core::harness::{
    evaluate, export_metrics, run_ablation, train_threaded, Adaptation, Batcher, Dataset,
    ExperimentConfig, ExportFormat, MetricsReport, MetricsTable, SeedResult,
};
use mgnn_core::io::{
    read_edge_csv, read_json, read_labels_csv, write_edge_csv, write_json, write_labels_csv,
    write_ports_csv, EdgeList,
};
use mgnn_core::nn::gradcheck::{check_random_instance, LayerVariant};
use mgnn_core::nn::Checkpoint;
use mgnn_core::nodeid::{assign_unique_ids, id_colors, wl_refine, WlExtras};
use mgnn_core::oracles::label_all;
use mgnn_core::{assign_ports, Thresholds};
use serde::{Deserialize, Serialize};

use crate::error::{graph_err, CliError};
use crate::{
    AblateArgs, EvalArgs, Format, GenArgs, GradcheckArgs, IdFormat, LabelArgs, NodeidArgs,
    PortsArgs, SplitName, TrainArgs, WlArgs,
};

/// Default worker thread count for seed fan-out.
const THREADS_ENV: &str = "MGNN_THREADS";

fn progress(msg: &str) {
    eprintln!("{msg}");
}

fn sidecar_path(graph: &Path) -> PathBuf {
    graph.with_extension("json")
}

/// Reads an edge CSV, padding trailing isolated nodes up to `nodes` or the
/// generator sidecar's node count.
fn read_graph(path: &Path, nodes: Option<usize>) -> Result<EdgeList, CliError> {
    let list = read_edge_csv(path)?;
    let n = match nodes {
        Some(n) => Some(n),
        None => read_json::<GeneratorSidecar>(&sidecar_path(path))
            .ok()
            .map(|s| s.num_nodes),
    };
    match n {
        Some(n) if n < list.graph.num_nodes() => Err(CliError::Usage(format!(
            "--nodes {n} is below the {} nodes referenced by {}",
            list.graph.num_nodes(),
            path.display()
        ))),
        Some(n) => list.with_num_nodes(n).map_err(graph_err(path)),
        None => Ok(list),
    }
}

fn resolve(list: &EdgeList, node: &str, flag: &str) -> Result<usize, CliError> {
    list.resolve(node)
        .ok_or_else(|| CliError::Usage(format!("{flag}: no node '{node}' in the graph")))
}

fn export_format(out: &Path, format: Option<Format>) -> ExportFormat {
    match format {
        Some(Format::Json) => ExportFormat::Json,
        Some(Format::Csv) => ExportFormat::Csv,
        None if out.extension().is_some_and(|e| e == "json") => ExportFormat::Json,
        None => ExportFormat::Csv,
    }
}

fn thread_count(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(t) = flag {
        return Ok(t.max(1));
    }
    match std::env::var(THREADS_ENV) {
        Ok(v) => v.parse::<usize>().map(|t| t.max(1)).map_err(|_| {
            CliError::Usage(format!("{THREADS_ENV}: expected a thread count, got '{v}'"))
        }),
        Err(_) => Ok(1),
    }
}

fn load_config(
    path: &Path,
    seed: Option<u64>,
    determinism: bool,
) -> Result<ExperimentConfig, CliError> {
    let mut cfg: ExperimentConfig = read_json(path)?;
    if let Some(seed) = seed {
        cfg.seeds = vec![seed];
    }
    if determinism {
        cfg.training.determinism = true;
    }
    for w in cfg
        .validate()
        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
    {
        progress(&format!("warning: {w}"));
    }
    Ok(cfg)
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Data(format!("stdout: {e}")))
        }
    }
}

pub fn gen(a: GenArgs) -> Result<(), CliError> {
    let params = GeneratorParams::new(a.n, a.d, a.r, a.seed);
    params
        .validate()
        .map_err(|m| CliError::Usage(format!("--n/--d/--r: {m}")))?;
    let start = Instant::now();
    let g = random_circulant(&params);
    write_edge_csv(&a.out, &g)?;
    let sidecar = sidecar_path(&a.out);
    write_json(&sidecar, &GeneratorSidecar::new(&params, &g))?;
    progress(&format!(
        "wrote {} edges on {} nodes to {} (+ {}) in {:.2}s",
        g.num_edges(),
        g.num_nodes(),
        a.out.display(),
        sidecar.display(),
        start.elapsed().as_secs_f64()
    ));
    Ok(())
}

pub fn label(a: LabelArgs) -> Result<(), CliError> {
    let list = read_graph(&a.graph, a.nodes)?;
    let start = Instant::now();
    let labels = label_all(
        &list.graph,
        Thresholds {
            degree: a.degree_threshold,
            fan: a.fan_threshold,
        },
    );
    write_labels_csv(&a.out, &labels)?;
    progress(&format!(
        "labeled {} nodes in {:.2}s",
        labels.num_nodes(),
        start.elapsed().as_secs_f64()
    ));
    let stats = mgnn_core::io::LabelStats::new(&labels);
    let mut text = String::from("task,positive_ratio\n");
    for (task, ratio) in &stats.positive_ratio {
        text.push_str(&format!("{task},{ratio:.4}\n"));
    }
    write_output(None, &text)
}

pub fn ports(a: PortsArgs) -> Result<(), CliError> {
    let list = read_graph(&a.graph, None)?;
    write_ports_csv(&a.out, &assign_ports(&list.graph))?;
    progress(&format!("wrote ports for {} edges", list.graph.num_edges()));
    Ok(())
}

#[derive(Debug, Serialize)]
struct NodeIdRow {
    node: String,
    id: Option<String>,
    digits: Option<Vec<u32>>,
    round: Option<usize>,
    declined: Vec<String>,
}

#[derive(Debug, Serialize)]
struct NodeIdReport {
    root: String,
    base: usize,
    rounds: usize,
    nodes: Vec<NodeIdRow>,
}

pub fn nodeid(a: NodeidArgs) -> Result<(), CliError> {
    let list = read_graph(&a.graph, None)?;
    let root = resolve(&list, &a.root, "--root")?;
    let ports = assign_ports(&list.graph);
    let ids = assign_unique_ids(&list.graph, &ports, root).map_err(graph_err(&a.graph))?;
    let rows: Vec<NodeIdRow> = (0..list.graph.num_nodes())
        .map(|v| NodeIdRow {
            node: list.name(v),
            id: ids.labels[v].as_ref().map(|l| l.render()),
            digits: ids.labels[v].as_ref().map(|l| l.digits.clone()),
            round: ids.round[v],
            declined: ids.proposals[v]
                .iter()
                .skip(1)
                .map(|p| p.render())
                .collect(),
        })
        .collect();
    let text = match a.format {
        IdFormat::Json => {
            let report = NodeIdReport {
                root: list.name(root),
                base: ids.base,
                rounds: ids.rounds,
                nodes: rows,
            };
            serde_json::to_string_pretty(&report).map_err(|e| CliError::Data(e.to_string()))? + "\n"
        }
        IdFormat::Table => {
            let mut t = String::from("node,id,round,declined\n");
            for r in &rows {
                t.push_str(&format!(
                    "{},{},{},{}\n",
                    r.node,
                    r.id.as_deref().unwrap_or("-"),
                    r.round.map_or("-".to_string(), |x| x.to_string()),
                    r.declined.join(" ")
                ));
            }
            t
        }
    };
    write_output(a.out.as_deref(), &text)
}

/// Dense class index per node, numbered by first appearance.
fn dense_classes(colors: &[u128]) -> Vec<usize> {
    let mut seen: Vec<u128> = Vec::new();
    colors
        .iter()
        .map(|c| match seen.iter().position(|s| s == c) {
            Some(i) => i,
            None => {
                seen.push(*c);
                seen.len() - 1
            }
        })
        .collect()
}

pub fn wl(a: WlArgs) -> Result<(), CliError> {
    let list = read_graph(&a.graph, None)?;
    let g = &list.graph;
    let rounds = a.rounds.unwrap_or(g.num_nodes());
    let ports = a.ports.then(|| assign_ports(g));
    let ego = a
        .ego
        .as_deref()
        .map(|e| resolve(&list, e, "--ego"))
        .transpose()?;
    let Some(pair) = a.compare.as_deref() else {
        let extras = WlExtras {
            ego_root: ego,
            ports: ports.as_ref(),
            reverse: a.reverse,
            initial: None,
        };
        let coloring = wl_refine(g, rounds, extras);
        let classes = dense_classes(coloring.last());
        progress(&format!(
            "{} classes after {rounds} rounds",
            coloring.num_classes(coloring.rounds())
        ));
        let mut text = String::from("node,class\n");
        for (v, c) in classes.iter().enumerate() {
            text.push_str(&format!("{},{c}\n", list.name(v)));
        }
        return write_output(a.out.as_deref(), &text);
    };
    let (u, v) = pair
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("--compare: expected U,V, got '{pair}'")))?;
    let other = match &a.other {
        Some(p) => read_graph(p, None)?,
        None => list.clone(),
    };
    let u_id = resolve(&list, u, "--compare")?;
    let v_id = resolve(&other, v, "--compare")?;
    let rooted = a.rooted;
    let run = |gl: &EdgeList, root: usize| {
        let p = a.ports.then(|| assign_ports(&gl.graph));
        let initial = if a.ids {
            let ids = assign_unique_ids(&gl.graph, &assign_ports(&gl.graph), root)
                .map_err(graph_err(&a.graph))?;
            Some(id_colors(&ids))
        } else {
            None
        };
        let extras = WlExtras {
            ego_root: rooted.then_some(root),
            ports: p.as_ref(),
            reverse: a.reverse,
            initial: initial.as_deref(),
        };
        let c = wl_refine(&gl.graph, rounds, extras);
        Ok::<_, CliError>((
            c.last()[root],
            if rooted { c.multiset() } else { Vec::new() },
        ))
    };
    let differs = run(&list, u_id)? != run(&other, v_id)?;
    write_output(
        a.out.as_deref(),
        &format!("u,v,distinguished\n{u},{v},{differs}\n"),
    )
}

fn print_seed_losses(report: &MetricsReport) -> Result<(), CliError> {
    let mut text = String::from("seed,epochs_run,best_epoch,final_train_loss\n");
    for s in &report.seeds {
        text.push_str(&format!(
            "{},{},{},{}\n",
            s.seed, s.epochs_run, s.best_epoch, s.final_train_loss
        ));
    }
    write_output(None, &text)
}

pub fn train(a: TrainArgs) -> Result<(), CliError> {
    let cfg = load_config(&a.config, a.seed, a.determinism)?;
    let threads = thread_count(a.threads)?;
    let start = Instant::now();
    let data = Dataset::load(&cfg.data, &cfg.tasks)?;
    progress(&format!(
        "data ready in {:.1}s",
        start.elapsed().as_secs_f64()
    ));
    let (report, checkpoint) = train_threaded(&cfg, &data, threads, &progress)?;
    let mut table = MetricsTable::new(cfg.task_names());
    table.rows.push(report.clone());
    export_metrics(&table, &a.out, export_format(&a.out, a.format))?;
    if let Some(path) = &a.checkpoint {
        let ck = checkpoint
            .ok_or_else(|| CliError::Check("every seed diverged; no checkpoint".into()))?;
        ck.save(path)?;
    }
    progress(&format!(
        "{}: mean F1 {:.4} over {} tasks in {:.1}s",
        report.variant,
        report.overall_mean(),
        report.tasks.len(),
        start.elapsed().as_secs_f64()
    ));
    print_seed_losses(&report)
}

pub fn eval(a: EvalArgs) -> Result<(), CliError> {
    let mut cfg = load_config(&a.config, None, false)?;
    let ck = Checkpoint::load(&a.checkpoint)?;
    cfg.adaptations = ck.config.adaptations;
    let (data, k) = match (&a.graph, &a.labels) {
        (Some(gp), Some(lp)) => {
            let list = read_graph(gp, None)?;
            let labels = read_labels_csv(lp)?;
            (Dataset::whole_graph(list.graph, &labels, &cfg.tasks)?, 2)
        }
        _ => {
            let k = match a.split {
                SplitName::Train => 0,
                SplitName::Val => 1,
                SplitName::Test => 2,
            };
            (Dataset::load(&cfg.data, &cfg.tasks)?, k)
        }
    };
    let expected = model_config(&cfg, &data);
    let c = &ck.config;
    if (c.node_in_dim, c.edge_in_dim, c.num_outputs)
        != (
            expected.node_in_dim,
            expected.edge_in_dim,
            expected.num_outputs,
        )
    {
        return Err(CliError::Data(format!(
            "{}: checkpoint expects {} node inputs, {} edge inputs and {} tasks; data has {}, {} and {}",
            a.checkpoint.display(),
            c.node_in_dim,
            c.edge_in_dim,
            c.num_outputs,
            expected.node_in_dim,
            expected.edge_in_dim,
            expected.num_outputs
        )));
    }
    let (model, store) = ck.restore()?;
    let start = Instant::now();
    let batcher = Batcher::new(&cfg, &data, cfg.seeds.first().copied().unwrap_or(0));
    let ev = evaluate(&model, &store, &batcher, &data, k, &data.minority_classes())?;
    let result = SeedResult {
        seed: cfg.seeds.first().copied().unwrap_or(0),
        test_f1: ev.f1.clone(),
        val_f1: Vec::new(),
        best_epoch: 0,
        epochs_run: 0,
        final_train_loss: f64::NAN,
        loss_curve: Vec::new(),
        val_curve: Vec::new(),
        runtime_secs: start.elapsed().as_secs_f64(),
        diverged: None,
    };
    let report = MetricsReport::aggregate(
        cfg.adaptations.label(),
        cfg.task_names(),
        vec![result],
        cfg.hash(),
    );
    progress(&format!("mean F1 {:.4}", mean_std(&ev.f1).0));
    let mut table = MetricsTable::new(cfg.task_names());
    table.rows.push(report);
    export_metrics(&table, &a.out, export_format(&a.out, a.format))?;
    write_output(None, &table.to_csv_string())
}

fn parse_sequence(s: &str) -> Result<Vec<Adaptation>, CliError> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| match x {
            "reverse_mp" => Ok(Adaptation::ReverseMp),
            "ports" => Ok(Adaptation::Ports),
            "ego_ids" => Ok(Adaptation::EgoIds),
            other => Err(CliError::Usage(format!(
                "--sequence: unknown adaptation '{other}' (expected reverse_mp, ports, ego_ids)"
            ))),
        })
        .collect()
}

pub fn ablate(a: AblateArgs) -> Result<(), CliError> {
    let sequence = parse_sequence(&a.sequence)?;
    let cfg = load_config(&a.config, a.seed, a.determinism)?;
    let threads = thread_count(a.threads)?;
    let start = Instant::now();
    let data = Dataset::load(&cfg.data, &cfg.tasks)?;
    let table = if threads <= 1 {
        run_ablation(&cfg, &sequence, &data, &mut |s: &str| progress(s))?
    } else {
        let mut table = MetricsTable::new(cfg.task_names());
        for adaptations in mgnn_core::harness::cumulative_variants(cfg.adaptations, &sequence) {
            let variant = ExperimentConfig {
                adaptations,
                ..cfg.clone()
            };
            progress(&format!("variant {}", adaptations.label()));
            table
                .rows
                .push(train_threaded(&variant, &data, threads, &progress)?.0);
        }
        table
    };
    export_metrics(&table, &a.out, export_format(&a.out, a.format))?;
    progress(&format!(
        "{} variants in {:.1}s",
        table.rows.len(),
        start.elapsed().as_secs_f64()
    ));
    write_output(None, &table.to_csv_string())
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct GradcheckConfig {
    #[serde(default = "default_instances")]
    instances: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default = "default_eps")]
    eps: f64,
    #[serde(default = "default_tolerance")]
    tolerance: f64,
}

fn default_instances() -> usize {
    10
}
fn default_eps() -> f64 {
    1e-3
}
fn default_tolerance() -> f64 {
    1e-4
}

#[derive(Debug, Serialize)]
struct VariantCheck {
    variant: String,
    max_rel_error: f64,
    checked: usize,
    skipped_kinks: usize,
}

pub fn gradcheck(a: GradcheckArgs) -> Result<(), CliError> {
    let mut cfg: GradcheckConfig = match &a.config {
        Some(p) => read_json(p)?,
        None => serde_json::from_str("{}").expect("defaults"),
    };
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    if !(cfg.eps > 0.0 && cfg.tolerance > 0.0) {
        return Err(CliError::Usage(
            "--config: eps and tolerance must be positive".into(),
        ));
    }
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for v in LayerVariant::all() {
        let name = format!(
            "{:?}{}{}",
            v.aggregation,
            if v.reverse_mp { "+rev" } else { "" },
            if v.ports { "+ports" } else { "" }
        )
        .to_lowercase();
        let mut row = VariantCheck {
            variant: name,
            max_rel_error: 0.0,
            checked: 0,
            skipped_kinks: 0,
        };
        for i in 0..cfg.instances {
            let r = check_random_instance(v, cfg.seed.wrapping_add(i as u64), cfg.eps)?;
            row.max_rel_error = row.max_rel_error.max(r.max_rel_error);
            row.checked += r.checked;
            row.skipped_kinks += r.skipped_kinks;
        }
        progress(&format!(
            "{}: max rel err {:.3e} over {} scalars ({} kinks skipped)",
            row.variant, row.max_rel_error, row.checked, row.skipped_kinks
        ));
        worst = worst.max(row.max_rel_error);
        rows.push(row);
    }
    if let Some(out) = &a.out {
        write_json(out, &rows)?;
    }
    write_output(None, &format!("max-rel-err: {worst:.3e}\n"))?;
    if worst < cfg.tolerance {
        Ok(())
    } else {
        Err(CliError::Check(format!(
            "max relative error {worst:.3e} is not below {:.1e}",
            cfg.tolerance
        )))
    }
}
