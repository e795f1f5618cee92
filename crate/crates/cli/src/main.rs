//! `mgnn`: generation, labeling, port numbering, node IDs, WL refinement,
//! training, evaluation, ablations and gradient checks from the shell.

#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

mod commands;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "mgnn", version, about = "Directed multigraph GNN toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a random circulant multigraph (CSV plus JSON sidecar).
    Gen(GenArgs),
    /// Label every node for the eleven subgraph-detection tasks.
    Label(LabelArgs),
    /// Write timestamp-ordered in/out port numbers per edge.
    Ports(PortsArgs),
    /// Assign BFS unique node IDs around a root.
    Nodeid(NodeidArgs),
    /// Run 1-WL colour refinement, optionally comparing two nodes.
    Wl(WlArgs),
    /// Train a model from an experiment config.
    Train(TrainArgs),
    /// Score a checkpoint on a split or on a labeled graph.
    Eval(EvalArgs),
    /// Train the baseline and each cumulative adaptation prefix.
    Ablate(AblateArgs),
    /// Compare analytic and finite-difference gradients.
    Gradcheck(GradcheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IdFormat {
    Table,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SplitName {
    Train,
    Val,
    Test,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    /// Average degree.
    #[arg(long)]
    pub d: f64,
    /// Locality radius (standard deviation of the head offset).
    #[arg(long)]
    pub r: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Edge CSV path; the sidecar goes next to it with a .json extension.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LabelArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Node count, for graphs whose last nodes have no edges (defaults to
    /// the generator sidecar when present).
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long, default_value_t = 3)]
    pub degree_threshold: usize,
    #[arg(long, default_value_t = 3)]
    pub fan_threshold: usize,
}

#[derive(Debug, Args)]
pub struct PortsArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct NodeidArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Root node name or id.
    #[arg(long)]
    pub root: String,
    #[arg(long, value_enum, default_value_t = IdFormat::Table)]
    pub format: IdFormat,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WlArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Refinement rounds (default: node count).
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Hash in-/out-port numbers with neighbor colours.
    #[arg(long)]
    pub ports: bool,
    /// Also refine over out-neighbors.
    #[arg(long)]
    pub reverse: bool,
    /// Mark this node with a distinct initial colour.
    #[arg(long)]
    pub ego: Option<String>,
    /// `U,V`: report whether U and V end with different colours.
    #[arg(long)]
    pub compare: Option<String>,
    /// With `--compare`, run once per node with that node as ego root and
    /// compare root colour plus colour multiset.
    #[arg(long, requires = "compare")]
    pub rooted: bool,
    /// With `--rooted`, seed colours with BFS unique node IDs from the root.
    #[arg(long, requires = "rooted")]
    pub ids: bool,
    /// Graph holding V for `--compare` (default: the same graph).
    #[arg(long)]
    pub other: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Train this single seed instead of the config's seed list.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Metrics file.
    #[arg(long)]
    pub out: PathBuf,
    /// Metrics format (default: from the --out extension).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Best-seed checkpoint path.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Require bit-reproducible training.
    #[arg(long)]
    pub determinism: bool,
    /// Worker threads for seeds (default: MGNN_THREADS or 1).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub checkpoint: PathBuf,
    #[arg(long, value_enum, default_value_t = SplitName::Test)]
    pub split: SplitName,
    /// Score every node of this graph instead of a config split.
    #[arg(long, requires = "labels")]
    pub graph: Option<PathBuf>,
    #[arg(long, requires = "graph")]
    pub labels: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Comma-separated adaptations added cumulatively.
    #[arg(long, default_value = "reverse_mp,ports,ego_ids")]
    pub sequence: String,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub determinism: bool,
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct GradcheckArgs {
    /// JSON with optional `instances`, `seed`, `eps`, `tolerance`.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the per-variant report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Label(a) => commands::label(a),
        Command::Ports(a) => commands::ports(a),
        Command::Nodeid(a) => commands::nodeid(a),
        Command::Wl(a) => commands::wl(a),
        Command::Train(a) => commands::train(a),
        Command::Eval(a) => commands::eval(a),
        Command::Ablate(a) => commands::ablate(a),
        Command::Gradcheck(a) => commands::gradcheck(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mgnn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
