use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use topcert::DominanceRelation;

mod commands;

/// Certify and generate top-quality and top-k plan sets for SAS+ tasks.
///
/// Exit status: 0 certified or success, 1 refuted, 2 usage or parse error,
/// 3 inconclusive (a resource limit was hit).
#[derive(Parser, Debug)]
#[command(name = "topcert", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a set of plans against a quality bound or k.
    Certify(CertifyArgs),
    /// Generate a solution by iterated search and plan forbidding.
    Plan(PlanArgs),
    /// Write the task that forbids the given plans.
    Transform(TransformArgs),
    /// List every plan within a cost bound.
    Enumerate(EnumerateArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Limits {
    /// Maximum number of expansions per optimal search.
    #[arg(long, default_value_t = 10_000_000)]
    pub max_expansions: u64,
    /// Maximum number of nodes visited by plan enumeration.
    #[arg(long, default_value_t = 100_000_000)]
    pub max_nodes: u64,
    /// Plan length cap for enumeration; needed with zero-cost actions.
    #[arg(long)]
    pub length_cap: Option<usize>,
    /// Emit every first-deviation copy of the loopless transformation instead
    /// of only those that can fire.
    #[arg(long)]
    pub unpruned: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RelationArg {
    None,
    Unordered,
    Subset,
    Loopless,
}

impl From<RelationArg> for DominanceRelation {
    fn from(r: RelationArg) -> Self {
        match r {
            RelationArg::None => DominanceRelation::Empty,
            RelationArg::Unordered => DominanceRelation::Unordered,
            RelationArg::Subset => DominanceRelation::MultisetSubset,
            RelationArg::Loopless => DominanceRelation::Loopless,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Forbid the plans and run optimal searches.
    Transform,
    /// Enumerate every plan within the bound and check directly.
    Oracle,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("bound").required(true).args(["q", "k"])))]
pub struct CertifyArgs {
    #[arg(long)]
    pub task: PathBuf,
    /// Plan files, or directories whose `*.plan` files are read in name order.
    #[arg(long, num_args = 0.., required = true)]
    pub plans: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = RelationArg::None)]
    pub relation: RelationArg,
    /// Cost bound: an integer, or `xF` for F times the optimal cost.
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum, default_value_t = Mode::Transform)]
    pub mode: Mode,
    /// Where to write the JSON report.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Run the per-plan minimality checks in parallel.
    #[arg(long)]
    pub parallel: bool,
    #[command(flatten)]
    pub limits: Limits,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("bound").required(true).args(["q", "k"])))]
pub struct PlanArgs {
    #[arg(long)]
    pub task: PathBuf,
    #[arg(long, value_enum, default_value_t = RelationArg::None)]
    pub relation: RelationArg,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Directory receiving `NNN.plan` files and `trace.json`.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Stop when a transformed task has more actions than this.
    #[arg(long, default_value_t = 1_000_000)]
    pub max_actions: usize,
    #[command(flatten)]
    pub limits: Limits,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    #[arg(long)]
    pub task: PathBuf,
    #[arg(long, num_args = 0.., required = true)]
    pub plans: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = RelationArg::None)]
    pub relation: RelationArg,
    /// Output task; the action map goes next to it as `<stem>.map.json`.
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub limits: Limits,
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[arg(long)]
    pub task: PathBuf,
    #[arg(long)]
    pub q: String,
    /// Only loopless plans.
    #[arg(long)]
    pub loopless: bool,
    /// Where to write the plans as JSON.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub limits: Limits,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Certify(a) => commands::certify(&a),
        Command::Plan(a) => commands::plan(&a),
        Command::Transform(a) => commands::transform(&a),
        Command::Enumerate(a) => commands::enumerate(&a),
    };
    match result {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {:#}", e);
            let status = match e.downcast_ref::<topcert::Error>() {
                Some(topcert::Error::Resource(_)) => commands::Status::Inconclusive,
                _ => commands::Status::Usage,
            };
            ExitCode::from(status as u8)
        }
    }
}
