mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::Failure;

#[derive(Parser, Debug)]
#[command(name = "pebblewidth", version, about = "Layout, pebbling and width solvers for small graphs")]
struct Cli {
    /// Print human-readable tables instead of JSON records.
    #[arg(long, global = true)]
    human: bool,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a named layout problem exactly or heuristically.
    Solve(SolveArgs),
    /// Treewidth, pathwidth, separator number, or decomposition checks.
    Width(WidthArgs),
    /// Validate a pebbling strategy or compute the one-shot cost.
    Pebble(PebbleArgs),
    /// Apply an instance transform.
    Reduce(ReduceArgs),
    /// Generate an instance.
    Gen(GenArgs),
    /// Run a verify suite.
    Verify(VerifyArgs),
    /// Rewrite a graph file as an edge list or DOT.
    Convert(ConvertArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SolveMethod {
    Auto,
    Bruteforce,
    Dp,
    Greedy,
}

#[derive(Args, Debug)]
struct SolveArgs {
    graph: PathBuf,
    /// mla, mcla, igc, vertex_separation, dag_mla, dag_mcla, dag_sumvertex or
    /// register_sufficiency.
    #[arg(long)]
    problem: String,
    #[arg(long, value_enum, default_value_t = SolveMethod::Auto)]
    method: SolveMethod,
    /// Largest lattice state count for the subset DP.
    #[arg(long, default_value_t = 1 << 24)]
    max_states: usize,
    /// Largest vertex count for brute force.
    #[arg(long, default_value_t = 9)]
    max_bruteforce: usize,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Measure {
    Treewidth,
    Pathwidth,
    /// Separator number with W = V.
    Separator,
    /// Separator number maximized over W, against treewidth + 1.
    SeparatorBound,
}

#[derive(Args, Debug)]
struct WidthArgs {
    graph: PathBuf,
    #[arg(long, value_enum, default_value_t = Measure::Treewidth)]
    measure: Measure,
    /// Write the witness decomposition here (treewidth or pathwidth).
    #[arg(long)]
    decomposition: Option<PathBuf>,
    /// Validate this decomposition file instead of solving.
    #[arg(long, conflicts_with = "decomposition")]
    validate: Option<PathBuf>,
    /// With --validate, require a path decomposition.
    #[arg(long, requires = "validate")]
    path: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Black,
    Bw,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum AccountingArg {
    Peak,
    #[value(name = "post_cleanup", alias = "post-cleanup")]
    PostCleanup,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("action").required(true).args(["strategy", "solve"]))]
struct PebbleArgs {
    dag: PathBuf,
    /// Strategy file to validate.
    #[arg(long)]
    strategy: Option<PathBuf>,
    /// Compute the optimal one-shot cost.
    #[arg(long)]
    solve: bool,
    #[arg(long, value_enum, default_value_t = ModeArg::Black)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = AccountingArg::Peak)]
    accounting: AccountingArg,
    /// With --solve, write an optimal strategy here.
    #[arg(long, requires = "solve")]
    output: Option<PathBuf>,
    /// State budget for the black-white search.
    #[arg(long, default_value_t = 1 << 22)]
    max_states: usize,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    graph: PathBuf,
    /// incidence-dag, replicated:<r>, lengauer-gd (DAG D to G_D),
    /// lengauer-dg (graph G to D_G), indeg2 or single-sink.
    #[arg(long)]
    kind: String,
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Node budget for the transformed instance.
    #[arg(long, default_value_t = 4096)]
    max_nodes: usize,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(subcommand)]
    kind: GenKind,
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum GenKind {
    /// Regular graph with a planted partition into sparse-cut blocks.
    Planted {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        block_size: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0)]
        cross: usize,
        /// Partition sidecar path; defaults to `<output>.partition`.
        #[arg(long)]
        partition: Option<PathBuf>,
    },
    /// Random simple regular graph.
    Regular {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// Pyramid DAG.
    Pyramid {
        #[arg(long)]
        size: usize,
    },
    /// Erdős–Rényi graph.
    RandomGraph {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
    },
    /// Random DAG with bounded indegree.
    RandomDag {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long, default_value_t = usize::MAX)]
        max_indegree: usize,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
    /// tiny, small or full.
    #[arg(long, default_value = "small")]
    corpus: String,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Edgelist,
    Dot,
}

#[derive(Args, Debug)]
struct ConvertArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Edgelist)]
    to: Format,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = commands::Output { human: cli.human };
    let result = match cli.command {
        Command::Solve(a) => commands::solve(&out, a, cli.seed),
        Command::Width(a) => commands::width(&out, a),
        Command::Pebble(a) => commands::pebble(&out, a),
        Command::Reduce(a) => commands::reduce(&out, a),
        Command::Gen(a) => commands::gen(&out, a, cli.seed),
        Command::Verify(a) => commands::verify(&out, a, cli.seed),
        Command::Convert(a) => commands::convert(&out, a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
