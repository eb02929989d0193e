use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Evaluate, construct, optimize and verify planar point sets that maximize
/// the product of pairwise distances at diameter 2.
#[derive(Parser, Debug)]
#[command(name = "polydisc", version)]
struct Cli {
    /// Worker threads for multi-start optimization and large sums.
    #[arg(long, global = true, env = "POLYDISC_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a named configuration and write it as JSON.
    Construct(ConstructArgs),
    /// Report value, diameter graph, structure checks and KKT residual of a JSON configuration.
    Evaluate(EvaluateArgs),
    /// Multi-start local maximization, optionally with a prescribed diameter graph.
    Optimize(OptimizeArgs),
    /// Lower-bound table as CSV.
    Table(TableArgs),
    /// Asymptotic constants and convergence diagnostics.
    Asym(AsymArgs),
    /// Lagrange multipliers and first-order residual of a JSON configuration.
    Kkt(KktArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Regular,
    Kite4,
    Hexagon6,
    Dodecagon12,
    Arc,
    SparseArc,
    Triwave,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Number of points (regular, arc, sparse-arc, triwave).
    #[arg(long)]
    pub n: Option<usize>,
    /// Triangular-wave frequency (odd).
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    /// Triangular-wave amplitude; defaults to the feasible standard choice.
    #[arg(long)]
    pub amplitude: Option<f64>,
    /// Output JSON path; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Relative tolerance for diameter edges in the SVG.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Emit a JSON object instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 32)]
    pub starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 5_000)]
    pub max_iters: usize,
    /// Prescribed diameter graph, e.g. "4;1-2,2-3,2-4" (1-based labels).
    #[arg(long, conflicts_with = "sweep")]
    pub graph: Option<String>,
    /// Optimize over every admissible diameter graph and rank the results.
    #[arg(long)]
    pub sweep: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Per-start objective traces as CSV (start, step, objective).
    #[arg(long)]
    pub trace_csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    /// Comma-separated list of n.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    pub n: Vec<usize>,
    /// Families tried for each n; the best applicable value is reported.
    #[arg(long, value_delimiter = ',', default_value = "optimize")]
    pub families: Vec<TableFamily>,
    #[arg(long, default_value_t = 32)]
    pub starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV path; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TableFamily {
    Optimize,
    Arc,
    Triwave,
    Regular,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("mode").args(["name", "converge", "rk", "all"]).required(true))]
pub struct AsymArgs {
    /// One of C1, C2, C3, Cstar, J, even_bound.
    pub name: Option<String>,
    /// Finite regime product: REGIME K.
    #[arg(long, num_args = 2, value_names = ["REGIME", "K"])]
    pub converge: Option<Vec<usize>>,
    /// Torus integral of R_k R_l: K L.
    #[arg(long, num_args = 2, value_names = ["K", "L"], allow_negative_numbers = true)]
    pub rk: Option<Vec<i32>>,
    /// Every constant.
    #[arg(long)]
    pub all: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct KktArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be ≥ 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(4);
        }
    }
    let outcome = match &cli.command {
        Command::Construct(a) => commands::construct(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Optimize(a) => commands::optimize(a),
        Command::Table(a) => commands::table(a),
        Command::Asym(a) => commands::asym(a),
        Command::Kkt(a) => commands::kkt(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
