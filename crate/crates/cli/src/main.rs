mod commands;
mod config;
mod documents;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Fit, test and draw fully-visible Boltzmann machines.
#[derive(Debug, Parser)]
#[command(name = "fvbm", version)]
pub struct Cli {
    /// TOML settings file; command-line flags override it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Turn party division records into a ±1 agreement matrix.
    Prepare(PrepareArgs),
    /// Maximum pseudolikelihood fit of a ±1 matrix.
    Fit(FitArgs),
    /// Sandwich standard errors, Wald p-values and FDR adjustment.
    Infer(InferArgs),
    /// Exact marginal and pairwise probabilities under fitted parameters.
    Probs(ProbsArgs),
    /// Significance network as DOT and JSON.
    Graph(GraphArgs),
    /// Draw exact samples from given parameters.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct PrepareArgs {
    /// Division-level CSV: date,number,<party>...
    #[arg(long)]
    pub votes: PathBuf,
    /// Member-level CSV for split divisions: date,number,senator,vote[,party]
    #[arg(long)]
    pub splits: Option<PathBuf>,
    /// Output ±1 CSV.
    #[arg(long, short)]
    pub out: PathBuf,
    /// Provenance log (JSON); defaults to <out>.log.json.
    #[arg(long)]
    pub log: Option<PathBuf>,
    /// Party whose vote defines agreement [default: LNP]
    #[arg(long)]
    pub reference: Option<String>,
    /// Neighbours used for imputation [default: 3]
    #[arg(long)]
    pub k: Option<usize>,
    /// Drop columns with a larger missing fraction [default: 0.5]
    #[arg(long)]
    pub drop_threshold: Option<f64>,
    /// Senator to move out of their party into a column of their own.
    #[arg(long)]
    pub extract_member: Option<String>,
    /// Column label for the extracted senator [default: upper-cased name]
    #[arg(long)]
    pub member_label: Option<String>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// ±1 CSV with a header row.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, short)]
    pub out: PathBuf,
    /// Objective improvement per sweep below which the fit may stop [default: 1e-8]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Largest coordinate step below which the fit may stop [default: 1e-10]
    #[arg(long)]
    pub step_tol: Option<f64>,
    /// [default: 1000]
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// "zeros" or a params/fit JSON file [default: zeros]
    #[arg(long)]
    pub init: Option<String>,
    /// Fail on degenerate columns or a fit that did not converge.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct InferArgs {
    /// Output of `fvbm fit`.
    #[arg(long)]
    pub fit: PathBuf,
    /// The ±1 CSV the fit was computed from.
    #[arg(long)]
    pub data: PathBuf,
    /// Directory receiving report.json and tables.txt.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// by | bh [default: by]
    #[arg(long)]
    pub fdr: Option<String>,
    /// subtables | single [default: subtables]
    #[arg(long)]
    pub groups: Option<String>,
}

#[derive(Debug, Args)]
pub struct ProbsArgs {
    /// Fit or params JSON.
    #[arg(long)]
    pub fit: PathBuf,
    /// Add the 2x2 joint of two columns, e.g. NXT,DHJP (repeatable).
    #[arg(long, value_name = "A,B")]
    pub pair: Vec<String>,
    /// Output JSON; stdout when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GraphArgs {
    /// Output of `fvbm infer`.
    #[arg(long)]
    pub report: PathBuf,
    /// Directory receiving graph.dot and graph.json.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// raw | fdr [default: raw]
    #[arg(long)]
    pub mode: Option<String>,
    /// Significance level [default: 0.05 raw, 0.10 fdr]
    #[arg(long)]
    pub level: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Fit or params JSON.
    #[arg(long)]
    pub params: PathBuf,
    #[arg(long, short)]
    pub n: usize,
    /// [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV; stdout when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

/// Failure classes and their exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Numerical(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<fvbm::Error> for CliError {
    fn from(e: fvbm::Error) -> Self {
        match e {
            e if e.is_numerical() => CliError::Numerical(e.to_string()),
            fvbm::Error::Config(m) => CliError::Usage(m),
            e => CliError::Data(e.to_string()),
        }
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
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
