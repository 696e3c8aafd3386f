use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gridblocks::cluster::ClusteringMethod;
use gridblocks::network::RebalanceMode;
use gridblocks::switching::DEFAULT_TREE_CAP;

mod commands;

/// Bridge-block analysis and switching for DC power networks.
#[derive(Debug, Parser)]
#[command(name = "gridblocks", version)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Directory receiving the output files.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Output formats to write.
    #[arg(long, global = true, value_delimiter = ',', default_values = ["json", "csv", "dot"])]
    pub formats: Vec<Format>,
    /// How unbalanced injections are handled: reject, uniform-generators or proportional-generators.
    #[arg(long, global = true, default_value = "reject")]
    pub rebalance: RebalanceMode,
    /// Absolute per-island balance tolerance in MW (default scales with total injection).
    #[arg(long, global = true)]
    pub balance_tol: Option<f64>,
    /// Include wall-clock timings in outputs (makes them non-reproducible).
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    OneShot,
    Recursive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Fastgreedy,
    SpectralLn,
    SpectralBn,
    All,
}

impl MethodArg {
    pub fn methods(self) -> Vec<ClusteringMethod> {
        match self {
            MethodArg::Fastgreedy => vec![ClusteringMethod::FastGreedy],
            MethodArg::SpectralLn => vec![ClusteringMethod::SpectralLn],
            MethodArg::SpectralBn => vec![ClusteringMethod::SpectralBn],
            MethodArg::All => ClusteringMethod::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bridge, bridge-block and block statistics of one or more cases.
    Stats {
        #[arg(required = true)]
        cases: Vec<PathBuf>,
    },
    /// DC line flows, optionally with lines out of service.
    Flow {
        case: PathBuf,
        /// Line ids to take out of service.
        #[arg(long, value_delimiter = ',')]
        outage: Vec<usize>,
    },
    /// PTDF and LODF matrices, or the GLODF of an outage set.
    Factors {
        case: PathBuf,
        /// Line ids of a simultaneous outage; writes its GLODF instead of the LODF matrix.
        #[arg(long, value_delimiter = ',')]
        outage: Vec<usize>,
    },
    /// Line influence graph of LODF magnitudes above a threshold.
    Influence {
        case: PathBuf,
        #[arg(long, default_value_t = 0.005)]
        k_min: f64,
    },
    /// Flow-weighted clustering and the method comparison table.
    Partition {
        case: PathBuf,
        /// Cluster counts to try.
        #[arg(long, value_delimiter = ',', default_values_t = [2usize])]
        b: Vec<usize>,
        #[arg(long, value_enum, default_value = "all")]
        method: MethodArg,
    },
    /// Refine the bridge-block decomposition by switching lines off.
    Refine {
        case: PathBuf,
        #[arg(long, value_enum, default_value = "one-shot")]
        mode: Mode,
        /// Clusters of the one-shot split.
        #[arg(long, default_value_t = 2)]
        b: usize,
        /// Maximum recursive iterations.
        #[arg(long, default_value_t = 3)]
        i_max: usize,
        /// Recursive congestion threshold.
        #[arg(long, default_value_t = 1.0)]
        delta: f64,
        #[arg(long, value_enum, default_value = "fastgreedy")]
        method: MethodArg,
        /// Bound on enumerated spanning trees.
        #[arg(long, default_value_t = DEFAULT_TREE_CAP)]
        tree_cap: u64,
    },
}

fn init_threads() {
    let Ok(raw) = std::env::var("GRIDBLOCKS_THREADS") else { return };
    match raw.parse::<usize>() {
        Ok(n) if n > 0 => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                tracing::warn!(error = %e, "could not size the thread pool");
            }
        }
        _ => tracing::warn!(value = %raw, "ignoring invalid GRIDBLOCKS_THREADS"),
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 5 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_threads();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(e.kind().exit_code() as u8)
        }
    }
}
