//! Command-line front end for `mms-core`.
//!
//! Exit codes: 0 success, 1 a check failed, 2 usage error, 3 unparsable
//! input, 4 any other failure.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
pub mod suite;

pub use commands::{render_report, ReproduceOutput};

#[derive(Debug, Parser)]
#[command(name = "mms", version, about = "Minimal number of non-negative k-sums")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "MMS_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    /// Filter budget for the exact solver.
    #[arg(long, global = true, default_value_t = mms_core::solver::DEFAULT_BUDGET)]
    pub budget: u64,
    /// Output directory. Without it results go to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true, hide = true, env = "MMS_INJECT_FAULT")]
    pub inject_fault: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a named configuration and its predicted count.
    Construct {
        #[arg(long)]
        name: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: usize,
    },
    /// Partition all k-subsets of [n] into parallel classes.
    Baranyai {
        #[arg(long, required_unless_present = "validate")]
        n: Option<usize>,
        #[arg(long, required_unless_present = "validate")]
        k: Option<usize>,
        /// Re-check a partition JSON file instead of building one.
        #[arg(long, conflicts_with_all = ["n", "k"])]
        validate: Option<PathBuf>,
    },
    /// Extract a certified family of non-negative k-sums.
    Witness {
        /// Configuration file, one rational per line.
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        theorem: u8,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        #[arg(long = "sample", alias = "sample-size", default_value_t = 1000)]
        sample_size: usize,
    },
    /// Compute A(n, k) exactly.
    Solve {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = mms_core::solver::DEFAULT_CAP)]
        cap: u64,
    },
    /// Decide A(n, k) = C(n-1, k-1) for a range of n.
    Sweep {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n_lo: usize,
        #[arg(long)]
        n_hi: usize,
        #[arg(long, default_value_t = mms_core::solver::DEFAULT_CAP)]
        cap: u64,
    },
    /// Heuristic upper bound on A(n, k).
    Upper {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "grid")]
        strategy: String,
    },
    /// Verify a named inequality or a whole chain.
    Check {
        #[arg(long, conflicts_with = "suite", required_unless_present = "suite")]
        inequality: Option<String>,
        #[arg(long)]
        suite: Option<String>,
        /// Parameters as key=value, e.g. `--params k=3 n=5200 p=1`.
        #[arg(long = "params", alias = "param", value_parser = parse_kv, num_args = 1..)]
        params: Vec<(String, String)>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Run the full check suite and write a report.
    Reproduce {
        /// Random configurations in the soundness sweep.
        #[arg(long, default_value_t = 1000)]
        soundness_configs: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Auto,
    Explicit,
    Counted,
}

fn parse_kv(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| format!("expected key=value, got {s:?}"))
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    CheckFailed(String),
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Parse(_) => 3,
            CliError::Other(_) => 4,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.into())
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let line = args
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect::<Vec<_>>()
        .join(" ");
    match run(&cli, &line) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli, command_line: &str) -> Result<(), CliError> {
    if cli.global.workers > 0 {
        // Ignore the error if the global pool was already built.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.workers)
            .build_global();
    }
    commands::dispatch(cli, command_line)
}
