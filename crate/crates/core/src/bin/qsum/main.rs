//! `qsum`: run summation instances, print exact distributions, emit curve
//! data, and run the exhaustive verification suite.
//!
//! Exit codes: 0 on success, 1 when `verify` finds a failing check, 2 on
//! malformed arguments or invalid instances.

mod commands;
mod format;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qsum", version, about = "Exact simulation of multi-query quantum sums over Z_k")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output format (defaults to JSON, or CSV for sweep and lemma3).
    #[arg(long, value_enum)]
    pub output: Option<OutputFormat>,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Inline function table, e.g. `--values 0,2,1`.
    #[arg(long, value_delimiter = ',')]
    pub values: Option<Vec<usize>>,
    /// JSON file `{"n": .., "k": .., "values": [..]}`; `--values` wins.
    #[arg(long)]
    pub values_file: Option<PathBuf>,
    /// Seed for the random table (when no values are given) and for sampling.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one instance and print its report.
    Run {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Print the exact distribution of the predicted sum.
    Dist {
        #[command(flatten)]
        table: TableArgs,
        #[arg(long)]
        r: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Success probability against query count q = 0..n for both strategies.
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Measurement law of the s-term character state peaked at A.
    Lemma3 {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        s: usize,
        #[arg(long, default_value_t = 0)]
        a: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Step-by-step states of the two- and three-trit circuits.
    Trace {
        #[arg(long, value_parser = ["prop1", "prop2"])]
        which: String,
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<usize>>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the exhaustive verification suite.
    Verify {
        /// Use the n, k <= 5 grid (also enabled by QSUM_GRID_EXTENDED=1).
        #[arg(long)]
        extended: bool,
        #[command(flatten)]
        common: Common,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run_command(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
