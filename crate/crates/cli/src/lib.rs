//! Command-line front end: argument parsing, file loading and JSON records.

mod commands;
mod config;
mod record;
mod sweep;

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{FileConfig, CONFIG_ENV};
pub use record::{instance_id, Outcome, RunRecord};
pub use sweep::SweepRecord;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_FOUND: i32 = 2;
pub const EXIT_TIMEOUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "spanembed", version, about = "Embed spanning trees into graphs with a universal vertex and minimum degree 2m/3")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the full embedding pipeline on one instance.
    Embed(EmbedArgs),
    /// Exact backtracking search on one instance.
    Oracle(OracleArgs),
    /// Exhaustive sweep over all free trees and generated hosts.
    Sweep(SweepArgs),
    /// Nice subtree and cut of a tree.
    Decompose(DecomposeArgs),
    /// Look for an extremal partition of a host graph.
    DetectSpecial(DetectArgs),
    /// Write a generated host graph.
    Generate(GenerateArgs),
}

#[derive(Debug, Args, Clone)]
pub struct Params {
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub gamma0: Option<f64>,
    #[arg(long)]
    pub gamma1: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Emit JSON instead of text.
    #[arg(long)]
    pub json: bool,
    /// Include wall-clock times in records (breaks byte-identical output).
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    #[arg(long)]
    pub graph: String,
    #[arg(long)]
    pub tree: String,
    #[command(flatten)]
    pub params: Params,
    /// Seconds allowed for the exact fallback; 0 means unlimited.
    #[arg(long)]
    pub time_budget: Option<f64>,
    #[arg(long)]
    pub dump_plan: bool,
    #[arg(long)]
    pub no_oracle_fallback: bool,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub graph: String,
    #[arg(long)]
    pub tree: String,
    #[arg(long)]
    pub time_budget: Option<f64>,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    Complete,
    Random,
    Planted,
    Adversarial,
    All,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub m_max: usize,
    #[arg(long, default_value_t = 2)]
    pub m_min: usize,
    #[arg(long, value_enum, default_value_t = ProfileArg::All)]
    pub profile: ProfileArg,
    /// Hosts per randomized profile and per m.
    #[arg(long, default_value_t = 10)]
    pub hosts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long)]
    pub time_budget: Option<f64>,
    #[arg(long)]
    pub timings: bool,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub tree: String,
    #[command(flatten)]
    pub params: Params,
    /// Skip the minimum-size precondition on m.
    #[arg(long)]
    pub relaxed: bool,
}

#[derive(Debug, Args)]
pub struct DetectArgs {
    #[arg(long)]
    pub graph: String,
    #[command(flatten)]
    pub params: Params,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Also run the refinement step.
    #[arg(long)]
    pub refine: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub profile: ProfileArg,
    #[arg(long)]
    pub m: usize,
    /// Keep probability for the random profile.
    #[arg(long, default_value_t = 0.5)]
    pub keep: f64,
    /// Cross edges for the planted profile.
    #[arg(long, default_value_t = 0)]
    pub cross: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<String>,
    /// Also write a random spanning tree of the generated graph.
    #[arg(long)]
    pub tree_out: Option<String>,
}

/// Failures that end a command with exit code 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: spanembed::io::ParseError },
    #[error("output: {0}")]
    Output(#[from] std::io::Error),
}

/// Parses `args` (program name first) and runs the command. Normal output
/// goes to `out`, diagnostics to `err`.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let file = config::load()?;
    match cmd {
        Command::Embed(a) => commands::embed(&a, &file, out),
        Command::Oracle(a) => commands::oracle(&a, &file, out),
        Command::Sweep(a) => sweep::sweep(&a, &file, out, err),
        Command::Decompose(a) => commands::decompose(&a, &file, out),
        Command::DetectSpecial(a) => commands::detect(&a, &file, out),
        Command::Generate(a) => commands::generate(&a, out),
    }
}
