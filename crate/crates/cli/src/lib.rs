//! Experiment drivers behind the `hypertree` binary.
//!
//! Every artifact opens with a provenance record (tool version, the parsed
//! command with all its parameters, worker count and effective budgets).
//! Nothing time- or host-dependent is written, so a rerun with the same
//! arguments reproduces each file byte for byte.

pub mod cmd;
pub mod output;
pub mod par;

use std::io::Write;

use clap::{Parser, Subcommand};
use hypertree::{Config, Rational};
use serde::Serialize;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Parser, Debug, Serialize)]
#[command(name = "hypertree", version, about = "Spanning hypertree experiments")]
pub struct Cli {
    /// Worker threads for per-tree and per-trial loops. Output does not
    /// depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Build the parity or mod-q lower-bound construction.
    Construct(cmd::construct::Args),
    /// Cross-check certificates against the exact oracle for a tree class.
    VerifyNonembed(cmd::verify::Args),
    /// Oracle embeddability of random thinned hosts over a density grid.
    ScanThreshold(cmd::scan::Args),
    /// Diamonds, diamond graph, separation, gadget counts and π-types.
    GadgetCensus(cmd::census::Args),
    /// Embed a tree expansion with a pipeline, the oracle, or almost-spanning.
    Embed(cmd::embed::Args),
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("consistency violation: {0}")]
    Consistency(String),
    #[error("search failure: {0}")]
    Failure(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<hypertree::Error> for CliError {
    fn from(e: hypertree::Error) -> Self {
        use hypertree::Error as E;
        match e {
            E::InvalidVertex { .. } | E::InvalidArgument(_) | E::SizeCap(_) | E::Parse { .. } => {
                CliError::Input(e.to_string())
            }
            E::Invariant(_) => CliError::Consistency(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => 2,
            CliError::Consistency(_) => 3,
            CliError::Failure(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// How a command that ran to completion ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    /// The search found nothing, honestly (exit 4).
    Failure,
    /// Results disagree with each other (exit 3).
    Inconsistent,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::Failure => 4,
            Status::Inconsistent => 3,
        }
    }
}

/// Shared state handed to every command.
pub struct Ctx {
    pub cfg: Config,
    pub workers: usize,
    pub provenance: serde_json::Value,
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<Status> {
    if cli.workers == 0 {
        return Err(CliError::Input("--workers must be at least 1".into()));
    }
    let cfg = Config::from_env();
    let provenance = serde_json::json!({
        "tool": "hypertree",
        "version": env!("CARGO_PKG_VERSION"),
        "format_version": FORMAT_VERSION,
        "workers": cli.workers,
        "node_budget": cfg.node_budget,
        "search_budget": cfg.search_budget,
        "command": &cli.command,
    });
    let ctx = Ctx { cfg, workers: cli.workers, provenance };
    match &cli.command {
        Command::Construct(a) => cmd::construct::run(a, &ctx, stdout),
        Command::VerifyNonembed(a) => cmd::verify::run(a, &ctx, stdout),
        Command::ScanThreshold(a) => cmd::scan::run(a, &ctx, stdout),
        Command::GadgetCensus(a) => cmd::census::run(a, &ctx, stdout),
        Command::Embed(a) => cmd::embed::run(a, &ctx, stdout),
    }
}

/// Accepts `a/b`, integers and plain decimals such as `0.05`.
pub fn parse_rational(s: &str) -> std::result::Result<Rational, String> {
    let s = s.trim();
    if let Some((int, frac)) = s.split_once('.') {
        let digits = frac.len() as u32;
        if digits > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal {s:?}"));
        }
        let neg = int.starts_with('-');
        let whole: i64 =
            if int.is_empty() || int == "-" { 0 } else { int.parse().map_err(|_| format!("bad decimal {s:?}"))? };
        let scale = 10i64.pow(digits);
        let f: i64 = if frac.is_empty() { 0 } else { frac.parse().unwrap() };
        let num = whole.abs() * scale + f;
        return Ok(Rational::new(if neg { -num } else { num }, scale));
    }
    s.parse::<Rational>().map_err(|_| format!("bad rational {s:?}"))
}

pub fn fmt_rational(r: Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
