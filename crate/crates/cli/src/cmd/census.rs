use std::io::Write;
use std::path::PathBuf;

use hypertree::gadgetry::{gadget_census, CensusOptions};
use hypertree::Rational;
use serde::Serialize;

use super::{load_host, load_partition};
use crate::output::{emit, json_doc};
use crate::{parse_rational, Ctx, Result, Status};

#[derive(clap::Args, Debug, Serialize)]
pub struct Args {
    #[arg(long)]
    pub host: PathBuf,
    /// A/B partition; without it the census uses the separation it finds.
    #[arg(long)]
    pub partition: Option<PathBuf>,
    /// Diamond-graph threshold (`a/b` or decimal); defaults to the config value.
    #[arg(long, value_parser = parse_rational)]
    pub gamma: Option<Rational>,
    /// Separation threshold; defaults to the config value.
    #[arg(long, value_parser = parse_rational)]
    pub mu: Option<Rational>,
    /// Balancers are counted for every t' in 2..=t.
    #[arg(long, default_value_t = 2)]
    pub t: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Node budget per gadget search; defaults to the configured search budget.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(a: &Args, ctx: &Ctx, stdout: &mut dyn Write) -> Result<Status> {
    let h = load_host(&a.host)?;
    let part = a.partition.as_deref().map(|p| load_partition(p, h.n())).transpose()?;
    let mut opts = CensusOptions::from_config(&ctx.cfg, a.t, a.seed);
    opts.gamma = a.gamma.unwrap_or(opts.gamma);
    opts.mu = a.mu.unwrap_or(opts.mu);
    opts.search_budget = a.budget.unwrap_or(opts.search_budget);
    let census = gadget_census(&h, part.as_ref(), &opts, ctx.cfg.pi_share)?;
    emit(a.out.as_deref(), stdout, &json_doc(&ctx.provenance, &census)?)?;
    if a.out.is_some() {
        writeln!(
            stdout,
            "{} diamonds, cross {:?}, diamond graph min degree {}",
            census.total_diamonds, census.cross_diamonds, census.diamond_graph.min_degree
        )?;
    }
    Ok(Status::Success)
}
