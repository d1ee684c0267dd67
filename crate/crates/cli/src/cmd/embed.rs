use std::io::Write;
use std::path::PathBuf;

use hypertree::combinat::{derive_seed, rng};
use hypertree::embedder::{pipeline_embed_thm1, pipeline_embed_thm2, FailureReport, PipelineRun, Trace};
use hypertree::extremal::{brute_force_embed, verify_embedding, OracleOutcome};
use hypertree::treekit::expand;
use hypertree::{Hypergraph, Tree};
use rand::seq::SliceRandom;
use serde::Serialize;

use super::{load_host, load_tree};
use crate::output::{emit, json_doc};
use crate::{CliError, Ctx, Result, Status};

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Spanning, any tree.
    Pipeline1,
    /// Spanning, trees with an even-degree vertex.
    Pipeline2,
    /// Exact search, any size.
    Oracle,
    /// Spanning embedding into a random induced subgraph of the needed order.
    Almost,
}

#[derive(clap::Args, Debug, Serialize)]
pub struct Args {
    #[arg(long)]
    pub host: PathBuf,
    #[arg(long)]
    pub tree: PathBuf,
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Degree index d of the pipeline1 hypothesis (1 <= d < k).
    #[arg(long, default_value_t = 1)]
    pub d: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Oracle node budget; defaults to the configured node budget.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Random vertex subsets tried in `almost` mode.
    #[arg(long, default_value_t = 5)]
    pub subsets: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
pub struct EmbedResult {
    pub mode: Mode,
    /// "embedded", "none", "timeout" or "failed".
    pub status: &'static str,
    pub tree_vertices: usize,
    pub host_vertices: usize,
    /// `[tree-vertex, host-vertex]` pairs over the expansion tree.
    pub embedding: Option<Vec<[usize; 2]>>,
    /// Independent re-check of the embedding against the host.
    pub verified: Option<bool>,
    pub oracle_nodes: Option<u64>,
    /// Almost mode: the host vertices of the subgraph that was used; trace
    /// maps are in its local ids.
    pub subset: Option<Vec<usize>>,
    pub traces: Vec<Trace>,
    pub failure: Option<FailureReport>,
}

pub fn run(a: &Args, ctx: &Ctx, stdout: &mut dyn Write) -> Result<Status> {
    let host = load_host(&a.host)?;
    let t = load_tree(&a.tree)?;
    let k = host.k();
    let xt = expand(&t, k)?;
    let mut res = EmbedResult {
        mode: a.mode,
        status: "failed",
        tree_vertices: xt.num_vertices(),
        host_vertices: host.n(),
        embedding: None,
        verified: None,
        oracle_nodes: None,
        subset: None,
        traces: Vec::new(),
        failure: None,
    };
    let map = match a.mode {
        Mode::Oracle => {
            let r = brute_force_embed(&host, &xt, a.budget.unwrap_or(ctx.cfg.node_budget))?;
            res.oracle_nodes = Some(r.nodes);
            match r.outcome {
                OracleOutcome::Embedding(m) => Some(m),
                OracleOutcome::None => {
                    res.status = "none";
                    None
                }
                OracleOutcome::Timeout => {
                    res.status = "timeout";
                    None
                }
            }
        }
        Mode::Pipeline1 => take_run(&mut res, pipeline_embed_thm1(&host, &t, k, a.d, &ctx.cfg, a.seed)?),
        Mode::Pipeline2 => take_run(&mut res, pipeline_embed_thm2(&host, &t, k, &ctx.cfg, a.seed)?),
        Mode::Almost => almost(a, ctx, &host, &t, &mut res)?,
    };
    let status = match map {
        Some(m) => {
            let ok = verify_embedding(&host, &xt, &m);
            res.status = "embedded";
            res.verified = Some(ok);
            res.embedding = Some(m.iter().enumerate().map(|(v, &w)| [v, w]).collect());
            if ok {
                Status::Success
            } else {
                Status::Inconsistent
            }
        }
        None => Status::Failure,
    };
    emit(a.out.as_deref(), stdout, &json_doc(&ctx.provenance, &res)?)?;
    if let Some(out) = &a.out {
        writeln!(
            stdout,
            "{}: {} ({} tree vertices into {})",
            out.display(),
            res.status,
            res.tree_vertices,
            res.host_vertices
        )?;
    }
    Ok(status)
}

fn take_run(res: &mut EmbedResult, run: PipelineRun) -> Option<Vec<usize>> {
    res.traces.push(run.trace);
    match run.outcome {
        Ok(pe) => pe.full_map(),
        Err(f) => {
            res.failure = Some(f);
            None
        }
    }
}

/// Picks a uniformly random vertex subset of exactly the expansion's order and
/// runs the spanning pipeline on the induced subgraph.
fn almost(a: &Args, ctx: &Ctx, host: &Hypergraph, t: &Tree, res: &mut EmbedResult) -> Result<Option<Vec<usize>>> {
    let (n, k, m) = (host.n(), host.k(), res.tree_vertices);
    if m + k - 1 > n {
        return Err(CliError::Input(format!("almost mode needs |V(T^(k))| <= n - k + 1, got {m} > {}", n + 1 - k)));
    }
    for i in 0..a.subsets {
        let seed = derive_seed(a.seed, i as u64);
        let mut vs: Vec<usize> = (0..n).collect();
        vs.shuffle(&mut rng(seed));
        vs.truncate(m);
        vs.sort_unstable();
        let sub = host.induced(&vs)?;
        let local = take_run(res, pipeline_embed_thm1(&sub, t, k, a.d, &ctx.cfg, seed)?);
        if let Some(local) = local {
            res.failure = None;
            res.subset = Some(vs.clone());
            return Ok(Some(local.iter().map(|&v| vs[v]).collect()));
        }
    }
    Ok(None)
}
