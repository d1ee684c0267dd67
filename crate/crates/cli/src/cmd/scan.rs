use std::io::Write;
use std::path::PathBuf;

use hypertree::combinat::derive_seed;
use hypertree::extremal::{brute_force_embed, verify_embedding, OracleOutcome};
use hypertree::hypercore::random_hypergraph;
use hypertree::treekit::{classify, enumerate_trees, expand};
use hypertree::{Error, Rational};
use serde::Serialize;
use serde_json::json;

use crate::output::{emit, Format, Table};
use crate::par::par_map;
use crate::{fmt_rational, parse_rational, CliError, Ctx, Result, Status};

/// Largest host order the scan accepts; every row runs the exact oracle.
pub const SCAN_CAP: usize = 13;

#[derive(clap::Args, Debug, Serialize)]
pub struct Args {
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Host order N; the trees have (N + k - 2) / (k - 1) vertices.
    #[arg(long)]
    pub host_n: usize,
    /// `from:to:step` or a comma-separated list of edge densities.
    #[arg(long, default_value = "0.3:0.7:0.1")]
    pub densities: String,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Oracle node budget per (host, tree); defaults to the configured node budget.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_grid(s: &str) -> Result<Vec<Rational>> {
    let bad = |m: String| CliError::Input(m);
    let grid = if let [from, to, step] = s.split(':').collect::<Vec<_>>()[..] {
        let (from, to, step) =
            (parse_rational(from).map_err(bad)?, parse_rational(to).map_err(bad)?, parse_rational(step).map_err(bad)?);
        if step <= Rational::from_integer(0) || to < from {
            return Err(CliError::Input(format!("empty or unbounded density grid {s:?}")));
        }
        let count = ((to - from) / step).floor().to_integer() + 1;
        (0..count).map(|i| from + step * i).collect()
    } else {
        s.split(',').map(|p| parse_rational(p).map_err(bad)).collect::<Result<Vec<_>>>()?
    };
    if grid.iter().any(|p| *p < Rational::from_integer(0) || *p > Rational::from_integer(1)) {
        return Err(CliError::Input("densities must lie in [0, 1]".into()));
    }
    Ok(grid)
}

fn as_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn header(k: usize) -> Vec<String> {
    let mut h: Vec<String> = ["density", "trial", "seed", "edges"].map(String::from).to_vec();
    h.extend((1..k).map(|d| format!("delta_{d}")));
    for class in ["all_odd", "has_even"] {
        for col in ["trees", "embed", "none", "timeout"] {
            h.push(format!("{class}_{col}"));
        }
    }
    h
}

pub fn run(a: &Args, ctx: &Ctx, stdout: &mut dyn Write) -> Result<Status> {
    let (k, big_n) = (a.k, a.host_n);
    if big_n > SCAN_CAP {
        return Err(Error::SizeCap(format!("scan needs N <= {SCAN_CAP}, got {big_n}")).into());
    }
    if k < 2 || big_n + 2 < k || !(big_n + k - 2).is_multiple_of(k - 1) {
        return Err(CliError::Input(format!("N = {big_n} is not (k-1)n - k + 2 for k = {k}")));
    }
    let tree_n = (big_n + k - 2) / (k - 1);
    let grid = parse_grid(&a.densities)?;
    let budget = a.budget.unwrap_or(ctx.cfg.node_budget);
    let trees: Vec<_> = enumerate_trees(tree_n, tree_n.saturating_sub(1).max(1), None)?
        .into_iter()
        .map(|t| Ok((classify(&t).all_odd, expand(&t, k)?)))
        .collect::<Result<_>>()?;

    let jobs: Vec<(Rational, usize)> = grid.iter().flat_map(|&p| (0..a.trials).map(move |t| (p, t))).collect();
    let rows = par_map(&jobs, ctx.workers, |i, &(p, trial)| -> Result<Vec<serde_json::Value>> {
        let seed = derive_seed(a.seed, i as u64);
        let h = random_hypergraph(big_n, k, as_f64(p), seed)?;
        let mut row = vec![json!(as_f64(p)), json!(trial), json!(seed), json!(h.num_edges())];
        for d in 1..k {
            row.push(json!(fmt_rational(h.min_d_degree(d)?.normalized_min)));
        }
        // [trees, embed, none, timeout] for all-odd, then has-even
        let mut counts = [[0usize; 4]; 2];
        for (all_odd, xt) in &trees {
            let c = &mut counts[usize::from(!all_odd)];
            c[0] += 1;
            match brute_force_embed(&h, xt, budget)?.outcome {
                OracleOutcome::Embedding(map) => {
                    if !verify_embedding(&h, xt, &map) {
                        return Err(CliError::Consistency("oracle returned an invalid embedding".into()));
                    }
                    c[1] += 1;
                }
                OracleOutcome::None => c[2] += 1,
                OracleOutcome::Timeout => c[3] += 1,
            }
        }
        row.extend(counts.iter().flatten().map(|&x| json!(x)));
        Ok(row)
    });

    let header = header(k);
    let mut table = Table { header, rows: Vec::with_capacity(rows.len()) };
    for r in rows {
        table.rows.push(r?);
    }
    emit(a.out.as_deref(), stdout, &table.render(a.format, &ctx.provenance)?)?;
    if a.out.is_some() {
        writeln!(stdout, "{} rows ({} densities x {} trials)", table.rows.len(), grid.len(), a.trials)?;
    }
    Ok(Status::Success)
}
