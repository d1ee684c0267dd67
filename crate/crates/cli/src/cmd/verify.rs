use std::io::Write;
use std::path::PathBuf;

use hypertree::extremal::{
    brute_force_embed, parity_certificate, verify_embedding, CertificateOutcome, Construction, OracleOutcome,
};
use hypertree::treekit::{enumerate_trees, expand, DegreeClass};
use serde::Serialize;
use serde_json::json;

use super::{degree_label, edge_label, load_host, load_partition};
use crate::output::{emit, Format, Table};
use crate::par::par_map;
use crate::{Ctx, Result, Status};

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeClass {
    /// The class the construction's counting argument covers: all-odd for
    /// parity, all degrees 1 mod q otherwise.
    Auto,
    AllOdd,
    HasEven,
    OneModQ,
    All,
}

#[derive(clap::Args, Debug, Serialize)]
pub struct Args {
    #[arg(long)]
    pub host: PathBuf,
    #[arg(long)]
    pub partition: PathBuf,
    #[arg(long, value_enum, default_value_t = TreeClass::Auto)]
    pub class: TreeClass,
    /// Oracle node budget per tree; defaults to the configured node budget.
    #[arg(long)]
    pub cap: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub const HEADER: [&str; 8] = ["index", "tree", "degrees", "certificate", "replay", "oracle", "nodes", "agree"];

pub fn run(a: &Args, ctx: &Ctx, stdout: &mut dyn Write) -> Result<Status> {
    let h = load_host(&a.host)?;
    let part = load_partition(&a.partition, h.n())?;
    let c = Construction::from_host(h, &part)?;
    let q = c.modulus();
    let keep = |d: &DegreeClass| match a.class {
        TreeClass::Auto if q == 2 => d.all_odd,
        TreeClass::Auto | TreeClass::OneModQ => d.all_one_mod(q),
        TreeClass::AllOdd => d.all_odd,
        TreeClass::HasEven => d.has_even_vertex,
        TreeClass::All => true,
    };
    let n = c.tree_order();
    let trees = enumerate_trees(n, n.saturating_sub(1).max(1), Some(&keep))?;
    let budget = a.cap.unwrap_or(ctx.cfg.node_budget);

    let rows = par_map(&trees, ctx.workers, |i, t| -> Result<(Vec<serde_json::Value>, bool)> {
        let xt = expand(t, c.k())?;
        let (cert, replay) = match parity_certificate(&c, t)? {
            CertificateOutcome::Blocked(cert) => ("blocked", Some(cert.replay(&c)?)),
            CertificateOutcome::Inconclusive { .. } => ("inconclusive", None),
        };
        let r = brute_force_embed(c.host(), &xt, budget)?;
        let (oracle, sound) = match &r.outcome {
            OracleOutcome::Embedding(map) => ("embedding", verify_embedding(c.host(), &xt, map)),
            OracleOutcome::None => ("none", true),
            OracleOutcome::Timeout => ("timeout", true),
        };
        let agree = sound && replay != Some(false) && !(cert == "blocked" && oracle == "embedding");
        let row = vec![
            json!(i),
            json!(edge_label(t)),
            json!(degree_label(t)),
            json!(cert),
            json!(replay),
            json!(oracle),
            json!(r.nodes),
            json!(agree),
        ];
        Ok((row, agree))
    });

    let mut table = Table::new(&HEADER);
    let mut disagreements = 0;
    for r in rows {
        let (row, agree) = r?;
        disagreements += usize::from(!agree);
        table.rows.push(row);
    }
    emit(a.out.as_deref(), stdout, &table.render(a.format, &ctx.provenance)?)?;
    if a.out.is_some() {
        writeln!(stdout, "{} trees checked, {disagreements} disagreements", table.rows.len())?;
    }
    Ok(if disagreements == 0 { Status::Success } else { Status::Inconsistent })
}
