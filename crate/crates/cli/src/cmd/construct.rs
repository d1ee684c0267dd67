use std::io::Write;
use std::path::PathBuf;

use hypertree::extremal::{build_mod_q_construction, build_parity_construction, Construction};
use hypertree::hypercore::{write_hypergraph, write_partition};
use serde::Serialize;

use crate::output::{comment_header, json_doc};
use crate::{CliError, Ctx, Result, Status};

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Parity,
    Modq,
}

#[derive(clap::Args, Debug, Serialize)]
pub struct Args {
    #[arg(long, value_enum)]
    pub kind: Kind,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Order n of the trees the construction is built against.
    #[arg(long)]
    pub tree_n: usize,
    /// Modulus for `modq`.
    #[arg(long)]
    pub q: Option<usize>,
    /// Directory receiving host.txt, partition.txt and profile.json.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn build(a: &Args) -> Result<Construction> {
    Ok(match a.kind {
        Kind::Parity => {
            if a.q.is_some_and(|q| q != 2) {
                return Err(CliError::Input("the parity construction has q = 2".into()));
            }
            Construction::Parity(build_parity_construction(a.k, a.tree_n)?)
        }
        Kind::Modq => {
            let q = a.q.ok_or_else(|| CliError::Input("--q is required for modq".into()))?;
            Construction::ModQ(build_mod_q_construction(a.k, a.tree_n, q)?)
        }
    })
}

pub fn run(a: &Args, ctx: &Ctx, stdout: &mut dyn Write) -> Result<Status> {
    let c = build(a)?;
    let h = c.host();
    let head = comment_header(&ctx.provenance);
    std::fs::create_dir_all(&a.out)?;
    std::fs::write(a.out.join("host.txt"), format!("{head}{}", write_hypergraph(h)))?;
    std::fs::write(a.out.join("partition.txt"), format!("{head}{}", write_partition(&c.partition())))?;
    let profile = serde_json::json!({
        "descriptor": c.descriptor(),
        "vertices": h.n(),
        "edges": h.num_edges(),
        "profiles": c.profiles(),
    });
    std::fs::write(a.out.join("profile.json"), json_doc(&ctx.provenance, &profile)?)?;
    writeln!(
        stdout,
        "{} k={} n={}: {} vertices, {} edges -> {}",
        c.descriptor().kind,
        c.k(),
        c.tree_order(),
        h.n(),
        h.num_edges(),
        a.out.display()
    )?;
    Ok(Status::Success)
}
