pub mod census;
pub mod construct;
pub mod embed;
pub mod scan;
pub mod verify;

use std::path::Path;

use hypertree::hypercore::{parse_hypergraph, parse_partition, Partition};
use hypertree::treekit::parse_tree;
use hypertree::{Hypergraph, Tree};

use crate::output::read;
use crate::Result;

pub(crate) fn load_host(path: &Path) -> Result<Hypergraph> {
    Ok(parse_hypergraph(&read(path)?)?)
}

pub(crate) fn load_partition(path: &Path, n: usize) -> Result<Partition> {
    Ok(parse_partition(&read(path)?, n)?)
}

pub(crate) fn load_tree(path: &Path) -> Result<Tree> {
    Ok(parse_tree(&read(path)?)?)
}

/// `0-1 0-2 ...`, the tree's edge list as stored.
pub(crate) fn edge_label(t: &Tree) -> String {
    t.edges().iter().map(|(u, v)| format!("{u}-{v}")).collect::<Vec<_>>().join(" ")
}

pub(crate) fn degree_label(t: &Tree) -> String {
    let mut d: Vec<usize> = (0..t.n()).map(|v| t.degree(v)).collect();
    d.sort_unstable_by(|a, b| b.cmp(a));
    d.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}
