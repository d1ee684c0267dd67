//! k-uniform hypergraphs over dense vertex ids, with degree, link and
//! neighbourhood computations, blow-ups, loose-path search and reservoirs.

mod blowup;
mod gen;
mod paths;
mod reservoir;
mod text;

pub use blowup::{blow_up, count_edge_blowups, Blowup, BLOWUP_VERTEX_CAP, COUNT_BLOWUP_CAP};
pub use gen::{loose_cycle, random_hypergraph, random_with_min_degree};
pub use paths::{find_loose_path, loose_paths, verify_loose_path, LoosePath};
pub use reservoir::{select_reservoir, verify_reservoir, Reservoir};
pub use text::{parse_hypergraph, parse_partition, write_hypergraph, write_partition, Partition};

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::combinat::{binomial, for_each_subset};
use crate::error::{invalid, Error, Result};
use crate::Rational;

pub type Vertex = usize;
pub type Edge = Vec<Vertex>;

/// Largest supported uniformity (edges are hashed as packed 16-bit ids).
pub const MAX_K: usize = 8;
/// Largest supported vertex count.
pub const MAX_N: usize = 1 << 16;

/// Packs a sorted vertex set into a hash key.
pub(crate) fn key(set: &[Vertex]) -> u128 {
    let mut acc: u128 = 0;
    for &v in set {
        acc = (acc << 16) | (v as u128 + 1);
    }
    acc
}

fn sorted(set: &[Vertex]) -> Edge {
    let mut s = set.to_vec();
    s.sort_unstable();
    s
}

/// A k-uniform hypergraph on vertices `0..n` with canonically sorted edges.
#[derive(Clone, Debug)]
pub struct Hypergraph {
    n: usize,
    k: usize,
    edges: Vec<Edge>,
    index: HashSet<u128>,
    incidence: Vec<Vec<usize>>,
}

impl PartialEq for Hypergraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.k == other.k && self.edges == other.edges
    }
}

impl Eq for Hypergraph {}

impl Hypergraph {
    /// Builds a hypergraph, rejecting malformed or duplicate edges.
    pub fn new(n: usize, k: usize, edges: Vec<Edge>) -> Result<Self> {
        if !(2..=MAX_K).contains(&k) {
            return invalid(format!("uniformity k = {k} outside 2..={MAX_K}"));
        }
        if n > MAX_N {
            return Err(Error::SizeCap(format!("n = {n} exceeds {MAX_N}")));
        }
        let mut canon = Vec::with_capacity(edges.len());
        for e in edges {
            let e = sorted(&e);
            if e.len() != k {
                return invalid(format!("edge {e:?} does not have {k} vertices"));
            }
            if e.windows(2).any(|w| w[0] == w[1]) {
                return invalid(format!("edge {e:?} repeats a vertex"));
            }
            if let Some(&v) = e.iter().find(|&&v| v >= n) {
                return Err(Error::InvalidVertex { vertex: v, n });
            }
            canon.push(e);
        }
        canon.sort();
        if let Some(w) = canon.windows(2).find(|w| w[0] == w[1]) {
            return invalid(format!("duplicate edge {:?}", w[0]));
        }
        Ok(Self::from_canonical(n, k, canon))
    }

    /// Builds from edges that may contain duplicates; duplicates are merged.
    pub fn from_edges_dedup(n: usize, k: usize, edges: Vec<Edge>) -> Result<Self> {
        let mut canon: Vec<Edge> = edges.iter().map(|e| sorted(e)).collect();
        canon.sort();
        canon.dedup();
        Self::new(n, k, canon)
    }

    fn from_canonical(n: usize, k: usize, edges: Vec<Edge>) -> Self {
        let mut incidence = vec![Vec::new(); n];
        let mut index = HashSet::with_capacity(edges.len());
        for (i, e) in edges.iter().enumerate() {
            index.insert(key(e));
            for &v in e {
                incidence[v].push(i);
            }
        }
        Self { n, k, edges, index, incidence }
    }

    pub fn empty(n: usize, k: usize) -> Result<Self> {
        Self::new(n, k, Vec::new())
    }

    pub fn complete(n: usize, k: usize) -> Result<Self> {
        let verts: Vec<usize> = (0..n).collect();
        let mut edges = Vec::new();
        for_each_subset(&verts, k, |s| edges.push(s.to_vec()));
        Self::new(n, k, edges)
    }

    /// All k-subsets of `0..n` accepted by `keep`.
    pub fn from_predicate(n: usize, k: usize, mut keep: impl FnMut(&[usize]) -> bool) -> Result<Self> {
        let verts: Vec<usize> = (0..n).collect();
        let mut edges = Vec::new();
        for_each_subset(&verts, k, |s| {
            if keep(s) {
                edges.push(s.to_vec());
            }
        });
        Self::new(n, k, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &[Vertex] {
        &self.edges[id]
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Ids of edges containing `v`.
    pub fn incident(&self, v: Vertex) -> &[usize] {
        &self.incidence[v]
    }

    /// Membership test for a vertex set in any order.
    pub fn contains_edge(&self, set: &[Vertex]) -> bool {
        if set.len() != self.k {
            return false;
        }
        let mut buf = [0usize; MAX_K];
        buf[..set.len()].copy_from_slice(set);
        let s = &mut buf[..set.len()];
        s.sort_unstable();
        self.index.contains(&key(s))
    }

    /// Membership test for an already sorted vertex set.
    pub fn contains_sorted(&self, set: &[Vertex]) -> bool {
        set.len() == self.k && self.index.contains(&key(set))
    }

    fn check_set(&self, s: &[Vertex]) -> Result<Edge> {
        let s = sorted(s);
        if let Some(&v) = s.iter().find(|&&v| v >= self.n) {
            return Err(Error::InvalidVertex { vertex: v, n: self.n });
        }
        if s.windows(2).any(|w| w[0] == w[1]) {
            return invalid(format!("set {s:?} repeats a vertex"));
        }
        Ok(s)
    }

    /// Number of edges containing `s`.
    pub fn degree(&self, s: &[Vertex]) -> Result<usize> {
        let s = self.check_set(s)?;
        if s.len() >= self.k {
            return invalid(format!("|s| = {} must be below k = {}", s.len(), self.k));
        }
        Ok(match s.first() {
            None => self.edges.len(),
            Some(&v) => {
                self.incidence[v].iter().filter(|&&e| s.iter().all(|x| self.edges[e].binary_search(x).is_ok())).count()
            }
        })
    }

    /// The neighbourhood N(s): all (k - |s|)-sets W with W ∪ s an edge, sorted.
    pub fn neighbourhood(&self, s: &[Vertex]) -> Result<Vec<Edge>> {
        let s = self.check_set(s)?;
        if s.len() >= self.k {
            return invalid("neighbourhood needs |s| < k");
        }
        let mut out: Vec<Edge> = match s.first() {
            None => self.edges.clone(),
            Some(&v) => self.incidence[v]
                .iter()
                .map(|&e| &self.edges[e])
                .filter(|e| s.iter().all(|x| e.binary_search(x).is_ok()))
                .map(|e| e.iter().copied().filter(|x| s.binary_search(x).is_err()).collect())
                .collect(),
        };
        out.sort();
        Ok(out)
    }

    /// Degree of every d-subset that lies in at least one edge, keyed by packed set.
    pub fn degree_table(&self, d: usize) -> HashMap<u128, usize> {
        let mut table = HashMap::new();
        for e in &self.edges {
            for_each_subset(e, d, |s| *table.entry(key(s)).or_insert(0) += 1);
        }
        table
    }

    /// Exact minimum and maximum d-degree.
    pub fn min_d_degree(&self, d: usize) -> Result<DegreeProfile> {
        if d == 0 || d >= self.k {
            return invalid(format!("d = {d} outside 1..k with k = {}", self.k));
        }
        let table = self.degree_table(d);
        let verts: Vec<usize> = (0..self.n).collect();
        let mut min = usize::MAX;
        let mut max = 0;
        let mut witness = Vec::new();
        for_each_subset(&verts, d, |s| {
            let deg = table.get(&key(s)).copied().unwrap_or(0);
            if deg < min {
                min = deg;
                witness = s.to_vec();
            }
            max = max.max(deg);
        });
        if min == usize::MAX {
            min = 0;
        }
        let total = binomial(self.n.saturating_sub(d), self.k - d);
        let normalized_min =
            if total == 0 { Rational::from_integer(0) } else { Rational::new(min as i64, total as i64) };
        Ok(DegreeProfile { d, min_degree: min, max_degree: max, normalized_min, witness })
    }

    /// Checks that the normalized minimum d'-degree is at least the normalized
    /// minimum d-degree.
    pub fn check_degree_monotonicity(&self, d: usize, d_prime: usize) -> Result<bool> {
        if d_prime == 0 || d_prime > d || d >= self.k {
            return invalid(format!("need 1 <= d' <= d < k, got d' = {d_prime}, d = {d}"));
        }
        let hi = self.min_d_degree(d)?;
        let lo = self.min_d_degree(d_prime)?;
        Ok(lo.normalized_min >= hi.normalized_min)
    }

    /// The link of `s`: the (k - |s|)-graph on V \ s of sets W with W ∪ s an edge.
    pub fn link(&self, s: &[Vertex]) -> Result<Link> {
        let s = self.check_set(s)?;
        if s.len() + 2 > self.k {
            return invalid(format!("link needs |s| <= k - 2, got |s| = {}", s.len()));
        }
        if s.is_empty() {
            return Ok(Link { graph: self.clone(), vertices: (0..self.n).collect() });
        }
        let vertices: Vec<usize> = (0..self.n).filter(|v| s.binary_search(v).is_err()).collect();
        let mut relabel = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            relabel[v] = i;
        }
        let edges = self.neighbourhood(&s)?.into_iter().map(|w| w.into_iter().map(|v| relabel[v]).collect()).collect();
        let graph = Hypergraph::new(vertices.len(), self.k - s.len(), edges)?;
        Ok(Link { graph, vertices })
    }

    /// Subhypergraph induced on `vertices`, relabelled to `0..vertices.len()` in
    /// the given order.
    pub fn induced(&self, vertices: &[Vertex]) -> Result<Hypergraph> {
        let mut relabel = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            if v >= self.n {
                return Err(Error::InvalidVertex { vertex: v, n: self.n });
            }
            relabel[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| e.iter().all(|&v| relabel[v] != usize::MAX))
            .map(|e| e.iter().map(|&v| relabel[v]).collect())
            .collect();
        Hypergraph::new(vertices.len(), self.k, edges)
    }
}

/// A link graph together with the original ids of its vertices.
#[derive(Clone, Debug)]
pub struct Link {
    pub graph: Hypergraph,
    /// `vertices[i]` is the original id of link vertex `i`.
    pub vertices: Vec<Vertex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub d: usize,
    pub min_degree: usize,
    pub max_degree: usize,
    /// min_degree / C(n - d, k - d), exact.
    pub normalized_min: Rational,
    /// A d-set attaining the minimum.
    pub witness: Vec<Vertex>,
}
