use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::combinat::binomial;
use crate::hypercore::{Edge, Hypergraph, Vertex};
use crate::Rational;

/// Two edges `shared ∪ {u}` and `shared ∪ {v}` meeting in k-1 vertices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Diamond {
    /// Sorted (k-1)-set common to both edges.
    pub shared: Vec<Vertex>,
    pub tips: (Vertex, Vertex),
}

impl Diamond {
    /// The half-diamond containing tip `x`.
    pub fn edge_at(&self, x: Vertex) -> Edge {
        let mut e = self.shared.clone();
        e.push(x);
        e.sort_unstable();
        e
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        let mut v = self.shared.clone();
        v.push(self.tips.0);
        v.push(self.tips.1);
        v.sort_unstable();
        v
    }

    pub fn verify(&self, h: &Hypergraph) -> bool {
        let (u, v) = self.tips;
        self.shared.len() + 1 == h.k()
            && u != v
            && !self.shared.contains(&u)
            && !self.shared.contains(&v)
            && self.shared.windows(2).all(|w| w[0] < w[1])
            && h.contains_sorted(&self.edge_at(u))
            && h.contains_sorted(&self.edge_at(v))
    }
}

/// Every (k-1)-set that lies in an edge, with the vertices completing it.
fn completions(h: &Hypergraph) -> BTreeMap<Edge, Vec<Vertex>> {
    let mut map: BTreeMap<Edge, Vec<Vertex>> = BTreeMap::new();
    for e in h.edges() {
        for (i, &x) in e.iter().enumerate() {
            let mut s = e.clone();
            s.remove(i);
            map.entry(s).or_default().push(x);
        }
    }
    for xs in map.values_mut() {
        xs.sort_unstable();
    }
    map
}

/// (u, v)-diamonds with `shared` avoiding `blocked`, tips in the given order.
pub(crate) fn diamonds_between(h: &Hypergraph, u: Vertex, v: Vertex, blocked: &dyn Fn(Vertex) -> bool) -> Vec<Diamond> {
    let mut out = Vec::new();
    if u == v {
        return out;
    }
    for &ei in h.incident(u) {
        let e = h.edge(ei);
        if e.contains(&v) {
            continue;
        }
        let shared: Vec<Vertex> = e.iter().copied().filter(|&x| x != u).collect();
        if shared.iter().any(|&x| blocked(x)) {
            continue;
        }
        let mut f = shared.clone();
        f.push(v);
        if h.contains_edge(&f) {
            out.push(Diamond { shared, tips: (u, v) });
        }
    }
    out
}

/// All diamonds of `h`. With `u` given, only those with u as a tip (listed as
/// the first tip); with both, only (u, v)-diamonds.
pub fn enumerate_diamonds(h: &Hypergraph, u: Option<Vertex>, v: Option<Vertex>) -> Vec<Diamond> {
    match (u, v) {
        (Some(u), Some(v)) => diamonds_between(h, u, v, &|_| false),
        (None, Some(v)) => enumerate_diamonds(h, Some(v), None),
        (Some(u), None) => {
            let mut out: Vec<Diamond> = (0..h.n()).flat_map(|v| diamonds_between(h, u, v, &|_| false)).collect();
            out.sort();
            out
        }
        (None, None) => {
            let mut out = Vec::new();
            for (s, xs) in completions(h) {
                for (i, &a) in xs.iter().enumerate() {
                    for &b in &xs[i + 1..] {
                        out.push(Diamond { shared: s.clone(), tips: (a, b) });
                    }
                }
            }
            out
        }
    }
}

/// Exact number of (x, y)-diamonds for every pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiamondCounts {
    pub n: usize,
    pub k: usize,
    /// Row-major strict upper triangle.
    counts: Vec<u64>,
}

fn tri(n: usize, x: usize, y: usize) -> usize {
    let (a, b) = if x < y { (x, y) } else { (y, x) };
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

impl DiamondCounts {
    pub fn new(h: &Hypergraph) -> Self {
        let n = h.n();
        let mut counts = vec![0u64; n * n.saturating_sub(1) / 2];
        for xs in completions(h).values() {
            for (i, &a) in xs.iter().enumerate() {
                for &b in &xs[i + 1..] {
                    counts[tri(n, a, b)] += 1;
                }
            }
        }
        Self { n, k: h.k(), counts }
    }

    pub fn get(&self, x: Vertex, y: Vertex) -> u64 {
        if x == y {
            0
        } else {
            self.counts[tri(self.n, x, y)]
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Number of (x, y)-diamonds with `in_a[x] != in_a[y]`.
    pub fn cross(&self, in_a: &dyn Fn(Vertex) -> bool) -> u64 {
        let mut total = 0;
        for x in 0..self.n {
            for y in x + 1..self.n {
                if in_a(x) != in_a(y) {
                    total += self.get(x, y);
                }
            }
        }
        total
    }
}

/// A simple graph with sorted adjacency lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub n: usize,
    pub adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        for l in &mut adj {
            l.sort_unstable();
            l.dedup();
        }
        Self { n, adj }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Edges between the vertices marked true and the rest.
    pub fn cross_edges(&self, side: &[bool]) -> usize {
        (0..self.n).filter(|&v| side[v]).map(|v| self.adj[v].iter().filter(|&&w| !side[w]).count()).sum()
    }

    /// Subgraph on `vertices`, relabelled in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut relabel = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            relabel[v] = i;
        }
        let adj = vertices
            .iter()
            .map(|&v| {
                let mut l: Vec<usize> = self.adj[v].iter().map(|&w| relabel[w]).filter(|&w| w != usize::MAX).collect();
                l.sort_unstable();
                l
            })
            .collect();
        Graph { n: vertices.len(), adj }
    }

    /// Some three pairwise non-adjacent vertices, by exhaustive scan.
    pub fn independent_triple(&self) -> Option<[usize; 3]> {
        for a in 0..self.n {
            for b in a + 1..self.n {
                if self.has_edge(a, b) {
                    continue;
                }
                for c in b + 1..self.n {
                    if !self.has_edge(a, c) && !self.has_edge(b, c) {
                        return Some([a, b, c]);
                    }
                }
            }
        }
        None
    }
}

/// The γ-diamond graph: xy is an edge iff there are at least γ·C(n, k-1)
/// (x, y)-diamonds.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiamondGraph {
    pub gamma: Rational,
    pub counts: DiamondCounts,
    pub graph: Graph,
}

impl DiamondGraph {
    pub fn from_counts(counts: DiamondCounts, gamma: Rational) -> Self {
        let n = counts.n;
        let scale = binomial(n, counts.k - 1) as i128;
        let (num, den) = (*gamma.numer() as i128, *gamma.denom() as i128);
        let mut edges = Vec::new();
        for x in 0..n {
            for y in x + 1..n {
                if counts.get(x, y) as i128 * den >= num * scale {
                    edges.push((x, y));
                }
            }
        }
        let graph = Graph::new(n, &edges);
        Self { gamma, counts, graph }
    }

    /// Same counts under another threshold.
    pub fn rethreshold(&self, gamma: Rational) -> Self {
        Self::from_counts(self.counts.clone(), gamma)
    }
}

pub fn diamond_graph(h: &Hypergraph, gamma: Rational) -> crate::Result<DiamondGraph> {
    if gamma <= Rational::from_integer(0) || gamma > Rational::from_integer(1) {
        return crate::error::invalid(format!("gamma = {gamma} outside (0, 1]"));
    }
    Ok(DiamondGraph::from_counts(DiamondCounts::new(h), gamma))
}
