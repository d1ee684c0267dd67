use std::collections::VecDeque;
use std::fmt::Write as _;

use super::Tree;
use crate::error::{invalid, Error, Result};
use crate::hypercore::{parse_hypergraph, write_hypergraph, Edge, Hypergraph};

/// The k-expansion of a tree. Anchors keep the base ids `0..n`; the k - 2
/// expansion vertices of base edge i are `n + i(k-2) ..= n + i(k-2) + k - 3`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpansionTree {
    base: Tree,
    k: usize,
    blocks: Vec<Vec<usize>>,
    hyperedges: Vec<Edge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VertexRole {
    Anchor(usize),
    Expansion { edge: usize, slot: usize },
}

/// A base edge in a valid ordering, oriented away from the root.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrderedEdge {
    pub edge: usize,
    pub parent: usize,
    pub child: usize,
}

pub fn expand(t: &Tree, k: usize) -> Result<ExpansionTree> {
    if k < 2 {
        return invalid("expansion needs k >= 2");
    }
    let n = t.n();
    let mut blocks = Vec::with_capacity(n - 1);
    let mut hyperedges = Vec::with_capacity(n - 1);
    for (i, &(u, v)) in t.edges().iter().enumerate() {
        let block: Vec<usize> = (0..k - 2).map(|j| n + i * (k - 2) + j).collect();
        let mut e = vec![u, v];
        e.extend_from_slice(&block);
        e.sort_unstable();
        blocks.push(block);
        hyperedges.push(e);
    }
    Ok(ExpansionTree { base: t.clone(), k, blocks, hyperedges })
}

impl ExpansionTree {
    pub fn base(&self) -> &Tree {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// n + (k - 2)(n - 1).
    pub fn num_vertices(&self) -> usize {
        self.base.n() + (self.k - 2) * (self.base.n() - 1)
    }

    pub fn num_anchors(&self) -> usize {
        self.base.n()
    }

    /// Expansion vertices of base edge `i`.
    pub fn block(&self, i: usize) -> &[usize] {
        &self.blocks[i]
    }

    /// Hyperedge of base edge `i`, sorted.
    pub fn hyperedge(&self, i: usize) -> &[usize] {
        &self.hyperedges[i]
    }

    pub fn hyperedges(&self) -> &[Edge] {
        &self.hyperedges
    }

    pub fn role(&self, v: usize) -> VertexRole {
        let n = self.base.n();
        if v < n {
            VertexRole::Anchor(v)
        } else {
            let off = v - n;
            VertexRole::Expansion { edge: off / (self.k - 2), slot: off % (self.k - 2) }
        }
    }

    pub fn is_anchor(&self, v: usize) -> bool {
        v < self.base.n()
    }

    pub fn to_hypergraph(&self) -> Hypergraph {
        Hypergraph::new(self.num_vertices(), self.k, self.hyperedges.clone()).expect("expansion edges are well formed")
    }

    /// BFS ordering of the base edges from anchor `root`; every prefix is a
    /// loose subtree.
    pub fn valid_ordering(&self, root: usize) -> Vec<OrderedEdge> {
        let n = self.base.n();
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut q = VecDeque::from([root]);
        let mut out = Vec::with_capacity(n - 1);
        while let Some(u) = q.pop_front() {
            for &w in self.base.neighbours(u) {
                if !seen[w] {
                    seen[w] = true;
                    out.push(OrderedEdge { edge: self.base.edge_index(u, w).unwrap(), parent: u, child: w });
                    q.push_back(w);
                }
            }
        }
        out
    }

    /// True iff every hyperedge in `order` (base-edge ids) meets the union of
    /// its predecessors in exactly one vertex.
    pub fn is_valid_ordering(&self, order: &[usize]) -> bool {
        let mut covered = vec![false; self.num_vertices()];
        for (i, &e) in order.iter().enumerate() {
            let edge = &self.hyperedges[e];
            let meet = edge.iter().filter(|&&v| covered[v]).count();
            if i > 0 && meet != 1 {
                return false;
            }
            for &v in edge {
                covered[v] = true;
            }
        }
        true
    }
}

pub fn write_expansion(x: &ExpansionTree) -> String {
    let mut out = write_hypergraph(&x.to_hypergraph());
    let anchors: Vec<String> = (0..x.num_anchors()).map(|v| v.to_string()).collect();
    writeln!(out, "#anchors: {}", anchors.join(" ")).unwrap();
    out
}

/// Parses the hypergraph format with an `#anchors:` line, rebuilding the base
/// tree. Anchor ids must be `0..n` as written by [`write_expansion`].
pub fn parse_expansion(text: &str) -> Result<ExpansionTree> {
    let h = parse_hypergraph(text)?;
    let line = text
        .lines()
        .find_map(|l| l.trim().strip_prefix("#anchors:"))
        .ok_or(Error::Parse { line: 0, msg: "missing #anchors: line".into() })?;
    let anchors: std::result::Result<Vec<usize>, _> = line.split_whitespace().map(str::parse).collect();
    let anchors = anchors.map_err(|_| Error::Parse { line: 0, msg: "bad anchor id".into() })?;
    let n = anchors.len();
    if anchors.iter().enumerate().any(|(i, &a)| i != a) {
        return invalid("anchors must be 0..n");
    }
    let mut edges = Vec::new();
    for e in h.edges() {
        let a: Vec<usize> = e.iter().copied().filter(|&v| v < n).collect();
        if a.len() != 2 {
            return invalid(format!("hyperedge {e:?} does not contain exactly two anchors"));
        }
        edges.push((e, (a[0], a[1])));
    }
    // Recover base-edge order from the expansion ids.
    edges.sort_by_key(|(e, _)| e.iter().copied().find(|&v| v >= n).unwrap_or(0));
    let tree = Tree::new(n, edges.iter().map(|&(_, uv)| uv).collect())?;
    let x = expand(&tree, h.k())?;
    if x.to_hypergraph() != h {
        return invalid("expansion ids do not follow the base-edge allocation order");
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expansion_sizes() {
        let p3 = expand(&Tree::path(3).unwrap(), 3).unwrap();
        assert_eq!(p3.num_vertices(), 5);
        assert_eq!(p3.hyperedges().len(), 2);
        let s5 = expand(&Tree::star(5).unwrap(), 3).unwrap();
        assert_eq!(s5.num_vertices(), 11);
        assert!(s5.hyperedges().iter().all(|e| e.contains(&0)));
        let e4 = expand(&Tree::path(2).unwrap(), 4).unwrap();
        assert_eq!(e4.hyperedges(), &[vec![0, 1, 2, 3]]);
        assert_eq!(e4.role(3), VertexRole::Expansion { edge: 0, slot: 1 });
        let k2 = expand(&Tree::path(4).unwrap(), 2).unwrap();
        assert_eq!(k2.num_vertices(), 4);
    }

    #[test]
    fn orderings() {
        let x = expand(&Tree::double_star(2, 2).unwrap(), 3).unwrap();
        for r in 0..6 {
            let order: Vec<usize> = x.valid_ordering(r).iter().map(|o| o.edge).collect();
            assert_eq!(order.len(), 5);
            assert!(x.is_valid_ordering(&order));
        }
        // (0,2) and (1,5) are disjoint.
        assert!(!x.is_valid_ordering(&[1, 4]));
    }

    #[test]
    fn text_roundtrip() {
        let x = expand(&Tree::double_star(1, 3).unwrap(), 4).unwrap();
        let text = write_expansion(&x);
        assert!(text.contains("#anchors: 0 1 2 3 4 5"));
        assert_eq!(parse_expansion(&text).unwrap(), x);
    }
}
