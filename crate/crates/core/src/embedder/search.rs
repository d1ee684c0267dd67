use rand::seq::SliceRandom;

use super::PartialEmbedding;
use crate::combinat::{derive_seed, rng, Rng};
use crate::error::{Error, Result};
use crate::hypercore::Vertex;
use crate::treekit::OrderedEdge;

/// Per-target-vertex restriction: `filter(v, x)` says whether target vertex
/// `v` may land on host vertex `x`.
pub type VertexFilter<'a> = &'a dyn Fn(usize, Vertex) -> bool;

/// Limits for `extend_search`.
#[derive(Clone, Copy, Debug)]
pub struct SearchLimits {
    /// Nodes per restart.
    pub budget: u64,
    pub restarts: usize,
    pub seed: u64,
}

struct State<'a> {
    pe: &'a PartialEmbedding,
    order: &'a [OrderedEdge],
    allowed: &'a [bool],
    filter: Option<VertexFilter<'a>>,
    map: Vec<Option<Vertex>>,
    used: Vec<bool>,
    nodes: u64,
    budget: u64,
    /// Number of later edges hanging below each anchor.
    pending: Vec<usize>,
}

impl State<'_> {
    fn usable(&self, v: usize, x: Vertex) -> bool {
        !self.used[x] && self.allowed[x] && self.filter.is_none_or(|f| f(v, x))
    }

    /// A host vertex with an open edge around it, for anchors that still
    /// need to grow.
    fn has_room(&self, x: Vertex) -> bool {
        let h = self.pe.host();
        h.incident(x).iter().any(|&e| h.edge(e).iter().all(|&y| y == x || (!self.used[y] && self.allowed[y])))
    }

    fn go(&mut self, i: usize, g: &mut Rng) -> bool {
        if i == self.order.len() {
            return true;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return false;
        }
        let oe = self.order[i];
        let xt = self.pe.target();
        let p = self.map[oe.parent].expect("parent placed before child");
        let block = xt.block(oe.edge).to_vec();
        let h = self.pe.host();
        let mut cands: Vec<usize> = h
            .incident(p)
            .iter()
            .copied()
            .filter(|&e| h.edge(e).iter().all(|&y| y == p || (!self.used[y] && self.allowed[y])))
            .collect();
        cands.shuffle(g);
        for e in cands {
            let rest: Vec<Vertex> = h.edge(e).iter().copied().filter(|&y| y != p).collect();
            let mut slots: Vec<usize> = (0..rest.len()).collect();
            slots.shuffle(g);
            for c in slots {
                let x = rest[c];
                if !self.usable(oe.child, x) {
                    continue;
                }
                let others: Vec<Vertex> = rest.iter().copied().filter(|&y| y != x).collect();
                if block.iter().zip(&others).any(|(&b, &y)| !self.usable(b, y)) {
                    continue;
                }
                self.map[oe.child] = Some(x);
                for (&b, &y) in block.iter().zip(&others) {
                    self.map[b] = Some(y);
                }
                for &y in &rest {
                    self.used[y] = true;
                }
                if (self.pending[oe.child] == 0 || self.has_room(x)) && self.go(i + 1, g) {
                    return true;
                }
                for &y in &rest {
                    self.used[y] = false;
                }
                self.map[oe.child] = None;
                for &b in &block {
                    self.map[b] = None;
                }
                if self.nodes > self.budget {
                    return false;
                }
            }
        }
        false
    }
}

/// Randomized backtracking that embeds the edges of `order`, in order, on top
/// of `pe`. Each edge's parent anchor must be placed by `pe` or by an earlier
/// edge; its child and block go to host vertices that are free and allowed.
pub fn extend_search(
    pe: &PartialEmbedding,
    order: &[OrderedEdge],
    allowed: &[bool],
    filter: Option<VertexFilter<'_>>,
    limits: SearchLimits,
) -> Result<PartialEmbedding> {
    let mut pending = vec![0; pe.target().num_anchors()];
    for oe in order {
        pending[oe.parent] += 1;
    }
    for restart in 0..limits.restarts.max(1) {
        let mut st = State {
            pe,
            order,
            allowed,
            filter,
            map: pe.raw_map().to_vec(),
            used: pe.used_mask(),
            nodes: 0,
            budget: limits.budget,
            pending: pending.clone(),
        };
        let mut g = rng(derive_seed(limits.seed, restart as u64));
        if st.go(0, &mut g) {
            let mut out = pe.clone();
            for oe in order {
                let assign: Vec<(usize, Vertex)> = std::iter::once(oe.child)
                    .chain(pe.target().block(oe.edge).iter().copied())
                    .map(|v| (v, st.map[v].unwrap()))
                    .collect();
                out = out.extend_edge(oe.edge, &assign)?;
            }
            return Ok(out);
        }
    }
    Err(Error::EmbeddingNotFound(format!(
        "{} edges not embedded within {} restarts of {} nodes",
        order.len(),
        limits.restarts.max(1),
        limits.budget
    )))
}

/// The edges of `pe`'s target that are not yet embedded, in BFS order from
/// `root`, restricted to anchors accepted by `scope`.
pub fn pending_order(pe: &PartialEmbedding, root: usize, scope: &dyn Fn(usize) -> bool) -> Vec<OrderedEdge> {
    let t = pe.target().base();
    let mut seen = vec![false; t.n()];
    seen[root] = true;
    let mut q = std::collections::VecDeque::from([root]);
    let mut out = Vec::new();
    while let Some(u) = q.pop_front() {
        for &w in t.neighbours(u) {
            if !seen[w] && scope(w) {
                seen[w] = true;
                let e = t.edge_index(u, w).unwrap();
                if !pe.is_embedded(e) {
                    out.push(OrderedEdge { edge: e, parent: u, child: w });
                }
                q.push_back(w);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::extremal::verify_embedding;
    use crate::hypercore::Hypergraph;
    use crate::treekit::{expand, Tree};

    #[test]
    fn completes_path_in_complete_host() {
        let xt = Arc::new(expand(&Tree::path(5).unwrap(), 3).unwrap());
        let h = Arc::new(Hypergraph::complete(9, 3).unwrap());
        let pe = PartialEmbedding::new(xt.clone(), h.clone()).unwrap().place(0, 4).unwrap();
        let order = pending_order(&pe, 0, &|_| true);
        let lim = SearchLimits { budget: 1000, restarts: 2, seed: 1 };
        let done = extend_search(&pe, &order, &[true; 9], None, lim).unwrap();
        assert!(done.is_complete());
        assert!(verify_embedding(&h, &xt, &done.full_map().unwrap()));
    }

    #[test]
    fn respects_allowed_mask() {
        let xt = Arc::new(expand(&Tree::path(3).unwrap(), 3).unwrap());
        let h = Arc::new(Hypergraph::complete(7, 3).unwrap());
        let pe = PartialEmbedding::new(xt, h).unwrap().place(1, 0).unwrap();
        let order = pending_order(&pe, 1, &|_| true);
        let mut allowed = [true; 7];
        allowed[1] = false;
        allowed[2] = false;
        let lim = SearchLimits { budget: 1000, restarts: 1, seed: 0 };
        let done = extend_search(&pe, &order, &allowed, None, lim).unwrap();
        assert!(!done.is_used(1) && !done.is_used(2));
        allowed[3] = false;
        assert!(extend_search(&pe, &order, &allowed, None, lim).is_err());
    }
}
