use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::combinat::{rng, Rng};
use crate::error::{invalid, Result};
use crate::hypercore::Hypergraph;
use crate::treekit::{ExpansionTree, OrderedEdge};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleOutcome {
    /// `map[v]` is the host image of expansion-tree vertex v.
    Embedding(Vec<usize>),
    /// The search space was exhausted.
    None,
    /// The node budget ran out first.
    Timeout,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub outcome: OracleOutcome,
    pub nodes: u64,
}

/// Parameters of a backtracking search for a copy of `xt` in `host`.
pub struct SearchSpec<'a> {
    pub host: &'a Hypergraph,
    pub xt: &'a ExpansionTree,
    /// Tree vertex placed first; edges follow in BFS order from it.
    pub root: usize,
    /// Candidate images of the root; `None` means every allowed vertex.
    pub root_images: Option<Vec<usize>>,
    /// Host vertices the embedding may use; `None` means all.
    pub allowed: Option<&'a [bool]>,
    pub budget: u64,
    /// Shuffle candidate orders with this seed; `None` keeps them ascending.
    pub seed: Option<u64>,
}

struct Search<'a> {
    host: &'a Hypergraph,
    order: Vec<OrderedEdge>,
    blocks: Vec<Vec<usize>>,
    map: Vec<usize>,
    used: Vec<bool>,
    budget: u64,
    nodes: u64,
    rng: Option<Rng>,
}

impl Search<'_> {
    fn run(&mut self, i: usize) -> Option<bool> {
        if i == self.order.len() {
            return Some(true);
        }
        let o = self.order[i];
        let hp = self.map[o.parent];
        let mut cands: Vec<usize> = self.host.incident(hp).to_vec();
        if let Some(g) = self.rng.as_mut() {
            cands.shuffle(g);
        }
        let k = self.host.k();
        for ei in cands {
            let e = self.host.edge(ei);
            if e.iter().any(|&v| v != hp && self.used[v]) {
                continue;
            }
            let others: Vec<usize> = e.iter().copied().filter(|&v| v != hp).collect();
            let mut slots: Vec<usize> = (0..k - 1).collect();
            if let Some(g) = self.rng.as_mut() {
                slots.shuffle(g);
            }
            for ci in slots {
                self.nodes += 1;
                if self.nodes > self.budget {
                    return None;
                }
                let child = others[ci];
                self.map[o.child] = child;
                // Expansion vertices of one block are interchangeable: assign
                // the remaining images in ascending order only.
                let rest = others.iter().copied().filter(|&v| v != child);
                for (&b, v) in self.blocks[o.edge].iter().zip(rest) {
                    self.map[b] = v;
                }
                for &v in &others {
                    self.used[v] = true;
                }
                match self.run(i + 1) {
                    Some(true) => return Some(true),
                    None => return None,
                    Some(false) => {}
                }
                for &v in &others {
                    self.used[v] = false;
                }
            }
        }
        Some(false)
    }
}

/// Backtracking search for an embedding of `spec.xt` into `spec.host`. Every
/// returned embedding is re-verified.
pub fn search_embedding(spec: &SearchSpec) -> Result<OracleReport> {
    let host = spec.host;
    let xt = spec.xt;
    if xt.k() != host.k() {
        return invalid("tree expansion and host differ in uniformity");
    }
    let allowed = |v: usize| spec.allowed.is_none_or(|a| a[v]);
    let roots: Vec<usize> = match &spec.root_images {
        Some(r) => r.iter().copied().filter(|&v| allowed(v)).collect(),
        None => (0..host.n()).filter(|&v| allowed(v)).collect(),
    };
    let mut s = Search {
        host,
        order: xt.valid_ordering(spec.root),
        blocks: (0..xt.base().n() - 1).map(|i| xt.block(i).to_vec()).collect(),
        map: vec![usize::MAX; xt.num_vertices()],
        used: (0..host.n()).map(|v| !allowed(v)).collect(),
        budget: spec.budget,
        nodes: 0,
        rng: spec.seed.map(rng),
    };
    let mut roots = roots;
    if let Some(g) = s.rng.as_mut() {
        roots.shuffle(g);
    }
    for r in roots {
        s.nodes += 1;
        if s.nodes > s.budget {
            return Ok(OracleReport { outcome: OracleOutcome::Timeout, nodes: s.nodes });
        }
        s.map[spec.root] = r;
        s.used[r] = true;
        match s.run(0) {
            Some(true) => {
                let map = s.map.clone();
                if !verify_embedding(host, xt, &map) {
                    return Err(crate::Error::Invariant("oracle produced an invalid embedding".into()));
                }
                return Ok(OracleReport { outcome: OracleOutcome::Embedding(map), nodes: s.nodes });
            }
            None => return Ok(OracleReport { outcome: OracleOutcome::Timeout, nodes: s.nodes }),
            Some(false) => s.used[r] = false,
        }
    }
    Ok(OracleReport { outcome: OracleOutcome::None, nodes: s.nodes })
}

/// Exact oracle: decides whether `xt` embeds into `h` within `node_budget`
/// search nodes. The search starts from a maximum-degree anchor.
pub fn brute_force_embed(h: &Hypergraph, xt: &ExpansionTree, node_budget: u64) -> Result<OracleReport> {
    if xt.num_vertices() > h.n() {
        return invalid(format!("tree expansion has {} vertices, host only {}", xt.num_vertices(), h.n()));
    }
    let t = xt.base();
    let root = (0..t.n()).max_by_key(|&v| (t.degree(v), std::cmp::Reverse(v))).unwrap();
    search_embedding(&SearchSpec {
        host: h,
        xt,
        root,
        root_images: None,
        allowed: None,
        budget: node_budget,
        seed: None,
    })
}

/// Injective and edge-preserving.
pub fn verify_embedding(h: &Hypergraph, xt: &ExpansionTree, map: &[usize]) -> bool {
    if map.len() != xt.num_vertices() {
        return false;
    }
    let mut seen = vec![false; h.n()];
    for &v in map {
        if v >= h.n() || seen[v] {
            return false;
        }
        seen[v] = true;
    }
    xt.hyperedges().iter().all(|e| {
        let img: Vec<usize> = e.iter().map(|&v| map[v]).collect();
        h.contains_edge(&img)
    })
}
