use std::collections::VecDeque;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::diamonds::{diamonds_between, Diamond, DiamondCounts};
use crate::combinat::Rng;
use crate::hypercore::{Edge, Hypergraph, Vertex};

/// A (u, v, ℓ)-diamond-chain: waypoints x_0 = u, .., x_ℓ = v and one
/// (x_{i-1}, x_i)-diamond per step.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DiamondChain {
    pub waypoints: Vec<Vertex>,
    /// `shared[i]` is the common (k-1)-set of the i-th diamond.
    pub shared: Vec<Vec<Vertex>>,
}

impl DiamondChain {
    pub fn len(&self) -> usize {
        self.shared.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shared.is_empty()
    }

    pub fn start(&self) -> Vertex {
        self.waypoints[0]
    }

    pub fn end(&self) -> Vertex {
        *self.waypoints.last().unwrap()
    }

    pub fn diamonds(&self) -> Vec<Diamond> {
        self.shared
            .iter()
            .enumerate()
            .map(|(i, s)| Diamond { shared: s.clone(), tips: (self.waypoints[i], self.waypoints[i + 1]) })
            .collect()
    }

    /// The half S_u: edges e_i = shared_i ∪ {x_{i-1}}. It misses v only.
    pub fn half_u(&self) -> Vec<Edge> {
        self.diamonds().iter().map(|d| d.edge_at(d.tips.0)).collect()
    }

    /// The half S_v: edges e'_i = shared_i ∪ {x_i}. It misses u only.
    pub fn half_v(&self) -> Vec<Edge> {
        self.diamonds().iter().map(|d| d.edge_at(d.tips.1)).collect()
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        let mut v: Vec<Vertex> = self.waypoints.iter().chain(self.shared.iter().flatten()).copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Every diamond is present and valid, waypoints are distinct, and the
    /// diamonds meet only consecutively, in their common waypoint.
    pub fn verify(&self, h: &Hypergraph) -> bool {
        let l = self.len();
        if l == 0 || self.waypoints.len() != l + 1 {
            return false;
        }
        let mut w = self.waypoints.clone();
        w.sort_unstable();
        if w.windows(2).any(|p| p[0] == p[1]) {
            return false;
        }
        let ds = self.diamonds();
        if !ds.iter().all(|d| d.verify(h)) {
            return false;
        }
        let sets: Vec<Vec<Vertex>> = ds.iter().map(Diamond::vertices).collect();
        for i in 0..l {
            for j in i + 1..l {
                let common: Vec<Vertex> = sets[i].iter().copied().filter(|x| sets[j].contains(x)).collect();
                let expected = if j == i + 1 { vec![self.waypoints[j]] } else { vec![] };
                if common != expected {
                    return false;
                }
            }
        }
        true
    }
}

/// Reusable chain search over one host: keeps the graph of pairs joined by at
/// least one diamond for distance pruning.
pub struct ChainFinder<'a> {
    h: &'a Hypergraph,
    pairs: Vec<Vec<Vertex>>,
}

struct Dfs<'b> {
    used: Vec<bool>,
    dist: Vec<usize>,
    target: Vertex,
    waypoints: Vec<Vertex>,
    shared: Vec<Vec<Vertex>>,
    found: Vec<DiamondChain>,
    limit: usize,
    nodes: u64,
    budget: u64,
    rng: Option<&'b mut Rng>,
}

impl<'a> ChainFinder<'a> {
    pub fn new(h: &'a Hypergraph) -> Self {
        let counts = DiamondCounts::new(h);
        let pairs = (0..h.n()).map(|x| (0..h.n()).filter(|&y| counts.get(x, y) > 0).collect()).collect();
        Self { h, pairs }
    }

    /// BFS distances to `v` in the diamond-pair graph, avoiding `blocked`.
    fn distances(&self, v: Vertex, blocked: &[bool]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.h.n()];
        dist[v] = 0;
        let mut q = VecDeque::from([v]);
        while let Some(x) = q.pop_front() {
            for &y in &self.pairs[x] {
                if dist[y] == usize::MAX && !blocked[y] {
                    dist[y] = dist[x] + 1;
                    q.push_back(y);
                }
            }
        }
        dist
    }

    fn step(&self, s: &mut Dfs, remaining: usize) -> bool {
        let x = *s.waypoints.last().unwrap();
        if remaining == 1 {
            let used = &s.used;
            let mut ds = diamonds_between(self.h, x, s.target, &|z| used[z]);
            if let Some(r) = s.rng.as_deref_mut() {
                ds.shuffle(r);
            }
            for d in ds {
                s.nodes += 1;
                if s.nodes > s.budget {
                    return true;
                }
                let mut waypoints = s.waypoints.clone();
                waypoints.push(s.target);
                let mut shared = s.shared.clone();
                shared.push(d.shared);
                s.found.push(DiamondChain { waypoints, shared });
                if s.found.len() >= s.limit {
                    return true;
                }
            }
            return false;
        }
        let mut next: Vec<Vertex> =
            self.pairs[x].iter().copied().filter(|&y| !s.used[y] && y != s.target && s.dist[y] < remaining).collect();
        if let Some(r) = s.rng.as_deref_mut() {
            next.shuffle(r);
        }
        for y in next {
            let used = &s.used;
            let mut ds = diamonds_between(self.h, x, y, &|z| used[z] || z == y);
            if let Some(r) = s.rng.as_deref_mut() {
                ds.shuffle(r);
            }
            for d in ds {
                s.nodes += 1;
                if s.nodes > s.budget {
                    return true;
                }
                if d.shared.iter().any(|&z| s.used[z]) {
                    continue;
                }
                for &z in &d.shared {
                    s.used[z] = true;
                }
                s.used[y] = true;
                s.waypoints.push(y);
                s.shared.push(d.shared.clone());
                let stop = self.step(s, remaining - 1);
                s.shared.pop();
                s.waypoints.pop();
                s.used[y] = false;
                for &z in &d.shared {
                    s.used[z] = false;
                }
                if stop {
                    return true;
                }
            }
        }
        false
    }

    #[allow(clippy::too_many_arguments)]
    fn run(
        &self,
        u: Vertex,
        v: Vertex,
        max_len: usize,
        blocked: &[bool],
        limit: usize,
        budget: u64,
        rng: Option<&mut Rng>,
    ) -> Vec<DiamondChain> {
        if u == v || limit == 0 {
            return Vec::new();
        }
        let mut used = blocked.to_vec();
        used[u] = true;
        used[v] = true;
        let mut s = Dfs {
            dist: self.distances(v, &used),
            used,
            target: v,
            waypoints: vec![u],
            shared: Vec::new(),
            found: Vec::new(),
            limit,
            nodes: 0,
            budget,
            rng,
        };
        s.dist[u] = usize::MAX;
        for l in 1..=max_len {
            if self.step(&mut s, l) {
                break;
            }
        }
        s.found
    }

    /// Chains from `u` to `v`, shortest length first, ascending order within
    /// a length, until `limit` chains or `budget` search nodes.
    pub fn find(&self, u: Vertex, v: Vertex, max_len: usize, limit: usize, budget: u64) -> Vec<DiamondChain> {
        self.run(u, v, max_len, &vec![false; self.h.n()], limit, budget, None)
    }

    /// One random shortest-available chain whose vertices, apart from `u` and
    /// `v`, avoid `blocked`.
    pub fn random(
        &self,
        u: Vertex,
        v: Vertex,
        max_len: usize,
        blocked: &[bool],
        rng: &mut Rng,
        budget: u64,
    ) -> Option<DiamondChain> {
        self.run(u, v, max_len, blocked, 1, budget, Some(rng)).pop()
    }
}

/// Depth-first search over waypoint sequences with per-step diamond
/// enumeration; shortest length first, at most `limit` chains.
pub fn find_diamond_chains(
    h: &Hypergraph,
    u: Vertex,
    v: Vertex,
    max_len: usize,
    limit: usize,
    budget: u64,
) -> Vec<DiamondChain> {
    ChainFinder::new(h).find(u, v, max_len, limit, budget)
}
