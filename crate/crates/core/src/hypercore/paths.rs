use std::collections::BTreeSet;

use rand::seq::SliceRandom;

use super::{Edge, Hypergraph, Vertex};
use crate::combinat::{derive_seed, rng, Rng};

/// Restarts used by the randomized search for paths longer than two edges.
const LONG_PATH_RESTARTS: u64 = 64;

/// A loose path: the k-expansion of the graph path `anchors[0] .. anchors[len]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LoosePath {
    pub anchors: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

impl LoosePath {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Vertices other than the two endpoints.
    pub fn interior(&self) -> Vec<Vertex> {
        let ends = [self.anchors[0], *self.anchors.last().unwrap()];
        let set: BTreeSet<Vertex> = self.edges.iter().flatten().copied().filter(|v| !ends.contains(v)).collect();
        set.into_iter().collect()
    }
}

/// Loose (x1, x2)-paths with `len` edges whose interior avoids `forbidden`.
///
/// Exhaustive for `len` 1 and 2; for longer paths, the distinct results of a
/// fixed number of randomized greedy restarts.
pub fn loose_paths(h: &Hypergraph, x1: Vertex, x2: Vertex, len: usize, forbidden: &[Vertex]) -> Vec<LoosePath> {
    if x1 == x2 || len == 0 || x1 >= h.n() || x2 >= h.n() {
        return Vec::new();
    }
    let ok = |v: Vertex| !forbidden.contains(&v);
    match len {
        1 => one_edge_paths(h, x1, x2, &ok),
        2 => two_edge_paths(h, x1, x2, &[], &ok),
        _ => {
            let seed = derive_seed((x1 * h.n() + x2) as u64, len as u64);
            let mut found = BTreeSet::new();
            for r in 0..LONG_PATH_RESTARTS {
                let mut g = rng(derive_seed(seed, r));
                if let Some(p) = find_loose_path(h, x1, x2, len, &ok, &mut g) {
                    found.insert(p);
                }
            }
            found.into_iter().collect()
        }
    }
}

fn one_edge_paths(h: &Hypergraph, x1: Vertex, x2: Vertex, ok: &dyn Fn(Vertex) -> bool) -> Vec<LoosePath> {
    h.incident(x1)
        .iter()
        .map(|&e| h.edge(e))
        .filter(|e| e.contains(&x2) && e.iter().all(|&v| v == x1 || v == x2 || ok(v)))
        .map(|e| LoosePath { anchors: vec![x1, x2], edges: vec![e.to_vec()] })
        .collect()
}

/// All two-edge loose paths from `x1` to `x2` whose interior avoids `used` and
/// satisfies `ok`.
fn two_edge_paths(
    h: &Hypergraph,
    x1: Vertex,
    x2: Vertex,
    used: &[Vertex],
    ok: &dyn Fn(Vertex) -> bool,
) -> Vec<LoosePath> {
    let free = |v: Vertex| ok(v) && !used.contains(&v);
    let mut out = Vec::new();
    for &ei in h.incident(x1) {
        let e = h.edge(ei);
        if e.contains(&x2) || !e.iter().all(|&v| v == x1 || free(v)) {
            continue;
        }
        for &p in e.iter().filter(|&&p| p != x1) {
            for &fi in h.incident(x2) {
                let f = h.edge(fi);
                if !f.contains(&p) || f.contains(&x1) {
                    continue;
                }
                if f.iter().any(|&v| v != p && v != x2 && (e.contains(&v) || !free(v))) {
                    continue;
                }
                out.push(LoosePath { anchors: vec![x1, p, x2], edges: vec![e.to_vec(), f.to_vec()] });
            }
        }
    }
    out
}

/// One random loose (x1, x2)-path of `len` edges with interior inside `ok`.
/// Grows a random loose path for `len - 2` edges and closes it with an exact
/// two-edge connection, restarting a few times on dead ends.
pub fn find_loose_path(
    h: &Hypergraph,
    x1: Vertex,
    x2: Vertex,
    len: usize,
    ok: &dyn Fn(Vertex) -> bool,
    rng: &mut Rng,
) -> Option<LoosePath> {
    if x1 == x2 || len == 0 {
        return None;
    }
    if len == 1 {
        return one_edge_paths(h, x1, x2, ok).choose(rng).cloned();
    }
    for _ in 0..8 {
        let mut anchors = vec![x1];
        let mut edges: Vec<Edge> = Vec::new();
        let mut used = vec![x1, x2];
        let mut stuck = false;
        for _ in 0..len - 2 {
            let cur = *anchors.last().unwrap();
            let options: Vec<&[Vertex]> = h
                .incident(cur)
                .iter()
                .map(|&e| h.edge(e))
                .filter(|e| e.iter().all(|&v| v == cur || (ok(v) && !used.contains(&v))))
                .collect();
            let Some(e) = options.choose(rng) else {
                stuck = true;
                break;
            };
            let next = *e.iter().filter(|&&v| v != cur).collect::<Vec<_>>().choose(rng).unwrap();
            used.extend(e.iter().filter(|&&v| v != cur));
            edges.push(e.to_vec());
            anchors.push(*next);
        }
        if stuck {
            continue;
        }
        let cur = *anchors.last().unwrap();
        let blocked: Vec<Vertex> = used.iter().copied().filter(|&v| v != x2 && v != cur).collect();
        let tails = two_edge_paths(h, cur, x2, &blocked, ok);
        if let Some(t) = tails.choose(rng) {
            anchors.extend_from_slice(&t.anchors[1..]);
            edges.extend(t.edges.iter().cloned());
            return Some(LoosePath { anchors, edges });
        }
    }
    None
}

/// Checks that `p` is a loose (x1, x2)-path of edges of `h`.
pub fn verify_loose_path(h: &Hypergraph, p: &LoosePath, x1: Vertex, x2: Vertex) -> bool {
    let l = p.edges.len();
    if l == 0 || p.anchors.len() != l + 1 || p.anchors[0] != x1 || p.anchors[l] != x2 {
        return false;
    }
    for (i, e) in p.edges.iter().enumerate() {
        if !h.contains_edge(e) || !e.contains(&p.anchors[i]) || !e.contains(&p.anchors[i + 1]) {
            return false;
        }
        for (j, f) in p.edges.iter().enumerate().skip(i + 1) {
            let common: Vec<Vertex> = e.iter().copied().filter(|v| f.contains(v)).collect();
            let expected: Vec<Vertex> = if j == i + 1 { vec![p.anchors[i + 1]] } else { vec![] };
            if common != expected {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edgeless_has_no_paths() {
        let h = Hypergraph::empty(6, 3).unwrap();
        assert!(loose_paths(&h, 0, 1, 1, &[]).is_empty());
        assert!(loose_paths(&h, 0, 1, 2, &[]).is_empty());
        assert!(loose_paths(&h, 0, 1, 3, &[]).is_empty());
    }

    #[test]
    fn unique_two_edge_path() {
        // x1 = 0, u = 1, v = 2, w = 3, x2 = 4
        let h = Hypergraph::new(5, 3, vec![vec![0, 1, 2], vec![2, 3, 4]]).unwrap();
        let ps = loose_paths(&h, 0, 4, 2, &[]);
        assert_eq!(ps.len(), 1);
        assert_eq!(ps[0].anchors, vec![0, 2, 4]);
        assert!(verify_loose_path(&h, &ps[0], 0, 4));
        assert!(loose_paths(&h, 0, 4, 2, &[3]).is_empty());
    }

    #[test]
    fn long_paths_are_valid() {
        let h = Hypergraph::complete(12, 3).unwrap();
        let ps = loose_paths(&h, 0, 1, 4, &[2, 3]);
        assert!(!ps.is_empty());
        for p in &ps {
            assert_eq!(p.len(), 4);
            assert!(verify_loose_path(&h, p, 0, 1));
            assert!(!p.interior().iter().any(|v| *v == 2 || *v == 3));
        }
    }
}
