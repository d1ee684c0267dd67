use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{Hypergraph, Vertex};
use crate::combinat::{derive_seed, rng};
use crate::error::{invalid, Error, Result};
use crate::Rational;

/// A vertex set R through which every vertex pair can be joined by at least
/// `floor` loose paths of length `connector_length` with interior in R.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reservoir {
    pub vertices: Vec<Vertex>,
    pub connector_length: usize,
    pub floor: usize,
    /// Number of connecting paths per pair (x, y), x < y.
    pub witness_counts: BTreeMap<(Vertex, Vertex), usize>,
    /// Attempts used before this sample verified.
    pub attempts: usize,
}

/// Connector length used for minimum d-degree conditions: 2 for vertex
/// degree, 1 otherwise.
pub fn connector_length(d: usize) -> usize {
    if d == 1 {
        2
    } else {
        1
    }
}

/// Samples R of size ⌈frac·n⌉ until every pair has at least `floor` connecting
/// paths inside R, giving up after `attempt_cap` samples.
pub fn select_reservoir(
    h: &Hypergraph,
    frac: Rational,
    d: usize,
    seed: u64,
    floor: usize,
    attempt_cap: usize,
) -> Result<Reservoir> {
    let n = h.n();
    if floor == 0 {
        return invalid("reservoir floor must be at least 1");
    }
    if d == 0 || d >= h.k() {
        return invalid(format!("d = {d} outside 1..k"));
    }
    let size_r = frac * Rational::from_integer(n as i64);
    let size = size_r.ceil().to_integer() as usize;
    if size < 2 * h.k() || size > n {
        return invalid(format!("reservoir size {size} must lie in [2k, n] = [{}, {n}]", 2 * h.k()));
    }
    let len = connector_length(d);
    let all: Vec<Vertex> = (0..n).collect();
    for attempt in 0..attempt_cap {
        let mut g = rng(derive_seed(seed, attempt as u64));
        let mut r: Vec<Vertex> = all.choose_multiple(&mut g, size).copied().collect();
        r.sort_unstable();
        let counts = connection_counts(h, &r, len);
        if counts.values().all(|&c| c >= floor) {
            let res =
                Reservoir { vertices: r, connector_length: len, floor, witness_counts: counts, attempts: attempt + 1 };
            if !verify_reservoir(h, &res) {
                return Err(Error::Invariant("reservoir failed re-verification".into()));
            }
            return Ok(res);
        }
    }
    Err(Error::ReservoirNotFound { attempts: attempt_cap })
}

/// Exact count, for every pair x < y, of loose (x, y)-paths of length `len`
/// whose interior lies in `r`.
pub fn connection_counts(h: &Hypergraph, r: &[Vertex], len: usize) -> BTreeMap<(Vertex, Vertex), usize> {
    let n = h.n();
    let mut in_r = vec![false; n];
    for &v in r {
        in_r[v] = true;
    }
    let mut counts = BTreeMap::new();
    for x in 0..n {
        for y in x + 1..n {
            counts.insert((x, y), 0usize);
        }
    }
    if len == 1 {
        for e in h.edges() {
            for (i, &x) in e.iter().enumerate() {
                for &y in &e[i + 1..] {
                    if e.iter().all(|&v| v == x || v == y || in_r[v]) {
                        *counts.get_mut(&(x, y)).unwrap() += 1;
                    }
                }
            }
        }
        return counts;
    }
    // Edges through x whose other vertices all lie in R.
    let hang: Vec<Vec<&[Vertex]>> = (0..n)
        .map(|x| h.incident(x).iter().map(|&e| h.edge(e)).filter(|e| e.iter().all(|&v| v == x || in_r[v])).collect())
        .collect();
    for x in 0..n {
        for y in x + 1..n {
            let mut c = 0;
            for e in &hang[x] {
                if e.contains(&y) {
                    continue;
                }
                for f in &hang[y] {
                    if f.contains(&x) {
                        continue;
                    }
                    if e.iter().filter(|v| f.contains(v)).count() == 1 {
                        c += 1;
                    }
                }
            }
            counts.insert((x, y), c);
        }
    }
    counts
}

/// Recomputes all pair counts from scratch and checks them against the floor
/// and the recorded witnesses.
pub fn verify_reservoir(h: &Hypergraph, res: &Reservoir) -> bool {
    let fresh = connection_counts(h, &res.vertices, res.connector_length);
    fresh == res.witness_counts && fresh.values().all(|&c| c >= res.floor)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_always_succeeds() {
        let h = Hypergraph::complete(20, 3).unwrap();
        let r = select_reservoir(&h, Rational::new(3, 10), 2, 0, 1, 50).unwrap();
        assert_eq!(r.vertices.len(), 6);
        assert_eq!(r.attempts, 1);
        assert_eq!(r.connector_length, 1);
    }

    #[test]
    fn edgeless_fails() {
        let h = Hypergraph::empty(20, 3).unwrap();
        let err = select_reservoir(&h, Rational::new(3, 10), 2, 0, 1, 5).unwrap_err();
        assert!(matches!(err, Error::ReservoirNotFound { attempts: 5 }));
    }

    #[test]
    fn too_small_reservoir_rejected() {
        let h = Hypergraph::complete(20, 3).unwrap();
        assert!(select_reservoir(&h, Rational::new(1, 10), 2, 0, 1, 5).is_err());
    }
}
