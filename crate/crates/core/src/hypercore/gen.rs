use rand::Rng as _;

use super::Hypergraph;
use crate::combinat::{derive_seed, rng};
use crate::error::{invalid, Error, Result};
use crate::Rational;

/// The loose k-uniform cycle with `len` edges on `(k - 1) * len` vertices; edge i
/// starts at vertex `i * (k - 1)` and shares its last vertex with edge i + 1.
pub fn loose_cycle(k: usize, len: usize) -> Result<Hypergraph> {
    if len < 3 {
        return invalid("a loose cycle needs at least 3 edges");
    }
    let n = (k - 1) * len;
    let edges = (0..len).map(|i| (0..k).map(|j| (i * (k - 1) + j) % n).collect()).collect();
    Hypergraph::new(n, k, edges)
}

/// Binomial random k-graph: every k-set is an edge with probability `p`.
pub fn random_hypergraph(n: usize, k: usize, p: f64, seed: u64) -> Result<Hypergraph> {
    let mut r = rng(seed);
    Hypergraph::from_predicate(n, k, |_| r.gen_bool(p.clamp(0.0, 1.0)))
}

/// Resamples binomial random k-graphs until the exact normalized minimum
/// d-degree reaches `threshold`. Returns the graph and the attempt index used.
pub fn random_with_min_degree(
    n: usize,
    k: usize,
    d: usize,
    p: f64,
    threshold: Rational,
    seed: u64,
    attempts: usize,
) -> Result<(Hypergraph, usize)> {
    for a in 0..attempts {
        let h = random_hypergraph(n, k, p, derive_seed(seed, a as u64))?;
        if h.min_d_degree(d)?.normalized_min >= threshold {
            return Ok((h, a));
        }
    }
    Err(Error::InvalidArgument(format!(
        "no sample with normalized min {d}-degree >= {threshold} in {attempts} attempts"
    )))
}
