use rand::Rng as _;

use super::{expand, ExpansionTree, Tree};
use crate::combinat::{derive_seed, rng};
use crate::error::{invalid, Error, Result};
use crate::hypercore::{blow_up, loose_cycle, Blowup};

/// Restarts of the random walk before giving up.
const WALK_RESTARTS: u64 = 500;

/// An embedding of a tree expansion into an m-blow-up of a loose cycle.
#[derive(Clone, Debug)]
pub struct CycleBlowupEmbedding {
    pub expansion: ExpansionTree,
    pub blowup: Blowup,
    pub cycle_len: usize,
    pub cluster_size: usize,
    /// Expansion-tree vertex -> blow-up vertex.
    pub map: Vec<usize>,
    /// Tree edge -> index of the cycle edge whose blow-up receives it.
    pub base_edge_of: Vec<usize>,
}

/// Cycle edges through base vertex `x` of the loose cycle with `len` edges.
fn cycle_edges_at(x: usize, k: usize, len: usize) -> Vec<usize> {
    let i = x / (k - 1);
    if x.is_multiple_of(k - 1) {
        vec![(i + len - 1) % len, i]
    } else {
        vec![i]
    }
}

/// Embeds `t^(k)` into the `cluster_size`-blow-up of the loose cycle with
/// `cycle_len` edges by a random walk along the cycle: each tree edge, taken
/// in BFS order, moves from its parent's cluster into a cycle edge through
/// that cluster with spare capacity. Restarts on dead ends.
pub fn embed_into_cycle_blowup(
    t: &Tree,
    k: usize,
    cycle_len: usize,
    cluster_size: usize,
    seed: u64,
) -> Result<CycleBlowupEmbedding> {
    if cycle_len < 3 || cycle_len.is_multiple_of(2) {
        return invalid(format!("cycle length {cycle_len} must be odd and at least 3"));
    }
    if cluster_size == 0 {
        return invalid("cluster size must be positive");
    }
    let xt = expand(t, k)?;
    let base_n = (k - 1) * cycle_len;
    if base_n * cluster_size < xt.num_vertices() {
        return invalid(format!(
            "budget (k-1)·ℓ·m = {} below |V(T^(k))| = {}",
            base_n * cluster_size,
            xt.num_vertices()
        ));
    }
    let cycle = loose_cycle(k, cycle_len)?;
    let blowup = blow_up(&cycle, &vec![cluster_size; base_n])?;
    let cycle_edges: Vec<Vec<usize>> = cycle.edges().to_vec();
    // Edge index i in the sorted edge list does not match construction order,
    // so look edges up by content.
    let edge_id = |members: &[usize]| cycle_edges.iter().position(|e| e.as_slice() == members).unwrap();
    let construction: Vec<Vec<usize>> = (0..cycle_len)
        .map(|i| {
            let mut e: Vec<usize> = (0..k).map(|j| (i * (k - 1) + j) % base_n).collect();
            e.sort_unstable();
            e
        })
        .collect();

    for attempt in 0..WALK_RESTARTS {
        let mut g = rng(derive_seed(seed, attempt));
        let mut used = vec![0usize; base_n];
        let mut usage = vec![0usize; cycle_len];
        let mut base_of = vec![usize::MAX; xt.num_vertices()];
        let mut base_edge_of = vec![usize::MAX; t.n() - 1];
        let root = g.gen_range(0..t.n());
        let start = g.gen_range(0..base_n);
        base_of[root] = start;
        used[start] += 1;
        let mut ok = true;
        for o in xt.valid_ordering(root) {
            let bp = base_of[o.parent];
            let mut options: Vec<(usize, usize, usize)> = Vec::new();
            for ci in cycle_edges_at(bp, k, cycle_len) {
                if usage[ci] >= cluster_size {
                    continue;
                }
                let others: Vec<usize> = construction[ci].iter().copied().filter(|&x| x != bp).collect();
                if others.iter().any(|&x| used[x] >= cluster_size) {
                    continue;
                }
                for &x in &others {
                    options.push((ci, x, cluster_size - used[x]));
                }
            }
            let total: usize = options.iter().map(|o| o.2).sum();
            if total == 0 {
                ok = false;
                break;
            }
            let mut pick = g.gen_range(0..total);
            let &(ci, x, _) = options
                .iter()
                .find(|o| {
                    if pick < o.2 {
                        true
                    } else {
                        pick -= o.2;
                        false
                    }
                })
                .unwrap();
            usage[ci] += 1;
            base_edge_of[o.edge] = ci;
            base_of[o.child] = x;
            used[x] += 1;
            let rest: Vec<usize> = construction[ci].iter().copied().filter(|&y| y != bp && y != x).collect();
            for (&v, &y) in xt.block(o.edge).iter().zip(&rest) {
                base_of[v] = y;
                used[y] += 1;
            }
        }
        if !ok {
            continue;
        }
        let mut next = vec![0usize; base_n];
        let map: Vec<usize> = base_of
            .iter()
            .map(|&x| {
                let v = blowup.clusters[x][next[x]];
                next[x] += 1;
                v
            })
            .collect();
        let base_edge_of = base_edge_of.iter().map(|&ci| edge_id(&construction[ci])).collect();
        let emb = CycleBlowupEmbedding { expansion: xt, blowup, cycle_len, cluster_size, map, base_edge_of };
        verify_cycle_embedding(&emb)?;
        return Ok(emb);
    }
    Err(Error::EmbeddingNotFound(format!("random walk failed after {WALK_RESTARTS} restarts")))
}

/// Edge-by-edge check against the blow-up plus the occupancy bounds.
pub fn verify_cycle_embedding(emb: &CycleBlowupEmbedding) -> Result<()> {
    let m = emb.cluster_size;
    let host = &emb.blowup.result;
    let mut seen = vec![false; host.n()];
    for &v in &emb.map {
        if v >= host.n() || seen[v] {
            return Err(Error::Invariant(format!("map not injective at {v}")));
        }
        seen[v] = true;
    }
    let mut per_edge = vec![0usize; emb.blowup.base.num_edges()];
    for (i, e) in emb.expansion.hyperedges().iter().enumerate() {
        let img: Vec<usize> = e.iter().map(|&v| emb.map[v]).collect();
        if !host.contains_edge(&img) {
            return Err(Error::Invariant(format!("tree edge {i} not mapped to an edge")));
        }
        let mut owners: Vec<usize> = img.iter().map(|&v| emb.blowup.owner[v]).collect();
        owners.sort_unstable();
        let ci = emb.base_edge_of[i];
        if emb.blowup.base.edge(ci) != owners.as_slice() {
            return Err(Error::Invariant(format!("tree edge {i} not over cycle edge {ci}")));
        }
        per_edge[ci] += 1;
    }
    let mut occupancy = vec![0usize; emb.blowup.base.n()];
    for &v in &emb.map {
        occupancy[emb.blowup.owner[v]] += 1;
    }
    if occupancy.iter().any(|&c| c > m) || per_edge.iter().any(|&c| c > m) {
        return Err(Error::Invariant("occupancy bound exceeded".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_edge() {
        let emb = embed_into_cycle_blowup(&Tree::path(2).unwrap(), 3, 3, 1, 0).unwrap();
        assert_eq!(emb.map.len(), 3);
    }

    #[test]
    fn path_of_seven() {
        let emb = embed_into_cycle_blowup(&Tree::path(7).unwrap(), 3, 3, 4, 0).unwrap();
        verify_cycle_embedding(&emb).unwrap();
    }

    #[test]
    fn infeasible_budget() {
        assert!(embed_into_cycle_blowup(&Tree::path(7).unwrap(), 3, 3, 1, 0).is_err());
        assert!(embed_into_cycle_blowup(&Tree::path(3).unwrap(), 3, 4, 2, 0).is_err());
    }
}
