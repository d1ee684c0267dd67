use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::search::{extend_search, pending_order, SearchLimits};
use super::PartialEmbedding;
use crate::combinat::{rng, Rng};
use crate::error::{Error, Result};
use crate::hypercore::{find_loose_path, Hypergraph, Vertex};
use crate::treekit::{partition_tree, RootedTree};

/// Greedy cover of `pool` by vertex-disjoint loose cycles of length `len`:
/// an edge e at x, a vertex y of e, and a loose (y, x)-path of length len - 1
/// avoiding the rest of e.
pub fn loose_cycle_tiling(h: &Hypergraph, pool: &[bool], len: usize, g: &mut Rng) -> Vec<Vec<Vertex>> {
    let mut free = pool.to_vec();
    let mut tiles = Vec::new();
    if len < 2 {
        return tiles;
    }
    let mut order: Vec<Vertex> = (0..h.n()).filter(|&v| pool[v]).collect();
    order.shuffle(g);
    for x in order {
        if !free[x] {
            continue;
        }
        let mut edges: Vec<usize> =
            h.incident(x).iter().copied().filter(|&e| h.edge(e).iter().all(|&v| free[v])).collect();
        edges.shuffle(g);
        for e in edges.into_iter().take(8) {
            let e = h.edge(e).to_vec();
            let y = **e.iter().filter(|&&v| v != x).collect::<Vec<_>>().choose(g).unwrap();
            let ok = |v: Vertex| free[v] && !e.contains(&v);
            if let Some(p) = find_loose_path(h, y, x, len - 1, &ok, g) {
                let mut tile: Vec<Vertex> = e.iter().copied().chain(p.edges.iter().flatten().copied()).collect();
                tile.sort_unstable();
                tile.dedup();
                for &v in &tile {
                    free[v] = false;
                }
                tiles.push(tile);
                break;
            }
        }
    }
    tiles
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlmostReport {
    pub tiles: usize,
    pub tiled_vertices: usize,
    pub parts: usize,
    /// Parts that needed vertices outside their tile group, and how far the
    /// search had to widen ("pool" or "reservoir").
    pub fallbacks: Vec<(usize, String)>,
    pub connections_via_reservoir: usize,
    /// Random-partition mode: samples drawn, and whether the last one met
    /// the per-group degree bound.
    pub partition_samples: usize,
    pub partition_bound_met: Option<bool>,
}

/// How parts get their host vertex groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum GroupMode {
    /// Consecutive loose-cycle tiles.
    Tiles,
    /// A random partition of the free pool, resampled until every vertex of
    /// every group keeps at least half the host's normalized vertex degree
    /// inside its group, or the sample cap is reached.
    Random { samples: usize },
}

pub(crate) struct AlmostSpec<'a> {
    /// Placed anchor the remainder grows from.
    pub root: usize,
    /// Anchors to embed, including `root`.
    pub scope: &'a [bool],
    pub reservoir: &'a [bool],
    pub cycle_len: usize,
    pub m_prime: usize,
    pub budget: u64,
    pub groups: GroupMode,
}

/// Embeds the scoped remainder of the tree: tile the free non-reservoir
/// vertices by loose cycles, split the remainder into parts with
/// `partition_tree`, hand each part a group of consecutive tiles, join its
/// root to the part above by an edge whose other vertices come from the
/// reservoir, and embed the part inside its group.
pub(crate) fn almost_spanning(
    pe: &PartialEmbedding,
    spec: &AlmostSpec,
    seed: u64,
) -> Result<(PartialEmbedding, AlmostReport)> {
    let host = pe.host();
    let k = host.k();
    let t = pe.target().base();
    let mut g = rng(seed);
    let pool: Vec<bool> = (0..host.n()).map(|x| !pe.is_used(x) && !spec.reservoir[x]).collect();
    let tiles = loose_cycle_tiling(host, &pool, spec.cycle_len, &mut g);
    let mut report = AlmostReport {
        tiles: tiles.len(),
        tiled_vertices: tiles.iter().map(Vec::len).sum(),
        parts: 0,
        fallbacks: Vec::new(),
        connections_via_reservoir: 0,
        partition_samples: 0,
        partition_bound_met: None,
    };

    // the remainder as its own tree, index 0 = root
    let mut verts = vec![spec.root];
    verts.extend((0..t.n()).filter(|&v| spec.scope[v] && v != spec.root));
    let sub = t.induced(&verts)?;
    if sub.n() == 1 {
        return Ok((pe.clone(), report));
    }
    let rt = RootedTree::new(sub.clone(), 0)?;
    let m_prime = spec.m_prime.clamp(1, sub.n());
    let parts = partition_tree(&rt, m_prime, sub.max_degree())?;
    let mut parts = parts.parts;
    parts.sort_by_key(|p| rt.depth[p.root]);
    report.parts = parts.len();

    let needs: Vec<usize> = parts.iter().map(|p| p.vertices.len() + (k - 2) * (p.vertices.len() - 1) + k).collect();
    let queue = match spec.groups {
        GroupMode::Tiles => {
            // tiles in order, leftover pool vertices at the end
            let mut queue: Vec<Vertex> = tiles.iter().flatten().copied().collect();
            let mut tiled = vec![false; host.n()];
            for &v in &queue {
                tiled[v] = true;
            }
            queue.extend((0..host.n()).filter(|&v| pool[v] && !tiled[v]));
            queue
        }
        GroupMode::Random { samples } => {
            let (queue, used, met) = random_groups(host, &pool, &needs, samples, &mut g);
            report.partition_samples = used;
            report.partition_bound_met = Some(met);
            queue
        }
    };
    let mut next_tile = 0;

    let mut cur = pe.clone();
    for (pi, part) in parts.iter().enumerate() {
        let root = verts[part.root];
        let mut in_part = vec![false; t.n()];
        for &v in &part.vertices {
            in_part[verts[v]] = true;
        }
        let need = needs[pi];
        let mut group = vec![false; host.n()];
        let mut taken = 0;
        while taken < need + need / 2 && next_tile < queue.len() {
            if !cur.is_used(queue[next_tile]) {
                group[queue[next_tile]] = true;
                taken += 1;
            }
            next_tile += 1;
        }
        if cur.get(root).is_none() {
            let p = verts[rt.parent[part.root].unwrap()];
            let pimg = cur.get(p).ok_or_else(|| Error::Invariant("part above is not embedded".into()))?;
            let e = t.edge_index(p, root).unwrap();
            let block = pe.target().block(e).to_vec();
            let mut options: Vec<usize> = host.incident(pimg).to_vec();
            options.shuffle(&mut g);
            // x in the group, the rest in the reservoir; then x outside the
            // reservoir; otherwise the part search below places the edge
            let mut placed = None;
            for widen in 0..2 {
                for &ei in &options {
                    let edge = host.edge(ei);
                    let rest: Vec<Vertex> = edge.iter().copied().filter(|&v| v != pimg).collect();
                    if rest.iter().any(|&v| cur.is_used(v)) {
                        continue;
                    }
                    for &x in &rest {
                        let others: Vec<Vertex> = rest.iter().copied().filter(|&v| v != x).collect();
                        let fits = if widen == 0 {
                            group[x] && others.iter().all(|&v| spec.reservoir[v])
                        } else {
                            !spec.reservoir[x]
                        };
                        if fits {
                            placed = Some((x, others));
                            break;
                        }
                    }
                    if placed.is_some() {
                        break;
                    }
                }
                if let Some((x, others)) = placed.take() {
                    if widen == 0 {
                        report.connections_via_reservoir += 1;
                    }
                    let mut assign = vec![(root, x)];
                    assign.extend(block.iter().copied().zip(others));
                    cur = cur.extend_edge(e, &assign)?;
                    break;
                }
            }
        }
        let anchor = match cur.get(root) {
            Some(_) => root,
            None => verts[rt.parent[part.root].unwrap()],
        };
        let order = pending_order(&cur, anchor, &|v| in_part[v]);
        let mut result = None;
        for (widen, label) in [(0, ""), (1, "pool"), (2, "reservoir")] {
            let allowed: Vec<bool> = (0..host.n())
                .map(|x| match widen {
                    0 => group[x],
                    1 => !spec.reservoir[x],
                    _ => true,
                })
                .collect();
            let lim = SearchLimits { budget: spec.budget, restarts: 2, seed: g.gen() };
            if let Ok(done) = extend_search(&cur, &order, &allowed, None, lim) {
                if widen > 0 {
                    report.fallbacks.push((pi, label.to_string()));
                }
                result = Some(done);
                break;
            }
        }
        cur =
            result.ok_or_else(|| Error::EmbeddingNotFound(format!("part {pi} of {} vertices", part.vertices.len())))?;
    }
    Ok((cur, report))
}

/// Vertex order whose consecutive chunks, sized as `chunks` would take them,
/// form the groups; returns the order, samples used and whether the bound
/// held.
fn random_groups(
    h: &Hypergraph,
    pool: &[bool],
    needs: &[usize],
    samples: usize,
    g: &mut Rng,
) -> (Vec<Vertex>, usize, bool) {
    let k = h.k();
    let delta = h.min_d_degree(1).map(|p| p.normalized_min).unwrap_or_default();
    let mut verts: Vec<Vertex> = (0..h.n()).filter(|&v| pool[v]).collect();
    for s in 1..=samples.max(1) {
        verts.shuffle(g);
        let mut ok = true;
        let mut at = 0;
        for &need in needs {
            let end = (at + need + need / 2).min(verts.len());
            let group = &verts[at..end];
            at = end;
            if group.len() < k {
                continue;
            }
            let mut inside = vec![false; h.n()];
            for &v in group {
                inside[v] = true;
            }
            let full = crate::combinat::binomial(group.len() - 1, k - 1) as i64;
            for &v in group {
                let deg = h.incident(v).iter().filter(|&&e| h.edge(e).iter().all(|&x| inside[x])).count() as i64;
                if crate::Rational::from_integer(2 * deg) < delta * crate::Rational::from_integer(full) {
                    ok = false;
                }
            }
        }
        if ok {
            return (verts, s, true);
        }
    }
    (verts, samples.max(1), false)
}
