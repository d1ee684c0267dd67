use super::{Edge, Hypergraph, Vertex};
use crate::combinat::for_each_subset;
use crate::error::{invalid, Error, Result};

/// Largest total vertex count of a blow-up.
pub const BLOWUP_VERTEX_CAP: usize = 4096;
/// Largest k*m accepted by [`count_edge_blowups`].
pub const COUNT_BLOWUP_CAP: usize = 9;

/// A blow-up of `base`: vertex x becomes the cluster `clusters[x]`, and every base
/// edge becomes the complete k-partite k-graph on its clusters.
#[derive(Clone, Debug)]
pub struct Blowup {
    pub base: Hypergraph,
    pub clusters: Vec<Vec<Vertex>>,
    /// `owner[v]` is the base vertex whose cluster contains `v`.
    pub owner: Vec<Vertex>,
    pub result: Hypergraph,
}

impl Blowup {
    /// Quotient of the result by its clusters.
    pub fn collapse(&self) -> Result<Hypergraph> {
        let edges: Vec<Edge> = self.result.edges().iter().map(|e| e.iter().map(|&v| self.owner[v]).collect()).collect();
        Hypergraph::from_edges_dedup(self.base.n(), self.base.k(), edges)
    }
}

/// Blows up every vertex `x` of `h` into `sizes[x]` fresh vertices, allocated in
/// base-vertex order.
pub fn blow_up(h: &Hypergraph, sizes: &[usize]) -> Result<Blowup> {
    if sizes.len() != h.n() {
        return invalid(format!("{} cluster sizes for {} vertices", sizes.len(), h.n()));
    }
    if let Some(x) = sizes.iter().position(|&s| s == 0) {
        return invalid(format!("cluster of vertex {x} has size 0"));
    }
    let total: usize = sizes.iter().sum();
    if total > BLOWUP_VERTEX_CAP {
        return Err(Error::SizeCap(format!("blow-up has {total} vertices, cap {BLOWUP_VERTEX_CAP}")));
    }
    let mut clusters = Vec::with_capacity(h.n());
    let mut owner = Vec::with_capacity(total);
    for (x, &s) in sizes.iter().enumerate() {
        let start = owner.len();
        clusters.push((start..start + s).collect::<Vec<_>>());
        owner.extend(std::iter::repeat_n(x, s));
    }
    let mut edges = Vec::new();
    for e in h.edges() {
        let mut cur = Vec::with_capacity(h.k());
        transversals(&clusters, e, &mut cur, &mut edges);
    }
    let result = Hypergraph::new(total, h.k(), edges)?;
    Ok(Blowup { base: h.clone(), clusters, owner, result })
}

fn transversals(clusters: &[Vec<Vertex>], e: &[Vertex], cur: &mut Vec<Vertex>, out: &mut Vec<Edge>) {
    if cur.len() == e.len() {
        out.push(cur.clone());
        return;
    }
    for &v in &clusters[e[cur.len()]] {
        cur.push(v);
        transversals(clusters, e, cur, out);
        cur.pop();
    }
}

/// Exact number of copies of the m-blow-up of a single edge in `h`, counting
/// each unordered family of k disjoint m-sets once.
///
/// Every copy is counted from its transversal of cluster minima, which is an
/// edge `e` of `h`; cluster i then consists of `e[i]` plus m - 1 larger
/// vertices that can replace `e[i]` in `e`.
pub fn count_edge_blowups(h: &Hypergraph, m: usize) -> Result<u64> {
    let k = h.k();
    if m == 0 {
        return invalid("m must be positive");
    }
    if k * m > COUNT_BLOWUP_CAP {
        return Err(Error::SizeCap(format!("k*m = {} exceeds {COUNT_BLOWUP_CAP}", k * m)));
    }
    if k * m > h.n() {
        return Ok(0);
    }
    if m == 1 {
        return Ok(h.num_edges() as u64);
    }
    let mut total = 0u64;
    for e in h.edges() {
        let mut candidates: Vec<Vec<Vertex>> = Vec::with_capacity(k);
        for i in 0..k {
            let mut swapped = e.clone();
            let c: Vec<Vertex> = ((e[i] + 1)..h.n())
                .filter(|v| e.binary_search(v).is_err())
                .filter(|&v| {
                    swapped[i] = v;
                    h.contains_edge(&swapped)
                })
                .collect();
            candidates.push(c);
        }
        let mut clusters: Vec<Vec<Vertex>> = e.iter().map(|&v| vec![v]).collect();
        total += extend_clusters(h, &candidates, m, 0, &mut clusters);
    }
    Ok(total)
}

fn extend_clusters(
    h: &Hypergraph,
    candidates: &[Vec<Vertex>],
    m: usize,
    i: usize,
    clusters: &mut Vec<Vec<Vertex>>,
) -> u64 {
    if i == clusters.len() {
        return u64::from(all_transversals_present(h, clusters));
    }
    let used: Vec<Vertex> = clusters.iter().flatten().copied().collect();
    let free: Vec<Vertex> = candidates[i].iter().copied().filter(|v| !used.contains(v)).collect();
    let mut count = 0;
    let mut picks = Vec::new();
    for_each_subset(&free, m - 1, |s| picks.push(s.to_vec()));
    for s in picks {
        clusters[i].extend_from_slice(&s);
        if partial_ok(h, clusters, i + 1) {
            count += extend_clusters(h, candidates, m, i + 1, clusters);
        }
        clusters[i].truncate(1);
    }
    count
}

/// Cheap prune: transversals that use the base minimum in every unfinished cluster.
fn partial_ok(h: &Hypergraph, clusters: &[Vec<Vertex>], done: usize) -> bool {
    let mut cur = Vec::with_capacity(clusters.len());
    check_rec(h, clusters, done, &mut cur)
}

fn check_rec(h: &Hypergraph, clusters: &[Vec<Vertex>], done: usize, cur: &mut Vec<Vertex>) -> bool {
    let i = cur.len();
    if i == clusters.len() {
        return h.contains_edge(cur);
    }
    let options: &[Vertex] = if i < done { &clusters[i] } else { &clusters[i][..1] };
    for &v in options {
        cur.push(v);
        let ok = check_rec(h, clusters, done, cur);
        cur.pop();
        if !ok {
            return false;
        }
    }
    true
}

fn all_transversals_present(h: &Hypergraph, clusters: &[Vec<Vertex>]) -> bool {
    partial_ok(h, clusters, clusters.len())
}
