use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::immerse::{gadget_items, ImmersionItem};
use crate::combinat::{derive_seed, rng};
use crate::error::Result;
use crate::gadgetry::{diamonds_between, gadget_union, ChainFinder, DiamondChain, Gadget, ParityAbsorber};
use crate::hypercore::{Hypergraph, Vertex};

/// An absorbing tuple for (w, w_1, .., w_{k-1}): an edge w v_1 .. v_{k-1} of
/// the host together with vertex-disjoint (v_i, w_i)-diamond-chains, stored as
/// the union gadget with X1 = {v_i} and X2 = {w_i}. With chains of length one
/// the used half consists of the half-diamonds f^{v_i}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsorbingTuple {
    pub w: Vertex,
    pub targets: Vec<Vertex>,
    pub vs: Vec<Vertex>,
    pub gadget: Gadget,
}

impl AbsorbingTuple {
    pub fn verify(&self, h: &Hypergraph) -> bool {
        let mut e = self.vs.clone();
        e.push(self.w);
        let mut vs = self.vs.clone();
        vs.sort_unstable();
        let mut ts = self.targets.clone();
        ts.sort_unstable();
        h.contains_edge(&e)
            && self.gadget.t == 1
            && self.gadget.check(Some(h)).is_ok()
            && self.gadget.x1 == vs
            && self.gadget.x2 == ts
            && !self.gadget.vertices().contains(&self.w)
    }
}

/// A member of an absorbing family: any gadget whose L1 is kept immersed and
/// whose X1 completes an edge at the vertex being absorbed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyMember {
    Tuple(AbsorbingTuple),
    Parity(ParityAbsorber),
}

impl FamilyMember {
    pub fn gadget(&self) -> &Gadget {
        match self {
            FamilyMember::Tuple(t) => &t.gadget,
            FamilyMember::Parity(p) => &p.gadget,
        }
    }

    pub fn items(&self) -> Vec<ImmersionItem> {
        gadget_items(self.gadget(), 0).expect("family gadgets are well formed")
    }

    /// Vertices the member occupies while immersed.
    pub fn used_vertices(&self) -> Vec<Vertex> {
        self.gadget().half_vertices(0).into_iter().collect()
    }
}

/// If `g` can absorb the edge at `w` onto the free set `z`, the copy of `g`
/// with X2 moved onto `z`: w lies outside the used half, w ∪ X1 is an edge,
/// and some bijection X2 → z keeps every L2 edge in the host.
pub fn absorbs(h: &Hypergraph, g: &Gadget, w: Vertex, z: &[Vertex]) -> Option<Gadget> {
    let inner = g.half_vertices(0);
    if z.len() != g.x2.len() || inner.contains(&w) || z.contains(&w) {
        return None;
    }
    let mut e = g.x1.clone();
    e.push(w);
    e.sort_unstable();
    if !h.contains_sorted(&e) {
        return None;
    }
    if z.iter().any(|v| inner.contains(v)) {
        return None;
    }
    for perm in z.iter().copied().permutations(z.len()) {
        let map: Vec<(Vertex, Vertex)> = g.x2.iter().copied().zip(perm).collect();
        if let Ok(g2) = g.retarget(&map, h) {
            return Some(g2);
        }
    }
    None
}

/// How many family members absorb each probed k-set (w, Z).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub probes: Vec<(Vertex, Vec<Vertex>, usize)>,
    pub min: usize,
    pub uncovered: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySample {
    pub family: Vec<AbsorbingTuple>,
    pub candidates: usize,
    pub coverage: CoverageReport,
}

/// Knobs for `sample_tuples`.
pub(crate) struct TupleSampling<'a> {
    pub avoid: &'a [bool],
    pub max_chain_len: usize,
    pub budget: u64,
    pub oversample: usize,
}

fn sample_one(
    h: &Hypergraph,
    finder: Option<&ChainFinder>,
    opts: &TupleSampling,
    g: &mut crate::combinat::Rng,
) -> Option<AbsorbingTuple> {
    let n = h.n();
    let k = h.k();
    let open: Vec<Vertex> = (0..n).filter(|&v| !opts.avoid[v]).collect();
    let w = *open.choose(g)?;
    let edges: Vec<usize> =
        h.incident(w).iter().copied().filter(|&e| h.edge(e).iter().all(|&v| !opts.avoid[v])).collect();
    let e = h.edge(*edges.choose(g)?);
    let vs: Vec<Vertex> = e.iter().copied().filter(|&v| v != w).collect();
    let rest: Vec<Vertex> = open.iter().copied().filter(|v| !e.contains(v)).collect();
    if rest.len() < k - 1 {
        return None;
    }
    let targets: Vec<Vertex> = rest.choose_multiple(g, k - 1).copied().collect();
    let mut blocked = opts.avoid.to_vec();
    for &v in e.iter().chain(&targets) {
        blocked[v] = true;
    }
    let mut acc: Option<Gadget> = None;
    for (&v, &t) in vs.iter().zip(&targets) {
        let chain = match finder {
            None => {
                let ds = diamonds_between(h, v, t, &|x| blocked[x]);
                let d = ds.choose(g)?;
                DiamondChain { waypoints: vec![v, t], shared: vec![d.shared.clone()] }
            }
            Some(f) => {
                let mut b = blocked.clone();
                b[v] = false;
                b[t] = false;
                f.random(v, t, opts.max_chain_len, &b, g, opts.budget)?
            }
        };
        for x in chain.vertices() {
            blocked[x] = true;
        }
        let c = Gadget::from_chain(&chain, 1).ok()?;
        acc = Some(match acc {
            None => c,
            Some(a) => gadget_union(&a, &c).ok()?,
        });
    }
    let tuple = AbsorbingTuple { w, targets, vs, gadget: acc? };
    tuple.verify(h).then_some(tuple)
}

/// Independent random candidates, then greedy pruning to pairwise disjoint
/// used halves, as in the deletion step of the counting argument.
pub(crate) fn sample_tuples(
    h: &Hypergraph,
    count: usize,
    seed: u64,
    opts: &TupleSampling,
) -> (Vec<AbsorbingTuple>, usize) {
    if count == 0 || h.n() < 2 * h.k() {
        return (Vec::new(), 0);
    }
    let finder = (opts.max_chain_len > 1).then(|| ChainFinder::new(h));
    let mut g = rng(seed);
    let mut cands = Vec::new();
    for _ in 0..count * opts.oversample.max(1) {
        if let Some(t) = sample_one(h, finder.as_ref(), opts, &mut g) {
            cands.push(t);
        }
    }
    let found = cands.len();
    let mut taken = vec![false; h.n()];
    let mut family = Vec::new();
    for t in cands {
        if family.len() == count {
            break;
        }
        let used = t.gadget.half_vertices(0);
        if used.iter().any(|&v| taken[v]) {
            continue;
        }
        for v in used {
            taken[v] = true;
        }
        family.push(t);
    }
    (family, found)
}

/// Coverage of `probes` random k-sets by the family.
pub fn coverage(h: &Hypergraph, family: &[AbsorbingTuple], probes: usize, seed: u64) -> CoverageReport {
    let k = h.k();
    let mut taken = vec![false; h.n()];
    for t in family {
        for v in t.gadget.half_vertices(0) {
            taken[v] = true;
        }
    }
    let open: Vec<Vertex> = (0..h.n()).filter(|&v| !taken[v]).collect();
    let mut g = rng(seed);
    let mut out = Vec::new();
    if open.len() >= k {
        for _ in 0..probes {
            let mut s: Vec<Vertex> = open.choose_multiple(&mut g, k).copied().collect();
            let w = s.remove(g.gen_range(0..k));
            s.sort_unstable();
            let c = family.iter().filter(|t| absorbs(h, &t.gadget, w, &s).is_some()).count();
            out.push((w, s, c));
        }
    }
    CoverageReport {
        min: out.iter().map(|p| p.2).min().unwrap_or(0),
        uncovered: out.iter().filter(|p| p.2 == 0).count(),
        probes: out,
    }
}

/// Samples up to `count_target` pairwise disjoint absorbing tuples built from
/// single diamonds, with a coverage report over 32 random k-sets.
pub fn sample_absorbing_family(host: &Hypergraph, count_target: usize, seed: u64) -> Result<FamilySample> {
    let avoid = vec![false; host.n()];
    let opts = TupleSampling { avoid: &avoid, max_chain_len: 1, budget: 0, oversample: 4 };
    let (family, candidates) = sample_tuples(host, count_target, derive_seed(seed, 0), &opts);
    let coverage = coverage(host, &family, if count_target == 0 { 0 } else { 32 }, derive_seed(seed, 1));
    Ok(FamilySample { family, candidates, coverage })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_host_family() {
        let h = Hypergraph::complete(15, 3).unwrap();
        let s = sample_absorbing_family(&h, 4, 7).unwrap();
        assert!(!s.family.is_empty());
        for t in &s.family {
            assert!(t.verify(&h));
            assert_eq!(t.gadget.half(0).len(), 2);
        }
        // in a complete host every disjoint probe is absorbed by every member avoiding it
        assert!(s.coverage.probes.iter().all(|p| p.2 > 0));
    }

    #[test]
    fn zero_target() {
        let h = Hypergraph::complete(15, 3).unwrap();
        let s = sample_absorbing_family(&h, 0, 7).unwrap();
        assert!(s.family.is_empty());
        assert!(s.coverage.probes.is_empty());
    }

    #[test]
    fn absorbs_retargets_onto_free_set() {
        let h = Hypergraph::complete(12, 3).unwrap();
        let s = sample_absorbing_family(&h, 1, 2).unwrap();
        let t = &s.family[0];
        let used = t.gadget.vertices();
        let mut free = (0..12).filter(|v| !used.contains(v) && *v != t.w);
        let z = vec![free.next().unwrap(), free.next().unwrap()];
        let g2 = absorbs(&h, &t.gadget, t.w, &z).unwrap();
        assert_eq!(g2.x2, z);
        assert_eq!(g2.x1, t.gadget.x1);
    }
}
