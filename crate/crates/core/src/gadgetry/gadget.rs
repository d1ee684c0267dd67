use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::balancers::Balancer;
use super::chains::DiamondChain;
use crate::error::{Error, Result};
use crate::hypercore::{Edge, Hypergraph, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstituentKind {
    Chain,
    Balancer,
}

/// A diamond-chain or balancer with its two halves. `halves[0][i]` and
/// `halves[1][i]` correspond: the two edges of the i-th diamond, or f_{1,i}
/// and f_{2,i}. For chains `halves[0]` is S_u, for balancers J1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constituent {
    pub kind: ConstituentKind,
    pub halves: [Vec<Edge>; 2],
}

impl Constituent {
    pub fn from_chain(c: &DiamondChain) -> Self {
        Self { kind: ConstituentKind::Chain, halves: [c.half_u(), c.half_v()] }
    }

    pub fn from_balancer(b: &Balancer) -> Self {
        Self { kind: ConstituentKind::Balancer, halves: b.f.clone() }
    }

    pub fn vertices(&self) -> BTreeSet<Vertex> {
        self.halves.iter().flatten().flatten().copied().collect()
    }

    /// Checks the diamond-chain or K_{2,t}-expansion shape.
    fn check_shape(&self, k: usize, t: usize) -> std::result::Result<(), String> {
        let [h0, h1] = &self.halves;
        if h0.len() != h1.len() || h0.is_empty() {
            return Err("halves differ in size or are empty".into());
        }
        if h0.iter().chain(h1).any(|e| e.len() != k) {
            return Err("edge of the wrong size".into());
        }
        let minus = |a: &Edge, b: &Edge| -> Vec<Vertex> { a.iter().copied().filter(|v| !b.contains(v)).collect() };
        match self.kind {
            ConstituentKind::Chain => {
                let l = h0.len();
                let mut way = Vec::with_capacity(l + 1);
                for i in 0..l {
                    let (a, b) = (minus(&h0[i], &h1[i]), minus(&h1[i], &h0[i]));
                    if a.len() != 1 || b.len() != 1 {
                        return Err(format!("step {i} is not a diamond"));
                    }
                    if i == 0 {
                        way.push(a[0]);
                    } else if way[i] != a[0] {
                        return Err(format!("step {i} does not start at the previous tip"));
                    }
                    way.push(b[0]);
                }
                let mut sorted = way.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != way.len() {
                    return Err("waypoints repeat".into());
                }
                let sets: Vec<BTreeSet<Vertex>> =
                    (0..l).map(|i| h0[i].iter().chain(&h1[i]).copied().collect()).collect();
                for i in 0..l {
                    for j in i + 1..l {
                        let common: Vec<Vertex> = sets[i].intersection(&sets[j]).copied().collect();
                        let expected = if j == i + 1 { vec![way[j]] } else { vec![] };
                        if common != expected {
                            return Err(format!("diamonds {i} and {j} overlap illegally"));
                        }
                    }
                }
                Ok(())
            }
            ConstituentKind::Balancer => {
                if h0.len() != t {
                    return Err(format!("balancer has {} edges per half, expected t = {t}", h0.len()));
                }
                let centre = |half: &Vec<Edge>| -> Option<Vertex> {
                    half[0].iter().copied().find(|v| half.iter().all(|e| e.contains(v)))
                };
                let (Some(x1), Some(x2)) = (centre(h0), centre(h1)) else {
                    return Err("a balancer half has no common centre".into());
                };
                let mut y = Vec::new();
                for i in 0..t {
                    let common: Vec<Vertex> = h0[i].iter().copied().filter(|v| h1[i].contains(v)).collect();
                    if common.len() != 1 || common[0] == x1 || common[0] == x2 {
                        return Err(format!("edges f1,{i} and f2,{i} do not meet in one leaf anchor"));
                    }
                    y.push(common[0]);
                }
                if x1 == x2 {
                    return Err("balancer centres coincide".into());
                }
                if self.vertices().len() != 2 + t + 2 * t * (k - 2) {
                    return Err("balancer is not a k-expansion of K_{2,t}".into());
                }
                Ok(())
            }
        }
    }
}

/// Connected components of an edge set, as lists of edge indices.
fn components(edges: &[Edge]) -> Vec<Vec<usize>> {
    let m = edges.len();
    let mut comp = vec![usize::MAX; m];
    let mut out = Vec::new();
    for s in 0..m {
        if comp[s] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut stack = vec![s];
        comp[s] = id;
        let mut members = Vec::new();
        while let Some(i) = stack.pop() {
            members.push(i);
            for j in 0..m {
                if comp[j] == usize::MAX && edges[i].iter().any(|v| edges[j].contains(v)) {
                    comp[j] = id;
                    stack.push(j);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Whether `edges` form a loose star: one common centre, otherwise disjoint.
fn is_star(edges: &[&Edge]) -> bool {
    if edges.len() == 1 {
        return true;
    }
    let Some(c) = edges[0].iter().copied().find(|v| edges.iter().all(|e| e.contains(v))) else {
        return false;
    };
    let mut seen = BTreeSet::new();
    edges.iter().flat_map(|e| e.iter()).filter(|&&v| v != c).all(|&v| seen.insert(v))
}

/// An (X1, X2, t)-gadget: constituents placed with one half in L1 and the
/// other in L2. `flipped[i]` puts `parts[i].halves[1]` into L1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gadget {
    pub t: usize,
    pub parts: Vec<Constituent>,
    pub flipped: Vec<bool>,
    /// V(L) \ V(L2), sorted.
    pub x1: Vec<Vertex>,
    /// V(L) \ V(L1), sorted.
    pub x2: Vec<Vertex>,
}

impl Gadget {
    fn assemble(t: usize, parts: Vec<Constituent>, flipped: Vec<bool>) -> Result<Self> {
        let mut g = Gadget { t, parts, flipped, x1: Vec::new(), x2: Vec::new() };
        let v1 = g.half_vertices(0);
        let v2 = g.half_vertices(1);
        g.x1 = v1.difference(&v2).copied().collect();
        g.x2 = v2.difference(&v1).copied().collect();
        g.check(None)?;
        Ok(g)
    }

    /// The ({u}, {v}, t)-gadget of a (u, v, ℓ)-diamond-chain.
    pub fn from_chain(c: &DiamondChain, t: usize) -> Result<Self> {
        Self::assemble(t, vec![Constituent::from_chain(c)], vec![false])
    }

    /// The (V(J) \ V(J2), V(J) \ V(J1), t)-gadget of a balancer.
    pub fn from_balancer(b: &Balancer) -> Result<Self> {
        Self::assemble(b.t(), vec![Constituent::from_balancer(b)], vec![false])
    }

    /// Edges of L1 (`side` 0) or L2 (`side` 1), with the constituent index of each.
    pub fn half(&self, side: usize) -> Vec<(usize, Edge)> {
        self.parts
            .iter()
            .zip(&self.flipped)
            .enumerate()
            .flat_map(|(i, (p, &f))| p.halves[side ^ usize::from(f)].iter().map(move |e| (i, e.clone())))
            .collect()
    }

    pub fn half_vertices(&self, side: usize) -> BTreeSet<Vertex> {
        self.half(side).into_iter().flat_map(|(_, e)| e).collect()
    }

    pub fn vertices(&self) -> BTreeSet<Vertex> {
        self.parts.iter().flat_map(Constituent::vertices).collect()
    }

    /// The same gadget read as an (X2, X1, t)-gadget.
    pub fn flip(&self) -> Self {
        Gadget {
            t: self.t,
            parts: self.parts.clone(),
            flipped: self.flipped.iter().map(|f| !f).collect(),
            x1: self.x2.clone(),
            x2: self.x1.clone(),
        }
    }

    /// Replaces boundary vertices of X2 by new vertices in every edge of L2,
    /// re-checking the result against `h`. Each key must lie in X2.
    pub fn retarget(&self, map: &[(Vertex, Vertex)], h: &Hypergraph) -> Result<Self> {
        if let Some((q, _)) = map.iter().find(|(q, _)| !self.x2.contains(q)) {
            return Err(Error::InvalidArgument(format!("{q} is not in X2")));
        }
        let sub = |v: Vertex| map.iter().find(|(q, _)| *q == v).map_or(v, |&(_, z)| z);
        let parts = self
            .parts
            .iter()
            .map(|p| {
                let halves = p.halves.clone().map(|half| {
                    half.into_iter()
                        .map(|e| {
                            let mut e: Edge = e.into_iter().map(sub).collect();
                            e.sort_unstable();
                            e
                        })
                        .collect()
                });
                Constituent { kind: p.kind, halves }
            })
            .collect();
        let g = Self::assemble(self.t, parts, self.flipped.clone())?;
        g.check(Some(h))?;
        Ok(g)
    }

    pub fn num_balancers(&self) -> usize {
        self.parts.iter().filter(|p| p.kind == ConstituentKind::Balancer).count()
    }

    /// The six gadget conditions, plus host membership when `h` is given.
    pub fn check(&self, h: Option<&Hypergraph>) -> Result<()> {
        let bad = |m: String| Err(Error::Invariant(format!("gadget: {m}")));
        if self.parts.is_empty() || self.flipped.len() != self.parts.len() {
            return bad("no constituents".into());
        }
        let k = self.parts[0].halves[0][0].len();
        // (2) constituents have the right shape and are edge-disjoint
        for (i, p) in self.parts.iter().enumerate() {
            if let Err(m) = p.check_shape(k, self.t) {
                return bad(format!("constituent {i}: {m}"));
            }
        }
        let all: Vec<&Edge> = self.parts.iter().flat_map(|p| p.halves.iter().flatten()).collect();
        let distinct: BTreeSet<&Edge> = all.iter().copied().collect();
        if distinct.len() != all.len() {
            return bad("constituents share an edge".into());
        }
        if let Some(h) = h {
            if let Some(e) = all.iter().find(|e| !h.contains_edge(e)) {
                return bad(format!("{e:?} is not a host edge"));
            }
        }
        // (3) and (4): each half is a vertex-disjoint union of edges and t-stars,
        // and the halves have the same component profile, hence are isomorphic
        let mut profiles = Vec::new();
        for side in 0..2 {
            let edges: Vec<Edge> = self.half(side).into_iter().map(|(_, e)| e).collect();
            let mut sizes = Vec::new();
            for comp in components(&edges) {
                let es: Vec<&Edge> = comp.iter().map(|&i| &edges[i]).collect();
                if !(es.len() == 1 || (es.len() == self.t && is_star(&es))) {
                    return bad(format!("half {} has a component that is not an edge or a {}-star", side + 1, self.t));
                }
                sizes.push(es.len());
            }
            sizes.sort_unstable();
            profiles.push(sizes);
        }
        if profiles[0] != profiles[1] {
            return bad("halves are not isomorphic".into());
        }
        // (5) holds by construction: each constituent contributes one half to each side.
        // (1) and (6): the boundaries are the exclusive vertex sets
        let v1 = self.half_vertices(0);
        let v2 = self.half_vertices(1);
        let x1: Vec<Vertex> = v1.difference(&v2).copied().collect();
        let x2: Vec<Vertex> = v2.difference(&v1).copied().collect();
        if x1 != self.x1 || x2 != self.x2 {
            return bad("boundary sets do not match V(L) \\ V(L_i)".into());
        }
        if x1.len() != x2.len() {
            return bad("boundary sets differ in size".into());
        }
        Ok(())
    }
}

/// Places several gadgets together, flipping those marked, and re-checks the
/// result from scratch.
pub fn gadget_merge(items: &[(&Gadget, bool)]) -> Result<Gadget> {
    let Some((first, _)) = items.first() else {
        return Err(Error::InvalidArgument("nothing to merge".into()));
    };
    let t = first.t;
    if items.iter().any(|(g, _)| g.t != t) {
        return Err(Error::InvalidArgument("gadgets have different t".into()));
    }
    let mut parts = Vec::new();
    let mut flipped = Vec::new();
    for (g, flip) in items {
        parts.extend(g.parts.iter().cloned());
        flipped.extend(g.flipped.iter().map(|f| f ^ flip));
    }
    Gadget::assemble(t, parts, flipped)
}

/// L ∪ L' for vertex-disjoint gadgets: an (X1 ∪ X1', X2 ∪ X2', t)-gadget.
pub fn gadget_union(l: &Gadget, l2: &Gadget) -> Result<Gadget> {
    let common: Vec<Vertex> = l.vertices().intersection(&l2.vertices()).copied().collect();
    if !common.is_empty() {
        return Err(Error::Overlap(format!("gadgets share vertices {common:?}")));
    }
    let g = gadget_merge(&[(l, false), (l2, false)])?;
    let union = |a: &[Vertex], b: &[Vertex]| -> Vec<Vertex> {
        a.iter().chain(b).copied().collect::<BTreeSet<_>>().into_iter().collect()
    };
    if g.x1 != union(&l.x1, &l2.x1) || g.x2 != union(&l.x2, &l2.x2) {
        return Err(Error::Invariant("union boundaries are not the unions of boundaries".into()));
    }
    Ok(g)
}

/// L ∪ L' with halves L1 ∪ L2' and L2 ∪ L1', for X1' ⊆ X1, X2' ⊆ X2 and the
/// gadgets meeting only inside X1' ∪ X2': an (X1 \ X1', X2 \ X2', t)-gadget.
pub fn gadget_compose(l: &Gadget, l2: &Gadget) -> Result<Gadget> {
    let sub = |a: &[Vertex], b: &[Vertex]| a.iter().all(|v| b.contains(v));
    if !sub(&l2.x1, &l.x1) || !sub(&l2.x2, &l.x2) {
        return Err(Error::InvalidArgument("X1' must lie in X1 and X2' in X2".into()));
    }
    let allowed: BTreeSet<Vertex> = l2.x1.iter().chain(&l2.x2).copied().collect();
    let stray: Vec<Vertex> =
        l.vertices().intersection(&l2.vertices()).copied().filter(|v| !allowed.contains(v)).collect();
    if !stray.is_empty() {
        return Err(Error::Overlap(format!("gadgets share vertices {stray:?} outside X1' ∪ X2'")));
    }
    let g = gadget_merge(&[(l, false), (l2, true)])?;
    let minus = |a: &[Vertex], b: &[Vertex]| -> Vec<Vertex> { a.iter().copied().filter(|v| !b.contains(v)).collect() };
    if g.x1 != minus(&l.x1, &l2.x1) || g.x2 != minus(&l.x2, &l2.x2) {
        return Err(Error::Invariant("composed boundaries are not X1 \\ X1', X2 \\ X2'".into()));
    }
    Ok(g)
}
