use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gadgetry::{Balancer, ConstituentKind, Gadget};
use crate::hypercore::{Edge, Hypergraph, Vertex};
use crate::treekit::{ExpansionTree, VertexRole};

/// A partial embedding of a tree expansion into a host.
///
/// Values are persistent: every operation returns a new version and leaves
/// the receiver untouched, so earlier versions double as an undo log. The
/// embedded edges may form a forest while a pipeline assembles separately
/// embedded pieces; `is_connected` reports whether they form one subtree.
#[derive(Clone, Debug)]
pub struct PartialEmbedding {
    target: Arc<ExpansionTree>,
    host: Arc<Hypergraph>,
    map: Vec<Option<Vertex>>,
    owner: Vec<Option<usize>>,
    embedded: Vec<bool>,
}

impl PartialEmbedding {
    pub fn new(target: Arc<ExpansionTree>, host: Arc<Hypergraph>) -> Result<Self> {
        if target.k() != host.k() {
            return invalid(format!("tree expansion is {}-uniform, host is {}-uniform", target.k(), host.k()));
        }
        let nt = target.num_vertices();
        let ne = target.base().n() - 1;
        let nh = host.n();
        Ok(Self { target, host, map: vec![None; nt], owner: vec![None; nh], embedded: vec![false; ne] })
    }

    /// Builds an embedding from raw tables and verifies it.
    pub fn from_parts(
        target: Arc<ExpansionTree>,
        host: Arc<Hypergraph>,
        map: Vec<Option<Vertex>>,
        embedded: Vec<bool>,
    ) -> Result<Self> {
        let mut pe = Self::new(target, host)?;
        if map.len() != pe.map.len() || embedded.len() != pe.embedded.len() {
            return invalid("table sizes do not match the target");
        }
        for (v, x) in map.iter().enumerate() {
            if let Some(x) = *x {
                if x >= pe.owner.len() {
                    return Err(Error::InvalidVertex { vertex: x, n: pe.owner.len() });
                }
                if let Some(w) = pe.owner[x] {
                    return Err(Error::Invariant(format!("target vertices {w} and {v} both map to {x}")));
                }
                pe.owner[x] = Some(v);
            }
        }
        pe.map = map;
        pe.embedded = embedded;
        pe.verify()?;
        Ok(pe)
    }

    pub fn target(&self) -> &ExpansionTree {
        &self.target
    }

    pub fn target_arc(&self) -> Arc<ExpansionTree> {
        Arc::clone(&self.target)
    }

    pub fn host(&self) -> &Hypergraph {
        &self.host
    }

    pub fn host_arc(&self) -> Arc<Hypergraph> {
        Arc::clone(&self.host)
    }

    pub fn get(&self, v: usize) -> Option<Vertex> {
        self.map[v]
    }

    pub fn preimage(&self, x: Vertex) -> Option<usize> {
        self.owner[x]
    }

    pub fn is_used(&self, x: Vertex) -> bool {
        self.owner[x].is_some()
    }

    pub fn used_mask(&self) -> Vec<bool> {
        self.owner.iter().map(Option::is_some).collect()
    }

    pub fn raw_map(&self) -> &[Option<Vertex>] {
        &self.map
    }

    pub fn image(&self) -> Vec<Vertex> {
        (0..self.owner.len()).filter(|&x| self.owner[x].is_some()).collect()
    }

    pub fn image_len(&self) -> usize {
        self.map.iter().filter(|x| x.is_some()).count()
    }

    /// Host vertices outside the image.
    pub fn free(&self) -> Vec<Vertex> {
        (0..self.owner.len()).filter(|&x| self.owner[x].is_none()).collect()
    }

    pub fn is_embedded(&self, e: usize) -> bool {
        self.embedded[e]
    }

    pub fn embedded_edges(&self) -> Vec<usize> {
        (0..self.embedded.len()).filter(|&e| self.embedded[e]).collect()
    }

    pub fn num_embedded(&self) -> usize {
        self.embedded.iter().filter(|&&b| b).count()
    }

    pub fn is_complete(&self) -> bool {
        self.embedded.iter().all(|&b| b)
    }

    /// The full vertex map once every target vertex is placed.
    pub fn full_map(&self) -> Option<Vec<Vertex>> {
        self.map.iter().copied().collect()
    }

    /// Sorted host image of hyperedge `e`, if all its vertices are placed.
    pub fn edge_image(&self, e: usize) -> Option<Edge> {
        let mut img: Edge = self.target.hyperedge(e).iter().map(|&v| self.map[v]).collect::<Option<_>>()?;
        img.sort_unstable();
        Some(img)
    }

    /// Places an anchor that is not yet covered by any embedded edge.
    pub fn place(&self, anchor: usize, x: Vertex) -> Result<Self> {
        if !self.target.is_anchor(anchor) {
            return invalid(format!("{anchor} is not an anchor"));
        }
        if x >= self.owner.len() {
            return Err(Error::InvalidVertex { vertex: x, n: self.owner.len() });
        }
        if self.map[anchor].is_some() || self.owner[x].is_some() {
            return Err(Error::Overlap(format!("anchor {anchor} or host vertex {x} already used")));
        }
        let mut next = self.clone();
        next.map[anchor] = Some(x);
        next.owner[x] = Some(anchor);
        Ok(next)
    }

    /// Embeds hyperedge `e`, placing its unplaced vertices as `assign` says.
    pub fn extend_edge(&self, e: usize, assign: &[(usize, Vertex)]) -> Result<Self> {
        if self.embedded[e] {
            return invalid(format!("edge {e} is already embedded"));
        }
        let mut next = self.clone();
        let edge = self.target.hyperedge(e);
        for &(v, x) in assign {
            if !edge.contains(&v) {
                return invalid(format!("{v} is not in edge {e}"));
            }
            if x >= next.owner.len() {
                return Err(Error::InvalidVertex { vertex: x, n: next.owner.len() });
            }
            if next.map[v].is_some() || next.owner[x].is_some() {
                return Err(Error::Overlap(format!("target {v} or host vertex {x} already used")));
            }
            next.map[v] = Some(x);
            next.owner[x] = Some(v);
        }
        let Some(img) = next.edge_image(e) else {
            return invalid(format!("edge {e} still has unplaced vertices"));
        };
        if !self.host.contains_sorted(&img) {
            return Err(Error::EmbeddingNotFound(format!("{img:?} is not a host edge")));
        }
        next.embedded[e] = true;
        Ok(next)
    }

    /// Injectivity, edge preservation, and every placed vertex lying in an
    /// embedded edge unless it is a lone anchor.
    pub fn verify(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Invariant(format!("partial embedding: {m}")));
        let mut seen = vec![false; self.owner.len()];
        for (v, x) in self.map.iter().enumerate() {
            if let Some(x) = *x {
                if seen[x] {
                    return bad(format!("{x} is hit twice"));
                }
                seen[x] = true;
                if self.owner[x] != Some(v) {
                    return bad(format!("inverse table disagrees at {x}"));
                }
            }
        }
        if self.owner.iter().enumerate().any(|(x, o)| o.is_some() != seen[x]) {
            return bad("inverse table has stale entries".into());
        }
        let mut covered = vec![false; self.map.len()];
        for e in self.embedded_edges() {
            let Some(img) = self.edge_image(e) else {
                return bad(format!("embedded edge {e} has unplaced vertices"));
            };
            if !self.host.contains_sorted(&img) {
                return bad(format!("edge {e} maps to non-edge {img:?}"));
            }
            for &v in self.target.hyperedge(e) {
                covered[v] = true;
            }
        }
        for (v, x) in self.map.iter().enumerate() {
            if x.is_some() && !covered[v] && !self.target.is_anchor(v) {
                return bad(format!("expansion vertex {v} is placed outside its edge"));
            }
        }
        Ok(())
    }

    /// Whether the embedded edges, plus placed lone anchors, form one tree.
    pub fn is_connected(&self) -> bool {
        let t = self.target.base();
        let placed: Vec<usize> = (0..t.n()).filter(|&v| self.map[v].is_some()).collect();
        let Some(&start) = placed.first() else { return true };
        let mut seen = vec![false; t.n()];
        seen[start] = true;
        let mut stack = vec![start];
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in t.neighbours(u) {
                if !seen[w] && self.embedded[t.edge_index(u, w).unwrap()] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == placed.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SwitchKind {
    Diamond,
    Star,
    GadgetHalf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Remap {
    pub vertex: usize,
    pub from: Vertex,
    pub to: Vertex,
}

/// An (X1, X2)-switch: target vertices move so that the image loses
/// `out_set` and gains `in_set`, agreeing with the old map elsewhere.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Switch {
    pub kind: SwitchKind,
    pub out_set: Vec<Vertex>,
    pub in_set: Vec<Vertex>,
    pub remaps: Vec<Remap>,
}

impl Switch {
    pub fn inverse(&self) -> Switch {
        Switch {
            kind: self.kind,
            out_set: self.in_set.clone(),
            in_set: self.out_set.clone(),
            remaps: self.remaps.iter().map(|r| Remap { vertex: r.vertex, from: r.to, to: r.from }).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    /// From the half L1 to L2.
    Forward,
    /// From L2 back to L1.
    Backward,
}

pub fn apply_switch(pe: &PartialEmbedding, sw: &Switch) -> Result<PartialEmbedding> {
    let stale = |m: String| Err(Error::StaleSwitch(m));
    let x1: BTreeSet<Vertex> = sw.out_set.iter().copied().collect();
    let x2: BTreeSet<Vertex> = sw.in_set.iter().copied().collect();
    if x1.len() != sw.out_set.len() || x2.len() != sw.in_set.len() || x1.len() != x2.len() {
        return invalid("switch sets must be distinct and of equal size");
    }
    if let Some(x) = x1.iter().find(|&&x| !pe.is_used(x)) {
        return stale(format!("{x} is not in the image"));
    }
    if let Some(x) = x2.iter().find(|&&x| x >= pe.owner.len() || pe.is_used(x)) {
        return stale(format!("{x} is already in the image"));
    }
    let mut next = pe.clone();
    let mut moved = BTreeSet::new();
    for r in &sw.remaps {
        if r.vertex >= pe.map.len() || pe.map[r.vertex] != Some(r.from) {
            return stale(format!("target vertex {} is not at {}", r.vertex, r.from));
        }
        if !moved.insert(r.vertex) {
            return invalid(format!("target vertex {} is remapped twice", r.vertex));
        }
        next.owner[r.from] = None;
    }
    for r in &sw.remaps {
        if r.to >= next.owner.len() {
            return Err(Error::InvalidVertex { vertex: r.to, n: next.owner.len() });
        }
        if let Some(w) = next.owner[r.to] {
            return stale(format!("{} is still held by target vertex {w}", r.to));
        }
        next.map[r.vertex] = Some(r.to);
        next.owner[r.to] = Some(r.vertex);
    }
    let mut expected: BTreeSet<Vertex> = pe.image().into_iter().filter(|x| !x1.contains(x)).collect();
    expected.extend(&x2);
    if next.image().into_iter().collect::<BTreeSet<_>>() != expected {
        return stale("image after the switch is not (X \\ X1) ∪ X2".into());
    }
    for e in next.embedded_edges() {
        if next.target.hyperedge(e).iter().any(|v| moved.contains(v)) {
            let img = next.edge_image(e).unwrap();
            if !next.host.contains_sorted(&img) {
                return stale(format!("edge {e} would map to non-edge {img:?}"));
            }
        }
    }
    next.verify()?;
    Ok(next)
}

/// Moves expansion vertex `y` from x1 to x2, where its edge and the edge with
/// x1 replaced by x2 form an (x1, x2)-diamond.
pub fn diamond_switch(pe: &PartialEmbedding, y: usize, to: Vertex) -> Result<Switch> {
    let VertexRole::Expansion { edge, .. } = pe.target.role(y) else {
        return invalid(format!("{y} is not an expansion vertex"));
    };
    let Some(from) = pe.map[y] else {
        return Err(Error::StaleSwitch(format!("{y} is not placed")));
    };
    if !pe.embedded[edge] {
        return Err(Error::StaleSwitch(format!("edge {edge} is not embedded")));
    }
    if to >= pe.owner.len() || pe.is_used(to) {
        return Err(Error::StaleSwitch(format!("{to} is not free")));
    }
    let mut e2: Edge = pe.edge_image(edge).unwrap().into_iter().map(|x| if x == from { to } else { x }).collect();
    e2.sort_unstable();
    if !pe.host.contains_sorted(&e2) {
        return invalid(format!("{e2:?} is not a host edge, so there is no diamond"));
    }
    Ok(Switch {
        kind: SwitchKind::Diamond,
        out_set: vec![from],
        in_set: vec![to],
        remaps: vec![Remap { vertex: y, from, to }],
    })
}

/// Remap for a half-diamond `edge` whose centre moves to `to`.
pub(crate) fn half_diamond_remap(pe: &PartialEmbedding, edge: &Edge, center: Vertex, to: Vertex) -> Result<Remap> {
    let not = |m: String| Err(Error::NotImmersed(m));
    let Some(y) = pe.owner.get(center).copied().flatten() else {
        return not(format!("centre {center} of {edge:?} is not covered"));
    };
    let VertexRole::Expansion { edge: e, .. } = pe.target.role(y) else {
        return not(format!("centre {center} of {edge:?} is an anchor image"));
    };
    if !pe.embedded[e] || pe.edge_image(e).as_ref() != Some(edge) {
        return not(format!("no embedded tree edge maps onto {edge:?}"));
    }
    Ok(Remap { vertex: y, from: center, to })
}

/// Remaps for a t-star `cur` (centre `center`, leaf anchors `pins`) moving
/// onto the star `other` with centre `to_center` and the same pins. Block
/// vertices keep their relative order by image, so moving back restores the
/// original map.
pub(crate) fn star_remaps(
    pe: &PartialEmbedding,
    center: Vertex,
    to_center: Vertex,
    cur: &[Edge],
    other: &[Edge],
    pins: &[Vertex],
) -> Result<Vec<Remap>> {
    let not = |m: String| Err(Error::NotImmersed(m));
    let Some(u) = pe.owner.get(center).copied().flatten() else {
        return not(format!("star centre {center} is not covered"));
    };
    let t = pe.target.base();
    if !pe.target.is_anchor(u) || t.degree(u) != cur.len() {
        return not(format!("star centre {center} is not the image of a degree-{} anchor", cur.len()));
    }
    let mut remaps = vec![Remap { vertex: u, from: center, to: to_center }];
    let mut hit = vec![false; cur.len()];
    for &w in t.neighbours(u) {
        let e = t.edge_index(u, w).unwrap();
        let img = if pe.embedded[e] { pe.edge_image(e) } else { None };
        let Some(i) = img.and_then(|img| cur.iter().position(|c| *c == img)) else {
            return not(format!("edge {e} at the star centre does not map into the star"));
        };
        if hit[i] || pe.map[w] != Some(pins[i]) {
            return not(format!("edge {e} does not keep its leaf anchor on {}", pins[i]));
        }
        hit[i] = true;
        let mut block: Vec<(Vertex, usize)> = pe.target.block(e).iter().map(|&b| (pe.map[b].unwrap(), b)).collect();
        block.sort_unstable();
        let dest: Vec<Vertex> = other[i].iter().copied().filter(|&x| x != to_center && x != pins[i]).collect();
        if dest.len() != block.len() {
            return Err(Error::Invariant("star edges have mismatched sizes".into()));
        }
        for ((from, b), to) in block.into_iter().zip(dest) {
            remaps.push(Remap { vertex: b, from, to });
        }
    }
    Ok(remaps)
}

pub(crate) fn star_shape(cur: &[Edge], other: &[Edge]) -> Result<(Vertex, Vertex, Vec<Vertex>)> {
    let centre = |half: &[Edge]| half[0].iter().copied().find(|v| half.iter().all(|e| e.contains(v)));
    let (Some(c), Some(c2)) = (centre(cur), centre(other)) else {
        return Err(Error::Invariant("balancer half without a centre".into()));
    };
    let pins = cur
        .iter()
        .zip(other)
        .map(|(a, b)| {
            a.iter().copied().find(|v| b.contains(v)).ok_or_else(|| Error::Invariant("unmatched star edges".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((c, c2, pins))
}

/// The star switch of a balancer: the centre moves between x1 and x2 and the
/// t edges re-route between f_{1,i} and f_{2,i}.
pub fn star_switch(pe: &PartialEmbedding, b: &Balancer, direction: Direction) -> Result<Switch> {
    let (s, o) = match direction {
        Direction::Forward => (0, 1),
        Direction::Backward => (1, 0),
    };
    let (c, c2, pins) = star_shape(&b.f[s], &b.f[o])?;
    let remaps = star_remaps(pe, c, c2, &b.f[s], &b.f[o], &pins)?;
    let verts = |l: usize| -> BTreeSet<Vertex> { b.f[l].iter().flatten().copied().collect() };
    let (vs, vo) = (verts(s), verts(o));
    Ok(Switch {
        kind: SwitchKind::Star,
        out_set: vs.difference(&vo).copied().collect(),
        in_set: vo.difference(&vs).copied().collect(),
        remaps,
    })
}

/// The composite switch moving every constituent of `g` off the half in use
/// and onto the other one.
pub fn switch_from_gadget_half(pe: &PartialEmbedding, g: &Gadget, direction: Direction) -> Result<Switch> {
    let side = match direction {
        Direction::Forward => 0,
        Direction::Backward => 1,
    };
    let mut remaps = Vec::new();
    for (p, &f) in g.parts.iter().zip(&g.flipped) {
        let cur = &p.halves[side ^ usize::from(f)];
        let other = &p.halves[(1 - side) ^ usize::from(f)];
        match p.kind {
            ConstituentKind::Chain => {
                for (e, e2) in cur.iter().zip(other) {
                    let c = e.iter().copied().find(|v| !e2.contains(v));
                    let c2 = e2.iter().copied().find(|v| !e.contains(v));
                    let (Some(c), Some(c2)) = (c, c2) else {
                        return Err(Error::Invariant("chain step is not a diamond".into()));
                    };
                    remaps.push(half_diamond_remap(pe, e, c, c2)?);
                }
            }
            ConstituentKind::Balancer => {
                let (c, c2, pins) = star_shape(cur, other)?;
                remaps.extend(star_remaps(pe, c, c2, cur, other, &pins)?);
            }
        }
    }
    let (out_set, in_set) = match direction {
        Direction::Forward => (g.x1.clone(), g.x2.clone()),
        Direction::Backward => (g.x2.clone(), g.x1.clone()),
    };
    let kind = match (g.parts.len(), g.parts[0].kind, g.parts[0].halves[0].len()) {
        (1, ConstituentKind::Chain, 1) => SwitchKind::Diamond,
        (1, ConstituentKind::Balancer, _) => SwitchKind::Star,
        _ => SwitchKind::GadgetHalf,
    };
    Ok(Switch { kind, out_set, in_set, remaps })
}
