use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::Orientation;
use crate::combinat::{derive_seed, for_each_subset, rng, Rng};
use crate::error::{invalid, Result};
use crate::hypercore::{Edge, Hypergraph, Partition, Vertex};

fn check_sides(part: &Partition, n: usize) -> Result<()> {
    if part.labels.len() != n {
        return invalid("partition length differs from host order");
    }
    let a = part.labels.iter().filter(|&&c| c == 0).count();
    if a == 0 || a == n {
        return invalid("both sides of the partition must be nonempty");
    }
    Ok(())
}

/// Three edges S ∪ X_i over a (k-3)-set base S with
/// |X1∩A| = |X2∩A| = |X1∩X2| = |X1∩X2∩A| = 2, |X3∩A| = 0 and
/// |X1∩X3| = |X2∩X3| = 1, where A is read through `orientation`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProtoBalancer {
    pub base: Vec<Vertex>,
    pub x: [Vec<Vertex>; 3],
    pub orientation: Orientation,
}

impl ProtoBalancer {
    pub fn edges(&self) -> [Edge; 3] {
        self.x.clone().map(|x| {
            let mut e = self.base.clone();
            e.extend(x);
            e.sort_unstable();
            e
        })
    }

    /// |e_i ∩ A| for the three edges, A read through the orientation.
    pub fn a_counts(&self, part: &Partition) -> [usize; 3] {
        self.edges().map(|e| e.iter().filter(|&&v| self.orientation.in_a(part, v)).count())
    }

    pub fn verify(&self, h: &Hypergraph, part: &Partition) -> bool {
        let k = h.k();
        if k < 3 || self.base.len() != k - 3 || self.x.iter().any(|x| x.len() != 3) {
            return false;
        }
        let mut all: Vec<Vertex> = self.x.iter().flatten().copied().collect();
        all.sort_unstable();
        all.dedup();
        if all.len() != 5 || all.iter().any(|v| self.base.contains(v)) {
            return false;
        }
        if !self.edges().iter().all(|e| h.contains_edge(e)) {
            return false;
        }
        let in_a = |v: &&Vertex| self.orientation.in_a(part, **v);
        let a = |x: &Vec<Vertex>| x.iter().filter(in_a).count();
        let [x1, x2, x3] = &self.x;
        let x12: Vec<Vertex> = x1.iter().copied().filter(|v| x2.contains(v)).collect();
        a(x1) == 2
            && a(x2) == 2
            && x12.len() == 2
            && x12.iter().filter(in_a).count() == 2
            && a(x3) == 0
            && x1.iter().filter(|v| x3.contains(v)).count() == 1
            && x2.iter().filter(|v| x3.contains(v)).count() == 1
    }
}

/// Proto-balancers of both orientations, at most `limit`.
///
/// Every proto-balancer arises from the side-forcing walk used for k = 3: a in
/// A, b in B, a' ∈ N(ab) ∩ A, b' ∈ N(aa') ∩ B, b'' ∈ N(bb') ∩ B, here run in
/// the link of each base (k-3)-set. Running it from every start with a < a'
/// and b < b' lists each proto-balancer exactly once, so the walk doubles as
/// the exhaustive search. `budget` bounds the number of candidate triples.
pub fn find_proto_balancers(h: &Hypergraph, part: &Partition, limit: usize, budget: u64) -> Result<Vec<ProtoBalancer>> {
    let n = h.n();
    let k = h.k();
    check_sides(part, n)?;
    if k < 3 {
        return invalid("proto-balancers need k >= 3");
    }
    let mut out = Vec::new();
    let mut nodes = 0u64;
    let verts: Vec<Vertex> = (0..n).collect();
    let mut bases = Vec::new();
    for_each_subset(&verts, k - 3, |s| bases.push(s.to_vec()));
    'outer: for base in bases {
        for orientation in [Orientation::AB, Orientation::BA] {
            let free = |v: Vertex| base.binary_search(&v).is_err();
            let a_side: Vec<Vertex> = (0..n).filter(|&v| free(v) && orientation.in_a(part, v)).collect();
            let b_side: Vec<Vertex> = (0..n).filter(|&v| free(v) && !orientation.in_a(part, v)).collect();
            if a_side.is_empty() || b_side.is_empty() {
                continue;
            }
            let is_edge = |xs: [Vertex; 3]| {
                let mut e = base.clone();
                e.extend_from_slice(&xs);
                h.contains_edge(&e)
            };
            for (i, &a) in a_side.iter().enumerate() {
                for &a2 in &a_side[i + 1..] {
                    let nb: Vec<Vertex> = b_side.iter().copied().filter(|&b| is_edge([a, a2, b])).collect();
                    for (j, &b) in nb.iter().enumerate() {
                        for &b2 in &nb[j + 1..] {
                            for &b3 in &b_side {
                                nodes += 1;
                                if nodes > budget {
                                    break 'outer;
                                }
                                if b3 == b || b3 == b2 || !is_edge([b, b2, b3]) {
                                    continue;
                                }
                                out.push(ProtoBalancer {
                                    base: base.clone(),
                                    x: [vec![a, a2, b], vec![a, a2, b2], vec![b, b2, b3]],
                                    orientation,
                                });
                                if out.len() >= limit {
                                    break 'outer;
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// A k-expansion of K_{2,t} with anchors x1, x2 and y_1..y_t, and edges
/// f[l][i] through x_{l+1} and y_i, coloured as a (t_A, t_B)-balancer with
/// respect to the partition read through `orientation`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Balancer {
    pub t_a: usize,
    pub t_b: usize,
    pub orientation: Orientation,
    pub x: [Vertex; 2],
    pub y: Vec<Vertex>,
    pub f: [Vec<Edge>; 2],
}

impl Balancer {
    pub fn t(&self) -> usize {
        self.t_a + self.t_b
    }

    /// 1 + t_B - t_A: the change in B-vertices when switching from J1 to J2.
    pub fn capacity(&self) -> i64 {
        1 + self.t_b as i64 - self.t_a as i64
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        let mut v: Vec<Vertex> = self.f.iter().flatten().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    fn half_vertices(&self, l: usize) -> Vec<Vertex> {
        let mut v: Vec<Vertex> = self.f[l].iter().flatten().copied().collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// |V(J2) ∩ B| - |V(J1) ∩ B|, B read through the orientation.
    pub fn b_delta(&self, part: &Partition) -> i64 {
        let b = |l: usize| self.half_vertices(l).iter().filter(|&&v| !self.orientation.in_a(part, v)).count() as i64;
        b(1) - b(0)
    }

    /// The uncoloured shape: a k-expansion of K_{2,t} with the stated anchors.
    pub fn verify_shape(&self, k: usize) -> bool {
        let t = self.t();
        if self.y.len() != t || self.f[0].len() != t || self.f[1].len() != t || t == 0 {
            return false;
        }
        for l in 0..2 {
            for (i, e) in self.f[l].iter().enumerate() {
                if e.len() != k || !e.contains(&self.x[l]) || !e.contains(&self.y[i]) || e.contains(&self.x[1 - l]) {
                    return false;
                }
            }
        }
        self.vertices().len() == 2 + t + 2 * t * (k - 2)
    }

    /// Shape, host edges, the four colour conditions and the capacity identity.
    pub fn verify(&self, h: &Hypergraph, part: &Partition) -> bool {
        if !self.verify_shape(h.k()) || !self.f.iter().flatten().all(|e| h.contains_edge(e)) {
            return false;
        }
        let in_a = |v: Vertex| self.orientation.in_a(part, v);
        if !in_a(self.x[0]) || in_a(self.x[1]) {
            return false;
        }
        for i in 0..self.t() {
            if in_a(self.y[i]) != (i < self.t_a) {
                return false;
            }
            let interior_b = |l: usize| {
                self.f[l][i].iter().filter(|&&v| v != self.x[l] && v != self.y[i] && !in_a(v)).count() as i64
            };
            let want = if i < self.t_a { 1 } else { -1 };
            if interior_b(0) - interior_b(1) != want {
                return false;
            }
        }
        self.b_delta(part) == self.capacity()
    }
}

/// Randomized backtracking for one balancer avoiding `blocked`.
pub(crate) struct BalancerSearch<'a> {
    pub h: &'a Hypergraph,
    pub part: &'a Partition,
    pub t_a: usize,
    pub t_b: usize,
    pub budget: u64,
    pub nodes: u64,
}

impl BalancerSearch<'_> {
    fn extend(&mut self, i: usize, b: &mut Balancer, used: &mut [bool], rng: &mut Rng) -> Option<bool> {
        let t = self.t_a + self.t_b;
        if i == t {
            return Some(true);
        }
        let orient = b.orientation;
        let in_a = |v: Vertex| orient.in_a(self.part, v);
        let want_a = i < self.t_a;
        let mut ys: Vec<Vertex> = (0..self.h.n()).filter(|&y| !used[y] && in_a(y) == want_a).collect();
        ys.shuffle(rng);
        for y in ys {
            let through = |x: Vertex, used: &[bool]| -> Vec<Edge> {
                self.h
                    .incident(y)
                    .iter()
                    .map(|&e| self.h.edge(e))
                    .filter(|e| e.contains(&x) && e.iter().all(|&v| v == x || v == y || !used[v]))
                    .map(<[Vertex]>::to_vec)
                    .collect()
            };
            let mut f1s = through(b.x[0], used);
            if f1s.is_empty() {
                continue;
            }
            let mut f2s = through(b.x[1], used);
            f1s.shuffle(rng);
            f2s.shuffle(rng);
            let interior_b = |e: &Edge, x: Vertex| e.iter().filter(|&&v| v != x && v != y && !in_a(v)).count() as i64;
            for f1 in &f1s {
                for f2 in &f2s {
                    self.nodes += 1;
                    if self.nodes > self.budget {
                        return None;
                    }
                    if f2.iter().any(|v| *v != y && f1.contains(v)) {
                        continue;
                    }
                    let d = interior_b(f1, b.x[0]) - interior_b(f2, b.x[1]);
                    if d != if want_a { 1 } else { -1 } {
                        continue;
                    }
                    for &v in f1.iter().chain(f2) {
                        used[v] = true;
                    }
                    b.y.push(y);
                    b.f[0].push(f1.clone());
                    b.f[1].push(f2.clone());
                    match self.extend(i + 1, b, used, rng) {
                        Some(true) => return Some(true),
                        None => return None,
                        Some(false) => {}
                    }
                    b.y.pop();
                    b.f[0].pop();
                    b.f[1].pop();
                    for &v in f1.iter().chain(f2) {
                        if v != b.x[0] && v != b.x[1] {
                            used[v] = false;
                        }
                    }
                }
            }
        }
        Some(false)
    }

    /// Tries anchor pairs, preferred ones first, until a balancer is found or
    /// the budget runs out.
    pub fn run(
        &mut self,
        orientation: Orientation,
        preferred: &[(Vertex, Vertex)],
        blocked: &[bool],
        rng: &mut Rng,
    ) -> Option<Balancer> {
        let in_a = |v: Vertex| orientation.in_a(self.part, v);
        let mut xs1: Vec<Vertex> = (0..self.h.n()).filter(|&v| !blocked[v] && in_a(v)).collect();
        let mut xs2: Vec<Vertex> = (0..self.h.n()).filter(|&v| !blocked[v] && !in_a(v)).collect();
        xs1.shuffle(rng);
        xs2.shuffle(rng);
        let mut pairs: Vec<(Vertex, Vertex)> =
            preferred.iter().copied().filter(|&(a, b)| !blocked[a] && !blocked[b] && in_a(a) && !in_a(b)).collect();
        let mut rest: Vec<(Vertex, Vertex)> = xs1.iter().flat_map(|&a| xs2.iter().map(move |&b| (a, b))).collect();
        rest.shuffle(rng);
        pairs.extend(rest);
        for (x1, x2) in pairs {
            if self.nodes > self.budget {
                return None;
            }
            let mut used = blocked.to_vec();
            used[x1] = true;
            used[x2] = true;
            let mut b = Balancer {
                t_a: self.t_a,
                t_b: self.t_b,
                orientation,
                x: [x1, x2],
                y: Vec::new(),
                f: [Vec::new(), Vec::new()],
            };
            match self.extend(0, &mut b, &mut used, rng) {
                Some(true) => return Some(b),
                None => return None,
                Some(false) => {}
            }
        }
        None
    }
}

/// Distinct (t_A, t_B)-balancers of either orientation found by seeded
/// randomized backtracking within `budget` nodes in total. Anchor pairs (a1,
/// b1) of proto-balancers are tried first: the lemma's homomorphism sends x1
/// to a1 and x2 to b1.
pub fn find_balancers(
    h: &Hypergraph,
    part: &Partition,
    t_a: usize,
    t_b: usize,
    limit: usize,
    seed: u64,
    budget: u64,
) -> Result<Vec<Balancer>> {
    check_sides(part, h.n())?;
    if t_a == 0 || t_b == 0 {
        return invalid("balancers need t_A, t_B >= 1");
    }
    let protos = find_proto_balancers(h, part, 16, budget / 4)?;
    let mut orients: Vec<Orientation> = protos.iter().map(|p| p.orientation).collect();
    orients.extend([Orientation::AB, Orientation::BA]);
    orients.dedup();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    let mut search = BalancerSearch { h, part, t_a, t_b, budget, nodes: 0 };
    let blocked = vec![false; h.n()];
    for attempt in 0..(4 * limit as u64 + 8) {
        if out.len() >= limit || search.nodes > budget {
            break;
        }
        let mut g = rng(derive_seed(seed, attempt));
        let o = orients[attempt as usize % orients.len()];
        let preferred: Vec<(Vertex, Vertex)> = protos
            .iter()
            .filter(|p| p.orientation == o)
            .map(|p| {
                let b1 = p.x[0].iter().copied().find(|v| p.x[2].contains(v)).unwrap();
                (p.x[0][0], b1)
            })
            .collect();
        if let Some(b) = search.run(o, &preferred, &blocked, &mut g) {
            if !b.verify(h, part) {
                return Err(crate::Error::Invariant("balancer search produced an invalid balancer".into()));
            }
            if seen.insert(b.clone()) {
                out.push(b);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::build_parity_construction;

    #[test]
    fn parity_has_ba_proto_balancers_only() {
        let p = build_parity_construction(3, 6).unwrap();
        let part = p.partition();
        let found = find_proto_balancers(&p.h, &part, usize::MAX, u64::MAX).unwrap();
        assert!(!found.is_empty());
        assert!(found.iter().all(|pb| pb.orientation == Orientation::BA && pb.verify(&p.h, &part)));
        for pb in &found {
            let [c1, c2, c3] = pb.a_counts(&part);
            assert!(c1 == c2 && c1 == c3 + 2);
        }
    }

    #[test]
    fn proto_balancer_needs_both_sides() {
        let h = Hypergraph::complete(6, 3).unwrap();
        let part = Partition::bipartition(&[true; 6]);
        assert!(find_proto_balancers(&h, &part, 1, 1000).is_err());
    }

    #[test]
    fn parity_balancers_have_right_capacity() {
        // At N = 11 a (2,1)-balancer would need 6 vertices on the oriented A side, which has 5.
        let p = build_parity_construction(3, 8).unwrap();
        let part = p.partition();
        for (ta, tb) in [(1, 1), (2, 1), (1, 2)] {
            let bs = find_balancers(&p.h, &part, ta, tb, 3, 7, 200_000).unwrap();
            assert!(!bs.is_empty(), "no ({ta},{tb})-balancer");
            for b in &bs {
                assert!(b.verify(&p.h, &part));
                assert_eq!(b.b_delta(&part), 1 + tb as i64 - ta as i64);
            }
        }
    }
}
