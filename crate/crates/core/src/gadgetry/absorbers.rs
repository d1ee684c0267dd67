use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::balancers::BalancerSearch;
use super::chains::ChainFinder;
use super::gadget::{gadget_compose, gadget_merge, gadget_union, Gadget};
use super::Orientation;
use crate::combinat::{binomial, derive_seed, rng, Rng};
use crate::error::{invalid, Error, Result};
use crate::hypercore::{Edge, Hypergraph, Partition, Vertex};
use crate::Rational;

/// π(w) = 0 iff at least `share`·C(n-1, k-1) sets W ∈ N(w) have |W ∩ A| even.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiType {
    pub pi: Vec<u8>,
    pub even: Vec<u64>,
    pub odd: Vec<u64>,
    pub share: Rational,
    /// C(n-1, k-1).
    pub scale: u64,
    /// Vertices with empty neighbourhood, given π = 0 by convention.
    pub defaulted: Vec<Vertex>,
}

pub fn pi_type(h: &Hypergraph, part: &Partition, share: Rational) -> PiType {
    let n = h.n();
    let mut even = vec![0u64; n];
    let mut odd = vec![0u64; n];
    for e in h.edges() {
        let a = e.iter().filter(|&&v| part.in_a(v)).count();
        for &w in e {
            if (a - usize::from(part.in_a(w))) % 2 == 0 {
                even[w] += 1;
            } else {
                odd[w] += 1;
            }
        }
    }
    let scale = binomial(n.saturating_sub(1), h.k() - 1);
    let (num, den) = (*share.numer() as i128, *share.denom() as i128);
    let mut defaulted = Vec::new();
    let pi = (0..n)
        .map(|w| {
            if even[w] + odd[w] == 0 {
                defaulted.push(w);
                0
            } else {
                u8::from(even[w] as i128 * den < num * scale as i128)
            }
        })
        .collect();
    PiType { pi, even, odd, share, scale, defaulted }
}

/// The half of a t-absorbing gadget that is used before absorption: a
/// (W, S, t)-gadget L avoiding w, with W ∪ {w} an edge. Switching L from the
/// half containing W to the one containing S frees W for the edge at w.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityAbsorber {
    pub w: Vertex,
    pub s: Vec<Vertex>,
    pub witness: Vec<Vertex>,
    /// Boundaries: `x1` is the witness W, `x2` is S.
    pub gadget: Gadget,
    /// |V(L)| - k + 1.
    pub size: usize,
}

impl ParityAbsorber {
    /// The parity-absorber proper: the half holding W, which avoids S.
    pub fn absorber_half(&self) -> Vec<Edge> {
        self.gadget.half(0).into_iter().map(|(_, e)| e).collect()
    }

    pub fn verify(&self, h: &Hypergraph, part: &Partition, pi: &PiType) -> bool {
        let k = h.k();
        let mut e = self.witness.clone();
        e.push(self.w);
        let s_a = self.s.iter().filter(|&&v| part.in_a(v)).count();
        self.s.len() == k - 1
            && h.contains_edge(&e)
            && s_a % 2 == pi.pi[self.w] as usize
            && self.gadget.check(Some(h)).is_ok()
            && self.gadget.x1 == self.witness
            && self.gadget.x2 == self.s
            && !self.gadget.vertices().contains(&self.w)
            && self.size + k == self.gadget.vertices().len() + 1
    }
}

/// Randomized construction of gadgets between vertex sets, following the
/// induction on |X2 ∩ A| - |X1 ∩ A|: equal counts are joined coordinatewise by
/// diamond-chains, larger gaps are closed two at a time with a balancer-based
/// ({a, a'}, {b, b'}, t)-gadget.
pub struct GadgetBuilder<'a> {
    h: &'a Hypergraph,
    part: &'a Partition,
    t: usize,
    chains: ChainFinder<'a>,
    max_chain_len: usize,
    budget: u64,
    /// Vertices already claimed by the structure under construction.
    pub used: Vec<bool>,
    rng: Rng,
}

impl<'a> GadgetBuilder<'a> {
    pub fn new(h: &'a Hypergraph, part: &'a Partition, t: usize, max_chain_len: usize, budget: u64, seed: u64) -> Self {
        Self {
            h,
            part,
            t,
            chains: ChainFinder::new(h),
            max_chain_len,
            budget,
            used: vec![false; h.n()],
            rng: rng(seed),
        }
    }

    fn a_count(&self, xs: &[Vertex]) -> usize {
        xs.iter().filter(|&&v| self.part.in_a(v)).count()
    }

    fn chain(&mut self, p: Vertex, q: Vertex) -> Option<Gadget> {
        let mut blocked = self.used.clone();
        blocked[p] = false;
        blocked[q] = false;
        let c = self.chains.random(p, q, self.max_chain_len, &blocked, &mut self.rng, self.budget)?;
        for v in c.vertices() {
            self.used[v] = true;
        }
        Gadget::from_chain(&c, self.t).ok()
    }

    /// Joins p_i to q_i by vertex-disjoint chains; the pairs must share sides.
    fn chains_between(&mut self, ps: &[Vertex], qs: &[Vertex]) -> Option<Gadget> {
        let mut acc: Option<Gadget> = None;
        for (&p, &q) in ps.iter().zip(qs) {
            let c = self.chain(p, q)?;
            acc = Some(match acc {
                None => c,
                Some(g) => gadget_union(&g, &c).ok()?,
            });
        }
        acc
    }

    /// A (Y1, Y2, t)-gadget with Y1 ⊆ A, Y2 ⊆ B and |Y1| = |Y2| = c, where c
    /// is the balancer capacity (1 for even t, 2 for odd t).
    pub fn bridge(&mut self) -> Option<Gadget> {
        if self.t < 2 {
            return None;
        }
        let (t_a, t_b) = (self.t / 2, self.t - self.t / 2);
        let mut orients = [Orientation::AB, Orientation::BA];
        orients.shuffle(&mut self.rng);
        let mut found = None;
        for o in orients {
            let mut search = BalancerSearch { h: self.h, part: self.part, t_a, t_b, budget: self.budget, nodes: 0 };
            if let Some(b) = search.run(o, &[], &self.used, &mut self.rng) {
                found = Some(b);
                break;
            }
        }
        let b = found?;
        for v in b.vertices() {
            self.used[v] = true;
        }
        let o = b.orientation;
        let mut g = Gadget::from_balancer(&b).ok()?;
        let c = b.capacity() as usize;
        let in_b = |v: &Vertex| !o.in_a(self.part, *v);
        let (mut x1b, mut x1a): (Vec<Vertex>, Vec<Vertex>) = g.x1.iter().copied().partition(in_b);
        let (mut x2b, mut x2a): (Vec<Vertex>, Vec<Vertex>) = g.x2.iter().copied().partition(in_b);
        if x2b.len() != x1b.len() + c || x1a.len() != x2a.len() + c {
            return None;
        }
        x1b.shuffle(&mut self.rng);
        x2b.shuffle(&mut self.rng);
        x1a.shuffle(&mut self.rng);
        x2a.shuffle(&mut self.rng);
        let mut pairs: Vec<(Vertex, Vertex)> = x1b.iter().copied().zip(x2b.iter().copied()).collect();
        pairs.extend(x1a.iter().copied().zip(x2a.iter().copied()));
        for (p, q) in pairs {
            let ch = self.chain(p, q)?;
            g = gadget_compose(&g, &ch).ok()?;
        }
        // Y1 lies on the oriented A side; flip so that Y1 ⊆ A in the real partition.
        Some(if o == Orientation::AB { g } else { g.flip() })
    }

    /// A (Y1, Y2, t)-gadget for 2-sets Y1 ⊆ A, Y2 ⊆ B.
    pub fn pair_gadget(&mut self) -> Option<Gadget> {
        let g = self.bridge()?;
        match g.x1.len() {
            2 => Some(g),
            1 => {
                let g2 = self.bridge()?;
                (g2.x1.len() == 1).then(|| gadget_union(&g, &g2).ok()).flatten()
            }
            _ => None,
        }
    }

    /// An (X1, X2, t)-gadget for disjoint (k-1)-sets with |X1 ∩ A| ≡ |X2 ∩ A|
    /// mod 2. Both sets must already be marked in `used`.
    pub fn parity_gadget(&mut self, x1: &[Vertex], x2: &[Vertex]) -> Option<Gadget> {
        let (a1, a2) = (self.a_count(x1), self.a_count(x2));
        if a1 % 2 != a2 % 2 || x1.len() != x2.len() {
            return None;
        }
        if a1 > a2 {
            return self.parity_gadget(x2, x1).map(|g| g.flip());
        }
        if a1 == a2 {
            let side = |xs: &[Vertex], a: bool| -> Vec<Vertex> {
                xs.iter().copied().filter(|&v| self.part.in_a(v) == a).collect()
            };
            let (mut p, mut q) = (side(x1, true), side(x2, true));
            p.extend(side(x1, false));
            q.extend(side(x2, false));
            return self.chains_between(&p, &q);
        }
        let bridge = self.pair_gadget()?;
        let k = x1.len() + 1;
        let mut free_a: Vec<Vertex> = (0..self.h.n()).filter(|&v| !self.used[v] && self.part.in_a(v)).collect();
        let mut free_b: Vec<Vertex> = (0..self.h.n()).filter(|&v| !self.used[v] && !self.part.in_a(v)).collect();
        let za = a2 - 2;
        let zb = (k - 3).checked_sub(za)?;
        if free_a.len() < za || free_b.len() < zb {
            return None;
        }
        free_a.shuffle(&mut self.rng);
        free_b.shuffle(&mut self.rng);
        let z: Vec<Vertex> = free_a[..za].iter().chain(&free_b[..zb]).copied().collect();
        for &v in &z {
            self.used[v] = true;
        }
        let join = |z: &[Vertex], y: &[Vertex]| -> Vec<Vertex> {
            let mut s: Vec<Vertex> = z.iter().chain(y).copied().collect();
            s.sort_unstable();
            s
        };
        let z2 = join(&z, &bridge.x2);
        let z1 = join(&z, &bridge.x1);
        let l1 = self.parity_gadget(x1, &z2)?;
        let l2 = self.parity_gadget(&z1, x2)?;
        gadget_merge(&[(&l1, false), (&bridge, true), (&l2, false)]).ok()
    }
}

/// Parity-absorbers for (w, S): witnesses W ∈ N(w) with |W ∩ A| ≡ |S ∩ A| are
/// tried in random order and joined to S by a (W, S, t)-gadget avoiding w.
#[allow(clippy::too_many_arguments)]
pub fn find_parity_absorbers(
    h: &Hypergraph,
    part: &Partition,
    w: Vertex,
    s: &[Vertex],
    t: usize,
    limit: usize,
    seed: u64,
    cfg: &crate::Config,
) -> Result<Vec<ParityAbsorber>> {
    let k = h.k();
    let mut s = s.to_vec();
    s.sort_unstable();
    if s.len() != k - 1 || s.contains(&w) || s.windows(2).any(|p| p[0] == p[1]) {
        return invalid("S must be a (k-1)-set avoiding w");
    }
    if t == 0 {
        return invalid("t must be positive");
    }
    let pi = pi_type(h, part, cfg.pi_share);
    let s_a = s.iter().filter(|&&v| part.in_a(v)).count();
    if s_a % 2 != pi.pi[w] as usize {
        return Err(Error::ParityMismatch { s_a, pi: pi.pi[w] });
    }
    let mut witnesses: Vec<Vec<Vertex>> = h
        .neighbourhood(&[w])?
        .into_iter()
        .filter(|x| x.iter().all(|v| !s.contains(v)))
        .filter(|x| x.iter().filter(|&&v| part.in_a(v)).count() % 2 == s_a % 2)
        .collect();
    witnesses.shuffle(&mut rng(seed));
    let mut out = Vec::new();
    for (i, wit) in witnesses.iter().enumerate().take(cfg.attempt_cap) {
        if out.len() >= limit {
            break;
        }
        let mut b = GadgetBuilder::new(h, part, t, cfg.max_chain_len, cfg.search_budget, derive_seed(seed, i as u64));
        for &v in wit.iter().chain(&s).chain([&w]) {
            b.used[v] = true;
        }
        let Some(g) = b.parity_gadget(wit, &s) else { continue };
        let size = g.vertices().len() + 1 - k;
        let a = ParityAbsorber { w, s: s.clone(), witness: wit.clone(), gadget: g, size };
        if !a.verify(h, part, &pi) {
            return Err(Error::Invariant("parity-absorber failed re-verification".into()));
        }
        out.push(a);
    }
    Ok(out)
}
