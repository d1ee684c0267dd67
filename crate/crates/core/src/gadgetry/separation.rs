use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::diamonds::Graph;
use crate::combinat::{derive_seed, rng};
use crate::error::{Error, Result};
use crate::Rational;

/// Random starting cuts tried by the heuristic besides the singleton cuts.
const HEURISTIC_STARTS: u64 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeparationMode {
    /// Scan all bipartitions; needs n at most the configured cap.
    Exact { cap: usize },
    /// Local-move descent on the ratio e(U1, U2) / (|U1| |U2|).
    Heuristic { seed: u64 },
}

/// A bipartition minimizing (exact mode) or locally minimizing the cut ratio,
/// which is a μ-separation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Separation {
    pub u1: Vec<usize>,
    pub u2: Vec<usize>,
    pub mu: Rational,
    pub cross_edges: usize,
    pub ratio: Rational,
    /// True when the cut is a global minimizer.
    pub exact: bool,
    /// Whether G[U1] and G[U2] are μ-inseparable; `None` when a side exceeds
    /// the exact cap in heuristic mode.
    pub inseparable: [Option<bool>; 2],
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeparationOutcome {
    Separated(Separation),
    /// No μ-separation was found. `exact` says whether this is a proof.
    Inseparable {
        min_ratio: Option<Rational>,
        exact: bool,
    },
}

impl SeparationOutcome {
    pub fn separation(&self) -> Option<&Separation> {
        match self {
            SeparationOutcome::Separated(s) => Some(s),
            SeparationOutcome::Inseparable { .. } => None,
        }
    }
}

#[derive(Clone, Copy)]
struct Cut {
    cross: usize,
    ab: usize,
}

impl Cut {
    fn less(self, other: Cut) -> bool {
        (self.cross as u128) * (other.ab as u128) < (other.cross as u128) * (self.ab as u128)
    }

    fn below(self, mu: Rational) -> bool {
        (self.cross as i128) * (*mu.denom() as i128) < (*mu.numer() as i128) * (self.ab as i128)
    }
}

/// Exact ratio-cut minimizer by Gray-code enumeration; vertex 0 stays in U1.
fn exact_min_cut(g: &Graph) -> Option<(Vec<bool>, Cut)> {
    let n = g.n;
    if n < 2 {
        return None;
    }
    let adj: Vec<u64> = g.adj.iter().map(|l| l.iter().fold(0u64, |m, &w| m | (1 << w))).collect();
    let mut mask = 0u64; // members of U2
    let mut cross: i64 = 0;
    let mut size2 = 0usize;
    let mut best: Option<(u64, Cut)> = None;
    for step in 1u64..(1u64 << (n - 1)) {
        let v = step.trailing_zeros() as usize + 1;
        let bit = 1u64 << v;
        let to_u2 = (adj[v] & mask).count_ones() as i64;
        let to_u1 = (adj[v] & !mask & !bit).count_ones() as i64;
        if mask & bit == 0 {
            cross += to_u1 - to_u2;
            mask |= bit;
            size2 += 1;
        } else {
            cross += to_u2 - to_u1;
            mask &= !bit;
            size2 -= 1;
        }
        let cut = Cut { cross: cross as usize, ab: size2 * (n - size2) };
        if best.is_none_or(|(_, b)| cut.less(b)) {
            best = Some((mask, cut));
        }
    }
    best.map(|(m, c)| ((0..n).map(|v| m & (1 << v) == 0).collect(), c))
}

fn heuristic_min_cut(g: &Graph, seed: u64) -> Option<(Vec<bool>, Cut)> {
    let n = g.n;
    if n < 2 {
        return None;
    }
    let mut starts: Vec<Vec<bool>> = (0..n).map(|v| (0..n).map(|w| w != v).collect()).collect();
    for s in 0..HEURISTIC_STARTS {
        let mut r = rng(derive_seed(seed, s));
        let side: Vec<bool> = (0..n).map(|_| r.gen_bool(0.5)).collect();
        if side.iter().any(|&b| b) && side.iter().any(|&b| !b) {
            starts.push(side);
        }
    }
    let mut best: Option<(Vec<bool>, Cut)> = None;
    for mut side in starts {
        let mut size1 = side.iter().filter(|&&b| b).count();
        let mut cross = g.cross_edges(&side);
        loop {
            let cur = Cut { cross, ab: size1 * (n - size1) };
            let mut pick: Option<(usize, Cut)> = None;
            for v in 0..n {
                let s1 = if side[v] { size1 - 1 } else { size1 + 1 };
                if s1 == 0 || s1 == n {
                    continue;
                }
                let same = g.adj[v].iter().filter(|&&w| side[w] == side[v]).count();
                let other = g.adj[v].len() - same;
                let c = cross + same - other;
                let cand = Cut { cross: c, ab: s1 * (n - s1) };
                if cand.less(pick.map_or(cur, |p| p.1)) {
                    pick = Some((v, cand));
                }
            }
            let Some((v, c)) = pick else { break };
            size1 = if side[v] { size1 - 1 } else { size1 + 1 };
            side[v] = !side[v];
            cross = c.cross;
        }
        let cut = Cut { cross, ab: size1 * (n - size1) };
        if best.as_ref().is_none_or(|(_, b)| cut.less(*b)) {
            best = Some((side, cut));
        }
    }
    best
}

/// Whether `g` has no μ-separation, decided exactly.
pub fn is_inseparable(g: &Graph, mu: Rational) -> bool {
    exact_min_cut(g).is_none_or(|(_, c)| !c.below(mu))
}

/// Looks for a μ-separation of `g`. In exact mode the returned cut minimizes
/// e(U1, U2) / (|U1| |U2|), and both sides are then checked for
/// μ-inseparability exactly.
pub fn find_separation(g: &Graph, mu: Rational, mode: SeparationMode) -> Result<SeparationOutcome> {
    let (best, exact, cap) = match mode {
        SeparationMode::Exact { cap } => {
            if g.n > cap.min(64) {
                return Err(Error::SizeCap(format!("exact separation scan needs n <= {cap}, got {}", g.n)));
            }
            (exact_min_cut(g), true, cap.min(64))
        }
        SeparationMode::Heuristic { seed } => (heuristic_min_cut(g, seed), false, 0),
    };
    let Some((side, cut)) = best else {
        return Ok(SeparationOutcome::Inseparable { min_ratio: None, exact: true });
    };
    let ratio = Rational::new(cut.cross as i64, cut.ab as i64);
    if !cut.below(mu) {
        return Ok(SeparationOutcome::Inseparable { min_ratio: Some(ratio), exact });
    }
    let u1: Vec<usize> = (0..g.n).filter(|&v| side[v]).collect();
    let u2: Vec<usize> = (0..g.n).filter(|&v| !side[v]).collect();
    let check = |part: &[usize]| (part.len() <= cap).then(|| is_inseparable(&g.induced(part), mu));
    let inseparable = [check(&u1), check(&u2)];
    Ok(SeparationOutcome::Separated(Separation { u1, u2, mu, cross_edges: cut.cross, ratio, exact, inseparable }))
}
