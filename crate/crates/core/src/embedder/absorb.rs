use std::collections::BTreeSet;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use super::family::{absorbs, FamilyMember};
use super::{apply_switch, switch_from_gadget_half, Direction, PartialEmbedding, Switch};
use crate::combinat::factorial;
use crate::error::{invalid, Error, Result};
use crate::gadgetry::PiType;
use crate::hypercore::{Partition, Vertex};
use crate::treekit::OrderedEdge;

/// Parity data used by the balanced variant of the loop.
#[derive(Clone, Debug)]
pub struct ParityGuide {
    pub partition: Partition,
    pub pi: PiType,
    /// Choose Z by the parity rule rather than lexicographically.
    pub balanced: bool,
}

#[derive(Clone, Debug, Default)]
pub struct AbsorbConfig {
    pub parity: Option<ParityGuide>,
    /// Allow absorbing a later pending edge when the next one is stuck.
    pub reorder: bool,
    /// Cap on candidate sets Z tried per step.
    pub max_candidates: usize,
}

/// One absorption step with the three inductive conditions checked after it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbsorbStep {
    pub edge: usize,
    pub w: Vertex,
    pub z: Vec<Vertex>,
    pub member: usize,
    pub freed: Vec<Vertex>,
    pub leftover_a: Option<usize>,
    pub leftover_b: Option<usize>,
    pub retired: usize,
    /// Image grew by exactly Z.
    pub grew_by_z: bool,
    /// Retired count within i (k-1)!.
    pub retired_bounded: bool,
    /// Every unretired member still immersed.
    pub rest_immersed: bool,
}

impl AbsorbStep {
    pub fn invariants_hold(&self) -> bool {
        self.grew_by_z && self.retired_bounded && self.rest_immersed
    }
}

#[derive(Clone, Debug)]
pub struct AbsorbRun {
    pub pe: PartialEmbedding,
    pub steps: Vec<AbsorbStep>,
    pub switches: Vec<Switch>,
    pub retired: Vec<bool>,
}

/// c(k) ∈ {0, 1} with c(k) ≡ k - 1 (mod 2).
pub fn c_of_k(k: usize) -> usize {
    (k - 1) % 2
}

fn a_count(part: &Partition, xs: &[Vertex]) -> usize {
    xs.iter().filter(|&&v| part.in_a(v)).count()
}

/// Candidate sets Z, in the order they are tried.
fn candidates(free: &[Vertex], k: usize, guide: Option<&ParityGuide>, w: Vertex, cap: usize) -> Vec<Vec<Vertex>> {
    let Some(g) = guide.filter(|g| g.balanced) else {
        return free.iter().copied().combinations(k - 1).take(cap).collect();
    };
    let (fa, fb): (Vec<Vertex>, Vec<Vertex>) = free.iter().copied().partition(|&v| g.partition.in_a(v));
    let skew = fa.len() as i64 - fb.len() as i64;
    let want = g.pi.pi[w] as usize;
    // z_a values with the right parity, best balance first; ties go to the
    // extremal choice in the direction of the skew
    let mut zas: Vec<usize> = (0..k).filter(|&za| za % 2 == want && za <= fa.len() && k - 1 - za <= fb.len()).collect();
    zas.sort_by_key(|&za| {
        let after = skew - 2 * za as i64 + (k as i64 - 1);
        let tie = if skew > 0 { -(za as i64) } else { za as i64 };
        (after.abs(), tie)
    });
    let mut out = Vec::new();
    for za in zas {
        for a in fa.iter().copied().combinations(za) {
            for b in fb.iter().copied().combinations(k - 1 - za) {
                let mut z: Vec<Vertex> = a.iter().chain(&b).copied().collect();
                z.sort_unstable();
                out.push(z);
                if out.len() >= cap {
                    return out;
                }
            }
        }
    }
    out
}

fn diagnose(pe: &PartialEmbedding, oe: &OrderedEdge, guide: Option<&ParityGuide>, members_left: usize) -> String {
    let k = pe.host().k();
    let w = pe.get(oe.parent).unwrap();
    let free = pe.free();
    let mut msg = format!("edge {} at w = {w}: {} free vertices, {members_left} members left", oe.edge, free.len());
    if let Some(g) = guide {
        let fa = a_count(&g.partition, &free);
        let parities: BTreeSet<usize> =
            (0..k).filter(|&za| za <= fa && k - 1 - za <= free.len() - fa).map(|za| za % 2).collect();
        let pi = g.pi.pi[w] as usize;
        msg.push_str(&format!(
            "; pi(w) = {pi}, leftover |A| = {fa}, |B| = {}, candidate |Z ∩ A| parities {parities:?}",
            free.len() - fa
        ));
        if !parities.contains(&pi) {
            msg.push_str("; pi mismatch");
        }
    }
    msg
}

/// Absorbs the `remaining` leaf edges one at a time. For each edge at w the
/// loop looks for a free (k-1)-set Z and an unretired member that absorbs
/// (w, Z), switches the member's used half over to Z and embeds the edge on
/// the freed X1.
pub fn absorb_loop(
    pe: &PartialEmbedding,
    family: &[FamilyMember],
    remaining: &[OrderedEdge],
    cfg: &AbsorbConfig,
) -> Result<AbsorbRun> {
    let k = pe.host().k();
    let bound = factorial(k - 1) as usize;
    let cap = if cfg.max_candidates == 0 { 2000 } else { cfg.max_candidates };
    let mut run =
        AbsorbRun { pe: pe.clone(), steps: Vec::new(), switches: Vec::new(), retired: vec![false; family.len()] };
    let mut pending: Vec<OrderedEdge> = remaining.to_vec();
    let guide = cfg.parity.as_ref();
    while !pending.is_empty() {
        let tries: Vec<usize> = if cfg.reorder { (0..pending.len()).collect() } else { vec![0] };
        let mut done = None;
        'edges: for &pi in &tries {
            let oe = pending[pi];
            let (Some(w), None) = (run.pe.get(oe.parent), run.pe.get(oe.child)) else {
                if cfg.reorder {
                    continue;
                }
                return invalid(format!("edge {} is not a pending leaf edge", oe.edge));
            };
            let free = run.pe.free();
            for z in candidates(&free, k, guide, w, cap) {
                for (m, member) in family.iter().enumerate() {
                    if run.retired[m] {
                        continue;
                    }
                    let Some(g) = absorbs(run.pe.host(), member.gadget(), w, &z) else { continue };
                    let Ok(sw) = switch_from_gadget_half(&run.pe, &g, Direction::Forward) else { continue };
                    let switched = apply_switch(&run.pe, &sw)?;
                    let freed = g.x1.clone();
                    let mut assign = vec![(oe.child, freed[0])];
                    assign.extend(run.pe.target().block(oe.edge).iter().copied().zip(freed[1..].iter().copied()));
                    let next = switched.extend_edge(oe.edge, &assign)?;
                    done = Some((pi, m, z, freed, sw, next));
                    break 'edges;
                }
            }
        }
        let Some((pi, m, z, freed, sw, next)) = done else {
            let left = run.retired.iter().filter(|r| !**r).count();
            return Err(Error::NoMatchingTuple(diagnose(&run.pe, &pending[0], guide, left)));
        };
        let oe = pending.remove(pi);
        let before: BTreeSet<Vertex> = run.pe.image().into_iter().collect();
        let after: BTreeSet<Vertex> = next.image().into_iter().collect();
        let mut expect = before.clone();
        expect.extend(&z);
        run.retired[m] = true;
        let i = run.steps.len() + 1;
        let retired = run.retired.iter().filter(|r| **r).count();
        let rest_immersed = family
            .iter()
            .zip(&run.retired)
            .filter(|(_, r)| !**r)
            .all(|(f, _)| f.items().iter().all(|it| it.witnessed(&next)));
        let free = next.free();
        let (la, lb) = match guide {
            Some(g) => {
                let a = a_count(&g.partition, &free);
                (Some(a), Some(free.len() - a))
            }
            None => (None, None),
        };
        run.steps.push(AbsorbStep {
            edge: oe.edge,
            w: next.get(oe.parent).unwrap(),
            z,
            member: m,
            freed,
            leftover_a: la,
            leftover_b: lb,
            retired,
            grew_by_z: after == expect && after.len() == before.len() + k - 1,
            retired_bounded: retired <= i * bound,
            rest_immersed,
        });
        run.switches.push(sw);
        run.pe = next;
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::embedder::family::sample_absorbing_family;
    use crate::embedder::immerse::{immerse_embed, ImmersionTask};
    use crate::hypercore::Hypergraph;
    use crate::treekit::{expand, Tree};
    use crate::Config;

    #[test]
    fn zero_edges_is_identity() {
        let xt = Arc::new(expand(&Tree::path(3).unwrap(), 3).unwrap());
        let h = Arc::new(Hypergraph::complete(7, 3).unwrap());
        let pe = PartialEmbedding::new(xt, h).unwrap().place(0, 0).unwrap();
        let run = absorb_loop(&pe, &[], &[], &AbsorbConfig::default()).unwrap();
        assert_eq!(run.pe.raw_map(), pe.raw_map());
        assert!(run.steps.is_empty());
    }

    #[test]
    fn absorbs_one_leaf() {
        // tree: path of 12 plus a leaf hanging off vertex 5; N = 2 * 13 - 1
        let mut edges: Vec<(usize, usize)> = (1..12).map(|i| (i - 1, i)).collect();
        edges.push((5, 12));
        let t = Tree::new(13, edges).unwrap();
        let h = Hypergraph::complete(25, 3).unwrap();
        let s = sample_absorbing_family(&h, 1, 4).unwrap();
        let family: Vec<FamilyMember> = s.family.into_iter().map(FamilyMember::Tuple).collect();
        let items = family.iter().flat_map(|f| f.items()).collect();
        let task = ImmersionTask::new(items).unwrap();
        // embed everything but the leaf edge
        let xt = Arc::new(expand(&t, 3).unwrap());
        let sub = t.induced(&(0..12).collect::<Vec<_>>()).unwrap();
        let small = immerse_embed(&h, &sub, 3, &task, &Config::default(), 1).unwrap();
        let mut map = vec![None; xt.num_vertices()];
        let mut embedded = vec![false; 12];
        for e in 0..11 {
            embedded[e] = true;
            let (u, v) = t.edges()[e];
            map[u] = small.get(u);
            map[v] = small.get(v);
            map[xt.block(e)[0]] = small.get(small.target().block(e)[0]);
        }
        let pe = PartialEmbedding::from_parts(xt, Arc::new(h.clone()), map, embedded).unwrap();
        let leaf = OrderedEdge { edge: 11, parent: 5, child: 12 };
        let run = absorb_loop(&pe, &family, &[leaf], &AbsorbConfig::default()).unwrap();
        assert!(run.pe.is_complete());
        assert_eq!(run.steps.len(), 1);
        assert!(run.steps[0].invariants_hold());
    }
}
