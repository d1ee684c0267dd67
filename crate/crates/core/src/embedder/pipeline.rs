use std::sync::Arc;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::absorb::{absorb_loop, AbsorbConfig, ParityGuide};
use super::almost::{almost_spanning, AlmostSpec, GroupMode};
use super::balance::{balance_leftover, leftover_skew};
use super::family::{sample_tuples, FamilyMember, TupleSampling};
use super::immerse::{gadget_items, immerse_scoped, Immersion, ImmersionItem, ImmersionTask};
use super::{apply_switch, switch_from_gadget_half, Direction, PartialEmbedding, Switch};
use crate::combinat::{derive_seed, rng, Rng};
use crate::error::{invalid, Error, Result};
use crate::extremal::verify_embedding;
use crate::gadgetry::{
    diamond_graph, find_separation, pi_type, Gadget, GadgetBuilder, ParityAbsorber, PiType, SeparationMode,
};
use crate::hypercore::{select_reservoir, Hypergraph, Partition, Vertex};
use crate::treekit::{classify, expand, ExpansionTree, OrderedEdge, RootedTree, Tree};
use crate::{Config, Rational};

/// Independent attempts per pipeline call, each with its own derived seed.
const PIPELINE_ATTEMPTS: usize = 3;
/// Remainder embeddings tried per attempt before giving up on absorption.
const REMAINDER_RETRIES: u64 = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub attempt: usize,
    pub stage: String,
    /// Host vertices covered after the stage.
    pub covered: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityRecord {
    pub attempt: usize,
    pub stage: String,
    pub leftover_a: usize,
    pub leftover_b: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trace {
    pub branch: String,
    pub stages: Vec<StageRecord>,
    pub switch_log: Vec<Switch>,
    pub parity_ledger: Vec<ParityRecord>,
    pub final_map: Option<Vec<Vertex>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureReport {
    pub stage: String,
    pub diagnosis: String,
    pub parity: Option<ParityRecord>,
    pub search_budget: u64,
    pub attempt_cap: usize,
    pub attempts: usize,
}

#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub trace: Trace,
    pub outcome: std::result::Result<PartialEmbedding, FailureReport>,
}

impl PipelineRun {
    pub fn is_success(&self) -> bool {
        self.outcome.is_ok()
    }

    pub fn embedding(&self) -> Option<&PartialEmbedding> {
        self.outcome.as_ref().ok()
    }
}

/// Why an attempt stopped: an honest stage failure, or a broken invariant.
enum Stop {
    Fail(String, String),
    Bug(Error),
}

type Staged<T> = std::result::Result<T, Stop>;

fn at<T>(stage: &str, r: Result<T>) -> Staged<T> {
    r.map_err(|e| match e {
        Error::Invariant(_) => Stop::Bug(e),
        e => Stop::Fail(stage.to_string(), e.to_string()),
    })
}

struct Ctx<'a> {
    host: &'a Arc<Hypergraph>,
    xt: &'a Arc<ExpansionTree>,
    cfg: &'a Config,
    trace: &'a mut Trace,
    attempt: usize,
    part: Option<Partition>,
}

impl Ctx<'_> {
    fn record(&mut self, stage: &str, covered: usize, detail: String) {
        self.trace.stages.push(StageRecord { attempt: self.attempt, stage: stage.into(), covered, detail });
    }

    fn parity(&mut self, stage: &str, pe: &PartialEmbedding) -> Option<ParityRecord> {
        let part = self.part.as_ref()?;
        let free = pe.free();
        let a = free.iter().filter(|&&v| part.in_a(v)).count();
        let rec =
            ParityRecord { attempt: self.attempt, stage: stage.into(), leftover_a: a, leftover_b: free.len() - a };
        self.trace.parity_ledger.push(rec.clone());
        Some(rec)
    }

    fn empty(&self) -> Staged<PartialEmbedding> {
        at("setup", PartialEmbedding::new(Arc::clone(self.xt), Arc::clone(self.host)))
    }

    fn reservoir(&mut self, d: usize, seed: u64) -> Vec<bool> {
        let n = self.host.n();
        let k = self.host.k();
        let frac = self.cfg.reservoir_frac.max(Rational::new(2 * k as i64, n as i64));
        let mut mask = vec![false; n];
        match select_reservoir(self.host, frac, d, seed, self.cfg.reservoir_floor, self.cfg.attempt_cap) {
            Ok(r) => {
                for &v in &r.vertices {
                    mask[v] = true;
                }
                self.record("reservoir", 0, format!("{} vertices after {} samples", r.vertices.len(), r.attempts));
            }
            Err(e) => self.record("reservoir", 0, format!("skipped: {e}")),
        }
        mask
    }

    fn finish(&mut self, pe: PartialEmbedding) -> Staged<PartialEmbedding> {
        let ok = pe.is_complete() && pe.full_map().is_some_and(|m| verify_embedding(self.host, self.xt, &m));
        if !ok {
            return Err(Stop::Bug(Error::Invariant("pipeline produced an invalid embedding".into())));
        }
        self.record("verify", pe.image_len(), "full re-verification passed".into());
        Ok(pe)
    }
}

/// The tree rooted at a random leaf, the absorbing subtree root u (deepest
/// vertex with |T(u)| >= ν n') and up to `r` removed leaves, preferring
/// leaves outside T(u).
fn split_tree(t: &Tree, cfg: &Config, r: usize, g: &mut Rng) -> Result<(RootedTree, usize, Vec<usize>)> {
    let n = t.n();
    let root = *t.leaves().choose(g).unwrap();
    let rt = RootedTree::new(t.clone(), root)?;
    let want = (cfg.nu * Rational::from_integer(n as i64)).ceil().to_integer().max(1) as usize;
    let u = (0..n)
        .filter(|&v| v != root && rt.subtree_size[v] >= want)
        .max_by_key(|&v| (rt.depth[v], std::cmp::Reverse(rt.subtree_size[v]), std::cmp::Reverse(v)))
        .unwrap_or(root);
    let mut in_tu = vec![false; n];
    for v in rt.subtree(u) {
        in_tu[v] = true;
    }
    let mut leaves: Vec<usize> = t.leaves().into_iter().filter(|&v| v != root && v != u).collect();
    leaves.shuffle(g);
    leaves.sort_by_key(|&v| in_tu[v]);
    leaves.truncate(r);
    Ok((rt, u, leaves))
}

fn leaf_edges(rt: &RootedTree, leaves: &[usize]) -> Vec<OrderedEdge> {
    leaves
        .iter()
        .map(|&l| {
            let p = rt.parent[l].unwrap();
            OrderedEdge { edge: rt.tree.edge_index(p, l).unwrap(), parent: p, child: l }
        })
        .collect()
}

/// Immerses T(u) with as many of `members` as fit, trying the configured
/// spacing first and then smaller ones. With m members kept, the first
/// `leaves_for(m)` removed leaves stay out of the scope. Returns the
/// embedding and m.
#[allow(clippy::too_many_arguments)]
fn immerse_stage(
    cx: &mut Ctx,
    rt: &RootedTree,
    u: usize,
    removed: &[usize],
    leaves_for: &dyn Fn(usize) -> usize,
    members: &[Vec<ImmersionItem>],
    reservoir: &[bool],
    seed: u64,
) -> Staged<(PartialEmbedding, usize)> {
    let n = rt.tree.n();
    let k = cx.host.k();
    let stars = members.iter().flatten().any(|it| matches!(it, ImmersionItem::Star { .. }));
    let floor = if stars { 4 } else { 3 };
    let mut spacings = vec![cx.cfg.immersion_spacing.max(floor)];
    for s in [4, 3] {
        if s >= floor && !spacings.contains(&s) {
            spacings.push(s);
        }
    }
    let pe0 = cx.empty()?;
    let mut last = String::new();
    for m in (0..=members.len()).rev() {
        let mut scope = vec![false; n];
        for v in rt.subtree(u) {
            scope[v] = true;
        }
        for &l in &removed[..leaves_for(m).min(removed.len())] {
            scope[l] = false;
        }
        // at desk scale T(u) may not fit beside the reservoir
        let s = scope.iter().filter(|&&b| b).count();
        let room = reservoir.iter().filter(|&&r| !r).count();
        let no_avoid = vec![false; reservoir.len()];
        let avoid = if s + (k - 2) * (s - 1) > room { &no_avoid[..] } else { reservoir };
        for &spacing in &spacings {
            let task = at("immersion", ImmersionTask::new(members[..m].iter().flatten().cloned().collect()))?;
            let spec = Immersion {
                root: u,
                root_image: None,
                scope: &scope,
                avoid,
                spacing,
                budget: cx.cfg.search_budget,
                attempts: 5,
            };
            match immerse_scoped(&pe0, &task, &spec, derive_seed(seed, (spacing * 1000 + m) as u64)) {
                Ok(pe) => {
                    cx.record(
                        "immersion",
                        pe.image_len(),
                        format!(
                            "|T(u)| = {}, {m} members, {} items, spacing {spacing}",
                            rt.subtree_size[u],
                            task.len()
                        ),
                    );
                    return Ok((pe, m));
                }
                Err(e @ Error::Invariant(_)) => return Err(Stop::Bug(e)),
                Err(e) => last = e.to_string(),
            }
        }
    }
    Err(Stop::Fail("immersion".into(), last))
}

#[allow(clippy::too_many_arguments)]
fn almost_stage(
    cx: &mut Ctx,
    pe: &PartialEmbedding,
    rt: &RootedTree,
    u: usize,
    removed: &[usize],
    reservoir: &[bool],
    groups: GroupMode,
    seed: u64,
) -> Staged<PartialEmbedding> {
    let n = rt.tree.n();
    let mut scope = vec![true; n];
    for v in rt.subtree(u) {
        scope[v] = v == u;
    }
    for &l in removed {
        scope[l] = false;
    }
    let want = (cx.cfg.nu * Rational::from_integer(n as i64)).ceil().to_integer().max(1) as usize;
    let spec = AlmostSpec {
        root: u,
        scope: &scope,
        reservoir,
        cycle_len: cx.cfg.cycle_len,
        m_prime: (want / 2).max(1),
        budget: cx.cfg.search_budget,
        groups,
    };
    let (pe, rep) = at("almost-spanning", almost_spanning(pe, &spec, seed))?;
    cx.record(
        "almost-spanning",
        pe.image_len(),
        format!(
            "{} tiles over {} vertices, {} parts, {} reservoir connections, fallbacks {:?}, partition samples {} (bound met: {:?})",
            rep.tiles, rep.tiled_vertices, rep.parts, rep.connections_via_reservoir, rep.fallbacks, rep.partition_samples, rep.partition_bound_met
        ),
    );
    let k = cx.host.k();
    if pe.free().len() != (k - 1) * removed.len() {
        return Err(Stop::Bug(Error::Invariant("leftover size differs from (k-1) r".into())));
    }
    Ok(pe)
}

/// The absorbing pipeline with tuples of diamond-chains of length at most
/// `chain_len`.
fn absorbing_once(cx: &mut Ctx, d: usize, chain_len: usize, seed: u64) -> Staged<PartialEmbedding> {
    let host = Arc::clone(cx.host);
    let k = host.k();
    let t = cx.xt.base().clone();
    let n = t.n();
    let mut g = rng(derive_seed(seed, 0));
    let reservoir = cx.reservoir(d, derive_seed(seed, 1));
    let r_target = (cx.cfg.alpha * Rational::from_integer(n as i64)).ceil().to_integer().max(0) as usize;
    let (rt, u, _) = at("split", split_tree(&t, cx.cfg, 0, &mut g))?;
    let cap =
        (cx.cfg.immersion_ratio * Rational::from_integer(rt.subtree_size[u] as i64)).to_integer() as usize / (k - 1);
    let opts =
        TupleSampling { avoid: &reservoir, max_chain_len: chain_len, budget: cx.cfg.search_budget, oversample: 4 };
    let (tuples, found) = sample_tuples(&host, cap.min(cx.cfg.family_target), derive_seed(seed, 2), &opts);
    cx.record("family", 0, format!("{} disjoint tuples from {found} candidates (cap {cap})", tuples.len()));
    let members: Vec<FamilyMember> = tuples.into_iter().map(FamilyMember::Tuple).collect();
    let items: Vec<Vec<ImmersionItem>> = members.iter().map(FamilyMember::items).collect();

    let (rt, u, removed) = {
        let mut g2 = rng(derive_seed(seed, 0));
        at("split", split_tree(&t, cx.cfg, r_target.min(members.len()), &mut g2))?
    };
    cx.record(
        "split",
        0,
        format!("root {}, u = {u}, |T(u)| = {}, removed leaves {removed:?}", rt.root, rt.subtree_size[u]),
    );
    let (pe, kept) = immerse_stage(cx, &rt, u, &removed, &|m| m, &items, &reservoir, derive_seed(seed, 3))?;
    let removed: Vec<usize> = removed.into_iter().take(kept).collect();
    let acfg = AbsorbConfig { parity: None, reorder: true, max_candidates: 2000 };
    // the leftover and the parent images depend on the remainder, so a stuck
    // absorption is retried over a fresh remainder
    let mut stuck = None;
    for rep in 0..REMAINDER_RETRIES {
        let rest =
            match almost_stage(cx, &pe, &rt, u, &removed, &reservoir, GroupMode::Tiles, derive_seed(seed, 4 + rep)) {
                Err(Stop::Fail(st, d)) => {
                    stuck = Some(Stop::Fail(st, d));
                    continue;
                }
                r => r?,
            };
        let run = match at("absorb", absorb_loop(&rest, &members[..kept], &leaf_edges(&rt, &removed), &acfg)) {
            Err(Stop::Fail(st, d)) => {
                cx.record("absorb", rest.image_len(), format!("stuck: {d}"));
                stuck = Some(Stop::Fail(st, d));
                continue;
            }
            r => r?,
        };
        if run.steps.iter().any(|s| !s.invariants_hold()) {
            return Err(Stop::Bug(Error::Invariant("absorption step broke an inductive condition".into())));
        }
        cx.record("absorb", run.pe.image_len(), format!("{} leaves absorbed", run.steps.len()));
        cx.trace.switch_log.extend(run.switches);
        return cx.finish(run.pe);
    }
    Err(stuck.expect("at least one remainder"))
}

fn run_attempts(
    host: &Hypergraph,
    xt: ExpansionTree,
    cfg: &Config,
    seed: u64,
    branch: &str,
    part: Option<Partition>,
    mut once: impl FnMut(&mut Ctx, u64) -> Staged<PartialEmbedding>,
) -> Result<PipelineRun> {
    let host = Arc::new(host.clone());
    let xt = Arc::new(xt);
    let mut trace = Trace { branch: branch.into(), ..Trace::default() };
    let mut failure = None;
    for attempt in 0..PIPELINE_ATTEMPTS {
        let mut cx = Ctx { host: &host, xt: &xt, cfg, trace: &mut trace, attempt, part: part.clone() };
        match once(&mut cx, derive_seed(seed, attempt as u64)) {
            Ok(pe) => {
                trace.final_map = pe.full_map();
                return Ok(PipelineRun { trace, outcome: Ok(pe) });
            }
            Err(Stop::Bug(e)) => return Err(e),
            Err(Stop::Fail(stage, diagnosis)) => {
                let parity = trace.parity_ledger.last().filter(|p| p.attempt == attempt).cloned();
                failure = Some(FailureReport {
                    stage,
                    diagnosis,
                    parity,
                    search_budget: cfg.search_budget,
                    attempt_cap: cfg.attempt_cap,
                    attempts: attempt + 1,
                });
            }
        }
    }
    Ok(PipelineRun { trace, outcome: Err(failure.expect("at least one attempt")) })
}

fn check_sizes(host: &Hypergraph, t: &Tree, k: usize) -> Result<ExpansionTree> {
    if host.k() != k {
        return invalid(format!("host is {}-uniform, k = {k}", host.k()));
    }
    let xt = expand(t, k)?;
    if xt.num_vertices() != host.n() {
        return invalid(format!("expansion has {} vertices, host {}", xt.num_vertices(), host.n()));
    }
    if t.n() < 2 {
        return invalid("tree needs an edge");
    }
    Ok(xt)
}

/// Spanning embedding of t^(k) by absorption: reservoir, absorbing tuples
/// immersed in a subtree T(u), almost-spanning embedding of the rest minus a
/// few leaves, then absorption of those leaves.
pub fn pipeline_embed_thm1(
    host: &Hypergraph,
    t: &Tree,
    k: usize,
    d: usize,
    cfg: &Config,
    seed: u64,
) -> Result<PipelineRun> {
    let xt = check_sizes(host, t, k)?;
    if d == 0 || d >= k {
        return invalid(format!("d = {d} outside 1..k"));
    }
    run_attempts(host, xt, cfg, seed, "thm1", None, |cx, s| absorbing_once(cx, d, 1, s))
}

/// Harvested gadgets for the separable case.
struct Harvest {
    bridge: Option<Gadget>,
    pools: [Vec<Gadget>; 2],
    absorbers: Vec<ParityAbsorber>,
}

#[allow(clippy::too_many_arguments)]
fn harvest(
    h: &Hypergraph,
    part: &Partition,
    pi: &PiType,
    t: usize,
    reservoir: &[bool],
    want: usize,
    cfg: &Config,
    seed: u64,
) -> Harvest {
    let k = h.k();
    let a_count = |xs: &[Vertex]| xs.iter().filter(|&&v| part.in_a(v)).count();
    let mut b = GadgetBuilder::new(h, part, t, cfg.max_chain_len, cfg.search_budget, derive_seed(seed, 0));
    for (v, &r) in reservoir.iter().enumerate() {
        b.used[v] = r;
    }
    // absorbers first: at desk scale the balancer-based gadgets would
    // otherwise use up the host
    let mut g = rng(derive_seed(seed, 1));
    let mut absorbers = Vec::new();
    for _ in 0..cfg.attempt_cap {
        if absorbers.len() >= want {
            break;
        }
        let free: Vec<Vertex> = (0..h.n()).filter(|&v| !b.used[v]).collect();
        let Some(&w) = free.choose(&mut g) else { break };
        let rest: Vec<Vertex> = free.iter().copied().filter(|&v| v != w).collect();
        if rest.len() < 2 * (k - 1) {
            break;
        }
        let mut s: Vec<Vertex> = rest.choose_multiple(&mut g, k - 1).copied().collect();
        s.sort_unstable();
        let s_a = a_count(&s);
        if s_a % 2 != pi.pi[w] as usize {
            continue;
        }
        let Ok(nbhd) = h.neighbourhood(&[w]) else { continue };
        let mut wits: Vec<Vec<Vertex>> = nbhd
            .into_iter()
            .filter(|x| x.iter().all(|v| !b.used[*v] && !s.contains(v)))
            .filter(|x| a_count(x) % 2 == s_a % 2)
            .collect();
        // equal A-counts need only diamond-chains
        wits.shuffle(&mut g);
        wits.sort_by_key(|x| a_count(x).abs_diff(s_a));
        let Some(wit) = wits.first().cloned() else { continue };
        let saved = b.used.clone();
        for &v in wit.iter().chain(&s).chain([&w]) {
            b.used[v] = true;
        }
        let Some(gad) = b.parity_gadget(&wit, &s) else {
            b.used = saved;
            continue;
        };
        // S is only a placeholder target and w stays available
        for &v in s.iter().chain([&w]) {
            b.used[v] = false;
        }
        let size = gad.vertices().len() + 1 - k;
        let a = ParityAbsorber { w, s, witness: wit, gadget: gad, size };
        if a.verify(h, part, pi) {
            absorbers.push(a);
        }
    }
    let bridge = b.bridge();
    let mut pools = [Vec::new(), Vec::new()];
    for (i, pool) in pools.iter_mut().enumerate() {
        if let Some(g) = b.pair_gadget() {
            pool.push(if i == 0 { g } else { g.flip() });
        }
    }
    Harvest { bridge, pools, absorbers }
}

/// The separable case: parity-absorbers and even balancers harvested around
/// the partition from the diamond graph, immersed together with the bridge
/// gadget L at an even-degree vertex; then the remainder, balancing,
/// π-guided absorption and, if the last step is parity-blocked, the L switch.
fn separable_once(cx: &mut Ctx, part: &Partition, seed: u64) -> Staged<PartialEmbedding> {
    let host = Arc::clone(cx.host);
    let k = host.k();
    let t = cx.xt.base().clone();
    let n = t.n();
    let pi = pi_type(&host, part, cx.cfg.pi_share);
    let mut counts = std::collections::BTreeMap::new();
    for v in 0..n {
        if t.degree(v).is_multiple_of(2) {
            *counts.entry(t.degree(v)).or_insert(0usize) += 1;
        }
    }
    let (&t_star, _) = counts.iter().max_by_key(|(d, c)| (**c, std::cmp::Reverse(**d))).unwrap();
    let reservoir = cx.reservoir(k - 1, derive_seed(seed, 1));
    let r_target = (cx.cfg.alpha * Rational::from_integer(n as i64)).ceil().to_integer().max(1) as usize;
    let hv = harvest(&host, part, &pi, t_star, &reservoir, r_target, cx.cfg, derive_seed(seed, 2));
    cx.record(
        "harvest",
        0,
        format!(
            "t* = {t_star}, bridge L {}, pools {}/{}, {} parity-absorbers",
            if hv.bridge.is_some() { "found" } else { "missing" },
            hv.pools[0].len(),
            hv.pools[1].len(),
            hv.absorbers.len()
        ),
    );
    // order of precedence when not everything fits: absorbers, L, pools
    let mut gadgets: Vec<(&str, Gadget)> = hv.absorbers.iter().map(|a| ("absorber", a.gadget.clone())).collect();
    if let Some(l) = &hv.bridge {
        gadgets.push(("bridge", l.clone()));
    }
    for (i, pool) in hv.pools.iter().enumerate() {
        for g in pool {
            gadgets.push((if i == 0 { "pool0" } else { "pool1" }, g.clone()));
        }
    }
    let items: Vec<Vec<ImmersionItem>> =
        gadgets.iter().map(|(_, g)| at("harvest", gadget_items(g, 0))).collect::<Staged<_>>()?;
    let mut g = rng(derive_seed(seed, 0));
    let (rt, u, removed) = at("split", split_tree(&t, cx.cfg, r_target.min(hv.absorbers.len()), &mut g))?;
    cx.record(
        "split",
        0,
        format!("root {}, u = {u}, |T(u)| = {}, removed leaves {removed:?}", rt.root, rt.subtree_size[u]),
    );
    let n_abs = hv.absorbers.len();
    let (pe, kept) = immerse_stage(cx, &rt, u, &removed, &|m| m.min(n_abs), &items, &reservoir, derive_seed(seed, 3))?;
    let kept_abs = gadgets[..kept].iter().filter(|(k, _)| *k == "absorber").count();
    let removed: Vec<usize> = removed.into_iter().take(kept_abs).collect();
    let bridge = gadgets[..kept].iter().find(|(k, _)| *k == "bridge").map(|(_, g)| g.clone());
    let pools = [
        gadgets[..kept].iter().filter(|(k, _)| *k == "pool0").map(|(_, g)| g.clone()).collect(),
        gadgets[..kept].iter().filter(|(k, _)| *k == "pool1").map(|(_, g)| g.clone()).collect(),
    ];
    let members: Vec<FamilyMember> = hv.absorbers[..kept_abs].iter().cloned().map(FamilyMember::Parity).collect();
    let guide = ParityGuide { partition: part.clone(), pi, balanced: true };
    let acfg = AbsorbConfig { parity: Some(guide), reorder: true, max_candidates: 2000 };
    let tail = SeparableTail {
        rt: &rt,
        u,
        removed: &removed,
        reservoir: &reservoir,
        pools: &pools,
        bridge: bridge.as_ref(),
        members: &members,
        acfg: &acfg,
    };
    let mut stuck = None;
    for rep in 0..REMAINDER_RETRIES {
        match separable_tail(cx, &pe, part, &tail, derive_seed(seed, 4 + rep)) {
            Ok((done, switches)) => {
                cx.trace.switch_log.extend(switches);
                return cx.finish(done);
            }
            Err(Stop::Fail(st, d)) => {
                cx.record(&st, 0, format!("stuck: {d}"));
                stuck = Some(Stop::Fail(st, d));
            }
            Err(bug) => return Err(bug),
        }
    }
    Err(stuck.expect("at least one remainder"))
}

struct SeparableTail<'a> {
    rt: &'a RootedTree,
    u: usize,
    removed: &'a [usize],
    reservoir: &'a [bool],
    pools: &'a [Vec<Gadget>; 2],
    bridge: Option<&'a Gadget>,
    members: &'a [FamilyMember],
    acfg: &'a AbsorbConfig,
}

/// Steps after immersion: remainder over a random partition, balancing,
/// guided absorption of all but the last leaf, then the last leaf with the
/// L switch as fallback. Returns the embedding and the switches applied.
fn separable_tail(
    cx: &mut Ctx,
    pe: &PartialEmbedding,
    part: &Partition,
    tail: &SeparableTail,
    seed: u64,
) -> Staged<(PartialEmbedding, Vec<Switch>)> {
    let groups = GroupMode::Random { samples: cx.cfg.attempt_cap };
    let pe = almost_stage(cx, pe, tail.rt, tail.u, tail.removed, tail.reservoir, groups, seed)?;
    cx.parity("almost-spanning", &pe);
    let mut log = Vec::new();

    let skew = leftover_skew(&pe, part);
    let pe = if skew.abs() > 2 {
        let run = at("balance", balance_leftover(&pe, tail.pools, part))?;
        cx.record(
            "balance",
            run.pe.image_len(),
            format!("skew {} -> {} in {} flips", run.skew_before, leftover_skew(&run.pe, part), run.flips.len()),
        );
        log.extend(run.switches);
        run.pe
    } else {
        cx.record("balance", pe.image_len(), format!("skew {skew} already within ±2"));
        pe
    };
    cx.parity("balance", &pe);

    let edges = leaf_edges(tail.rt, tail.removed);
    let split = edges.len().saturating_sub(1);
    let run = at("absorb", absorb_loop(&pe, tail.members, &edges[..split], tail.acfg))?;
    log.extend(run.switches.iter().cloned());
    let mut pe = run.pe.clone();
    let left: Vec<FamilyMember> =
        tail.members.iter().zip(&run.retired).filter(|(_, r)| !**r).map(|(m, _)| m.clone()).collect();
    for s in &run.steps {
        if !s.invariants_hold() {
            return Err(Stop::Bug(Error::Invariant("absorption step broke an inductive condition".into())));
        }
        let rec = ParityRecord {
            attempt: cx.attempt,
            stage: format!("absorb edge {}", s.edge),
            leftover_a: s.leftover_a.unwrap_or(0),
            leftover_b: s.leftover_b.unwrap_or(0),
        };
        cx.trace.parity_ledger.push(rec);
    }
    if let Some(last) = edges.get(split) {
        let first = absorb_loop(&pe, &left, std::slice::from_ref(last), tail.acfg);
        pe = match (first, tail.bridge) {
            (Ok(r), _) => {
                log.extend(r.switches);
                r.pe
            }
            (Err(Error::NoMatchingTuple(msg)), Some(l)) => {
                // switch L to move one leftover vertex across the partition, then retry
                let sw = at("final-switch", switch_from_gadget_half(&pe, l, Direction::Forward))?;
                let switched = at("final-switch", apply_switch(&pe, &sw))?;
                cx.record("final-switch", switched.image_len(), format!("L switched after: {msg}"));
                log.push(sw);
                let r = at("absorb", absorb_loop(&switched, &left, std::slice::from_ref(last), tail.acfg))?;
                log.extend(r.switches);
                r.pe
            }
            (Err(e), _) => return at("absorb", Err(e)),
        };
    }
    cx.parity("absorb", &pe);
    cx.record("absorb", pe.image_len(), format!("{} leaves absorbed", tail.removed.len()));
    Ok((pe, log))
}

/// Spanning embedding for trees with an even-degree vertex. Branches on the
/// diamond graph: without a separation, absorbing tuples of diamond-chains;
/// with one, the parity-aware pipeline.
pub fn pipeline_embed_thm2(host: &Hypergraph, t: &Tree, k: usize, cfg: &Config, seed: u64) -> Result<PipelineRun> {
    if !classify(t).has_even_vertex {
        return invalid("tree has no vertex of even degree");
    }
    let xt = check_sizes(host, t, k)?;
    let dg = diamond_graph(host, cfg.gamma)?;
    let mode = if host.n() <= cfg.separation_exact_cap {
        SeparationMode::Exact { cap: cfg.separation_exact_cap }
    } else {
        SeparationMode::Heuristic { seed }
    };
    let outcome = find_separation(&dg.graph, cfg.mu, mode)?;
    match outcome.separation() {
        None => run_attempts(host, xt, cfg, seed, "inseparable", None, |cx, s| {
            absorbing_once(cx, k - 1, cfg.max_chain_len, s)
        }),
        Some(sep) => {
            let mut in_a = vec![false; host.n()];
            for &v in &sep.u1 {
                in_a[v] = true;
            }
            let part = Partition::bipartition(&in_a);
            let p2 = part.clone();
            run_attempts(host, xt, cfg, seed, "separable", Some(part), move |cx, s| separable_once(cx, &p2, s))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treekit::random_tree;

    #[test]
    fn thm1_complete_host() {
        let mut g = rng(11);
        let t = random_tree(10, 4, &mut g).unwrap();
        let h = Hypergraph::complete(19, 3).unwrap();
        let run = pipeline_embed_thm1(&h, &t, 3, 1, &Config::default(), 0).unwrap();
        if let Err(f) = &run.outcome {
            panic!("{f:?}\n{:#?}", run.trace.stages);
        }
        let pe = run.embedding().unwrap();
        assert!(verify_embedding(&h, pe.target(), &pe.full_map().unwrap()));
    }

    #[test]
    fn thm2_rejects_all_odd() {
        let h = Hypergraph::complete(11, 3).unwrap();
        let t = Tree::star(5).unwrap();
        assert!(matches!(pipeline_embed_thm2(&h, &t, 3, &Config::default(), 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn size_mismatch() {
        let h = Hypergraph::complete(12, 3).unwrap();
        let t = Tree::path(6).unwrap();
        assert!(pipeline_embed_thm1(&h, &t, 3, 1, &Config::default(), 0).is_err());
    }
}
