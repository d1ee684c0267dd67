use std::collections::VecDeque;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::partial::{half_diamond_remap, star_remaps, star_shape};
use super::search::{extend_search, pending_order, SearchLimits};
use super::PartialEmbedding;
use crate::combinat::{derive_seed, rng, Rng};
use crate::error::{invalid, Error, Result};
use crate::gadgetry::{ConstituentKind, Gadget};
use crate::hypercore::{find_loose_path, Edge, Hypergraph, Vertex};
use crate::treekit::{expand, Tree};
use crate::{Config, Rational};

/// A host subgraph the tree must cover in a prescribed way: a half-diamond
/// whose centre is the image of an expansion vertex, or a t-star whose centre
/// is the image of a degree-t anchor with its neighbours on the pins.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ImmersionItem {
    HalfDiamond { center: Vertex, edge: Edge },
    Star { center: Vertex, edges: Vec<Edge>, pins: Vec<Vertex> },
}

impl ImmersionItem {
    pub fn vertices(&self) -> Vec<Vertex> {
        let mut v: Vec<Vertex> = match self {
            ImmersionItem::HalfDiamond { edge, .. } => edge.clone(),
            ImmersionItem::Star { edges, .. } => edges.iter().flatten().copied().collect(),
        };
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Whether `pe` immerses this item.
    pub fn witnessed(&self, pe: &PartialEmbedding) -> bool {
        match self {
            ImmersionItem::HalfDiamond { center, edge } => half_diamond_remap(pe, edge, *center, *center).is_ok(),
            ImmersionItem::Star { center, edges, pins } => {
                star_remaps(pe, *center, *center, edges, edges, pins).is_ok()
            }
        }
    }
}

/// The items making up the half of `g` on `side` (0 for L1).
pub fn gadget_items(g: &Gadget, side: usize) -> Result<Vec<ImmersionItem>> {
    let mut out = Vec::new();
    for (p, &f) in g.parts.iter().zip(&g.flipped) {
        let cur = &p.halves[side ^ usize::from(f)];
        let other = &p.halves[(1 - side) ^ usize::from(f)];
        match p.kind {
            ConstituentKind::Chain => {
                for (e, e2) in cur.iter().zip(other) {
                    let c = e
                        .iter()
                        .copied()
                        .find(|v| !e2.contains(v))
                        .ok_or_else(|| Error::Invariant("degenerate diamond".into()))?;
                    out.push(ImmersionItem::HalfDiamond { center: c, edge: e.clone() });
                }
            }
            ConstituentKind::Balancer => {
                let (c, _, pins) = star_shape(cur, other)?;
                out.push(ImmersionItem::Star { center: c, edges: cur.clone(), pins });
            }
        }
    }
    Ok(out)
}

/// A family of pairwise vertex-disjoint items to immerse.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImmersionTask {
    pub items: Vec<ImmersionItem>,
}

impl ImmersionTask {
    pub fn new(items: Vec<ImmersionItem>) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for it in &items {
            for v in it.vertices() {
                if !seen.insert(v) {
                    return Err(Error::Overlap(format!("immersion items share vertex {v}")));
                }
            }
        }
        Ok(Self { items })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn vertices(&self) -> Vec<Vertex> {
        let mut v: Vec<Vertex> = self.items.iter().flat_map(ImmersionItem::vertices).collect();
        v.sort_unstable();
        v
    }

    /// Indices of items not immersed by `pe`.
    pub fn missing(&self, pe: &PartialEmbedding) -> Vec<usize> {
        (0..self.items.len()).filter(|&i| !self.items[i].witnessed(pe)).collect()
    }
}

/// Where and how to immerse: the subtree of anchors with `scope[v]` set,
/// grown from `root`, using host vertices outside `avoid`.
pub(crate) struct Immersion<'a> {
    pub root: usize,
    pub root_image: Option<Vertex>,
    pub scope: &'a [bool],
    pub avoid: &'a [bool],
    pub spacing: usize,
    pub budget: u64,
    pub attempts: usize,
}

struct Shape {
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    order: Vec<usize>,
}

fn shape(t: &Tree, root: usize, scope: &[bool]) -> Shape {
    let n = t.n();
    let mut parent = vec![None; n];
    let mut depth = vec![0; n];
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut order = vec![root];
    let mut q = VecDeque::from([root]);
    while let Some(u) = q.pop_front() {
        for &w in t.neighbours(u) {
            if scope[w] && !seen[w] {
                seen[w] = true;
                parent[w] = Some(u);
                depth[w] = depth[u] + 1;
                order.push(w);
                q.push_back(w);
            }
        }
    }
    Shape { parent, depth, order }
}

/// Anchors for the items: pairwise at distance >= spacing, at depth >= 2,
/// scanned in BFS order. Stars need anchors of matching degree.
fn choose_anchors(
    t: &Tree,
    sh: &Shape,
    task: &ImmersionTask,
    spacing: usize,
    scope: &[bool],
) -> Result<Vec<(usize, usize)>> {
    let mut open: Vec<usize> = (0..task.len()).collect();
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    let mut dists: Vec<Vec<usize>> = Vec::new();
    for &v in &sh.order {
        if open.is_empty() {
            break;
        }
        if sh.depth[v] < 2 || dists.iter().any(|d| d[v] < spacing) {
            continue;
        }
        let fits = |i: usize| match &task.items[i] {
            ImmersionItem::Star { edges, .. } => {
                edges.len() == t.degree(v) && t.neighbours(v).iter().all(|&w| scope[w])
            }
            ImmersionItem::HalfDiamond { .. } => true,
        };
        let star = open.iter().position(|&i| matches!(task.items[i], ImmersionItem::Star { .. }) && fits(i));
        let pick =
            star.or_else(|| open.iter().position(|&i| matches!(task.items[i], ImmersionItem::HalfDiamond { .. })));
        if let Some(j) = pick {
            chosen.push((v, open.remove(j)));
            dists.push(t.distances(v));
        }
    }
    if !open.is_empty() {
        return invalid(format!(
            "only {} of {} items find anchors at spacing {spacing}",
            task.len() - open.len(),
            task.len()
        ));
    }
    Ok(chosen)
}

/// Base edges covering the item with their assignments; the first one places
/// the parent of the item anchor.
fn item_plan(
    pe: &PartialEmbedding,
    v: usize,
    parent: usize,
    item: &ImmersionItem,
    g: &mut Rng,
) -> Vec<(usize, Vec<(usize, Vertex)>)> {
    let xt = pe.target();
    let t = xt.base();
    let mut out = Vec::new();
    match item {
        ImmersionItem::HalfDiamond { center, edge } => {
            let mut ends: Vec<Vertex> = edge.iter().copied().filter(|x| x != center).collect();
            ends.shuffle(g);
            let e = t.edge_index(parent, v).unwrap();
            let mut block: Vec<Vertex> = edge.iter().copied().filter(|&x| x != ends[0] && x != ends[1]).collect();
            block.shuffle(g);
            let mut assign = vec![(parent, ends[0]), (v, ends[1])];
            assign.extend(xt.block(e).iter().copied().zip(block));
            out.push((e, assign));
        }
        ImmersionItem::Star { center, edges, pins } => {
            let mut slots: Vec<usize> = (0..edges.len()).collect();
            slots.shuffle(g);
            let mut nbrs = vec![parent];
            nbrs.extend(t.neighbours(v).iter().copied().filter(|&w| w != parent));
            for (w, s) in nbrs.into_iter().zip(slots) {
                let e = t.edge_index(v, w).unwrap();
                let rest: Vec<Vertex> = edges[s].iter().copied().filter(|&x| x != *center && x != pins[s]).collect();
                let mut assign = vec![(w, pins[s])];
                if out.is_empty() {
                    assign.push((v, *center));
                }
                assign.extend(xt.block(e).iter().copied().zip(rest));
                out.push((e, assign));
            }
        }
    }
    out
}

fn attempt(pe0: &PartialEmbedding, task: &ImmersionTask, spec: &Immersion, g: &mut Rng) -> Result<PartialEmbedding> {
    let xt = pe0.target();
    let t = xt.base();
    let host = pe0.host();
    let sh = shape(t, spec.root, spec.scope);
    let anchors = choose_anchors(t, &sh, task, spec.spacing, spec.scope)?;
    let mut reserved = vec![false; host.n()];
    for x in task.vertices() {
        reserved[x] = true;
    }
    let mut pe = pe0.clone();
    if pe.get(spec.root).is_none() {
        let x = match spec.root_image {
            Some(x) => x,
            None => {
                let free: Vec<Vertex> =
                    (0..host.n()).filter(|&x| !pe.is_used(x) && !spec.avoid[x] && !reserved[x]).collect();
                *free.choose(g).ok_or_else(|| Error::EmbeddingNotFound("no free vertex for the root".into()))?
            }
        };
        pe = pe.place(spec.root, x)?;
    }
    for &(v, i) in &anchors {
        let p = sh.parent[v].unwrap();
        let plan = item_plan(&pe, v, p, &task.items[i], g);
        let p_img = plan[0].1.iter().find(|a| a.0 == p).unwrap().1;
        // tree path from the nearest placed ancestor down to p
        let mut path = vec![p];
        while pe.get(*path.last().unwrap()).is_none() {
            path.push(sh.parent[*path.last().unwrap()].unwrap());
        }
        path.reverse();
        if path.len() < 2 {
            return Err(Error::Invariant(format!("parent of item anchor {v} is already placed")));
        }
        let used = pe.used_mask();
        let ok = |x: Vertex| !used[x] && !spec.avoid[x] && !reserved[x];
        let y_img = pe.get(path[0]).unwrap();
        let q = find_loose_path(host, y_img, p_img, path.len() - 1, &ok, g).ok_or_else(|| {
            Error::EmbeddingNotFound(format!("no loose path of length {} to item {i}", path.len() - 1))
        })?;
        for j in 1..path.len() {
            let e = t.edge_index(path[j - 1], path[j]).unwrap();
            let mut assign = Vec::new();
            if j + 1 < path.len() {
                assign.push((path[j], q.anchors[j]));
            }
            let rest = q.edges[j - 1].iter().copied().filter(|&x| x != q.anchors[j - 1] && x != q.anchors[j]);
            assign.extend(xt.block(e).iter().copied().zip(rest));
            if j + 1 == path.len() {
                // p is placed together with the item edges
                assign.push((p, p_img));
            }
            pe = pe.extend_edge(e, &assign)?;
        }
        for (e, assign) in plan {
            let assign: Vec<(usize, Vertex)> = assign.into_iter().filter(|&(tv, _)| pe.get(tv).is_none()).collect();
            pe = pe.extend_edge(e, &assign)?;
        }
    }
    let order = pending_order(&pe, spec.root, &|w| spec.scope[w]);
    let allowed: Vec<bool> = spec.avoid.iter().map(|a| !a).collect();
    let lim = SearchLimits { budget: spec.budget, restarts: 2, seed: g.gen() };
    let pe = extend_search(&pe, &order, &allowed, None, lim)?;
    let missing = task.missing(&pe);
    if !missing.is_empty() {
        return Err(Error::Invariant(format!("items {missing:?} lost their immersion")));
    }
    Ok(pe)
}

/// Embeds the scoped subtree so that every item is immersed. Follows the
/// immersion argument: well-spaced anchors in BFS order, each reached from
/// the part built so far by a loose path avoiding all item vertices.
pub(crate) fn immerse_scoped(
    pe: &PartialEmbedding,
    task: &ImmersionTask,
    spec: &Immersion,
    seed: u64,
) -> Result<PartialEmbedding> {
    let mut last = Error::EmbeddingNotFound("no attempts".into());
    for a in 0..spec.attempts.max(1) {
        let mut g = rng(derive_seed(seed, a as u64));
        match attempt(pe, task, spec, &mut g) {
            Ok(done) => return Ok(done),
            Err(e @ Error::InvalidArgument(_)) => return Err(e),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Embeds `t^(k)` into `host` with every item of `task` immersed.
pub fn immerse_embed(
    host: &Hypergraph,
    t: &Tree,
    k: usize,
    task: &ImmersionTask,
    cfg: &Config,
    seed: u64,
) -> Result<PartialEmbedding> {
    immerse_embed_avoiding(host, t, k, task, &[], cfg, seed)
}

/// As [`immerse_embed`], leaving the host vertices in `reserved` free. They
/// must not belong to any item.
pub fn immerse_embed_avoiding(
    host: &Hypergraph,
    t: &Tree,
    k: usize,
    task: &ImmersionTask,
    reserved: &[Vertex],
    cfg: &Config,
    seed: u64,
) -> Result<PartialEmbedding> {
    let xt = expand(t, k)?;
    if xt.num_vertices() + reserved.len() > host.n() {
        return invalid(format!(
            "{} target vertices and {} reserved exceed the host order {}",
            xt.num_vertices(),
            reserved.len(),
            host.n()
        ));
    }
    if Rational::from_integer(task.len() as i64) > cfg.immersion_ratio * Rational::from_integer(t.n() as i64) {
        return invalid(format!(
            "{} items exceed the ratio {} of {} tree vertices",
            task.len(),
            cfg.immersion_ratio,
            t.n()
        ));
    }
    ImmersionTask::new(task.items.clone())?;
    let pe = PartialEmbedding::new(Arc::new(xt), Arc::new(host.clone()))?;
    let root = t.leaves()[0];
    let scope = vec![true; t.n()];
    let mut avoid = vec![false; host.n()];
    let items = task.vertices();
    for &x in reserved {
        if x >= host.n() {
            return Err(Error::InvalidVertex { vertex: x, n: host.n() });
        }
        if items.binary_search(&x).is_ok() {
            return invalid(format!("reserved vertex {x} belongs to an immersion item"));
        }
        avoid[x] = true;
    }
    let spec = Immersion {
        root,
        root_image: None,
        scope: &scope,
        avoid: &avoid,
        spacing: cfg.immersion_spacing,
        budget: cfg.search_budget,
        attempts: cfg.attempt_cap.min(20),
    };
    immerse_scoped(&pe, task, &spec, seed)
}
