use std::collections::BTreeSet;
use std::sync::Arc;

use hypertree::combinat::{derive_seed, rng};
use hypertree::embedder::{
    absorb_loop, apply_switch, balance_leftover, diamond_switch, gadget_items, immerse_embed, immerse_embed_avoiding,
    leftover_skew, sample_absorbing_family, switch_from_gadget_half, AbsorbConfig, Direction, FamilyMember,
    ImmersionItem, ImmersionTask, ParityGuide, PartialEmbedding, Switch,
};
use hypertree::extremal::{build_parity_construction, search_embedding, OracleOutcome, SearchSpec};
use hypertree::gadgetry::{
    enumerate_diamonds, find_balancers, gadget_union, pi_type, DiamondChain, Gadget, Orientation,
};
use hypertree::hypercore::{random_hypergraph, random_with_min_degree, Hypergraph, Partition};
use hypertree::treekit::{expand, random_tree, OrderedEdge, Tree};
use hypertree::{Config, Error, Rational};
use rand::seq::SliceRandom;
use rand::Rng as _;

fn full_embedding(h: Hypergraph, t: &Tree, map: &[usize]) -> PartialEmbedding {
    let xt = expand(t, h.k()).unwrap();
    let edges = xt.hyperedges().len();
    PartialEmbedding::from_parts(Arc::new(xt), Arc::new(h), map.iter().map(|&x| Some(x)).collect(), vec![true; edges])
        .unwrap()
}

/// Injective, edge-preserving, image exactly (X \ X1) ∪ X2, and unchanged on
/// every target vertex whose image was outside X1.
fn switch_sound(before: &PartialEmbedding, after: &PartialEmbedding, sw: &Switch) -> bool {
    let h = before.host();
    let xt = before.target();
    let map: Vec<Option<usize>> = after.raw_map().to_vec();
    let mut seen = BTreeSet::new();
    if !map.iter().flatten().all(|&x| seen.insert(x)) {
        return false;
    }
    for e in 0..xt.hyperedges().len() {
        if before.is_embedded(e) != after.is_embedded(e) {
            return false;
        }
        if after.is_embedded(e) {
            let img: Option<Vec<usize>> = xt.hyperedge(e).iter().map(|&v| map[v]).collect();
            if !img.is_some_and(|i| h.contains_edge(&i)) {
                return false;
            }
        }
    }
    let mut expect: BTreeSet<usize> = before.image().into_iter().collect();
    for x in &sw.out_set {
        expect.remove(x);
    }
    expect.extend(&sw.in_set);
    let got: BTreeSet<usize> = after.image().into_iter().collect();
    let agree = (0..xt.num_vertices()).all(|v| match before.get(v) {
        Some(x) if !sw.out_set.contains(&x) => after.get(v) == Some(x),
        _ => true,
    });
    got == expect && agree && sw.out_set.len() == sw.in_set.len()
}

#[test]
fn diamond_switches_are_sound_and_involutive() {
    let mut applied = 0;
    for case in 0..1000u64 {
        let mut g = rng(derive_seed(17, case));
        let n = g.gen_range(2..10);
        let t = random_tree(n, 4, &mut g).unwrap();
        let xt = expand(&t, 3).unwrap();
        let big_n = xt.num_vertices() + g.gen_range(1..5);
        let (h, map) = if case % 2 == 0 {
            let mut verts: Vec<usize> = (0..big_n).collect();
            verts.shuffle(&mut g);
            (Hypergraph::complete(big_n, 3).unwrap(), verts[..xt.num_vertices()].to_vec())
        } else {
            let h = random_hypergraph(big_n, 3, 0.8, case).unwrap();
            let spec = SearchSpec {
                host: &h,
                xt: &xt,
                root: 0,
                root_images: None,
                allowed: None,
                budget: 200_000,
                seed: Some(case),
            };
            let OracleOutcome::Embedding(map) = search_embedding(&spec).unwrap().outcome else { continue };
            (h, map)
        };
        let pe = full_embedding(h.clone(), &t, &map);
        // every (expansion vertex, free vertex) pair whose swapped edge is present
        let free = pe.free();
        let mut moves = Vec::new();
        for y in (0..xt.num_vertices()).filter(|&y| !xt.is_anchor(y)) {
            let e = (0..xt.hyperedges().len()).find(|&e| xt.hyperedge(e).contains(&y)).unwrap();
            for &to in &free {
                let img: Vec<usize> = xt.hyperedge(e).iter().map(|&v| if v == y { to } else { map[v] }).collect();
                if h.contains_edge(&img) {
                    moves.push((y, to));
                }
            }
        }
        let Some(&(y, to)) = moves.choose(&mut g) else { continue };
        let sw = diamond_switch(&pe, y, to).unwrap();
        let after = apply_switch(&pe, &sw).unwrap();
        assert!(switch_sound(&pe, &after, &sw), "case {case}");
        assert_eq!(sw.out_set, vec![map[y]]);
        assert_eq!(sw.in_set, vec![to]);
        let back = apply_switch(&after, &sw.inverse()).unwrap();
        assert_eq!(back.raw_map(), pe.raw_map());
        assert!(matches!(apply_switch(&after, &sw), Err(Error::StaleSwitch(_))));
        applied += 1;
    }
    assert!(applied >= 900, "only {applied} switches applied");
}

fn chain_gadget(u: usize, shared: [usize; 2], v: usize, t: usize) -> Gadget {
    Gadget::from_chain(&DiamondChain { waypoints: vec![u, v], shared: vec![shared.to_vec()] }, t).unwrap()
}

#[test]
fn gadget_half_switches_invert() {
    let h = Hypergraph::complete(40, 3).unwrap();
    let part = Partition::bipartition(&(0..40).map(|v| v < 20).collect::<Vec<_>>());
    let b = find_balancers(&h, &part, 1, 1, 1, 3, 100_000).unwrap().remove(0);
    let bal = Gadget::from_balancer(&b).unwrap();
    let spare: Vec<usize> = (0..40).filter(|v| !bal.vertices().contains(v)).collect();
    let chain = chain_gadget(spare[0], [spare[1], spare[2]], spare[3], 2);
    let g = gadget_union(&bal, &chain).unwrap();
    let task = ImmersionTask::new(gadget_items(&g, 0).unwrap()).unwrap();
    let t = Tree::path(12).unwrap();
    let pe = immerse_embed_avoiding(&h, &t, 3, &task, &g.x2, &Config::default(), 5).unwrap();
    assert!(task.items.iter().all(|it| it.witnessed(&pe)));
    assert!(g.x2.iter().all(|&x| !pe.is_used(x)));

    let fwd = switch_from_gadget_half(&pe, &g, Direction::Forward).unwrap();
    let pe2 = apply_switch(&pe, &fwd).unwrap();
    assert!(switch_sound(&pe, &pe2, &fwd));
    assert_eq!(fwd.out_set, g.x1);
    assert_eq!(fwd.in_set, g.x2);
    let bwd = switch_from_gadget_half(&pe2, &g, Direction::Backward).unwrap();
    let pe3 = apply_switch(&pe2, &bwd).unwrap();
    assert_eq!(pe3.raw_map(), pe.raw_map());

    // balancer flip moves |image ∩ B| by the capacity
    let on_b = |pe: &PartialEmbedding| pe.image().iter().filter(|&&v| !b.orientation.in_a(&part, v)).count() as i64;
    let only_bal = switch_from_gadget_half(&pe, &bal, Direction::Forward).unwrap();
    let pe4 = apply_switch(&pe, &only_bal).unwrap();
    assert_eq!(on_b(&pe4) - on_b(&pe), b.capacity());

    // a constituent that is not immersed blocks the switch
    let chain_only = ImmersionTask::new(gadget_items(&chain, 0).unwrap()).unwrap();
    let partial = immerse_embed_avoiding(&h, &t, 3, &chain_only, &g.x2, &Config::default(), 1).unwrap();
    if !gadget_items(&bal, 0).unwrap().iter().all(|it| it.witnessed(&partial)) {
        assert!(switch_from_gadget_half(&partial, &g, Direction::Forward).is_err());
    }
}

#[test]
fn immersion_witness_in_dense_host() {
    let (h, _) = random_with_min_degree(40, 3, 1, 0.7, Rational::new(3, 5), 2, 50).unwrap();
    assert!(h.min_d_degree(1).unwrap().normalized_min >= Rational::new(3, 5));
    let d = enumerate_diamonds(&h, None, None).into_iter().next().unwrap();
    let center = d.tips.0;
    let edge = d.edge_at(center);
    let item = ImmersionItem::HalfDiamond { center, edge: edge.clone() };
    let task = ImmersionTask::new(vec![item.clone()]).unwrap();
    let t = Tree::path(12).unwrap();
    let pe = immerse_embed(&h, &t, 3, &task, &Config::default(), 9).unwrap();
    assert!(pe.is_complete());
    assert!(item.witnessed(&pe));
    // independent witness: a tree edge lands on the half-diamond, its centre on an expansion vertex
    let xt = pe.target();
    let hit = (0..xt.hyperedges().len()).any(|e| {
        let mut img: Vec<usize> = xt.hyperedge(e).iter().map(|&v| pe.get(v).unwrap()).collect();
        img.sort_unstable();
        img == edge && pe.preimage(center).is_some_and(|y| !xt.is_anchor(y))
    });
    assert!(hit);
    assert!(immerse_embed(&h, &t, 3, &ImmersionTask::default(), &Config::default(), 0).unwrap().is_complete());
}

#[test]
fn absorbing_family_on_complete_host() {
    let h = Hypergraph::complete(15, 3).unwrap();
    let s = sample_absorbing_family(&h, 3, 1).unwrap();
    assert!(!s.family.is_empty());
    let mut used = BTreeSet::new();
    for tup in &s.family {
        assert!(tup.verify(&h));
        let mut e = tup.vs.clone();
        e.push(tup.w);
        assert!(h.contains_edge(&e));
        for v in tup.gadget.half_vertices(0) {
            assert!(used.insert(v), "family members overlap");
        }
    }
    assert_eq!(s.coverage.uncovered, 0);
    assert!(sample_absorbing_family(&h, 0, 1).unwrap().family.is_empty());
}

/// A path of `trunk` vertices with `leaves` extra leaves, embedded on a
/// complete host of exactly the right order except for the leaf edges. The
/// leaves hang at trunk vertices whose images lie outside every member.
fn absorb_instance(seed: u64) -> (PartialEmbedding, Vec<FamilyMember>, Vec<OrderedEdge>) {
    let mut g = rng(seed);
    let trunk = 32;
    let leaves = 1 + (seed % 3) as usize;
    let h = Hypergraph::complete(2 * (trunk + leaves) - 1, 3).unwrap();
    let s = sample_absorbing_family(&h, leaves + 2, seed).unwrap();
    assert!(s.family.len() >= leaves, "seed {seed}: {} members", s.family.len());
    let family: Vec<FamilyMember> = s.family.into_iter().take(leaves).map(FamilyMember::Tuple).collect();
    let task = ImmersionTask::new(family.iter().flat_map(FamilyMember::items).collect()).unwrap();
    let sub = Tree::path(trunk);
    let small = immerse_embed(&h, sub.as_ref().unwrap(), 3, &task, &Config::default(), seed).unwrap();
    let members: BTreeSet<usize> = family.iter().flat_map(FamilyMember::used_vertices).collect();
    let open: Vec<usize> = (0..trunk).filter(|&v| !members.contains(&small.get(v).unwrap())).collect();
    let hangs: Vec<usize> = (0..leaves).map(|_| *open.choose(&mut g).unwrap()).collect();
    let mut edges: Vec<(usize, usize)> = (1..trunk).map(|i| (i - 1, i)).collect();
    for (i, &p) in hangs.iter().enumerate() {
        edges.push((p, trunk + i));
    }
    let t = Tree::new(trunk + leaves, edges).unwrap();
    let xt = Arc::new(expand(&t, 3).unwrap());
    assert_eq!(xt.num_vertices(), h.n());
    let mut map = vec![None; xt.num_vertices()];
    let mut embedded = vec![false; t.n() - 1];
    for e in 0..trunk - 1 {
        embedded[e] = true;
        let (u, v) = t.edges()[e];
        map[u] = small.get(u);
        map[v] = small.get(v);
        map[xt.block(e)[0]] = small.get(small.target().block(e)[0]);
    }
    let pe = PartialEmbedding::from_parts(xt, Arc::new(h), map, embedded).unwrap();
    let remaining =
        (0..leaves).map(|i| OrderedEdge { edge: trunk - 1 + i, parent: hangs[i], child: trunk + i }).collect();
    (pe, family, remaining)
}

#[test]
fn absorption_invariants_hold_at_every_step() {
    let mut steps = 0;
    for seed in 0..50 {
        let (pe, family, remaining) = absorb_instance(seed);
        let run = absorb_loop(&pe, &family, &remaining, &AbsorbConfig::default()).unwrap();
        assert_eq!(run.steps.len(), remaining.len());
        for (i, st) in run.steps.iter().enumerate() {
            assert!(st.invariants_hold(), "seed {seed} step {i}");
            assert!(st.retired <= (i + 1) * 2);
            assert_eq!(st.z.len(), 2);
        }
        assert!(run.pe.is_complete());
        let map = run.pe.full_map().unwrap();
        let xt = run.pe.target();
        assert_eq!(map.iter().collect::<BTreeSet<_>>().len(), map.len());
        assert!(xt
            .hyperedges()
            .iter()
            .all(|e| run.pe.host().contains_edge(&e.iter().map(|&v| map[v]).collect::<Vec<_>>())));
        steps += run.steps.len();
    }
    assert!(steps >= 50);
    let (pe, family, _) = absorb_instance(0);
    let run = absorb_loop(&pe, &family, &[], &AbsorbConfig::default()).unwrap();
    assert_eq!(run.pe.raw_map(), pe.raw_map());
}

#[test]
fn parity_blocked_absorption_reports_pi_mismatch() {
    // path of 7 plus a leaf at vertex 3, in the parity construction on 15 vertices;
    // the trunk avoids one A-vertex and one B-vertex
    let p = build_parity_construction(3, 8).unwrap();
    let part = p.partition();
    let (a, b) = (0, p.big_n - 1);
    assert!(p.in_a[a] && !p.in_a[b]);
    let mut edges: Vec<(usize, usize)> = (1..7).map(|i| (i - 1, i)).collect();
    edges.push((3, 7));
    let t = Tree::new(8, edges).unwrap();
    let xt = Arc::new(expand(&t, 3).unwrap());
    let sub = expand(&Tree::path(7).unwrap(), 3).unwrap();
    let allowed: Vec<bool> = (0..p.big_n).map(|v| v != a && v != b).collect();
    let root_images: Vec<usize> = (1..p.big_n).filter(|&v| p.in_a[v]).collect();
    let spec = SearchSpec {
        host: &p.h,
        xt: &sub,
        root: 3,
        root_images: Some(root_images),
        allowed: Some(&allowed),
        budget: 10_000_000,
        seed: Some(1),
    };
    let OracleOutcome::Embedding(small) = search_embedding(&spec).unwrap().outcome else { panic!("trunk embeds") };
    let mut map = vec![None; xt.num_vertices()];
    let mut embedded = vec![false; 7];
    for e in 0..6 {
        embedded[e] = true;
        let (u, v) = t.edges()[e];
        map[u] = Some(small[u]);
        map[v] = Some(small[v]);
        map[xt.block(e)[0]] = Some(small[sub.block(e)[0]]);
    }
    let pe = PartialEmbedding::from_parts(xt, Arc::new(p.h.clone()), map, embedded).unwrap();
    assert_eq!(pe.free(), vec![a, b]);
    let w = pe.get(3).unwrap();
    assert!(p.in_a[w]);
    // |{w, a, b} ∩ A| = 2, so the leaf edge cannot go on the leftover
    assert!(!p.h.contains_edge(&[w, a, b]));
    let pi = pi_type(&p.h, &part, Rational::new(1, 6));
    assert_eq!(pi.pi[w], 0);
    let cfg = AbsorbConfig {
        parity: Some(ParityGuide { partition: part, pi, balanced: true }),
        reorder: false,
        max_candidates: 0,
    };
    let leaf = OrderedEdge { edge: 6, parent: 3, child: 7 };
    match absorb_loop(&pe, &[], &[leaf], &cfg) {
        Err(Error::NoMatchingTuple(msg)) => assert!(msg.contains("pi mismatch"), "{msg}"),
        other => panic!("expected a parity block, got {:?}", other.map(|r| r.steps.len())),
    }
}

/// Three pool gadgets, each two single-diamond chains from B-vertices (X1) to
/// A-vertices (X2), immersed on L1 in a complete host; the free vertices
/// outside X2 are labelled to give the leftover skew `target`.
fn balance_instance(target: i64) -> (PartialEmbedding, Vec<Gadget>, Partition) {
    let big_n = 75;
    let h = Hypergraph::complete(big_n, 3).unwrap();
    let mut pool = Vec::new();
    for gi in 0..3 {
        let c = |ci: usize| {
            let base = 8 * gi + 4 * ci;
            chain_gadget(base + 2, [base, base + 1], base + 3, 1)
        };
        pool.push(gadget_union(&c(0), &c(1)).unwrap());
    }
    let items = pool.iter().flat_map(|g| gadget_items(g, 0).unwrap()).collect();
    let task = ImmersionTask::new(items).unwrap();
    let x2: BTreeSet<usize> = pool.iter().flat_map(|g| g.x2.clone()).collect();
    let reserved: Vec<usize> = x2.iter().copied().collect();
    let pe = immerse_embed_avoiding(&h, &Tree::path(30).unwrap(), 3, &task, &reserved, &Config::default(), 3).unwrap();
    let x1: BTreeSet<usize> = pool.iter().flat_map(|g| g.x1.clone()).collect();
    let free = pe.free();
    assert!(x2.iter().all(|v| free.contains(v)));
    let others: Vec<usize> = free.iter().copied().filter(|v| !x2.contains(v)).collect();
    // skew = 6 + a - (others - a)
    let a = ((target - 6 + others.len() as i64) / 2) as usize;
    let mut in_a = vec![false; big_n];
    for &v in &x2 {
        in_a[v] = true;
    }
    for &v in &others[..a] {
        in_a[v] = true;
    }
    for (v, side) in in_a.iter_mut().enumerate() {
        if !free.contains(&v) && !x1.contains(&v) {
            *side = v % 2 == 0;
        }
    }
    let part = Partition::bipartition(&in_a);
    assert_eq!(leftover_skew(&pe, &part), target);
    (pe, pool, part)
}

#[test]
fn balancing_cases() {
    let (pe, pool, part) = balance_instance(0);
    let run = balance_leftover(&pe, &[pool.clone(), vec![]], &part).unwrap();
    assert!(run.flips.is_empty());
    assert_eq!(run.pe.raw_map(), pe.raw_map());

    // each flip returns two B-vertices and takes two A-vertices: skew -4
    let (pe, pool, part) = balance_instance(6);
    let run = balance_leftover(&pe, &[pool, vec![]], &part).unwrap();
    assert_eq!(run.flips.len(), 1);
    assert!(run.flips.iter().all(|f| f.delta_b == 2));
    assert_eq!(leftover_skew(&run.pe, &part), 2);
    run.pe.verify().unwrap();
    for (sw, f) in run.switches.iter().zip(&run.flips) {
        assert_eq!(sw.out_set.len(), 2);
        assert_eq!(f.skew_after, 2);
    }

    let (pe, _, part) = balance_instance(4);
    assert!(matches!(balance_leftover(&pe, &[vec![], vec![]], &part), Err(Error::PoolsExhausted { skew: 4 })));

    // a pool pointing the wrong way cannot help
    let (pe, pool, part) = balance_instance(-4);
    assert!(matches!(balance_leftover(&pe, &[pool, vec![]], &part), Err(Error::PoolsExhausted { skew: -4 })));
}

#[test]
fn orientation_reads_sides() {
    let part = Partition::bipartition(&[true, false]);
    assert!(Orientation::AB.in_a(&part, 0) && Orientation::BA.in_a(&part, 1));
}
