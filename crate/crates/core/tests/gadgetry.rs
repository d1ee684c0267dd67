use std::collections::BTreeSet;

use hypertree::combinat::{binomial, for_each_subset, rng};
use hypertree::extremal::build_parity_construction;
use hypertree::gadgetry::{
    diamond_graph, enumerate_diamonds, find_balancers, find_diamond_chains, find_parity_absorbers,
    find_proto_balancers, find_separation, gadget_compose, gadget_union, pi_type, DiamondChain, DiamondCounts, Gadget,
    Orientation, SeparationMode, SeparationOutcome,
};
use hypertree::hypercore::{random_hypergraph, random_with_min_degree, Hypergraph, Partition};
use hypertree::{Config, Error, Rational};
use proptest::prelude::*;
use rand::seq::SliceRandom;

/// Diamonds as pairs of edges meeting in k - 1 vertices, keyed by tips.
fn brute_diamonds(h: &Hypergraph) -> Vec<(usize, usize)> {
    let es = h.edges();
    let mut out = Vec::new();
    for i in 0..es.len() {
        for j in i + 1..es.len() {
            let only_i: Vec<usize> = es[i].iter().copied().filter(|v| !es[j].contains(v)).collect();
            let only_j: Vec<usize> = es[j].iter().copied().filter(|v| !es[i].contains(v)).collect();
            if only_i.len() == 1 {
                let (a, b) = (only_i[0].min(only_j[0]), only_i[0].max(only_j[0]));
                out.push((a, b));
            }
        }
    }
    out
}

fn random_split(n: usize, seed: u64) -> Partition {
    let mut in_a: Vec<bool> = (0..n).map(|v| v < n / 2).collect();
    in_a.shuffle(&mut rng(seed));
    Partition::bipartition(&in_a)
}

type ProtoKey = (Orientation, Vec<usize>, Vec<usize>, Vec<usize>);

/// Every proto-balancer of a 3-graph from the intersection pattern alone.
fn brute_proto_balancers(h: &Hypergraph, part: &Partition) -> BTreeSet<ProtoKey> {
    let es = h.edges();
    let mut out = BTreeSet::new();
    for o in [Orientation::AB, Orientation::BA] {
        let a = |e: &[usize]| e.iter().filter(|&&v| o.in_a(part, v)).count();
        let meet = |x: &[usize], y: &[usize]| x.iter().filter(|v| y.contains(v)).count();
        for x1 in es {
            for x2 in es {
                if x1 >= x2 || a(x1) != 2 || a(x2) != 2 || meet(x1, x2) != 2 {
                    continue;
                }
                let both: Vec<usize> = x1.iter().copied().filter(|v| x2.contains(v)).collect();
                if a(&both) != 2 {
                    continue;
                }
                for x3 in es {
                    if a(x3) == 0 && meet(x1, x3) == 1 && meet(x2, x3) == 1 {
                        out.insert((o, x1.clone(), x2.clone(), x3.clone()));
                    }
                }
            }
        }
    }
    out
}

fn chain_ok(h: &Hypergraph, c: &DiamondChain, u: usize, v: usize) -> bool {
    let l = c.shared.len();
    if c.waypoints.len() != l + 1 || c.waypoints[0] != u || c.waypoints[l] != v {
        return false;
    }
    let mut vsets = Vec::new();
    for i in 0..l {
        let (x, y) = (c.waypoints[i], c.waypoints[i + 1]);
        let s = &c.shared[i];
        if s.len() != h.k() - 1 || s.contains(&x) || s.contains(&y) || x == y {
            return false;
        }
        let mut ex = s.clone();
        ex.push(x);
        let mut ey = s.clone();
        ey.push(y);
        if !h.contains_edge(&ex) || !h.contains_edge(&ey) {
            return false;
        }
        let mut set: BTreeSet<usize> = s.iter().copied().collect();
        set.insert(x);
        set.insert(y);
        vsets.push(set);
    }
    for i in 0..l {
        for j in i + 1..l {
            let common: Vec<usize> = vsets[i].intersection(&vsets[j]).copied().collect();
            let want = if j == i + 1 { vec![c.waypoints[j]] } else { vec![] };
            if common != want {
                return false;
            }
        }
    }
    true
}

fn parity_setup(n: usize) -> (Hypergraph, Partition, Vec<bool>) {
    let p = build_parity_construction(3, n).unwrap();
    let part = p.partition();
    (p.h, part, p.in_a)
}

#[test]
fn complete_five_has_thirty_diamonds() {
    let h = Hypergraph::complete(5, 3).unwrap();
    assert_eq!(enumerate_diamonds(&h, None, None).len(), 30);
    assert_eq!(brute_diamonds(&h).len(), 30);
    assert_eq!(binomial(5, 2) * binomial(3, 2), 30);
    assert_eq!(enumerate_diamonds(&h, Some(0), Some(4)).len(), 3);
}

#[test]
fn parity_construction_structure() {
    for n in [6, 8] {
        let (h, part, in_a) = parity_setup(n);
        let big_n = h.n();
        // zero cross diamonds, exhaustively
        assert!(brute_diamonds(&h).iter().all(|&(x, y)| in_a[x] == in_a[y]));
        let dg = diamond_graph(&h, Rational::new(1, 10)).unwrap();
        for x in 0..big_n {
            for y in x + 1..big_n {
                assert_eq!(dg.graph.has_edge(x, y), in_a[x] == in_a[y], "pair ({x}, {y})");
            }
        }
        let pi = pi_type(&h, &part, Rational::new(1, 6));
        assert!((0..big_n).all(|v| pi.pi[v] == u8::from(!in_a[v])));
        let sep = find_separation(&dg.graph, Rational::new(1, 20), SeparationMode::Exact { cap: 22 }).unwrap();
        let SeparationOutcome::Separated(s) = sep else { panic!("parity diamond graph must split") };
        assert_eq!(s.cross_edges, 0);
        let side: BTreeSet<bool> = s.u1.iter().map(|&v| in_a[v]).collect();
        assert_eq!(side.len(), 1);
        assert_eq!(s.u1.len() + s.u2.len(), big_n);
    }
    // A-pair at N = 11: shared pair inside B (C(5,2)) or inside the other four A-vertices (C(4,2))
    let (h, _, _) = parity_setup(6);
    assert_eq!(DiamondCounts::new(&h).get(0, 1), 16);
}

#[test]
fn cross_side_chains_do_not_exist() {
    let (h, _, in_a) = parity_setup(6);
    let a = (0..h.n()).find(|&v| in_a[v]).unwrap();
    let b = (0..h.n()).find(|&v| !in_a[v]).unwrap();
    assert!(find_diamond_chains(&h, a, b, 4, 10, u64::MAX).is_empty());
    let a2 = (a + 1..h.n()).find(|&v| in_a[v]).unwrap();
    let cs = find_diamond_chains(&h, a, a2, 2, 5, 1_000_000);
    assert!(!cs.is_empty());
    assert_eq!(cs[0].len(), 1);
    assert!(cs.iter().all(|c| chain_ok(&h, c, a, a2)));
}

#[test]
fn proto_balancers_match_exhaustive_enumeration() {
    for seed in 0..12 {
        let h = random_hypergraph(8, 3, 0.5, seed).unwrap();
        let part = random_split(8, seed);
        let found = find_proto_balancers(&h, &part, usize::MAX, u64::MAX).unwrap();
        let mut keys = BTreeSet::new();
        for pb in &found {
            assert!(pb.verify(&h, &part));
            let [c1, c2, c3] = pb.a_counts(&part);
            assert!(c1 == c2 && c1 == c3 + 2);
            let mut es = pb.edges();
            if es[0] > es[1] {
                es.swap(0, 1);
            }
            let [x1, x2, x3] = es;
            assert!(keys.insert((pb.orientation, x1, x2, x3)));
        }
        assert_eq!(keys, brute_proto_balancers(&h, &part), "seed {seed}");
    }
    let h = Hypergraph::complete(6, 3).unwrap();
    assert!(find_proto_balancers(&h, &Partition::bipartition(&[false; 6]), 1, 100).is_err());
}

#[test]
fn balancer_capacity_identity() {
    let (h, part, in_a) = parity_setup(8);
    let mut total = 0;
    for (ta, tb) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        let bs = find_balancers(&h, &part, ta, tb, 4, 11, 400_000).unwrap();
        for b in &bs {
            assert!(b.verify(&h, &part));
            assert_eq!(b.capacity(), 1 + tb as i64 - ta as i64);
            // recount B-vertices of each half from the edges, B read through the orientation
            let on_b = |v: &usize| in_a[*v] == (b.orientation == Orientation::BA);
            let count = |l: usize| b.f[l].iter().flatten().copied().filter(on_b).collect::<BTreeSet<_>>().len() as i64;
            assert_eq!(count(1) - count(0), b.capacity());
            assert!(b.f.iter().flatten().all(|e| h.contains_edge(e)));
            assert_eq!(b.vertices().len(), 2 + b.t() + 2 * b.t());
            total += 1;
        }
    }
    assert!(total > 0);
    assert!(find_balancers(&h, &part, 0, 2, 1, 0, 100).is_err());
}

#[test]
fn gadget_algebra_on_found_structures() {
    let (h, part, in_a) = parity_setup(8);
    let b = find_balancers(&h, &part, 1, 1, 1, 5, 400_000).unwrap().remove(0);
    let j = Gadget::from_balancer(&b).unwrap();
    j.check(Some(&h)).unwrap();
    // join one boundary vertex of each side by a chain outside the balancer
    let used: BTreeSet<usize> = j.vertices();
    let mut composed = None;
    'search: for &x in &j.x1 {
        for &y in &j.x2 {
            if in_a[x] != in_a[y] {
                continue;
            }
            for c in find_diamond_chains(&h, x, y, 2, 20, 1_000_000) {
                let inner: BTreeSet<usize> = c.vertices().into_iter().filter(|&v| v != x && v != y).collect();
                if inner.is_disjoint(&used) {
                    let g = Gadget::from_chain(&c, j.t).unwrap();
                    composed = Some((gadget_compose(&j, &g).unwrap(), x, y));
                    break 'search;
                }
            }
        }
    }
    let (g, x, y) = composed.expect("some boundary pair is joined by a chain");
    g.check(Some(&h)).unwrap();
    assert_eq!(g.x1.len() + 1, j.x1.len());
    assert!(!g.x1.contains(&x) && !g.x2.contains(&y));
    assert!(matches!(gadget_union(&j, &j), Err(Error::Overlap(_))));
    assert!(gadget_compose(&j, &j.flip()).is_err());
}

#[test]
fn union_is_associative_on_boundaries() {
    let h = Hypergraph::complete(12, 3).unwrap();
    let mk = |u: usize, s: [usize; 2], v: usize| {
        Gadget::from_chain(&DiamondChain { waypoints: vec![u, v], shared: vec![s.to_vec()] }, 2).unwrap()
    };
    let (a, b, c) = (mk(0, [1, 2], 3), mk(4, [5, 6], 7), mk(8, [9, 10], 11));
    let left = gadget_union(&gadget_union(&a, &b).unwrap(), &c).unwrap();
    let right = gadget_union(&a, &gadget_union(&b, &c).unwrap()).unwrap();
    assert_eq!((left.x1.clone(), left.x2.clone()), (right.x1, right.x2));
    assert_eq!(left.x1, vec![0, 4, 8]);
    left.check(Some(&h)).unwrap();
}

#[test]
fn dense_diamond_graphs_have_no_independent_triple() {
    // instances below normalized pair degree 1/3 + 1/10 are skipped, not counted
    let bound = Rational::new(13, 30);
    let mut checked = 0;
    for seed in 0..60u64 {
        let n = 9 + (seed % 4) as usize;
        let h = random_hypergraph(n, 3, 0.75, seed).unwrap();
        if h.min_d_degree(2).unwrap().normalized_min < bound {
            continue;
        }
        checked += 1;
        let dg = diamond_graph(&h, Rational::new(1, 10)).unwrap();
        let verts: Vec<usize> = (0..n).collect();
        let mut indep = 0;
        for_each_subset(&verts, 3, |s| {
            let g = &dg.graph;
            if !g.has_edge(s[0], s[1]) && !g.has_edge(s[0], s[2]) && !g.has_edge(s[1], s[2]) {
                indep += 1;
            }
        });
        assert_eq!(indep, 0, "seed {seed}");
        assert!(dg.graph.independent_triple().is_none());
    }
    assert!(checked >= 20, "only {checked} instances met the degree bound");
}

#[test]
fn absorbers_in_dense_random_host() {
    let cfg = Config::default();
    let (h, _) = random_with_min_degree(19, 3, 2, 0.9, Rational::new(3, 5), 1, 200).unwrap();
    let part = random_split(19, 4);
    let pi = pi_type(&h, &part, cfg.pi_share);
    let mut found = 0;
    for w in 0..4 {
        // S with the parity π(w) asks for
        let s: Vec<usize> = (w + 1..19)
            .collect::<Vec<_>>()
            .windows(2)
            .map(|p| vec![p[0], p[1]])
            .find(|s| s.iter().filter(|&&v| part.in_a(v)).count() % 2 == pi.pi[w] as usize)
            .unwrap();
        let abs = find_parity_absorbers(&h, &part, w, &s, 2, 2, w as u64, &cfg).unwrap();
        for a in &abs {
            assert!(a.verify(&h, &part, &pi));
            let mut e = a.witness.clone();
            e.push(w);
            assert!(h.contains_edge(&e));
            assert_eq!(a.gadget.x1, a.witness);
            assert_eq!(a.gadget.x2, s);
            assert!(!a.gadget.vertices().contains(&w));
            let half: BTreeSet<usize> = a.absorber_half().into_iter().flatten().collect();
            assert!(a.witness.iter().all(|v| half.contains(v)));
            assert!(s.iter().all(|v| !half.contains(v)));
            found += 1;
        }
        let mut bad = s.clone();
        bad[1] = (0..19).find(|&v| v != w && v != s[0] && part.in_a(v) != part.in_a(s[1])).unwrap();
        bad.sort_unstable();
        assert!(matches!(find_parity_absorbers(&h, &part, w, &bad, 2, 1, 0, &cfg), Err(Error::ParityMismatch { .. })));
    }
    assert!(found > 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diamond_counts_match_edge_pairs(n in 4usize..10, p in 20u32..90, seed in any::<u64>()) {
        let h = random_hypergraph(n, 3, f64::from(p) / 100.0, seed).unwrap();
        let brute = brute_diamonds(&h);
        let found = enumerate_diamonds(&h, None, None);
        prop_assert_eq!(found.len(), brute.len());
        prop_assert!(found.iter().all(|d| d.verify(&h)));
        let counts = DiamondCounts::new(&h);
        for x in 0..n {
            for y in x + 1..n {
                let c = brute.iter().filter(|&&t| t == (x, y)).count() as u64;
                prop_assert_eq!(counts.get(x, y), c);
                prop_assert_eq!(enumerate_diamonds(&h, Some(x), Some(y)).len() as u64, c);
            }
        }
    }

    #[test]
    fn found_chains_pass_independent_checks(n in 6usize..11, p in 40u32..90, seed in any::<u64>()) {
        let h = random_hypergraph(n, 3, f64::from(p) / 100.0, seed).unwrap();
        let (u, v) = (0, n - 1);
        let cs = find_diamond_chains(&h, u, v, 3, 8, 200_000);
        for c in &cs {
            prop_assert!(chain_ok(&h, c, u, v));
            prop_assert!(c.verify(&h));
        }
        let lens: Vec<usize> = cs.iter().map(DiamondChain::len).collect();
        prop_assert!(lens.windows(2).all(|w| w[0] <= w[1]));
        // a single diamond is the shortest chain
        let direct = brute_diamonds(&h).contains(&(u, v));
        if direct {
            prop_assert_eq!(lens.first().copied(), Some(1));
        } else {
            prop_assert!(lens.iter().all(|&l| l >= 2));
        }
    }

    #[test]
    fn diamond_graph_threshold_is_exact(n in 5usize..10, num in 1i64..10, seed in any::<u64>()) {
        let h = random_hypergraph(n, 3, 0.6, seed).unwrap();
        let gamma = Rational::new(num, 10);
        let dg = diamond_graph(&h, gamma).unwrap();
        let scale = Rational::from_integer(binomial(n, 2) as i64);
        let brute = brute_diamonds(&h);
        for x in 0..n {
            for y in x + 1..n {
                let c = Rational::from_integer(brute.iter().filter(|&&t| t == (x, y)).count() as i64);
                prop_assert_eq!(dg.graph.has_edge(x, y), c >= gamma * scale);
            }
        }
    }
}
