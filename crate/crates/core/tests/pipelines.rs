use std::collections::BTreeSet;

use hypertree::combinat::rng;
use hypertree::embedder::{pipeline_embed_thm1, pipeline_embed_thm2, PipelineRun};
use hypertree::extremal::{
    brute_force_embed, build_parity_construction, parity_certificate, CertificateOutcome, Construction, OracleOutcome,
};
use hypertree::hypercore::{random_hypergraph, random_with_min_degree, Hypergraph};
use hypertree::treekit::{classify, enumerate_trees, random_tree, Tree};
use hypertree::{Config, Error, Rational};

/// Injective, spanning, and every expanded tree edge lands on a host edge.
fn independently_valid(h: &Hypergraph, run: &PipelineRun) -> bool {
    let Some(pe) = run.embedding() else { return true };
    let Some(map) = pe.full_map() else { return false };
    let xt = pe.target();
    map.len() == h.n()
        && map.iter().collect::<BTreeSet<_>>().len() == map.len()
        && xt.hyperedges().iter().all(|e| h.contains_edge(&e.iter().map(|&v| map[v]).collect::<Vec<_>>()))
        && run.trace.final_map.as_ref() == Some(&map)
}

#[test]
fn complete_host_random_tree() {
    let cfg = Config::default();
    for seed in 0..3 {
        let t = random_tree(10, 4, &mut rng(seed)).unwrap();
        let h = Hypergraph::complete(19, 3).unwrap();
        let run = pipeline_embed_thm1(&h, &t, 3, 1, &cfg, seed).unwrap();
        assert!(run.is_success(), "seed {seed}: {:?}", run.outcome.err());
        assert!(independently_valid(&h, &run));
        let run = pipeline_embed_thm1(&h, &Tree::path(10).unwrap(), 3, 2, &cfg, seed).unwrap();
        assert!(run.is_success());
        assert!(independently_valid(&h, &run));
    }
}

#[test]
fn dense_random_hosts_are_sound() {
    let cfg = Config::default();
    let mut ok = 0;
    for seed in 0..3u64 {
        let (h, _) = random_with_min_degree(51, 3, 1, 0.66, Rational::new(3, 5), seed, 50).unwrap();
        let t = random_tree(26, 4, &mut rng(seed)).unwrap();
        let run = pipeline_embed_thm1(&h, &t, 3, 1, &cfg, seed).unwrap();
        assert!(independently_valid(&h, &run), "seed {seed}");
        if let Err(f) = &run.outcome {
            assert!(!f.stage.is_empty() && !f.diagnosis.is_empty());
        }
        ok += usize::from(run.is_success());
        assert!(run.trace.stages.iter().any(|s| s.stage == "reservoir"));
    }
    println!("dense hosts: {ok}/3 embedded");
}

#[test]
fn parity_obstruction_fails_honestly() {
    let cfg = Config::default();
    let p = build_parity_construction(3, 6).unwrap();
    let t = Tree::star(5).unwrap();
    let c = Construction::Parity(p.clone());
    assert!(matches!(parity_certificate(&c, &t).unwrap(), CertificateOutcome::Blocked(_)));
    let run = pipeline_embed_thm1(&p.h, &t, 3, 2, &cfg, 0).unwrap();
    let f = run.outcome.as_ref().expect_err("the certificate rules out every embedding");
    assert!(!f.stage.is_empty());
    assert_eq!(f.attempt_cap, cfg.attempt_cap);
    assert!(run.trace.final_map.is_none());
}

#[test]
fn input_checks() {
    let cfg = Config::default();
    let h = Hypergraph::complete(11, 3).unwrap();
    assert!(pipeline_embed_thm1(&h, &Tree::path(5).unwrap(), 3, 1, &cfg, 0).is_err());
    assert!(pipeline_embed_thm1(&h, &Tree::path(6).unwrap(), 3, 3, &cfg, 0).is_err());
    let err = pipeline_embed_thm2(&h, &Tree::star(5).unwrap(), 3, &cfg, 0).unwrap_err();
    assert!(matches!(err, Error::InvalidArgument(_)));
}

#[test]
fn thm2_inseparable_branch() {
    let cfg = Config::default();
    let (h, _) = random_with_min_degree(19, 3, 2, 0.9, Rational::new(3, 5), 1, 200).unwrap();
    assert!(h.min_d_degree(2).unwrap().normalized_min >= Rational::new(3, 5));
    let run = pipeline_embed_thm2(&h, &Tree::path(10).unwrap(), 3, &cfg, 0).unwrap();
    assert_eq!(run.trace.branch, "inseparable");
    assert!(run.is_success(), "{:?}", run.outcome.err());
    assert!(independently_valid(&h, &run));
}

#[test]
fn thm2_separable_branch_on_parity_construction() {
    // outcomes are recorded, soundness is asserted
    let cfg = Config::default();
    let p = build_parity_construction(3, 10).unwrap();
    let mut g = rng(5);
    let mut outcomes = Vec::new();
    for seed in 0..3u64 {
        let t = loop {
            let t = random_tree(10, 4, &mut g).unwrap();
            if classify(&t).has_even_vertex {
                break t;
            }
        };
        let run = pipeline_embed_thm2(&p.h, &t, 3, &cfg, seed).unwrap();
        assert_eq!(run.trace.branch, "separable");
        assert!(independently_valid(&p.h, &run));
        assert!(!run.trace.parity_ledger.is_empty() || run.outcome.is_err());
        outcomes.push(run.is_success());
    }
    println!("separable N = 19: {outcomes:?}");
}

#[test]
fn pipeline_successes_are_confirmed_by_the_oracle() {
    let cfg = Config::default();
    let mut confirmed = 0;
    for seed in 0..12u64 {
        let h =
            if seed < 4 { Hypergraph::complete(11, 3).unwrap() } else { random_hypergraph(11, 3, 0.8, seed).unwrap() };
        for t in enumerate_trees(6, 6, None).unwrap() {
            let mut runs = vec![pipeline_embed_thm1(&h, &t, 3, 1, &cfg, seed).unwrap()];
            if classify(&t).has_even_vertex {
                runs.push(pipeline_embed_thm2(&h, &t, 3, &cfg, seed).unwrap());
            }
            for run in runs {
                assert!(independently_valid(&h, &run));
                if run.is_success() {
                    let xt = run.embedding().unwrap().target().clone();
                    let r = brute_force_embed(&h, &xt, 100_000_000).unwrap();
                    assert!(matches!(r.outcome, OracleOutcome::Embedding(_)), "seed {seed}");
                    confirmed += 1;
                }
            }
        }
    }
    assert!(confirmed > 0);
    println!("oracle confirmed {confirmed} pipeline successes");
}
