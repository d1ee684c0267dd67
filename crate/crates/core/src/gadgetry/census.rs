use std::collections::BTreeMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{
    diamond_graph, find_balancers, find_proto_balancers, find_separation, pi_type, ChainFinder, Orientation,
    SeparationMode, SeparationOutcome,
};
use crate::combinat::{derive_seed, rng};
use crate::error::Result;
use crate::hypercore::{Hypergraph, Partition};
use crate::{Config, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CensusOptions {
    pub gamma: Rational,
    pub mu: Rational,
    /// Balancers are counted for every t' in 2..=t.
    pub t: usize,
    pub seed: u64,
    pub search_budget: u64,
    pub separation_cap: usize,
    pub max_chain_len: usize,
    /// Number of random vertex pairs probed for diamond-chains.
    pub chain_pairs: usize,
    pub proto_limit: usize,
    pub balancer_limit: usize,
}

impl CensusOptions {
    pub fn from_config(cfg: &Config, t: usize, seed: u64) -> Self {
        Self {
            gamma: cfg.gamma,
            mu: cfg.mu,
            t,
            seed,
            search_budget: cfg.search_budget,
            separation_cap: cfg.separation_exact_cap,
            max_chain_len: cfg.max_chain_len,
            chain_pairs: 20,
            proto_limit: 1000,
            balancer_limit: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiamondGraphSummary {
    pub edges: usize,
    pub min_degree: usize,
    pub independent_triple: Option<[usize; 3]>,
    pub separation: SeparationOutcome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalancerCount {
    pub t_a: usize,
    pub t_b: usize,
    pub found: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiSummary {
    pub zeros: usize,
    pub ones: usize,
    pub defaulted: usize,
    /// A-vertices with π = 0 plus B-vertices with π = 1.
    pub matches_side: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GadgetCensus {
    pub n: usize,
    pub k: usize,
    pub edges: usize,
    pub total_diamonds: u64,
    /// Diamonds whose tips lie on different sides; absent without a partition.
    pub cross_diamonds: Option<u64>,
    pub diamond_graph: DiamondGraphSummary,
    /// Where the partition came from: "given", "separation" or "none".
    pub partition_source: String,
    /// Shortest chain length found per probed pair, keyed by length; key 0
    /// counts pairs where none was found within the budget.
    pub chains_by_len: BTreeMap<usize, usize>,
    pub proto_balancers_ab: usize,
    pub proto_balancers_ba: usize,
    pub balancers: Vec<BalancerCount>,
    pub pi: Option<PiSummary>,
    pub options: CensusOptions,
}

pub fn gadget_census(
    h: &Hypergraph,
    part: Option<&Partition>,
    opts: &CensusOptions,
    pi_share: Rational,
) -> Result<GadgetCensus> {
    let n = h.n();
    let dg = diamond_graph(h, opts.gamma)?;
    let mode = if n <= opts.separation_cap {
        SeparationMode::Exact { cap: opts.separation_cap }
    } else {
        SeparationMode::Heuristic { seed: opts.seed }
    };
    let separation = find_separation(&dg.graph, opts.mu, mode)?;
    let derived = separation.separation().map(|s| {
        let mut in_a = vec![false; n];
        for &v in &s.u1 {
            in_a[v] = true;
        }
        Partition::bipartition(&in_a)
    });
    let (part, source) = match (part, derived.as_ref()) {
        (Some(p), _) => (Some(p), "given"),
        (None, Some(p)) => (Some(p), "separation"),
        (None, None) => (None, "none"),
    };

    let mut chains_by_len = BTreeMap::new();
    if n >= 2 {
        let finder = ChainFinder::new(h);
        let mut g = rng(derive_seed(opts.seed, 1));
        for _ in 0..opts.chain_pairs {
            let u = g.gen_range(0..n);
            let v = (u + g.gen_range(1..n)) % n;
            let len = finder.find(u, v, opts.max_chain_len, 1, opts.search_budget).first().map_or(0, |c| c.len());
            *chains_by_len.entry(len).or_insert(0) += 1;
        }
    }

    let mut census = GadgetCensus {
        n,
        k: h.k(),
        edges: h.num_edges(),
        total_diamonds: dg.counts.total(),
        cross_diamonds: None,
        diamond_graph: DiamondGraphSummary {
            edges: dg.graph.num_edges(),
            min_degree: dg.graph.min_degree(),
            independent_triple: dg.graph.independent_triple(),
            separation,
        },
        partition_source: source.into(),
        chains_by_len,
        proto_balancers_ab: 0,
        proto_balancers_ba: 0,
        balancers: Vec::new(),
        pi: None,
        options: opts.clone(),
    };
    let Some(part) = part else { return Ok(census) };
    census.cross_diamonds = Some(dg.counts.cross(&|v| part.in_a(v)));
    let pi = pi_type(h, part, pi_share);
    census.pi = Some(PiSummary {
        zeros: pi.pi.iter().filter(|&&p| p == 0).count(),
        ones: pi.pi.iter().filter(|&&p| p == 1).count(),
        defaulted: pi.defaulted.len(),
        matches_side: (0..n).filter(|&v| pi.pi[v] == u8::from(!part.in_a(v))).count(),
    });
    let two_sided = part.labels.contains(&0) && part.labels.iter().any(|&c| c != 0);
    if !two_sided || h.k() < 3 {
        return Ok(census);
    }
    for p in find_proto_balancers(h, part, opts.proto_limit, opts.search_budget)? {
        match p.orientation {
            Orientation::AB => census.proto_balancers_ab += 1,
            Orientation::BA => census.proto_balancers_ba += 1,
        }
    }
    for t in 2..=opts.t {
        let (t_a, t_b) = (t / 2, t - t / 2);
        let found = find_balancers(
            h,
            part,
            t_a,
            t_b,
            opts.balancer_limit,
            derive_seed(opts.seed, t as u64),
            opts.search_budget,
        )?;
        census.balancers.push(BalancerCount { t_a, t_b, found: found.len() });
    }
    Ok(census)
}
