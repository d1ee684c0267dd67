//! Explicit numeric parameters standing in for asymptotic constants.
//!
//! None of these values come with a guarantee; they are engineering defaults
//! chosen so that desk-scale instances (tens of vertices) behave sensibly.

use serde::{Deserialize, Serialize};

use crate::Rational;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    /// Slack above a degree threshold, used when generating "dense" hosts.
    pub epsilon: Rational,
    /// Reservoir size as a fraction of the host order.
    pub reservoir_frac: Rational,
    /// Minimum number of connecting paths per pair inside the reservoir.
    pub reservoir_floor: usize,
    /// Retry cap for every sample-and-verify step.
    pub attempt_cap: usize,
    /// Diamond-graph threshold: xy is an edge iff #diamonds >= gamma * C(n, k-1).
    pub gamma: Rational,
    /// Separation threshold: e(U1, U2) < mu |U1| |U2|.
    pub mu: Rational,
    /// Share of N(w) with even |W ∩ A| needed for pi(w) = 0.
    pub pi_share: Rational,
    /// Node budget for the exact oracle.
    pub node_budget: u64,
    /// Node budget for each budgeted gadget or sub-embedding search.
    pub search_budget: u64,
    /// Largest n handled by the exact separation scan.
    pub separation_exact_cap: usize,
    /// Largest tree order handled by tree enumeration.
    pub tree_enum_cap: usize,
    /// Loose-cycle length used by the almost-spanning tiling (odd).
    pub cycle_len: usize,
    /// Largest diamond-chain length searched.
    pub max_chain_len: usize,
    /// Target number of absorbing tuples sampled per pipeline run.
    pub family_target: usize,
    /// Window used when choosing the size of the absorbing subtree T(u), as a
    /// fraction of the tree order.
    pub nu: Rational,
    /// Minimum tree distance between the anchors chosen for immersed items.
    pub immersion_spacing: usize,
    /// Largest number of immersion items per tree vertex.
    pub immersion_ratio: Rational,
    /// Share of the tree's leaves left for the absorption stage.
    pub alpha: Rational,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            epsilon: Rational::new(1, 20),
            reservoir_frac: Rational::new(1, 10),
            reservoir_floor: 1,
            attempt_cap: 50,
            gamma: Rational::new(1, 20),
            mu: Rational::new(1, 20),
            pi_share: Rational::new(1, 6),
            node_budget: 100_000_000,
            search_budget: 200_000,
            separation_exact_cap: 22,
            tree_enum_cap: 12,
            cycle_len: 3,
            max_chain_len: 4,
            family_target: 64,
            nu: Rational::new(1, 2),
            immersion_spacing: 5,
            immersion_ratio: Rational::new(1, 3),
            alpha: Rational::new(1, 10),
        }
    }
}

impl Config {
    /// Default config with budgets overridden by `HYPERTREE_NODE_BUDGET` and
    /// `HYPERTREE_SEARCH_BUDGET` when set.
    pub fn from_env() -> Self {
        let mut cfg = Self::default();
        if let Some(v) = env_u64("HYPERTREE_NODE_BUDGET") {
            cfg.node_budget = v;
        }
        if let Some(v) = env_u64("HYPERTREE_SEARCH_BUDGET") {
            cfg.search_budget = v;
        }
        cfg
    }
}

fn env_u64(key: &str) -> Option<u64> {
    std::env::var(key).ok()?.trim().parse().ok()
}
