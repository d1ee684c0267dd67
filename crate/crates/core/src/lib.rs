//! Desk-scale laboratory for spanning k-expansion hypertrees in k-uniform
//! hypergraphs: lower-bound constructions with checkable certificates, an exact
//! embedding oracle, diamond/balancer gadgets, and absorption-based embedding
//! pipelines.
//!
//! Vertices are dense ids `0..n`. Every randomized routine takes an explicit
//! `u64` seed and is deterministic given it.

pub mod combinat;
pub mod config;
pub mod embedder;
pub mod error;
pub mod extremal;
pub mod gadgetry;
pub mod hypercore;
pub mod treekit;

pub use config::Config;
pub use error::{Error, Result};
pub use hypercore::Hypergraph;
pub use treekit::{ExpansionTree, RootedTree, Tree};

/// Exact rational used for all thresholds and normalized degrees.
pub type Rational = num_rational::Ratio<i64>;
