//! Partial embeddings, switches, immersion, absorbing families and the two
//! embedding pipelines.

mod absorb;
mod almost;
mod balance;
mod family;
mod immerse;
mod partial;
mod pipeline;
mod search;

pub use absorb::{absorb_loop, c_of_k, AbsorbConfig, AbsorbRun, AbsorbStep, ParityGuide};
pub use almost::{loose_cycle_tiling, AlmostReport};
pub use balance::{balance_leftover, leftover_skew, BalanceFlip, BalanceRun};
pub use family::{
    absorbs, coverage, sample_absorbing_family, AbsorbingTuple, CoverageReport, FamilyMember, FamilySample,
};
pub use immerse::{gadget_items, immerse_embed, immerse_embed_avoiding, ImmersionItem, ImmersionTask};
pub use partial::{
    apply_switch, diamond_switch, star_switch, switch_from_gadget_half, Direction, PartialEmbedding, Remap, Switch,
    SwitchKind,
};
pub use pipeline::{
    pipeline_embed_thm1, pipeline_embed_thm2, FailureReport, ParityRecord, PipelineRun, StageRecord, Trace,
};
pub use search::{extend_search, pending_order, SearchLimits, VertexFilter};
