//! Diamonds, the diamond graph and its separations, diamond-chains,
//! proto-balancers, balancers, the gadget algebra, π-typing and
//! parity-absorbers.

mod absorbers;
mod balancers;
mod census;
mod chains;
mod diamonds;
mod gadget;
mod separation;

pub use absorbers::{find_parity_absorbers, pi_type, GadgetBuilder, ParityAbsorber, PiType};
pub use balancers::{find_balancers, find_proto_balancers, Balancer, ProtoBalancer};
pub use census::{gadget_census, CensusOptions, GadgetCensus};
pub use chains::{find_diamond_chains, ChainFinder, DiamondChain};
pub(crate) use diamonds::diamonds_between;
pub use diamonds::{diamond_graph, enumerate_diamonds, Diamond, DiamondCounts, DiamondGraph, Graph};
pub use gadget::{gadget_compose, gadget_merge, gadget_union, Constituent, ConstituentKind, Gadget};
pub use separation::{find_separation, is_inseparable, Separation, SeparationMode, SeparationOutcome};

use serde::{Deserialize, Serialize};

use crate::hypercore::Partition;

/// Which side of a bipartition plays the role of A. `BA` exchanges A and B.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Orientation {
    AB,
    BA,
}

impl Orientation {
    pub fn in_a(self, part: &Partition, v: usize) -> bool {
        part.in_a(v) == (self == Orientation::AB)
    }
}
