//! Lower-bound constructions, their counting certificates, and the exact
//! embedding oracle.
//!
//! Both constructions colour the vertices and keep exactly the k-sets whose
//! colour sum is 1 modulo q. The parity construction is the case q = 2 with
//! A playing the role of colour 1.

mod certificate;
mod oracle;

pub use certificate::{parity_certificate, BlockTrace, Certificate, CertificateOutcome};
pub use oracle::{brute_force_embed, search_embedding, verify_embedding, OracleOutcome, OracleReport, SearchSpec};

use serde::{Deserialize, Serialize};

use crate::combinat::binomial;
use crate::error::{invalid, Error, Result};
use crate::hypercore::{DegreeProfile, Hypergraph, Partition};

/// Largest number of k-subsets scanned when building a construction.
pub const CONSTRUCTION_CAP: u64 = 2_000_000;

fn host_order(k: usize, n: usize) -> Result<usize> {
    if k < 3 {
        return invalid("constructions need k >= 3");
    }
    if n < 2 {
        return invalid("tree order must be at least 2");
    }
    let big_n = (k - 1) * n + 2 - k;
    if binomial(big_n, k) > CONSTRUCTION_CAP {
        return Err(Error::SizeCap(format!("C({big_n}, {k}) exceeds {CONSTRUCTION_CAP}")));
    }
    Ok(big_n)
}

fn profiles(h: &Hypergraph) -> Result<Vec<DegreeProfile>> {
    (1..h.k()).map(|d| h.min_d_degree(d)).collect()
}

/// The k-graph on N = (k-1)n - k + 2 vertices split as A ∪ B with |A| even and
/// ||A| - |B|| <= 1, whose edges are the k-sets meeting A in an odd number of
/// vertices. A is `0..|A|`.
#[derive(Clone, Debug)]
pub struct ParityConstruction {
    pub k: usize,
    pub n: usize,
    pub big_n: usize,
    pub h: Hypergraph,
    pub in_a: Vec<bool>,
    /// Minimum d-degree profiles for d = 1..k-1.
    pub profiles: Vec<DegreeProfile>,
}

pub fn build_parity_construction(k: usize, n: usize) -> Result<ParityConstruction> {
    if n % 2 == 1 {
        return invalid(format!("tree order n = {n} must be even"));
    }
    let big_n = host_order(k, n)?;
    let lo = big_n / 2;
    let a = [lo, big_n - lo].into_iter().find(|a| a % 2 == 0).ok_or_else(|| {
        Error::InvalidArgument(format!("N = {big_n} admits no split with |A| even and ||A|-|B|| <= 1"))
    })?;
    let in_a: Vec<bool> = (0..big_n).map(|v| v < a).collect();
    let h = Hypergraph::from_predicate(big_n, k, |s| s.iter().filter(|&&v| v < a).count() % 2 == 1)?;
    let profiles = profiles(&h)?;
    Ok(ParityConstruction { k, n, big_n, h, in_a, profiles })
}

impl ParityConstruction {
    pub fn a(&self) -> Vec<usize> {
        (0..self.big_n).filter(|&v| self.in_a[v]).collect()
    }

    pub fn b(&self) -> Vec<usize> {
        (0..self.big_n).filter(|&v| !self.in_a[v]).collect()
    }

    pub fn partition(&self) -> Partition {
        Partition::bipartition(&self.in_a)
    }
}

/// The k-graph whose vertices are coloured 1..q in near-equal parts and whose
/// edges are the k-sets with colour sum 1 mod q. If the total colour sum is 1
/// mod q, one vertex moves from part 1 to part 2.
#[derive(Clone, Debug)]
pub struct ModQConstruction {
    pub k: usize,
    pub n: usize,
    pub q: usize,
    pub big_n: usize,
    pub h: Hypergraph,
    /// c(v) in 1..=q.
    pub color: Vec<usize>,
    pub part_sizes: Vec<usize>,
    pub adjusted: bool,
    pub profiles: Vec<DegreeProfile>,
}

pub fn build_mod_q_construction(k: usize, n: usize, q: usize) -> Result<ModQConstruction> {
    if q < 2 || q > k {
        return invalid(format!("need 1 < q <= k, got q = {q}, k = {k}"));
    }
    if n < 2 || !(n - 2).is_multiple_of(q) {
        return invalid(format!("need (n - 2) divisible by q, got n = {n}, q = {q}"));
    }
    let big_n = host_order(k, n)?;
    let mut sizes: Vec<usize> = (0..q).map(|i| big_n / q + usize::from(i < big_n % q)).collect();
    let total: usize = sizes.iter().enumerate().map(|(i, s)| (i + 1) * s).sum();
    let adjusted = total % q == 1 % q;
    if adjusted {
        sizes[0] -= 1;
        sizes[1] += 1;
    }
    let mut color = Vec::with_capacity(big_n);
    for (i, &s) in sizes.iter().enumerate() {
        color.extend(std::iter::repeat_n(i + 1, s));
    }
    let h = Hypergraph::from_predicate(big_n, k, |s| s.iter().map(|&v| color[v]).sum::<usize>() % q == 1)?;
    let profiles = profiles(&h)?;
    Ok(ModQConstruction { k, n, q, big_n, h, color, part_sizes: sizes, adjusted, profiles })
}

impl ModQConstruction {
    /// Colour sum c(V).
    pub fn total_color(&self) -> usize {
        self.color.iter().sum()
    }

    pub fn partition(&self) -> Partition {
        Partition { q: self.q, labels: self.color.iter().map(|&c| (c - 1) as u8).collect() }
    }
}

/// Either construction, viewed uniformly as a colouring mod q.
#[derive(Clone, Debug)]
pub enum Construction {
    Parity(ParityConstruction),
    ModQ(ModQConstruction),
}

impl Construction {
    pub fn host(&self) -> &Hypergraph {
        match self {
            Construction::Parity(p) => &p.h,
            Construction::ModQ(m) => &m.h,
        }
    }

    pub fn modulus(&self) -> usize {
        match self {
            Construction::Parity(_) => 2,
            Construction::ModQ(m) => m.q,
        }
    }

    pub fn k(&self) -> usize {
        self.host().k()
    }

    pub fn tree_order(&self) -> usize {
        match self {
            Construction::Parity(p) => p.n,
            Construction::ModQ(m) => m.n,
        }
    }

    /// c(v) mod q; for the parity construction, 1 on A and 0 on B.
    pub fn residue(&self, v: usize) -> usize {
        match self {
            Construction::Parity(p) => usize::from(p.in_a[v]),
            Construction::ModQ(m) => m.color[v] % m.q,
        }
    }

    pub fn partition(&self) -> Partition {
        match self {
            Construction::Parity(p) => p.partition(),
            Construction::ModQ(m) => m.partition(),
        }
    }

    pub fn profiles(&self) -> &[DegreeProfile] {
        match self {
            Construction::Parity(p) => &p.profiles,
            Construction::ModQ(m) => &m.profiles,
        }
    }

    pub fn descriptor(&self) -> ConstructionDescriptor {
        let part = self.partition();
        ConstructionDescriptor {
            kind: match self {
                Construction::Parity(_) => "parity".into(),
                Construction::ModQ(_) => "modq".into(),
            },
            k: self.k(),
            n: self.tree_order(),
            q: match self {
                Construction::Parity(_) => None,
                Construction::ModQ(m) => Some(m.q),
            },
            partition: crate::hypercore::write_partition(&part).trim_end().to_string(),
        }
    }

    /// Rebuilds a construction from a host and its partition file, checking
    /// that the edge set is exactly the one the colouring prescribes.
    pub fn from_host(h: Hypergraph, part: &Partition) -> Result<Construction> {
        if part.labels.len() != h.n() {
            return invalid("partition length differs from host order");
        }
        let k = h.k();
        let big_n = h.n();
        if !(big_n + k - 2).is_multiple_of(k - 1) {
            return invalid(format!("N = {big_n} is not (k-1)n - k + 2 for any n"));
        }
        let n = (big_n + k - 2) / (k - 1);
        let q = part.q;
        let color: Vec<usize> = part.labels.iter().map(|&c| c as usize + 1).collect();
        let expected = Hypergraph::from_predicate(big_n, k, |s| s.iter().map(|&v| color[v]).sum::<usize>() % q == 1)?;
        if expected != h {
            return invalid("host edges do not match the colour-sum rule for this partition");
        }
        let profiles = profiles(&h)?;
        if q == 2 {
            let in_a: Vec<bool> = part.labels.iter().map(|&c| c == 0).collect();
            Ok(Construction::Parity(ParityConstruction { k, n, big_n, h, in_a, profiles }))
        } else {
            let mut part_sizes = vec![0; q];
            for &c in &color {
                part_sizes[c - 1] += 1;
            }
            Ok(Construction::ModQ(ModQConstruction { k, n, q, big_n, h, color, part_sizes, adjusted: false, profiles }))
        }
    }
}

/// JSON descriptor of a construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionDescriptor {
    pub kind: String,
    pub k: usize,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<usize>,
    pub partition: String,
}
