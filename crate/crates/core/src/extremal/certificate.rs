use serde::{Deserialize, Serialize};

use super::Construction;
use crate::error::{invalid, Result};
use crate::treekit::{classify, expand, DegreeClass, RootedTree, Tree};

/// One block B(v) of the counting argument. For the root leaf x the block is
/// the edge e0 through x; otherwise it is V(F(v)) \ {v}, the vertices of the
/// expanded edges from v to its children.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockTrace {
    pub vertex: usize,
    pub is_root: bool,
    /// |D(v)|, the number of children.
    pub children: usize,
    /// Expansion-tree vertices of B(v).
    pub block: Vec<usize>,
    /// c(φ(B(v))) mod q, forced for every embedding φ.
    pub residue: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    /// "parity" or "modq".
    pub kind: String,
    pub q: usize,
    pub k: usize,
    pub tree_edges: Vec<(usize, usize)>,
    pub degree_class: DegreeClass,
    pub root_leaf: usize,
    pub blocks: Vec<BlockTrace>,
    /// Sum of block residues mod q; every embedding would force this to equal
    /// c(V) mod q.
    pub forced_total: usize,
    /// c(V) mod q of the host, which the construction keeps away from 1.
    pub host_total: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateOutcome {
    Blocked(Certificate),
    Inconclusive { reason: String },
}

/// Builds the counting certificate that `t^(k)` does not embed into the
/// construction, when the tree's degrees make the argument apply.
pub fn parity_certificate(c: &Construction, t: &Tree) -> Result<CertificateOutcome> {
    let k = c.k();
    let q = c.modulus();
    let xt = expand(t, k)?;
    if xt.num_vertices() != c.host().n() {
        return invalid(format!("|V(T^(k))| = {} but the host has {} vertices", xt.num_vertices(), c.host().n()));
    }
    let class = classify(t);
    let applies = if q == 2 { class.all_odd } else { class.all_one_mod(q) };
    if !applies {
        return Ok(CertificateOutcome::Inconclusive {
            reason: if q == 2 {
                "tree has a vertex of even degree".into()
            } else {
                format!("tree has a degree not congruent to 1 mod {q}")
            },
        });
    }
    let root = *t.leaves().first().expect("trees with an edge have leaves");
    let rt = RootedTree::new(t.clone(), root)?;
    let mut blocks = Vec::with_capacity(t.n());
    for v in 0..t.n() {
        let children = rt.children[v].len();
        if v == root {
            let child = rt.children[v][0];
            let e0 = xt.hyperedge(t.edge_index(v, child).unwrap()).to_vec();
            blocks.push(BlockTrace { vertex: v, is_root: true, children, block: e0, residue: 1 % q });
        } else {
            let mut block = Vec::new();
            for &w in &rt.children[v] {
                block.extend(xt.hyperedge(t.edge_index(v, w).unwrap()).iter().copied().filter(|&u| u != v));
            }
            block.sort_unstable();
            // Each child edge contributes 1 mod q and v is counted |D(v)| times;
            // both terms vanish since |D(v)| ≡ 0 mod q.
            blocks.push(BlockTrace { vertex: v, is_root: false, children, block, residue: children % q });
        }
    }
    let forced_total = blocks.iter().map(|b| b.residue).sum::<usize>() % q;
    let host_total = (0..c.host().n()).map(|v| c.residue(v)).sum::<usize>() % q;
    let cert = Certificate {
        kind: if q == 2 { "parity".into() } else { "modq".into() },
        q,
        k,
        tree_edges: t.edges().to_vec(),
        degree_class: class,
        root_leaf: root,
        blocks,
        forced_total,
        host_total,
    };
    Ok(CertificateOutcome::Blocked(cert))
}

impl Certificate {
    /// Replays the argument from scratch against `c`. Returns true iff the
    /// blocks partition V(T^(k)), every non-root block has |D(v)| ≡ 0 mod q,
    /// the root block is the expanded edge at the root leaf, the residues sum
    /// to the forced total of 1, and the host total is not 1.
    pub fn replay(&self, c: &Construction) -> Result<bool> {
        let q = self.q;
        if q != c.modulus() || self.k != c.k() {
            return Ok(false);
        }
        let t = Tree::new(self.tree_edges.len() + 1, self.tree_edges.clone())?;
        let xt = expand(&t, self.k)?;
        let mut covered = vec![0usize; xt.num_vertices()];
        for b in &self.blocks {
            for &u in &b.block {
                if u >= covered.len() {
                    return Ok(false);
                }
                covered[u] += 1;
            }
        }
        if covered.iter().any(|&x| x != 1) {
            return Ok(false);
        }
        let rt = RootedTree::new(t.clone(), self.root_leaf)?;
        if t.degree(self.root_leaf) != 1 {
            return Ok(false);
        }
        for b in &self.blocks {
            if b.children != rt.children[b.vertex].len() {
                return Ok(false);
            }
            if b.is_root {
                let e0 = xt.hyperedge(t.edge_index(b.vertex, rt.children[b.vertex][0]).unwrap());
                if b.vertex != self.root_leaf || b.block != e0 || b.residue != 1 % q {
                    return Ok(false);
                }
            } else if b.children % q != 0 || b.residue != 0 {
                return Ok(false);
            }
        }
        let sum = self.blocks.iter().map(|b| b.residue).sum::<usize>() % q;
        let host_total = (0..c.host().n()).map(|v| c.residue(v)).sum::<usize>() % q;
        Ok(sum == self.forced_total && sum == 1 % q && host_total == self.host_total && host_total != 1 % q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extremal::{build_mod_q_construction, build_parity_construction};

    #[test]
    fn star_is_blocked_in_parity_construction() {
        let c = Construction::Parity(build_parity_construction(3, 6).unwrap());
        let CertificateOutcome::Blocked(cert) = parity_certificate(&c, &Tree::star(5).unwrap()).unwrap() else {
            panic!("expected a certificate");
        };
        assert!(cert.replay(&c).unwrap());
        assert_eq!(cert.host_total, 0);
        let root = cert.blocks.iter().find(|b| b.is_root).unwrap();
        assert_eq!(root.block.len(), 3);
    }

    #[test]
    fn path_is_inconclusive() {
        let c = Construction::Parity(build_parity_construction(3, 6).unwrap());
        let out = parity_certificate(&c, &Tree::path(6).unwrap()).unwrap();
        assert!(matches!(out, CertificateOutcome::Inconclusive { .. }));
        assert!(parity_certificate(&c, &Tree::path(5).unwrap()).is_err());
    }

    #[test]
    fn mod3_star() {
        let c = Construction::ModQ(build_mod_q_construction(3, 5, 3).unwrap());
        let CertificateOutcome::Blocked(cert) = parity_certificate(&c, &Tree::star(4).unwrap()).unwrap() else {
            panic!("expected a certificate");
        };
        assert!(cert.replay(&c).unwrap());
        let mut forged = cert.clone();
        forged.blocks[0].residue = 1;
        assert!(!forged.replay(&c).unwrap());
    }
}
