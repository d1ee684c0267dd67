use serde::{Deserialize, Serialize};

use super::RootedTree;
use crate::error::{invalid, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreePart {
    pub root: usize,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreePartition {
    pub parts: Vec<TreePart>,
    pub m_prime: usize,
    pub delta: usize,
}

/// Splits a rooted tree into vertex-disjoint connected parts T_i with roots
/// x_i such that T_i ⊆ T(x_i) and m' <= |T_i| <= 2Δm'.
///
/// Greedy: scanning from the deepest level up, cut off the remaining part of
/// T(v) as soon as it has at least m' vertices. Every child remainder is then
/// below m', so a cut part has at most 1 + Δ(m' - 1) vertices. A leftover
/// piece at the root (fewer than m' vertices) is merged into an adjacent part.
pub fn partition_tree(rt: &RootedTree, m_prime: usize, delta: usize) -> Result<TreePartition> {
    let n = rt.tree.n();
    if m_prime == 0 || m_prime > n {
        return invalid(format!("need 1 <= m' <= n, got m' = {m_prime}, n = {n}"));
    }
    if delta == 0 || rt.tree.max_degree() > delta {
        return invalid(format!("Δ = {delta} below the maximum degree {}", rt.tree.max_degree()));
    }
    let mut remaining = vec![1usize; n];
    let mut cut = vec![false; n];
    let mut by_depth = rt.order.clone();
    by_depth.sort_by_key(|&v| std::cmp::Reverse(rt.depth[v]));
    let mut parts = Vec::new();
    for &v in &by_depth {
        let size = 1 + rt.children[v].iter().filter(|&&c| !cut[c]).map(|&c| remaining[c]).sum::<usize>();
        remaining[v] = size;
        if size >= m_prime {
            cut[v] = true;
            parts.push(TreePart { root: v, vertices: collect_uncut(rt, v, &cut) });
        }
    }
    if !cut[rt.root] {
        let leftover = collect_uncut(rt, rt.root, &cut);
        // Some part root hangs directly below the leftover piece.
        let idx = parts
            .iter()
            .position(|p| rt.parent[p.root].is_some_and(|q| leftover.contains(&q)))
            .ok_or_else(|| Error::Invariant("leftover piece has no adjacent part".into()))?;
        let mut merged = leftover;
        merged.extend_from_slice(&parts[idx].vertices);
        parts[idx] = TreePart { root: rt.root, vertices: merged };
    }
    let p = TreePartition { parts, m_prime, delta };
    check_partition(rt, &p)?;
    Ok(p)
}

/// Vertices of T(v) reachable from v without entering a cut child.
fn collect_uncut(rt: &RootedTree, v: usize, cut: &[bool]) -> Vec<usize> {
    let mut out = vec![v];
    let mut i = 0;
    while i < out.len() {
        let u = out[i];
        out.extend(rt.children[u].iter().filter(|&&c| !cut[c]));
        i += 1;
    }
    out
}

/// Checks disjointness and cover, T_i ⊆ T(x_i) with T_i connected, and the
/// size window m' <= |T_i| <= 2Δm'.
pub fn check_partition(rt: &RootedTree, p: &TreePartition) -> Result<()> {
    let n = rt.tree.n();
    let mut owner = vec![usize::MAX; n];
    for (i, part) in p.parts.iter().enumerate() {
        for &v in &part.vertices {
            if v >= n || owner[v] != usize::MAX {
                return Err(Error::Invariant(format!("vertex {v} repeated or invalid")));
            }
            owner[v] = i;
        }
    }
    if owner.contains(&usize::MAX) {
        return Err(Error::Invariant("parts do not cover the tree".into()));
    }
    for (i, part) in p.parts.iter().enumerate() {
        let size = part.vertices.len();
        if size < p.m_prime || size > 2 * p.delta * p.m_prime {
            return Err(Error::Invariant(format!("part {i} has size {size}")));
        }
        if !part.vertices.contains(&part.root) {
            return Err(Error::Invariant(format!("part {i} misses its root")));
        }
        for &v in &part.vertices {
            if !rt.is_ancestor(part.root, v) {
                return Err(Error::Invariant(format!("vertex {v} outside T({})", part.root)));
            }
            if v != part.root && owner[rt.parent[v].unwrap()] != i {
                return Err(Error::Invariant(format!("part {i} is not connected at {v}")));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treekit::Tree;

    #[test]
    fn path_of_ten() {
        let rt = RootedTree::new(Tree::path(10).unwrap(), 0).unwrap();
        let p = partition_tree(&rt, 3, 2).unwrap();
        assert!(p.parts.iter().all(|x| (3..=12).contains(&x.vertices.len())));
        assert_eq!(p.parts.iter().map(|x| x.vertices.len()).sum::<usize>(), 10);
    }

    #[test]
    fn star_is_one_part() {
        let rt = RootedTree::new(Tree::star(5).unwrap(), 0).unwrap();
        let p = partition_tree(&rt, 2, 5).unwrap();
        assert_eq!(p.parts.len(), 1);
        assert_eq!(p.parts[0].vertices.len(), 6);
    }

    #[test]
    fn preconditions() {
        let rt = RootedTree::new(Tree::star(5).unwrap(), 0).unwrap();
        assert!(partition_tree(&rt, 2, 4).is_err());
        assert!(partition_tree(&rt, 7, 5).is_err());
        assert!(partition_tree(&rt, 0, 5).is_err());
    }
}
