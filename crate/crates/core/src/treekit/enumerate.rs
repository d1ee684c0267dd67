use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng as _;

use super::{classify, DegreeClass, Tree};
use crate::combinat::Rng;
use crate::error::{invalid, Error, Result};

/// Largest tree order accepted by [`enumerate_trees`].
pub const CANONICAL_CAP: usize = 12;

fn ahu(t: &Tree, v: usize, parent: usize) -> String {
    let mut codes: Vec<String> = t.neighbours(v).iter().filter(|&&w| w != parent).map(|&w| ahu(t, w, v)).collect();
    codes.sort();
    let mut s = String::with_capacity(2 + codes.iter().map(String::len).sum::<usize>());
    s.push('(');
    for c in codes {
        s.push_str(&c);
    }
    s.push(')');
    s
}

fn centroids(t: &Tree) -> Vec<usize> {
    let n = t.n();
    let rt = super::RootedTree::new(t.clone(), 0).expect("vertex 0 exists");
    let mut best = usize::MAX;
    let mut out = Vec::new();
    for v in 0..n {
        let mut worst = n - rt.subtree_size[v];
        for &c in &rt.children[v] {
            worst = worst.max(rt.subtree_size[c]);
        }
        if worst < best {
            best = worst;
            out = vec![v];
        } else if worst == best {
            out.push(v);
        }
    }
    out
}

/// AHU parenthesis encoding rooted at the centroid (the smaller encoding when
/// there are two centroids). Equal strings iff isomorphic trees.
pub fn canonical_form(t: &Tree) -> String {
    centroids(t).into_iter().map(|c| ahu(t, c, usize::MAX)).min().unwrap()
}

/// One representative per isomorphism class of n-vertex trees with maximum
/// degree at most `max_degree` whose degree class passes `filter`, sorted by
/// canonical form.
///
/// Trees are grown one leaf at a time with canonical-form deduplication at each
/// order: every tree of maximum degree at most Δ arises by adding a leaf to a
/// smaller such tree.
pub fn enumerate_trees(
    n: usize,
    max_degree: usize,
    filter: Option<&dyn Fn(&DegreeClass) -> bool>,
) -> Result<Vec<Tree>> {
    if n == 0 {
        return invalid("tree order must be positive");
    }
    if n > CANONICAL_CAP {
        return Err(Error::SizeCap(format!("tree enumeration capped at n = {CANONICAL_CAP}")));
    }
    let mut level: BTreeMap<String, Tree> = BTreeMap::new();
    let single = Tree::new(1, vec![])?;
    level.insert(canonical_form(&single), single);
    for m in 1..n {
        let mut next = BTreeMap::new();
        for t in level.values() {
            for v in 0..m {
                if t.degree(v) >= max_degree {
                    continue;
                }
                let mut edges = t.edges().to_vec();
                edges.push((v, m));
                let grown = Tree::new(m + 1, edges)?;
                next.entry(canonical_form(&grown)).or_insert(grown);
            }
        }
        level = next;
    }
    Ok(level.into_values().filter(|t| filter.is_none_or(|f| f(&classify(t)))).collect())
}

/// Decodes a Prüfer sequence over `0..seq.len() + 2`.
pub fn prufer_decode(seq: &[usize]) -> Result<Tree> {
    let n = seq.len() + 2;
    if let Some(&v) = seq.iter().find(|&&v| v >= n) {
        return Err(Error::InvalidVertex { vertex: v, n });
    }
    let mut degree = vec![1usize; n];
    for &v in seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &v in seq {
        let leaf = (0..n).find(|&u| degree[u] == 1).unwrap();
        edges.push((leaf, v));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    Tree::new(n, edges)
}

/// Random n-vertex tree with maximum degree at most `max_degree` (at least 2
/// when n > 2): random attachment to non-saturated vertices, then a random
/// relabelling.
pub fn random_tree(n: usize, max_degree: usize, rng: &mut Rng) -> Result<Tree> {
    if n == 0 {
        return invalid("tree order must be positive");
    }
    if n > 2 && max_degree < 2 {
        return invalid("max degree below 2 admits no tree on more than 2 vertices");
    }
    let mut deg = vec![0usize; n];
    let mut edges = Vec::with_capacity(n - 1);
    for v in 1..n {
        let open: Vec<usize> = (0..v).filter(|&u| deg[u] < max_degree).collect();
        let u = open[rng.gen_range(0..open.len())];
        deg[u] += 1;
        deg[v] += 1;
        edges.push((u, v));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    Tree::new(n, edges)?.relabel(&perm)
}
