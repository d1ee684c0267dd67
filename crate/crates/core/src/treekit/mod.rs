//! Trees, rooted trees, k-expansions, degree classes, tree partitions and
//! balanced embeddings into blow-ups of loose cycles.

mod cycle_embed;
mod enumerate;
mod expansion;
mod partition;

pub use cycle_embed::{embed_into_cycle_blowup, verify_cycle_embedding, CycleBlowupEmbedding};
pub use enumerate::{canonical_form, enumerate_trees, prufer_decode, random_tree, CANONICAL_CAP};
pub use expansion::{expand, parse_expansion, write_expansion, ExpansionTree, OrderedEdge, VertexRole};
pub use partition::{check_partition, partition_tree, TreePart, TreePartition};

use std::collections::VecDeque;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// An unrooted tree on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Tree {
    /// Builds a tree, checking that the edges form a spanning tree of `0..n`.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if n == 0 {
            return invalid("a tree needs at least one vertex");
        }
        if edges.len() != n - 1 {
            return invalid(format!("{} edges for {n} vertices", edges.len()));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::InvalidVertex { vertex: u.max(v), n });
            }
            if u == v {
                return invalid(format!("self-loop at {u}"));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        if count != n {
            return invalid("edges do not connect all vertices");
        }
        Ok(Self { n, edges, adj })
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|i| (i - 1, i)).collect())
    }

    /// The star K_{1,leaves} with centre 0.
    pub fn star(leaves: usize) -> Result<Self> {
        Self::new(leaves + 1, (1..=leaves).map(|i| (0, i)).collect())
    }

    /// Two adjacent centres 0 and 1 carrying `a` and `b` leaves respectively.
    pub fn double_star(a: usize, b: usize) -> Result<Self> {
        let mut edges = vec![(0, 1)];
        edges.extend((0..a).map(|i| (0, 2 + i)));
        edges.extend((0..b).map(|i| (1, 2 + a + i)));
        Self::new(a + b + 2, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.n).filter(|&v| self.adj[v].len() == 1).collect()
    }

    /// Index of the edge joining `u` and `v`.
    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.iter().position(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u))
    }

    /// BFS distances from `s`.
    pub fn distances(&self, s: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    q.push_back(w);
                }
            }
        }
        dist
    }

    /// Relabels vertex v as `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Tree> {
        Tree::new(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect())
    }

    /// Subtree induced on `vertices` (which must be connected), relabelled in
    /// the given order.
    pub fn induced(&self, vertices: &[usize]) -> Result<Tree> {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| pos[u] != usize::MAX && pos[v] != usize::MAX)
            .map(|&(u, v)| (pos[u], pos[v]))
            .collect();
        Tree::new(vertices.len(), edges)
    }
}

pub fn write_tree(t: &Tree) -> String {
    let mut out = format!("{}\n", t.n());
    for &(u, v) in t.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

/// Parses `n` followed by n - 1 lines `u v`; `#` starts a comment.
pub fn parse_tree(text: &str) -> Result<Tree> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let nums: std::result::Result<Vec<usize>, _> = line.split_whitespace().map(str::parse).collect();
        let nums = nums.map_err(|_| Error::Parse { line: i + 1, msg: format!("bad token in {line:?}") })?;
        match (n, nums.as_slice()) {
            (None, [m]) => n = Some(*m),
            (Some(_), [u, v]) => edges.push((*u, *v)),
            _ => return Err(Error::Parse { line: i + 1, msg: format!("unexpected line {line:?}") }),
        }
    }
    let n = n.ok_or(Error::Parse { line: 0, msg: "missing vertex count".into() })?;
    Tree::new(n, edges)
}

/// A tree rooted at `root` with parent/children tables and subtree sizes.
#[derive(Clone, Debug)]
pub struct RootedTree {
    pub tree: Tree,
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    pub depth: Vec<usize>,
    /// BFS order from the root.
    pub order: Vec<usize>,
    pub subtree_size: Vec<usize>,
}

impl RootedTree {
    pub fn new(tree: Tree, root: usize) -> Result<Self> {
        let n = tree.n();
        if root >= n {
            return Err(Error::InvalidVertex { vertex: root, n });
        }
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut depth = vec![0; n];
        let mut order = Vec::with_capacity(n);
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut q = VecDeque::from([root]);
        while let Some(u) = q.pop_front() {
            order.push(u);
            for &w in tree.neighbours(u) {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(u);
                    depth[w] = depth[u] + 1;
                    children[u].push(w);
                    q.push_back(w);
                }
            }
        }
        let mut subtree_size = vec![1; n];
        for &u in order.iter().rev() {
            if let Some(p) = parent[u] {
                subtree_size[p] += subtree_size[u];
            }
        }
        Ok(Self { tree, root, parent, children, depth, order, subtree_size })
    }

    /// Vertices of T(v), the subtree below v (including v), in BFS order.
    pub fn subtree(&self, v: usize) -> Vec<usize> {
        let mut out = vec![v];
        let mut i = 0;
        while i < out.len() {
            out.extend_from_slice(&self.children[out[i]]);
            i += 1;
        }
        out
    }

    pub fn is_ancestor(&self, a: usize, mut v: usize) -> bool {
        loop {
            if v == a {
                return true;
            }
            match self.parent[v] {
                Some(p) => v = p,
                None => return false,
            }
        }
    }
}

/// Degree-parity data that decides which lower-bound construction applies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeClass {
    pub all_odd: bool,
    /// Every q in 2..=max(n, 2) such that all degrees are 1 mod q.
    pub one_mod_q: Vec<usize>,
    pub has_even_vertex: bool,
    pub max_degree: usize,
}

impl DegreeClass {
    pub fn all_one_mod(&self, q: usize) -> bool {
        self.one_mod_q.contains(&q)
    }
}

pub fn classify(t: &Tree) -> DegreeClass {
    let degs: Vec<usize> = (0..t.n()).map(|v| t.degree(v)).collect();
    let all_odd = degs.iter().all(|d| d % 2 == 1);
    let has_even_vertex = degs.iter().any(|d| d % 2 == 0);
    let one_mod_q = (2..=t.n().max(2)).filter(|&q| degs.iter().all(|d| d % q == 1)).collect();
    DegreeClass { all_odd, one_mod_q, has_even_vertex, max_degree: t.max_degree() }
}
