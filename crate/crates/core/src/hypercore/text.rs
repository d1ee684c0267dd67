//! Plain-text formats.
//!
//! Hypergraph: first non-comment line `k n`, then one edge per line as
//! ascending vertex ids; `#` starts a comment. Partition: one line of n
//! characters, either from `{A, B}` or digits `0..q-1`.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::Hypergraph;
use crate::error::{Error, Result};

fn parse_err<T>(line: usize, msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, msg: msg.into() })
}

pub fn write_hypergraph(h: &Hypergraph) -> String {
    let mut out = format!("{} {}\n", h.k(), h.n());
    for e in h.edges() {
        let parts: Vec<String> = e.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{}", parts.join(" ")).unwrap();
    }
    out
}

pub fn parse_hypergraph(text: &str) -> Result<Hypergraph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let nums: std::result::Result<Vec<usize>, _> = line.split_whitespace().map(str::parse).collect();
        let Ok(nums) = nums else {
            return parse_err(i + 1, format!("non-integer token in {line:?}"));
        };
        match header {
            None => {
                if nums.len() != 2 {
                    return parse_err(i + 1, "header must be `k n`");
                }
                header = Some((nums[0], nums[1]));
            }
            Some((k, _)) => {
                if nums.len() != k {
                    return parse_err(i + 1, format!("edge has {} ids, expected {k}", nums.len()));
                }
                if nums.windows(2).any(|w| w[0] >= w[1]) {
                    return parse_err(i + 1, "edge ids must be strictly ascending");
                }
                edges.push(nums);
            }
        }
    }
    let Some((k, n)) = header else {
        return parse_err(0, "missing `k n` header");
    };
    Hypergraph::new(n, k, edges)
}

/// A labelling of the vertices by classes `0..q`. For bipartitions, class 0 is
/// A and class 1 is B.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    pub q: usize,
    pub labels: Vec<u8>,
}

impl Partition {
    pub fn bipartition(in_a: &[bool]) -> Self {
        Self { q: 2, labels: in_a.iter().map(|&a| u8::from(!a)).collect() }
    }

    pub fn in_a(&self, v: usize) -> bool {
        self.labels[v] == 0
    }

    pub fn class(&self, c: u8) -> Vec<usize> {
        (0..self.labels.len()).filter(|&v| self.labels[v] == c).collect()
    }
}

pub fn write_partition(p: &Partition) -> String {
    let mut s: String = p
        .labels
        .iter()
        .map(|&c| {
            if p.q == 2 {
                if c == 0 {
                    'A'
                } else {
                    'B'
                }
            } else {
                char::from(b'0' + c)
            }
        })
        .collect();
    s.push('\n');
    s
}

/// Parses a partition line for `n` vertices. Letter files give q = 2; digit
/// files give q = 1 + the largest digit used (at least 2).
pub fn parse_partition(text: &str, n: usize) -> Result<Partition> {
    let Some((i, line)) =
        text.lines().enumerate().map(|(i, l)| (i, l.split('#').next().unwrap().trim())).find(|(_, l)| !l.is_empty())
    else {
        return parse_err(0, "empty partition file");
    };
    let chars: Vec<char> = line.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.len() != n {
        return parse_err(i + 1, format!("partition has {} labels, expected {n}", chars.len()));
    }
    if chars.iter().all(|c| *c == 'A' || *c == 'B') {
        return Ok(Partition { q: 2, labels: chars.iter().map(|&c| u8::from(c == 'B')).collect() });
    }
    let mut labels = Vec::with_capacity(n);
    for c in chars {
        match c.to_digit(10) {
            Some(d) => labels.push(d as u8),
            None => return parse_err(i + 1, format!("bad partition label {c:?}")),
        }
    }
    let q = (*labels.iter().max().unwrap_or(&0) as usize + 1).max(2);
    Ok(Partition { q, labels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let h = Hypergraph::complete(5, 3).unwrap();
        let text = write_hypergraph(&h);
        assert_eq!(parse_hypergraph(&text).unwrap(), h);
        let with_comments = format!("# a comment\n{text}# trailing\n");
        assert_eq!(parse_hypergraph(&with_comments).unwrap(), h);
    }

    #[test]
    fn truncated_input_fails() {
        assert!(parse_hypergraph("3 5\n0 1\n").is_err());
        assert!(parse_hypergraph("").is_err());
        assert!(parse_hypergraph("3 5\n0 1 x\n").is_err());
    }

    #[test]
    fn partitions() {
        let p = parse_partition("AABBA\n", 5).unwrap();
        assert_eq!(p.q, 2);
        assert_eq!(p.class(0), vec![0, 1, 4]);
        assert_eq!(write_partition(&p), "AABBA\n");
        let q = parse_partition("0120", 4).unwrap();
        assert_eq!(q.q, 3);
        assert!(parse_partition("AAB", 4).is_err());
    }
}
