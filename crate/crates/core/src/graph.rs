//! Undirected vertex-labelled graphs whose walks are words.
//!
//! Vertices are letters. The hatted letters of the 5-path are encoded as
//! `3` (for hatted 2) and `4` (for hatted 0) throughout the crate.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::word::{Word, MAX_ALPHABET};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LabelledGraph {
    vertex_count: usize,
    // Bit `b` of `adjacent[a]` is set iff a-b is an edge.
    adjacent: [u16; MAX_ALPHABET],
}

pub const BUILTIN_GRAPHS: [&str; 6] = ["K3", "C4", "K13", "P5", "P4", "P3STAR"];

impl LabelledGraph {
    pub fn new(vertex_count: usize, edges: &[(u8, u8)]) -> Result<Self> {
        if vertex_count == 0 || vertex_count > MAX_ALPHABET {
            return Err(Error::alphabet(format!(
                "a graph needs 1 to {MAX_ALPHABET} vertices, got {vertex_count}"
            )));
        }
        let mut adjacent = [0u16; MAX_ALPHABET];
        for &(a, b) in edges {
            if a as usize >= vertex_count || b as usize >= vertex_count {
                return Err(Error::alphabet(format!(
                    "edge {a}-{b} leaves the {vertex_count} vertices"
                )));
            }
            adjacent[a as usize] |= 1 << b;
            adjacent[b as usize] |= 1 << a;
        }
        Ok(LabelledGraph {
            vertex_count,
            adjacent,
        })
    }

    pub fn builtin(name: &str) -> Result<Self> {
        match name.to_ascii_uppercase().as_str() {
            "K3" => LabelledGraph::new(3, &[(0, 1), (1, 2), (2, 0)]),
            "C4" => LabelledGraph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]),
            "K13" => LabelledGraph::new(4, &[(3, 0), (3, 1), (3, 2)]),
            // 2 - 0 - 1 - 2^ - 0^
            "P5" => LabelledGraph::new(5, &[(2, 0), (0, 1), (1, 3), (3, 4)]),
            "P4" => LabelledGraph::new(4, &[(0, 1), (1, 2), (2, 3)]),
            "P3STAR" => LabelledGraph::new(3, &[(0, 1), (1, 2), (2, 2)]),
            _ => Err(Error::domain(format!(
                "unknown graph '{name}' (expected one of {})",
                BUILTIN_GRAPHS.join(", ")
            ))),
        }
    }

    /// Parses `a-b` edge tokens.
    pub fn from_edge_list<'a>(
        vertex_count: usize,
        tokens: impl IntoIterator<Item = &'a str>,
    ) -> Result<Self> {
        let mut edges = Vec::new();
        for tok in tokens {
            let parse = |s: &str| {
                s.parse::<u8>()
                    .ok()
                    .filter(|&v| (v as usize) < MAX_ALPHABET)
                    .ok_or_else(|| Error::syntax(format!("bad edge '{tok}'")))
            };
            let (a, b) = tok
                .split_once('-')
                .ok_or_else(|| Error::syntax(format!("bad edge '{tok}', expected a-b")))?;
            edges.push((parse(a)?, parse(b)?));
        }
        LabelledGraph::new(vertex_count, &edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn has_edge(&self, a: u8, b: u8) -> bool {
        (a as usize) < self.vertex_count && self.adjacent[a as usize] & (1 << b) != 0
    }

    /// Edges as ordered pairs `a <= b`.
    pub fn edges(&self) -> BTreeSet<(u8, u8)> {
        let mut out = BTreeSet::new();
        for a in 0..self.vertex_count as u8 {
            for b in a..self.vertex_count as u8 {
                if self.has_edge(a, b) {
                    out.insert((a, b));
                }
            }
        }
        out
    }
}

impl fmt::Display for LabelledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges()
            .iter()
            .map(|(a, b)| format!("{a}-{b}"))
            .collect();
        write!(f, "{}", edges.join(" "))
    }
}

impl fmt::Debug for LabelledGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LabelledGraph({} vertices: {self})", self.vertex_count)
    }
}

pub fn builtin_graph(name: &str) -> Result<LabelledGraph> {
    LabelledGraph::builtin(name)
}

pub fn is_walk(w: &Word, g: &LabelledGraph) -> Result<bool> {
    w.check_alphabet(g.vertex_count())
        .map_err(|_| Error::domain(format!("{w} uses letters that are not vertices")))?;
    Ok(w.as_slice().windows(2).all(|p| g.has_edge(p[0], p[1])))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn builtins() {
        let p3 = builtin_graph("P3STAR").unwrap();
        assert_eq!(p3.edges(), BTreeSet::from([(0, 1), (1, 2), (2, 2)]));
        assert_eq!(builtin_graph("K3").unwrap().edges().len(), 3);
        let p5 = builtin_graph("P5").unwrap();
        assert!(p5.has_edge(1, 3));
        assert!(!p5.has_edge(1, 2));
        assert_eq!(builtin_graph("K13").unwrap().edges().len(), 3);
        assert_eq!(builtin_graph("C4").unwrap().edges().len(), 4);
        assert!(builtin_graph("K4").is_err());
    }

    #[test]
    fn walks() {
        let p5 = builtin_graph("P5").unwrap();
        assert!(is_walk(&w("013431"), &p5).unwrap());
        assert!(!is_walk(&w("012"), &p5).unwrap());
        assert!(is_walk(&Word::empty(), &p5).unwrap());
        assert!(is_walk(&w("4"), &p5).unwrap());
        assert!(is_walk(&w("5"), &p5).is_err());
        let p3 = builtin_graph("P3STAR").unwrap();
        assert!(is_walk(&w("1221"), &p3).unwrap());
        assert!(!is_walk(&w("1001"), &p3).unwrap());
    }

    #[test]
    fn edge_lists() {
        let g = LabelledGraph::from_edge_list(3, ["0-1", "1-2", "2-2"]).unwrap();
        assert_eq!(g, builtin_graph("P3STAR").unwrap());
        assert!(LabelledGraph::from_edge_list(3, ["0-3"]).is_err());
        assert!(LabelledGraph::from_edge_list(3, ["01"]).is_err());
    }
}
