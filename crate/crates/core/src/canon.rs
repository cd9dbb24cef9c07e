//! Canonical keys and automorphism orders.
//!
//! The canonical matrix of a pointed graph is the lexicographically smallest
//! row-major adjacency sequence over all permutations of its ordinary
//! vertices, marked vertices pinned in front. The search fixes one position
//! at a time: the next column must carry the smallest column vector over the
//! rows already fixed, so only those vertices are branched on, and a branch is
//! cut as soon as its determined rows exceed the best sequence found.
//! Every permutation reaching the minimum differs from another by an
//! automorphism, so counting them gives the vertex automorphism group order.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::PointedGraph;

/// Isomorphism-invariant identifier of a pointed graph.
///
/// Text form: `P{m}V{n}:` followed by the canonical matrix rows, entries
/// comma-separated and rows separated by `|`. Ordering is by marked count,
/// ordinary count, then the canonical matrix.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    marked: u32,
    ordinary: u32,
    entries: Vec<u32>,
}

impl CanonicalKey {
    pub fn marked_count(&self) -> usize {
        self.marked as usize
    }

    pub fn ordinary_count(&self) -> usize {
        self.ordinary as usize
    }

    pub fn edge_count(&self) -> u64 {
        self.entries.iter().map(|&a| a as u64).sum()
    }

    pub fn weight(&self) -> i64 {
        self.edge_count() as i64 - self.ordinary as i64
    }

    pub fn matrix(&self) -> &[u32] {
        &self.entries
    }

    /// The canonical representative.
    pub fn to_graph(&self) -> PointedGraph {
        PointedGraph::from_matrix(self.marked_count(), self.ordinary_count(), self.entries.clone())
            .expect("canonical key holds a square matrix")
    }
}

pub(crate) fn encode(marked: usize, ordinary: usize, entries: &[u32]) -> String {
    let n = marked + ordinary;
    let mut s = format!("P{marked}V{ordinary}:");
    for i in 0..n {
        if i > 0 {
            s.push('|');
        }
        for j in 0..n {
            if j > 0 {
                s.push(',');
            }
            s.push_str(&entries[i * n + j].to_string());
        }
    }
    s
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&encode(self.marked_count(), self.ordinary_count(), &self.entries))
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for CanonicalKey {
    type Err = Error;

    /// Parses the text form and re-canonicalizes, so any labeling is accepted.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::ParseKey(s.to_string());
        let rest = s.strip_prefix('P').ok_or_else(bad)?;
        let (m, rest) = rest.split_once('V').ok_or_else(bad)?;
        let (n, body) = rest.split_once(':').ok_or_else(bad)?;
        let m: usize = m.parse().map_err(|_| bad())?;
        let n: usize = n.parse().map_err(|_| bad())?;
        let size = m + n;
        let mut entries = Vec::with_capacity(size * size);
        if size > 0 {
            for row in body.split('|') {
                let before = entries.len();
                for x in row.split(',') {
                    entries.push(x.trim().parse::<u32>().map_err(|_| bad())?);
                }
                if entries.len() - before != size {
                    return Err(bad());
                }
            }
        } else if !body.is_empty() {
            return Err(bad());
        }
        let g = PointedGraph::from_matrix(m, n, entries).map_err(|_| bad())?;
        Ok(g.canonical_key())
    }
}

impl Serialize for CanonicalKey {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for CanonicalKey {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

struct Search<'a> {
    g: &'a PointedGraph,
    size: usize,
    best: Option<Vec<u32>>,
    hits: u64,
}

impl Search<'_> {
    /// Columns not yet placed, ordered by their entries in the fixed rows.
    fn sorted_rest(&self, order: &[usize], rest: &[usize]) -> Vec<usize> {
        let mut r = rest.to_vec();
        r.sort_by(|&a, &b| self.column_cmp(order, a, b));
        r
    }

    fn column_cmp(&self, order: &[usize], a: usize, b: usize) -> Ordering {
        for &row in order {
            match self.g.mult(row, a).cmp(&self.g.mult(row, b)) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    }

    fn push_row(&self, seq: &mut Vec<u32>, row: usize, order: &[usize], rest_sorted: &[usize]) {
        for &c in order.iter().chain(rest_sorted) {
            seq.push(self.g.mult(row, c));
        }
    }

    fn run(&mut self, order: &mut Vec<usize>, rest: &mut Vec<usize>, seq: &mut Vec<u32>) {
        if rest.is_empty() {
            match &self.best {
                Some(b) if seq.as_slice() > b.as_slice() => {}
                Some(b) if seq.as_slice() == b.as_slice() => self.hits += 1,
                _ => {
                    self.best = Some(seq.clone());
                    self.hits = 1;
                }
            }
            return;
        }
        let sorted = self.sorted_rest(order, rest);
        let first = sorted[0];
        let candidates: Vec<usize> = sorted
            .iter()
            .copied()
            .take_while(|&v| self.column_cmp(order, first, v) == Ordering::Equal)
            .collect();
        for c in candidates {
            let pos = rest.iter().position(|&v| v == c).unwrap();
            rest.swap_remove(pos);
            order.push(c);
            // rows fixed so far keep their content; only the new row is appended
            let rest_sorted = self.sorted_rest(order, rest);
            let mark = seq.len();
            self.push_row(seq, c, order, &rest_sorted);
            let prune = match &self.best {
                Some(b) => seq.as_slice() > &b[..seq.len()],
                None => false,
            };
            if !prune {
                self.run(order, rest, seq);
            }
            seq.truncate(mark);
            order.pop();
            rest.push(c);
        }
    }
}

/// Canonical matrix plus the number of ordinary-vertex permutations fixing the graph.
pub(crate) fn canonical_form(g: &PointedGraph) -> (Vec<u32>, u64) {
    let m = g.marked_count();
    let size = g.vertex_count();
    let mut search = Search {
        g,
        size,
        best: None,
        hits: 0,
    };
    let mut order: Vec<usize> = (0..m).collect();
    let mut rest: Vec<usize> = (m..size).collect();
    let rest_sorted = search.sorted_rest(&order, &rest);
    let mut seq = Vec::with_capacity(size * size);
    for row in 0..m {
        search.push_row(&mut seq, row, &order, &rest_sorted);
    }
    search.run(&mut order, &mut rest, &mut seq);
    debug_assert_eq!(search.best.as_ref().map(Vec::len), Some(search.size * search.size));
    (search.best.unwrap_or_default(), search.hits)
}

pub(crate) fn factorial(k: u32) -> u64 {
    (1..=k as u64).product()
}

impl PointedGraph {
    pub fn canonical_key(&self) -> CanonicalKey {
        let (entries, _) = canonical_form(self);
        CanonicalKey {
            marked: self.marked_count() as u32,
            ordinary: self.ordinary_count() as u32,
            entries,
        }
    }

    /// Vertex automorphisms times the factorial of every multiplicity
    /// (parallel edges and parallel loops are interchangeable).
    pub fn aut_order(&self) -> u64 {
        let (_, vertex_auts) = canonical_form(self);
        vertex_auts * self.edge_permutations()
    }

    pub fn canonical_key_and_aut(&self) -> (CanonicalKey, u64) {
        let (entries, vertex_auts) = canonical_form(self);
        let key = CanonicalKey {
            marked: self.marked_count() as u32,
            ordinary: self.ordinary_count() as u32,
            entries,
        };
        (key, vertex_auts * self.edge_permutations())
    }

    /// Number of ordinary-vertex permutations mapping the matrix to itself.
    pub fn vertex_aut_order(&self) -> u64 {
        canonical_form(self).1
    }

    fn edge_permutations(&self) -> u64 {
        self.matrix().iter().map(|&a| factorial(a)).product()
    }
}

/// Displays the canonical key of a graph, computed only when formatted.
pub struct KeyOf<'a>(pub &'a PointedGraph);

impl fmt::Display for KeyOf<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.canonical_key().fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_encoding_is_bit_exact() {
        let g = PointedGraph::from_edges(1, 1, &[(0, 1, 1), (1, 0, 1), (1, 1, 1)]).unwrap();
        assert_eq!(g.canonical_key().to_string(), "P1V1:0,1|1,1");
        assert_eq!(PointedGraph::point().canonical_key().to_string(), "P1V0:0");
        assert_eq!(PointedGraph::new(0, 0).canonical_key().to_string(), "P0V0:");
        let big = PointedGraph::marked_loops(12);
        assert_eq!(big.canonical_key().to_string(), "P1V0:12");
    }

    #[test]
    fn parse_round_trip_and_relabeling() {
        let k: CanonicalKey = "P1V2:0,0,1|1,0,0|0,1,0".parse().unwrap();
        let g = PointedGraph::from_edges(1, 2, &[(0, 2, 1), (2, 1, 1), (1, 0, 1)]).unwrap();
        assert_eq!(k, g.canonical_key());
        assert_eq!(k.to_string().parse::<CanonicalKey>().unwrap(), k);
        assert!("P1V1:0,1|1".parse::<CanonicalKey>().is_err());
        assert!("garbage".parse::<CanonicalKey>().is_err());
    }

    #[test]
    fn automorphism_examples() {
        assert_eq!(PointedGraph::marked_loops(4).aut_order(), 24);
        let g = PointedGraph::from_edges(1, 1, &[(0, 1, 2), (1, 0, 2)]).unwrap();
        assert_eq!(g.aut_order(), 4);
        // two loop-free ordinary vertices hanging symmetrically off the marked vertex
        let sym =
            PointedGraph::from_edges(1, 2, &[(0, 1, 1), (1, 0, 1), (0, 2, 1), (2, 0, 1)]).unwrap();
        assert_eq!(sym.vertex_aut_order(), 2);
        assert_eq!(sym.aut_order(), 2);
    }

    #[test]
    fn marked_vertices_are_pinned() {
        // f1 -> f2 and f2 -> f1 are different 2-pointed graphs
        let a = PointedGraph::from_edges(2, 0, &[(0, 1, 1)]).unwrap();
        let b = PointedGraph::from_edges(2, 0, &[(1, 0, 1)]).unwrap();
        assert_ne!(a.canonical_key(), b.canonical_key());
        let sym = PointedGraph::from_edges(2, 0, &[(0, 1, 1), (1, 0, 1)]).unwrap();
        assert_eq!(sym.aut_order(), 1);
    }
}
