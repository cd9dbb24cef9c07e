//! Pointed directed multigraphs.
//!
//! A [`PointedGraph`] stores `m` marked vertices followed by `n` ordinary
//! vertices and a dense matrix of edge multiplicities. Entry `(i, j)` counts
//! the edges `i -> j`; diagonal entries are loops. Marked vertices are the
//! function slots of a graph and are never permuted.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone)]
pub struct PointedGraph {
    marked: usize,
    ordinary: usize,
    adj: Vec<u32>,
}

/// One concrete edge: an ordered pair plus the index among its parallel copies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeRef {
    pub from: usize,
    pub to: usize,
    pub parallel: u32,
}

/// Membership of a one-pointed graph in the coefficient families.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct FamilySet {
    pub b: bool,
    pub bt: bool,
    pub s: bool,
}

impl FamilySet {
    pub fn contains(&self, family: crate::Family) -> bool {
        match family {
            crate::Family::All => true,
            crate::Family::B => self.b,
            crate::Family::Bt => self.bt,
            crate::Family::S => self.s,
        }
    }

    /// Short labels, e.g. `["all", "bt"]`.
    pub fn labels(&self) -> Vec<&'static str> {
        let mut out = vec!["all"];
        if self.b {
            out.push("b");
        }
        if self.bt {
            out.push("bt");
        }
        if self.s {
            out.push("s");
        }
        out
    }
}

impl PointedGraph {
    /// Edgeless graph with the given vertex counts.
    pub fn new(marked: usize, ordinary: usize) -> Self {
        let n = marked + ordinary;
        PointedGraph {
            marked,
            ordinary,
            adj: vec![0; n * n],
        }
    }

    /// The single marked vertex without edges.
    pub fn point() -> Self {
        Self::new(1, 0)
    }

    /// One marked vertex carrying `loops` loops.
    pub fn marked_loops(loops: u32) -> Self {
        let mut g = Self::new(1, 0);
        g.adj[0] = loops;
        g
    }

    pub fn from_matrix(marked: usize, ordinary: usize, adj: Vec<u32>) -> Result<Self> {
        let n = marked + ordinary;
        if adj.len() != n * n {
            return Err(Error::MatrixShape {
                got: adj.len(),
                expected: n * n,
            });
        }
        Ok(PointedGraph {
            marked,
            ordinary,
            adj,
        })
    }

    /// Builds a graph from `(from, to, multiplicity)` triples; repeated pairs accumulate.
    pub fn from_edges(marked: usize, ordinary: usize, edges: &[(usize, usize, u32)]) -> Result<Self> {
        let mut g = Self::new(marked, ordinary);
        for &(u, v, k) in edges {
            g.add_edges(u, v, k)?;
        }
        Ok(g)
    }

    pub fn marked_count(&self) -> usize {
        self.marked
    }

    pub fn ordinary_count(&self) -> usize {
        self.ordinary
    }

    pub fn vertex_count(&self) -> usize {
        self.marked + self.ordinary
    }

    pub fn is_marked(&self, v: usize) -> bool {
        v < self.marked
    }

    /// Row-major adjacency matrix.
    pub fn matrix(&self) -> &[u32] {
        &self.adj
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.vertex_count() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                count: self.vertex_count(),
            });
        }
        Ok(())
    }

    /// Multiplicity of `u -> v`. Panics when out of range.
    #[inline]
    pub fn mult(&self, u: usize, v: usize) -> u32 {
        self.adj[u * self.vertex_count() + v]
    }

    #[inline]
    pub(crate) fn mult_mut(&mut self, u: usize, v: usize) -> &mut u32 {
        let n = self.vertex_count();
        &mut self.adj[u * n + v]
    }

    pub fn add_edges(&mut self, u: usize, v: usize, k: u32) -> Result<()> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        *self.mult_mut(u, v) += k;
        Ok(())
    }

    /// Total number of edges; a loop counts once.
    pub fn edge_count(&self) -> u64 {
        self.adj.iter().map(|&a| a as u64).sum()
    }

    /// `|E| - |V|` with marked vertices excluded from `V`.
    pub fn weight(&self) -> i64 {
        self.edge_count() as i64 - self.ordinary as i64
    }

    /// `(in_degree, out_degree)`; a loop adds one to each.
    pub fn degrees(&self, v: usize) -> Result<(u32, u32)> {
        self.check_vertex(v)?;
        Ok(self.degrees_unchecked(v))
    }

    pub(crate) fn degrees_unchecked(&self, v: usize) -> (u32, u32) {
        let n = self.vertex_count();
        let mut inn = 0;
        let mut out = 0;
        for w in 0..n {
            inn += self.mult(w, v);
            out += self.mult(v, w);
        }
        (inn, out)
    }

    fn ordinary_vertices_satisfy(&self, pred: impl Fn(u32, u32) -> bool) -> bool {
        (self.marked..self.vertex_count()).all(|v| {
            let (i, o) = self.degrees_unchecked(v);
            pred(i, o)
        })
    }

    /// Every ordinary vertex has `in >= 1`, `out >= 1` and `in + out >= 3`.
    pub fn is_semistable(&self) -> bool {
        self.ordinary_vertices_satisfy(semistable_degrees)
    }

    /// Every ordinary vertex has `in >= 2` and `out >= 2`.
    pub fn is_stable(&self) -> bool {
        self.ordinary_vertices_satisfy(stable_degrees)
    }

    /// The graph with marked vertices deleted, as a zero-pointed graph.
    pub fn ordinary_part(&self) -> PointedGraph {
        let n = self.vertex_count();
        let mut g = PointedGraph::new(0, self.ordinary);
        for i in self.marked..n {
            for j in self.marked..n {
                *g.mult_mut(i - self.marked, j - self.marked) = self.mult(i, j);
            }
        }
        g
    }

    /// Identifies all marked vertices into one; edges between marked vertices become loops.
    pub fn merge_marked(&self) -> Result<PointedGraph> {
        if self.marked == 0 {
            return Err(Error::NoMarkedVertex);
        }
        Ok(self.merge_marked_unchecked())
    }

    pub(crate) fn merge_marked_unchecked(&self) -> PointedGraph {
        if self.marked == 1 {
            return self.clone();
        }
        let n = self.vertex_count();
        let map = |v: usize| if v < self.marked { 0 } else { v - self.marked + 1 };
        let mut g = PointedGraph::new(1, self.ordinary);
        for i in 0..n {
            for j in 0..n {
                let a = self.mult(i, j);
                if a > 0 {
                    *g.mult_mut(map(i), map(j)) += a;
                }
            }
        }
        g
    }

    /// Strong connectivity; for two or more marked vertices it is evaluated
    /// on the merged graph. The empty graph and a single vertex are strongly connected.
    pub fn strongly_connected(&self) -> bool {
        if self.marked >= 2 {
            return self.merge_marked_unchecked().strongly_connected();
        }
        let n = self.vertex_count();
        if n <= 1 {
            return true;
        }
        let reach = |forward: bool| {
            let mut seen = vec![false; n];
            let mut stack = vec![0usize];
            seen[0] = true;
            while let Some(u) = stack.pop() {
                for (w, sw) in seen.iter_mut().enumerate() {
                    let a = if forward { self.mult(u, w) } else { self.mult(w, u) };
                    if a > 0 && !*sw {
                        *sw = true;
                        stack.push(w);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(true) && reach(false)
    }

    /// Strongly connected components. With `ordinary_only` the marked vertices are
    /// deleted first and the returned indices refer to the original graph.
    /// Components come out in reverse topological order; vertices within a component are sorted.
    pub fn scc_decompose(&self, ordinary_only: bool) -> Vec<Vec<usize>> {
        let start = if ordinary_only { self.marked } else { 0 };
        let n = self.vertex_count();
        let verts: Vec<usize> = (start..n).collect();
        tarjan(&verts, |u, w| self.mult(u, w) > 0)
    }

    /// Family membership of a strongly connected one-pointed graph.
    pub fn classify_family(&self) -> Result<FamilySet> {
        if self.marked != 1 {
            return Err(Error::NotOnePointed(self.marked));
        }
        if !self.strongly_connected() {
            return Err(Error::NotStronglyConnected);
        }
        Ok(self.families_unchecked())
    }

    pub(crate) fn families_unchecked(&self) -> FamilySet {
        let mut bt = true;
        let mut s = true;
        for comp in self.scc_decompose(true) {
            let inner: u64 = comp
                .iter()
                .flat_map(|&u| comp.iter().map(move |&w| (u, w)))
                .map(|(u, w)| self.mult(u, w) as u64)
                .sum();
            if comp.len() == 1 {
                if inner > 1 {
                    bt = false;
                }
                if inner > 0 {
                    s = false;
                }
            } else {
                s = false;
                if inner != comp.len() as u64 {
                    bt = false;
                }
            }
        }
        let b = crate::spectral::char_det(&self.ordinary_part()) != 0;
        FamilySet { b, bt, s }
    }

    /// Replaces one edge `from -> to` by a path through a fresh ordinary vertex.
    pub fn subdivide_edge(&self, edge: EdgeRef) -> Result<PointedGraph> {
        self.check_vertex(edge.from)?;
        self.check_vertex(edge.to)?;
        if edge.parallel >= self.mult(edge.from, edge.to) {
            return Err(Error::EdgeAbsent {
                from: edge.from,
                to: edge.to,
                parallel: edge.parallel,
            });
        }
        let n = self.vertex_count();
        let mut g = PointedGraph::new(self.marked, self.ordinary + 1);
        for i in 0..n {
            for j in 0..n {
                *g.mult_mut(i, j) = self.mult(i, j);
            }
        }
        let w = n;
        *g.mult_mut(edge.from, edge.to) -= 1;
        *g.mult_mut(edge.from, w) += 1;
        *g.mult_mut(w, edge.to) += 1;
        Ok(g)
    }

    /// Every concrete edge, parallel copies enumerated.
    pub fn edges(&self) -> Vec<EdgeRef> {
        let n = self.vertex_count();
        let mut out = Vec::new();
        for from in 0..n {
            for to in 0..n {
                for parallel in 0..self.mult(from, to) {
                    out.push(EdgeRef { from, to, parallel });
                }
            }
        }
        out
    }

    /// Relabels ordinary vertices: ordinary vertex `i` moves to position `perm[i]`.
    pub fn permute_ordinary(&self, perm: &[usize]) -> PointedGraph {
        assert_eq!(perm.len(), self.ordinary);
        let n = self.vertex_count();
        let map = |v: usize| if v < self.marked { v } else { self.marked + perm[v - self.marked] };
        let mut g = PointedGraph::new(self.marked, self.ordinary);
        for i in 0..n {
            for j in 0..n {
                *g.mult_mut(map(i), map(j)) = self.mult(i, j);
            }
        }
        g
    }

    /// Reverses every edge.
    pub fn transpose(&self) -> PointedGraph {
        let n = self.vertex_count();
        let mut g = PointedGraph::new(self.marked, self.ordinary);
        for i in 0..n {
            for j in 0..n {
                *g.mult_mut(j, i) = self.mult(i, j);
            }
        }
        g
    }

    /// Exact `det(A(G_-) - I)` over the ordinary vertices.
    pub fn ordinary_det(&self) -> i128 {
        crate::spectral::char_det(&self.ordinary_part())
    }
}

pub(crate) fn semistable_degrees(inn: u32, out: u32) -> bool {
    inn >= 1 && out >= 1 && inn + out >= 3
}

pub(crate) fn stable_degrees(inn: u32, out: u32) -> bool {
    inn >= 2 && out >= 2
}

/// Tarjan's algorithm over an explicit vertex list.
pub(crate) fn tarjan(verts: &[usize], has_edge: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    struct State {
        index: Vec<Option<usize>>,
        low: Vec<usize>,
        on_stack: Vec<bool>,
        stack: Vec<usize>,
        next: usize,
        out: Vec<Vec<usize>>,
    }
    fn visit(s: &mut State, v: usize, verts: &[usize], has_edge: &dyn Fn(usize, usize) -> bool) {
        s.index[v] = Some(s.next);
        s.low[v] = s.next;
        s.next += 1;
        s.stack.push(v);
        s.on_stack[v] = true;
        for w in 0..verts.len() {
            if !has_edge(verts[v], verts[w]) {
                continue;
            }
            match s.index[w] {
                None => {
                    visit(s, w, verts, has_edge);
                    s.low[v] = s.low[v].min(s.low[w]);
                }
                Some(iw) if s.on_stack[w] => s.low[v] = s.low[v].min(iw),
                _ => {}
            }
        }
        if Some(s.low[v]) == s.index[v] {
            let mut comp = Vec::new();
            while let Some(w) = s.stack.pop() {
                s.on_stack[w] = false;
                comp.push(verts[w]);
                if w == v {
                    break;
                }
            }
            comp.sort_unstable();
            s.out.push(comp);
        }
    }
    let k = verts.len();
    let mut s = State {
        index: vec![None; k],
        low: vec![0; k],
        on_stack: vec![false; k],
        stack: Vec::new(),
        next: 0,
        out: Vec::new(),
    };
    for v in 0..k {
        if s.index[v].is_none() {
            visit(&mut s, v, verts, &has_edge);
        }
    }
    s.out
}

impl PartialEq for PointedGraph {
    /// Isomorphism as pointed graphs.
    fn eq(&self, other: &Self) -> bool {
        self.marked == other.marked
            && self.ordinary == other.ordinary
            && self.edge_count() == other.edge_count()
            && self.canonical_key() == other.canonical_key()
    }
}

impl Eq for PointedGraph {}

impl fmt::Debug for PointedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PointedGraph({})", crate::canon::encode(self.marked, self.ordinary, &self.adj))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loop_cycle() -> PointedGraph {
        // marked 0, ordinary 1 with a loop, 0 -> 1 -> 0
        PointedGraph::from_edges(1, 1, &[(0, 1, 1), (1, 0, 1), (1, 1, 1)]).unwrap()
    }

    #[test]
    fn degrees_follow_loop_convention() {
        assert_eq!(PointedGraph::marked_loops(1).degrees(0).unwrap(), (1, 1));
        assert_eq!(loop_cycle().degrees(1).unwrap(), (2, 2));
        assert_eq!(PointedGraph::new(1, 1).degrees(1).unwrap(), (0, 0));
        assert!(matches!(
            loop_cycle().degrees(2),
            Err(Error::VertexOutOfRange { vertex: 2, count: 2 })
        ));
    }

    #[test]
    fn stability_thresholds() {
        assert!(loop_cycle().is_stable());
        assert!(loop_cycle().is_semistable());
        assert!(PointedGraph::point().is_stable());
        assert!(PointedGraph::point().is_semistable());
        let sub = PointedGraph::marked_loops(1)
            .subdivide_edge(EdgeRef { from: 0, to: 0, parallel: 0 })
            .unwrap();
        assert_eq!(sub.degrees(1).unwrap(), (1, 1));
        assert!(!sub.is_semistable());
        // ordinary vertex with in 1, out 2
        let g = PointedGraph::from_edges(1, 1, &[(0, 1, 1), (1, 0, 2)]).unwrap();
        assert!(g.is_semistable());
        assert!(!g.is_stable());
    }

    #[test]
    fn strong_connectivity_and_sccs() {
        assert!(PointedGraph::point().strongly_connected());
        let comps = loop_cycle().scc_decompose(true);
        assert_eq!(comps, vec![vec![1]]);
        let two = PointedGraph::from_edges(2, 0, &[(0, 1, 1), (1, 0, 1)]).unwrap();
        assert!(two.strongly_connected());
        let one_way = PointedGraph::from_edges(1, 1, &[(0, 1, 1)]).unwrap();
        assert!(!one_way.strongly_connected());
        // f1 -> f2 only: merged it is a single loop
        let single = PointedGraph::from_edges(2, 0, &[(0, 1, 1)]).unwrap();
        assert!(single.strongly_connected());
    }

    #[test]
    fn families() {
        let f = PointedGraph::marked_loops(2).classify_family().unwrap();
        assert_eq!(f, FamilySet { b: true, bt: true, s: true });
        let f = loop_cycle().classify_family().unwrap();
        assert_eq!(f, FamilySet { b: false, bt: true, s: false });
        let tri = PointedGraph::from_edges(1, 2, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap();
        assert!(tri.classify_family().unwrap().s);
        assert!(matches!(
            PointedGraph::new(2, 0).classify_family(),
            Err(Error::NotOnePointed(2))
        ));
        let one_way = PointedGraph::from_edges(1, 1, &[(0, 1, 1)]).unwrap();
        assert!(matches!(one_way.classify_family(), Err(Error::NotStronglyConnected)));
    }

    #[test]
    fn merge_examples() {
        let g = PointedGraph::from_edges(2, 0, &[(0, 1, 1)]).unwrap();
        assert_eq!(g.merge_marked().unwrap(), PointedGraph::marked_loops(1));
        let tri = PointedGraph::from_edges(3, 0, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap();
        assert_eq!(tri.merge_marked().unwrap(), PointedGraph::marked_loops(3));
        let path = PointedGraph::from_edges(2, 1, &[(0, 2, 1), (2, 1, 1)]).unwrap();
        let merged = path.merge_marked().unwrap();
        assert_eq!(merged, PointedGraph::from_edges(1, 1, &[(0, 1, 1), (1, 0, 1)]).unwrap());
        assert_eq!(merged.edge_count(), path.edge_count());
        assert!(matches!(PointedGraph::new(0, 2).merge_marked(), Err(Error::NoMarkedVertex)));
    }

    #[test]
    fn subdivision() {
        let g = PointedGraph::marked_loops(1)
            .subdivide_edge(EdgeRef { from: 0, to: 0, parallel: 0 })
            .unwrap();
        assert_eq!(g, PointedGraph::from_edges(1, 1, &[(0, 1, 1), (1, 0, 1)]).unwrap());
        assert!(matches!(
            PointedGraph::point().subdivide_edge(EdgeRef { from: 0, to: 0, parallel: 0 }),
            Err(Error::EdgeAbsent { .. })
        ));
    }

    #[test]
    fn subdividing_a_double_edge_two_ways() {
        // two ordinary vertices with a 2-cycle; both choices give the same 3-cycle
        let two = PointedGraph::from_edges(0, 2, &[(0, 1, 1), (1, 0, 1)]).unwrap();
        let three = PointedGraph::from_edges(0, 3, &[(0, 1, 1), (1, 2, 1), (2, 0, 1)]).unwrap();
        let hits = two
            .edges()
            .into_iter()
            .filter(|&e| two.subdivide_edge(e).unwrap() == three)
            .count();
        assert_eq!(hits, 2);
        assert_eq!(two.aut_order(), 2);
        assert_eq!(three.aut_order(), 3);
    }
}
