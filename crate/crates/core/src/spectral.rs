//! `det(A - I)` and its expansion over spanning generalized linear subgraphs.

use crate::graph::PointedGraph;

/// Exact `det(A - I)` over every vertex of `g` (pass `g.ordinary_part()` for `G_-`).
/// The empty matrix has determinant 1.
pub fn char_det(g: &PointedGraph) -> i128 {
    let n = g.vertex_count();
    let mut m: Vec<i128> = g.matrix().iter().map(|&a| a as i128).collect();
    for i in 0..n {
        m[i * n + i] -= 1;
    }
    bareiss(n, m)
}

/// Fraction-free Gaussian elimination with row pivoting.
pub(crate) fn bareiss(n: usize, mut m: Vec<i128>) -> i128 {
    if n == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k * n + k] == 0 {
            let Some(p) = (k + 1..n).find(|&r| m[r * n + k] != 0) else {
                return 0;
            };
            for c in 0..n {
                m.swap(k * n + c, p * n + c);
            }
            sign = -sign;
        }
        let pivot = m[k * n + k];
        for i in k + 1..n {
            for j in k + 1..n {
                let v = m[i * n + j] * pivot - m[i * n + k] * m[k * n + j];
                m[i * n + j] = v / prev;
            }
            m[i * n + k] = 0;
        }
        prev = pivot;
    }
    sign * m[n * n - 1]
}

/// One component of a spanning generalized linear subgraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Component {
    /// A vertex left uncovered by any cycle (a 0-cycle).
    Isolated(usize),
    /// A directed cycle given by its concrete edges `(from, to, parallel index)`;
    /// a loop is a 1-cycle.
    Cycle(Vec<(usize, usize, u32)>),
}

impl Component {
    pub fn length(&self) -> usize {
        match self {
            Component::Isolated(_) => 0,
            Component::Cycle(e) => e.len(),
        }
    }

    /// `(-1)^(length + 1)`.
    pub fn sign(&self) -> i128 {
        if self.length().is_multiple_of(2) {
            -1
        } else {
            1
        }
    }
}

/// Vertex-disjoint cycles and isolated vertices covering every vertex exactly once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSubgraph {
    pub components: Vec<Component>,
}

impl LinearSubgraph {
    pub fn sign(&self) -> i128 {
        self.components.iter().map(Component::sign).product()
    }
}

/// Simple cycles through `start` using only vertices in `free` (start included),
/// as vertex sequences beginning at `start`.
fn cycles_from(g: &PointedGraph, start: usize, free: &[bool]) -> Vec<Vec<usize>> {
    fn extend(
        g: &PointedGraph,
        start: usize,
        free: &[bool],
        path: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        let last = *path.last().unwrap();
        if g.mult(last, start) > 0 {
            out.push(path.clone());
        }
        for w in 0..g.vertex_count() {
            if w != start && free[w] && !used[w] && g.mult(last, w) > 0 {
                used[w] = true;
                path.push(w);
                extend(g, start, free, path, used, out);
                path.pop();
                used[w] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut used = vec![false; g.vertex_count()];
    used[start] = true;
    extend(g, start, free, &mut vec![start], &mut used, &mut out);
    out
}

/// Every spanning generalized linear subgraph, parallel edges giving distinct cycles.
pub fn enumerate_linear_subgraphs(g: &PointedGraph) -> Vec<LinearSubgraph> {
    fn rec(
        g: &PointedGraph,
        free: &mut Vec<bool>,
        current: &mut Vec<Component>,
        out: &mut Vec<LinearSubgraph>,
    ) {
        let Some(v) = free.iter().position(|&f| f) else {
            out.push(LinearSubgraph {
                components: current.clone(),
            });
            return;
        };
        free[v] = false;
        current.push(Component::Isolated(v));
        rec(g, free, current, out);
        current.pop();
        free[v] = true;

        for cycle in cycles_from(g, v, free) {
            let hops: Vec<(usize, usize)> = (0..cycle.len())
                .map(|i| (cycle[i], cycle[(i + 1) % cycle.len()]))
                .collect();
            for &u in &cycle {
                free[u] = false;
            }
            // every choice of parallel copy on every hop
            let mut choice = vec![0u32; hops.len()];
            loop {
                let edges = hops
                    .iter()
                    .zip(&choice)
                    .map(|(&(a, b), &p)| (a, b, p))
                    .collect();
                current.push(Component::Cycle(edges));
                rec(g, free, current, out);
                current.pop();
                let mut i = 0;
                while i < hops.len() {
                    choice[i] += 1;
                    if choice[i] < g.mult(hops[i].0, hops[i].1) {
                        break;
                    }
                    choice[i] = 0;
                    i += 1;
                }
                if i == hops.len() {
                    break;
                }
            }
            for &u in &cycle {
                free[u] = true;
            }
        }
    }
    let mut out = Vec::new();
    let mut free = vec![true; g.vertex_count()];
    rec(g, &mut free, &mut Vec::new(), &mut out);
    out
}

/// `sum over L of prod over components (-1)^(len + 1)`, counting parallel
/// choices by multiplicity instead of listing them.
pub fn linear_subgraph_sum(g: &PointedGraph) -> i128 {
    fn rec(g: &PointedGraph, free: &mut Vec<bool>) -> i128 {
        let Some(v) = free.iter().position(|&f| f) else {
            return 1;
        };
        free[v] = false;
        let mut total = -rec(g, free);
        free[v] = true;
        for cycle in cycles_from(g, v, free) {
            let len = cycle.len();
            let ways: i128 = (0..len)
                .map(|i| g.mult(cycle[i], cycle[(i + 1) % len]) as i128)
                .product();
            let sign = if len % 2 == 0 { -1 } else { 1 };
            for &u in &cycle {
                free[u] = false;
            }
            total += sign * ways * rec(g, free);
            for &u in &cycle {
                free[u] = true;
            }
        }
        total
    }
    let mut free = vec![true; g.vertex_count()];
    rec(g, &mut free)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn digraph(n: usize, edges: &[(usize, usize, u32)]) -> PointedGraph {
        PointedGraph::from_edges(0, n, edges).unwrap()
    }

    #[test]
    fn determinant_examples() {
        assert_eq!(char_det(&PointedGraph::new(0, 0)), 1);
        assert_eq!(char_det(&digraph(2, &[(0, 1, 2), (1, 0, 1)])), -1);
        assert_eq!(char_det(&digraph(1, &[(0, 0, 2)])), 1);
        assert_eq!(char_det(&digraph(1, &[])), -1);
        assert_eq!(char_det(&digraph(1, &[(0, 0, 3)])), 2);
    }

    #[test]
    fn bareiss_needs_pivoting() {
        // A - I has a zero in the top-left corner
        let g = digraph(3, &[(0, 0, 1), (0, 1, 2), (1, 0, 1), (1, 2, 1), (2, 0, 3)]);
        assert_eq!(char_det(&g), cofactor(&g));
    }

    fn cofactor(g: &PointedGraph) -> i128 {
        fn det(m: &[Vec<i128>]) -> i128 {
            if m.is_empty() {
                return 1;
            }
            (0..m.len())
                .map(|c| {
                    let minor: Vec<Vec<i128>> = m[1..]
                        .iter()
                        .map(|r| r.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, &x)| x).collect())
                        .collect();
                    let s = if c % 2 == 0 { 1 } else { -1 };
                    s * m[0][c] * det(&minor)
                })
                .sum()
        }
        let n = g.vertex_count();
        let m: Vec<Vec<i128>> = (0..n)
            .map(|i| (0..n).map(|j| g.mult(i, j) as i128 - (i == j) as i128).collect())
            .collect();
        det(&m)
    }

    #[test]
    fn linear_subgraph_examples() {
        let g = digraph(2, &[(0, 1, 2), (1, 0, 1)]);
        let all = enumerate_linear_subgraphs(&g);
        assert_eq!(all.len(), 3);
        let signs: Vec<i128> = all.iter().map(LinearSubgraph::sign).collect();
        assert_eq!(signs.iter().filter(|&&s| s == 1).count(), 1);
        assert_eq!(signs.iter().filter(|&&s| s == -1).count(), 2);
        assert_eq!(linear_subgraph_sum(&g), -1);

        let lone = digraph(1, &[]);
        assert_eq!(enumerate_linear_subgraphs(&lone).len(), 1);
        assert_eq!(linear_subgraph_sum(&lone), -1);

        let loops = digraph(1, &[(0, 0, 3)]);
        assert_eq!(enumerate_linear_subgraphs(&loops).len(), 4);
        assert_eq!(linear_subgraph_sum(&loops), 2);
        assert_eq!(linear_subgraph_sum(&PointedGraph::new(0, 0)), 1);
    }

    #[test]
    fn listing_and_weighted_sum_agree() {
        let g = digraph(
            4,
            &[(0, 1, 2), (1, 2, 1), (2, 0, 1), (1, 0, 1), (2, 3, 3), (3, 2, 1), (3, 3, 2), (0, 0, 1)],
        );
        let listed: i128 = enumerate_linear_subgraphs(&g).iter().map(LinearSubgraph::sign).sum();
        assert_eq!(listed, linear_subgraph_sum(&g));
        assert_eq!(listed, char_det(&g));
        assert_eq!(listed, cofactor(&g));
    }
}
