//! Seeded random graphs for fuzzing the identity suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::PointedGraph;

pub const DEFAULT_SEED: u64 = 20_240_611;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A nontrivial strongly connected one-pointed graph: a cycle through the
/// marked vertex and every ordinary vertex, plus random extra edges.
pub fn scon_one_pointed(rng: &mut impl Rng, max_ordinary: usize, max_edges: u32) -> PointedGraph {
    let cap = (max_edges as usize).saturating_sub(1).min(max_ordinary);
    let n = rng.gen_range(0..=cap);
    let mut g = PointedGraph::new(1, n);
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let mut prev = 0;
    for &v in order.iter().chain(std::iter::once(&0)) {
        *g.mult_mut(prev, v) += 1;
        prev = v;
    }
    let extra = rng.gen_range(0..=max_edges - (n as u32 + 1));
    for _ in 0..extra {
        let u = rng.gen_range(0..=n);
        let w = rng.gen_range(0..=n);
        *g.mult_mut(u, w) += 1;
    }
    g
}

/// A zero-pointed digraph with `1..=max_vertices` vertices and multiplicities
/// in `0..=max_mult`, about half of them zero.
pub fn digraph(rng: &mut impl Rng, max_vertices: usize, max_mult: u32) -> PointedGraph {
    let n = rng.gen_range(1..=max_vertices);
    let mut g = PointedGraph::new(0, n);
    for u in 0..n {
        for w in 0..n {
            if rng.gen_bool(0.5) {
                *g.mult_mut(u, w) = rng.gen_range(1..=max_mult.max(1));
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scon_graphs_respect_bounds() {
        let mut r = rng(DEFAULT_SEED);
        for _ in 0..300 {
            let g = scon_one_pointed(&mut r, 5, 8);
            assert!(g.strongly_connected());
            assert!(g.ordinary_count() <= 5);
            assert!((1..=8).contains(&g.edge_count()));
        }
    }

    #[test]
    fn same_seed_same_graphs() {
        let a: Vec<_> = (0..5).map({
            let mut r = rng(3);
            move |_| digraph(&mut r, 7, 3).matrix().to_vec()
        }).collect();
        let b: Vec<_> = (0..5).map({
            let mut r = rng(3);
            move |_| digraph(&mut r, 7, 3).matrix().to_vec()
        }).collect();
        assert_eq!(a, b);
    }
}
