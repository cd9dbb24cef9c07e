use std::collections::BTreeMap;

use proptest::prelude::*;
use stargraph::enumerate::{count_table, enumerate, enumerate_graphs};
use stargraph::karabegov::{glue_legs, glued_instances, Case};
use stargraph::series::{self, Mode};
use stargraph::spectral::{char_det, linear_subgraph_sum};
use stargraph::substitute::{acyclic_sum_check, contract, split_marked, SubgraphSelection};
use stargraph::suites::{self, semistable_upto, SuiteConfig};
use stargraph::{EnumSpec, Family, PointedGraph, StabilityClass};

/// Graph with `marked` marked vertices out of `total`, built from an edge list.
fn build(marked: usize, total: usize, edges: &[(usize, usize)]) -> PointedGraph {
    let mut g = PointedGraph::new(marked, total - marked);
    for &(u, w) in edges {
        g.add_edges(u % total, w % total, 1).unwrap();
    }
    g
}

fn small_graph(max_vertices: usize, max_edges: usize) -> impl Strategy<Value = PointedGraph> {
    (1..=max_vertices, 0usize..=2)
        .prop_flat_map(move |(total, m)| {
            let m = m.min(total);
            (Just(total), Just(m), prop::collection::vec((0..total, 0..total), 0..=max_edges))
        })
        .prop_map(|(total, m, edges)| build(m, total, &edges))
}

/// Strongly connected one-pointed graph: a cycle through every vertex plus extras.
fn scon_graph(max_ordinary: usize, max_extra: usize) -> impl Strategy<Value = PointedGraph> {
    (0..=max_ordinary)
        .prop_flat_map(move |n| {
            (
                Just(n),
                Just((0..=n).collect::<Vec<_>>()).prop_shuffle(),
                prop::collection::vec((0..=n, 0..=n), 0..=max_extra),
            )
        })
        .prop_map(|(n, mut order, extra)| {
            let start = order.iter().position(|&v| v == 0).unwrap();
            order.rotate_left(start);
            let mut edges: Vec<(usize, usize)> = order.windows(2).map(|w| (w[0], w[1])).collect();
            edges.push((*order.last().unwrap(), 0));
            edges.extend(extra);
            build(1, n + 1, &edges)
        })
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Pairs (vertex permutation fixing marked vertices, edge permutation) that
/// map the labelled edge list onto itself.
fn brute_force_aut(g: &PointedGraph) -> u64 {
    let n = g.vertex_count();
    let m = g.marked_count();
    let edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|e| (e.from, e.to))
        .collect();
    let ordinary: Vec<usize> = (m..n).collect();
    let edge_ids: Vec<usize> = (0..edges.len()).collect();
    let edge_perms = permutations(&edge_ids);
    let mut count = 0;
    for p in permutations(&ordinary) {
        let sigma = |v: usize| if v < m { v } else { p[v - m] };
        for tau in &edge_perms {
            let ok = edges
                .iter()
                .enumerate()
                .all(|(i, &(u, w))| edges[tau[i]] == (sigma(u), sigma(w)));
            if ok {
                count += 1;
            }
        }
    }
    count
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn canonical_key_ignores_ordinary_labels(g in small_graph(6, 10), seed in any::<u64>()) {
        let n = g.ordinary_count();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let h = g.permute_ordinary(&perm);
        prop_assert_eq!(g.canonical_key(), h.canonical_key());
        prop_assert_eq!(g.aut_order(), h.aut_order());
        prop_assert_eq!(g.canonical_key().to_graph().canonical_key(), g.canonical_key());
    }

    #[test]
    fn coefficient_theorem_on_random_digraphs(g in small_graph(6, 14)) {
        prop_assert_eq!(char_det(&g), linear_subgraph_sum(&g));
    }

    #[test]
    fn merge_keeps_edges_and_ordinary_vertices(g in small_graph(5, 8)) {
        if g.marked_count() >= 1 {
            let merged = g.merge_marked().unwrap();
            prop_assert_eq!(merged.edge_count(), g.edge_count());
            prop_assert_eq!(merged.ordinary_count(), g.ordinary_count());
            prop_assert_eq!(merged.weight(), g.weight());
        }
    }

    #[test]
    fn subdivision_flips_the_determinant(g in scon_graph(4, 6)) {
        for e in g.edges() {
            let h = g.subdivide_edge(e).unwrap();
            prop_assert_eq!(h.ordinary_det(), -g.ordinary_det());
            prop_assert_eq!(h.weight(), g.weight());
            prop_assert!(!h.is_semistable());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn aut_order_matches_brute_force(g in small_graph(4, 6)) {
        prop_assert_eq!(g.aut_order(), brute_force_aut(&g));
    }

    #[test]
    fn contraction_bookkeeping(g in scon_graph(3, 4), picks in prop::collection::vec(any::<u32>(), 16)) {
        let chosen: Vec<u32> = g
            .matrix()
            .iter()
            .zip(picks.iter().cycle())
            .map(|(&a, &p)| if a == 0 { 0 } else { p % (a + 1) })
            .collect();
        let sel = SubgraphSelection::from_edges(&g, chosen).unwrap();
        let h = sel.induced(&g);
        let q = contract(&g, &sel).unwrap();
        prop_assert_eq!(g.edge_count(), h.edge_count() + q.edge_count());
        prop_assert_eq!(g.ordinary_count(), h.ordinary_count() + q.ordinary_count());
        prop_assert_eq!(q.marked_count(), 1);
    }

    #[test]
    fn parallel_edges_reduce_for_the_acyclic_sum(g in scon_graph(4, 5)) {
        let mut reduced = g.clone();
        for u in 0..g.vertex_count() {
            for w in 0..g.vertex_count() {
                if g.mult(u, w) > 1 {
                    reduced = PointedGraph::from_matrix(1, g.ordinary_count(), {
                        let mut a = reduced.matrix().to_vec();
                        a[u * g.vertex_count() + w] = 1;
                        a
                    })
                    .unwrap();
                }
            }
        }
        prop_assert_eq!(acyclic_sum_check(&g).unwrap(), acyclic_sum_check(&reduced).unwrap());
    }
}

#[test]
fn canonical_invariance_on_enumerated_graphs() {
    for m in 0..=2 {
        for g in semistable_upto(m, 3).unwrap() {
            let n = g.ordinary_count();
            let reversed: Vec<usize> = (0..n).rev().collect();
            let rotated: Vec<usize> = (0..n).map(|i| (i + 1) % n.max(1)).collect();
            for perm in [reversed, rotated] {
                assert_eq!(g.permute_ordinary(&perm).canonical_key(), g.canonical_key());
            }
        }
    }
}

#[test]
fn enumerated_graphs_satisfy_their_class() {
    for k in 0..=4 {
        for r in enumerate_graphs(&EnumSpec::new(1, k, StabilityClass::Stable)).unwrap() {
            let g = r.key.to_graph();
            assert!(g.is_stable() && g.strongly_connected(), "{}", r.key);
            assert_eq!(g.canonical_key(), r.key);
            let fam = r.families.unwrap();
            assert!(!fam.s || fam.bt, "S member outside BT: {}", r.key);
            assert_eq!(fam.b, g.ordinary_det() != 0);
            assert_eq!(r.aut, g.aut_order());
        }
    }
    for m in 0..=2 {
        for k in 0..=3 {
            for key in enumerate(&EnumSpec::new(m, k, StabilityClass::Semistable)).unwrap() {
                let g = key.to_graph();
                assert!(g.is_semistable() && g.strongly_connected(), "{key}");
            }
        }
    }
}

#[test]
fn family_counts_nest() {
    let t = count_table(5).unwrap();
    for k in 0..=5 {
        assert!(t.s[k] <= t.bt[k] && t.bt[k] <= t.all[k] && t.b[k] <= t.all[k]);
    }
}

#[test]
fn one_more_ordinary_vertex_finds_nothing_new() {
    let cases = [
        (StabilityClass::Stable, 0, 4u32),
        (StabilityClass::Stable, 1, 4),
        (StabilityClass::Semistable, 0, 3),
        (StabilityClass::Semistable, 1, 4),
    ];
    for (stab, m, top) in cases {
        for k in 0..=top {
            let spec = EnumSpec::new(m, k, stab);
            let bound = spec.ordinary_bound().unwrap();
            let base = enumerate(&spec).unwrap();
            let wider = enumerate(&spec.max_ordinary(bound + 1)).unwrap();
            assert_eq!(base, wider, "{stab:?} m={m} k={k}");
        }
    }
}

#[test]
fn split_then_merge_is_the_identity() {
    for k in 0..=4 {
        for key in enumerate(&EnumSpec::new(1, k, StabilityClass::Stable)).unwrap() {
            let g = key.to_graph();
            assert_eq!(split_marked(&g).unwrap().merge_marked().unwrap(), g);
        }
    }
    for g in semistable_upto(1, 3).unwrap() {
        assert_eq!(split_marked(&g).unwrap().merge_marked().unwrap(), g);
    }
}

#[test]
fn star_series_merge_back() {
    let s = series::bt_inverse_series(3, Mode::Stable).unwrap();
    assert_eq!(s.to_star().unwrap().merge_marked().unwrap(), s);
    let k = series::kbw_series(3, Mode::Scon(3)).unwrap();
    assert_eq!(k.to_star().unwrap().merge_marked().unwrap(), k);
}

#[test]
fn parity_flip_is_an_involution() {
    let s = series::berezin_series(3, Mode::Semistable).unwrap();
    assert_eq!(s.parity_flip().parity_flip(), s);
    let bt = series::bt_inverse_series(3, Mode::Stable).unwrap();
    let kbw_inv = series::kbw_inverse_series(3, Mode::Stable).unwrap();
    assert_eq!(kbw_inv.filter(|k| k.to_graph().classify_family().unwrap().bt), bt);
}

#[test]
fn semistable_and_bounded_star_products_agree_on_stable_targets() {
    let ss = series::bt_inverse_series(3, Mode::Semistable).unwrap().to_star().unwrap();
    let scon = series::bt_inverse_series(3, Mode::Scon(6)).unwrap().to_star().unwrap();
    let stable = |s: &stargraph::GraphSeries| s.filter(|k| k.to_graph().is_stable());
    assert_eq!(stable(&ss), stable(&scon));
    assert!(!stable(&ss).is_empty());
}

#[test]
fn berezin_support_matches_the_b_row() {
    let t = count_table(4).unwrap();
    let s = series::berezin_series(4, Mode::Stable).unwrap();
    for k in 0..=4 {
        assert_eq!(s.layer(k as i64).len() as u64, t.row(Family::B)[k]);
    }
}

#[test]
fn associativity_at_weight_three_on_small_targets() {
    let r = suites::associativity(&SuiteConfig {
        max_weight: Some(3),
        max_ordinary: Some(3),
        ..Default::default()
    })
    .unwrap();
    assert!(r.is_pass(), "{:?}", r.failures);
}

#[test]
fn glued_graphs_have_two_more_edges_than_their_body() {
    for case in [Case::Bt, Case::Berezin, Case::DualKbw] {
        for inst in glued_instances(case, 3).unwrap() {
            assert_eq!(glue_legs(&inst.legged).edge_count(), inst.legged.body_edge_count() + 2);
            assert_eq!(inst.hdot.degrees(0).unwrap(), (1, 1));
        }
    }
}

#[test]
fn seeded_suites_are_deterministic() {
    let cfg = SuiteConfig {
        trials: Some(50),
        seed: Some(7),
        ..Default::default()
    };
    let a = suites::coefficient_theorem(&cfg).unwrap();
    let b = suites::coefficient_theorem(&cfg).unwrap();
    assert_eq!(a, b);
    let counts: BTreeMap<_, _> = a.config.iter().collect();
    assert_eq!(counts.get(&"seed".to_string()).map(|s| s.as_str()), Some("7"));
}
