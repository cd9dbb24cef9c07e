//! Verification suites: each runs an identity over an exhaustive population
//! plus seeded random instances and returns a report.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon::KeyOf;
use crate::enumerate::{count_table, enumerate_graphs, EnumSpec, Family, StabilityClass};
use crate::error::{Error, Result};
use crate::golden;
use crate::graph::PointedGraph;
use crate::karabegov::{self, Case, CrossEdge, VertexRef};
use crate::random::{self, DEFAULT_SEED};
use crate::report::VerificationReport;
use crate::series::{self, GraphSeries, Mode};
use crate::spectral::{char_det, linear_subgraph_sum};
use crate::substitute::{acyclic_sum_check, inversion_identity_check, substitution_identity_check};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Inversion,
    AcyclicSum,
    Substitution,
    SubdivisionSign,
    CoefficientTheorem,
    ComposeInverse,
    Associativity,
    Karabegov,
    Tables,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::Inversion,
        Suite::AcyclicSum,
        Suite::Substitution,
        Suite::SubdivisionSign,
        Suite::CoefficientTheorem,
        Suite::ComposeInverse,
        Suite::Associativity,
        Suite::Karabegov,
        Suite::Tables,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Inversion => "inversion",
            Suite::AcyclicSum => "acyclic-sum",
            Suite::Substitution => "substitution",
            Suite::SubdivisionSign => "subdivision-sign",
            Suite::CoefficientTheorem => "coefficient-theorem",
            Suite::ComposeInverse => "compose-inverse",
            Suite::Associativity => "associativity",
            Suite::Karabegov => "karabegov",
            Suite::Tables => "tables",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::UnknownSelector {
                kind: "suite",
                name: s.to_string(),
            })
    }
}

/// Suite parameters; unset fields take the per-suite defaults.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub max_weight: Option<u32>,
    pub max_ordinary: Option<usize>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub max_vertices: Option<usize>,
    pub max_multiplicity: Option<u32>,
    pub max_edges: Option<u32>,
}

impl SuiteConfig {
    fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

pub fn run(suite: Suite, cfg: &SuiteConfig) -> Result<VerificationReport> {
    match suite {
        Suite::Inversion => inversion(cfg),
        Suite::AcyclicSum => acyclic_sum(cfg),
        Suite::Substitution => substitution(cfg),
        Suite::SubdivisionSign => subdivision_sign(cfg),
        Suite::CoefficientTheorem => coefficient_theorem(cfg),
        Suite::ComposeInverse => compose_inverse(cfg),
        Suite::Associativity => associativity(cfg),
        Suite::Karabegov => karabegov_kernels(cfg),
        Suite::Tables => tables(cfg),
    }
}

/// Semistable graphs with `marked` marked vertices and weight `0..=max_weight`.
pub fn semistable_upto(marked: usize, max_weight: u32) -> Result<Vec<PointedGraph>> {
    let mut out = Vec::new();
    for k in 0..=max_weight {
        let spec = EnumSpec::new(marked, k, StabilityClass::Semistable);
        out.extend(enumerate_graphs(&spec)?.into_iter().map(|r| r.key.to_graph()));
    }
    Ok(out)
}

/// Nontrivial strongly connected graphs with at most `max_edges` edges.
pub fn small_scon(marked: usize, max_edges: u32) -> Result<Vec<PointedGraph>> {
    let mut out = Vec::new();
    for k in 0..=max_edges {
        let spec = EnumSpec::new(marked, k, StabilityClass::Scon).max_ordinary(max_edges as usize);
        out.extend(
            enumerate_graphs(&spec)?
                .into_iter()
                .filter(|r| r.edge_count >= 1 && r.edge_count <= max_edges as u64)
                .map(|r| r.key.to_graph()),
        );
    }
    Ok(out)
}

fn zero_sum_suite(
    name: &str,
    cfg: &SuiteConfig,
    check: impl Fn(&PointedGraph) -> Result<i128> + Sync,
) -> Result<VerificationReport> {
    let max_weight = cfg.max_weight.unwrap_or(3);
    let trials = cfg.trials.unwrap_or(500);
    let max_ordinary = cfg.max_ordinary.unwrap_or(5);
    let max_edges = cfg.max_edges.unwrap_or(8);
    let mut population: Vec<PointedGraph> = semistable_upto(1, max_weight)?
        .into_iter()
        .filter(|g| g.edge_count() > 0)
        .collect();
    let mut rng = random::rng(cfg.seed());
    population.extend((0..trials).map(|_| random::scon_one_pointed(&mut rng, max_ordinary, max_edges)));
    let sums: Vec<i128> = population.par_iter().map(&check).collect::<Result<_>>()?;
    let mut report = VerificationReport::new(name)
        .with_config("max_weight", max_weight)
        .with_config("trials", trials)
        .with_config("max_ordinary", max_ordinary)
        .with_config("max_edges", max_edges)
        .with_config("seed", cfg.seed());
    for (g, s) in population.iter().zip(sums) {
        report.check(KeyOf(g), 0, s);
    }
    Ok(report)
}

/// Signed sum over BT subgraphs of the contracted determinants vanishes on
/// every nontrivial strongly connected one-pointed graph.
pub fn inversion(cfg: &SuiteConfig) -> Result<VerificationReport> {
    zero_sum_suite("inversion", cfg, inversion_identity_check)
}

/// Signed weight sum over acyclic subgraphs vanishes on every nontrivial graph.
pub fn acyclic_sum(cfg: &SuiteConfig) -> Result<VerificationReport> {
    zero_sum_suite("acyclic-sum", cfg, acyclic_sum_check)
}

/// Graft counts against embedded-copy counts for every outer one-pointed and
/// inner graph with at most `max_edges` edges each (default 3).
pub fn substitution(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let max_edges = cfg.max_edges.unwrap_or(3);
    let outers = small_scon(1, max_edges)?;
    let mut inners = Vec::new();
    for m in 0..=2 {
        inners.extend(small_scon(m, max_edges)?);
    }
    let pairs: Vec<(&PointedGraph, &PointedGraph)> =
        outers.iter().flat_map(|o| inners.iter().map(move |i| (o, i))).collect();
    let reports: Vec<VerificationReport> = pairs
        .par_iter()
        .map(|(o, i)| substitution_identity_check(o, i))
        .collect::<Result<_>>()?;
    let mut report = VerificationReport::new("substitution")
        .with_config("max_edges", max_edges)
        .with_config("pairs", pairs.len());
    for r in reports {
        report.merge(r);
    }
    Ok(report)
}

/// Subdividing any edge flips the sign of `det(A(G_-) - I)`, keeps the
/// weight and destroys semistability.
pub fn subdivision_sign(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let max_weight = cfg.max_weight.unwrap_or(3);
    let mut report = VerificationReport::new("subdivision-sign").with_config("max_weight", max_weight);
    for g in semistable_upto(1, max_weight)? {
        for e in g.edges() {
            let h = g.subdivide_edge(e)?;
            let key = format!("{} / {}>{}", g.canonical_key(), e.from, e.to);
            report.check(&key, -g.ordinary_det(), h.ordinary_det());
            report.check(&key, g.weight(), h.weight());
            report.check(&key, false, h.is_semistable());
        }
    }
    Ok(report)
}

/// `det(A - I)` equals the signed sum over spanning linear subgraphs.
pub fn coefficient_theorem(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let max_weight = cfg.max_weight.unwrap_or(3);
    let trials = cfg.trials.unwrap_or(1000);
    let max_vertices = cfg.max_vertices.unwrap_or(7);
    let max_mult = cfg.max_multiplicity.unwrap_or(3);
    let mut population = Vec::new();
    for m in 0..=1 {
        for g in semistable_upto(m, max_weight)? {
            population.push(g.ordinary_part());
            population.push(g);
        }
    }
    let mut rng = random::rng(cfg.seed());
    population.extend((0..trials).map(|_| random::digraph(&mut rng, max_vertices, max_mult)));
    let pairs: Vec<(i128, i128)> = population
        .par_iter()
        .map(|g| (char_det(g), linear_subgraph_sum(g)))
        .collect();
    let mut report = VerificationReport::new("coefficient-theorem")
        .with_config("max_weight", max_weight)
        .with_config("trials", trials)
        .with_config("max_vertices", max_vertices)
        .with_config("max_multiplicity", max_mult)
        .with_config("seed", cfg.seed());
    for (g, (det, sum)) in population.iter().zip(pairs) {
        report.check(KeyOf(g), det, sum);
    }
    Ok(report)
}

fn truncate(s: &GraphSeries, max_weight: u32) -> GraphSeries {
    s.filter(|k| k.weight() <= max_weight as i64)
}

/// Both inverse pairs compose to the identity.
pub fn compose_inverse(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let max_weight = cfg.max_weight.unwrap_or(3);
    let vmax = cfg.max_ordinary.unwrap_or(3);
    let mode = Mode::Scon(vmax);
    let ber = series::berezin_series(max_weight, mode)?;
    let bt_inv = series::bt_inverse_series(max_weight, mode)?;
    let kbw = series::kbw_series(max_weight, mode)?;
    let kbw_inv = series::kbw_inverse_series(max_weight, mode)?;
    let identity = GraphSeries::identity(1);
    let mut report = VerificationReport::new("compose-inverse")
        .with_config("max_weight", max_weight)
        .with_config("max_ordinary", vmax);
    for (name, outer, inner) in [
        ("bt-inverse . berezin", &bt_inv, &ber),
        ("berezin . bt-inverse", &ber, &bt_inv),
        ("kbw-inverse . kbw", &kbw_inv, &kbw),
        ("kbw . kbw-inverse", &kbw, &kbw_inv),
    ] {
        let composed = truncate(&series::compose(outer, inner, vmax)?, max_weight);
        let mut r = golden::compare_series(name, &identity, &composed);
        for f in &mut r.failures {
            f.key = format!("{name}: {}", f.key);
        }
        report.merge(r);
    }
    Ok(report)
}

/// `(f1 * f2) * f3 = f1 * (f2 * f3)` on every three-pointed target for the
/// BT and KBW star products.
pub fn associativity(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let max_weight = cfg.max_weight.unwrap_or(2);
    let vmax = cfg.max_ordinary.unwrap_or(4);
    let mode = Mode::Scon(vmax);
    let mut report = VerificationReport::new("associativity")
        .with_config("max_weight", max_weight)
        .with_config("max_ordinary", vmax);
    for (name, star) in [
        ("bt-star", series::bt_inverse_series(max_weight, mode)?.to_star()?),
        ("kbw-star", series::kbw_series(max_weight, mode)?.to_star()?),
    ] {
        let left = truncate(&series::star_compose(&star, &star, 1, vmax)?, max_weight);
        let right = truncate(&series::star_compose(&star, &star, 2, vmax)?, max_weight);
        let mut r = golden::compare_series(name, &left, &right);
        for f in &mut r.failures {
            f.key = format!("{name}: {}", f.key);
        }
        report = report.with_config(&format!("{name}_targets"), r.instances);
        report.merge(r);
    }
    Ok(report)
}

/// Every graph `Gamma_-` of a one-pointed semistable graph of weight at most
/// `max_weight`, without repeats.
fn gamma_parts(max_weight: u32) -> Result<Vec<PointedGraph>> {
    let keys: BTreeSet<_> = semistable_upto(1, max_weight)?
        .iter()
        .map(|g| g.ordinary_part().canonical_key())
        .collect();
    Ok(keys.into_iter().map(|k| k.to_graph()).collect())
}

/// Multisets of at most `max` cross edges from `a` vertices into `b` vertices.
fn cross_multisets(a: usize, b: usize, max: u32) -> Vec<Vec<CrossEdge>> {
    let slots: Vec<(usize, usize)> = (0..a).flat_map(|u| (0..b).map(move |w| (u, w))).collect();
    let mut out = Vec::new();
    fn rec(slots: &[(usize, usize)], at: usize, left: u32, cur: &mut Vec<CrossEdge>, out: &mut Vec<Vec<CrossEdge>>) {
        if at == slots.len() {
            out.push(cur.clone());
            return;
        }
        rec(slots, at + 1, left, cur, out);
        for mult in 1..=left {
            cur.push(CrossEdge {
                from: VertexRef::Gamma(slots[at].0),
                to: VertexRef::G(slots[at].1),
                mult,
            });
            rec(slots, at + 1, left - mult, cur, out);
            cur.pop();
        }
    }
    rec(&slots, 0, max, &mut Vec::new(), &mut out);
    out
}

/// Determinant factorization across one-way cross edges, edge-count and sign
/// relations of the glued graphs, the transpose symmetry of the marked
/// degree conditions, and the low-order obstruction totals.
pub fn karabegov_kernels(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let max_weight = cfg.max_weight.unwrap_or(2);
    let max_order = cfg.max_weight.map_or(3, |w| w.max(1) + 1);
    let trials = cfg.trials.unwrap_or(200);
    let max_cross = cfg.max_edges.unwrap_or(3);
    let mut report = VerificationReport::new("karabegov")
        .with_config("max_weight", max_weight)
        .with_config("max_order", max_order)
        .with_config("trials", trials)
        .with_config("max_cross_edges", max_cross)
        .with_config("seed", cfg.seed());

    let gammas = gamma_parts(max_weight)?;
    let gs: Vec<PointedGraph> = semistable_upto(0, max_weight)?;
    let mut jobs: Vec<(&PointedGraph, &PointedGraph)> = Vec::new();
    for gamma in &gammas {
        for g in &gs {
            jobs.push((gamma, g));
        }
    }
    let parts: Vec<VerificationReport> = jobs
        .par_iter()
        .map(|(gamma, g)| {
            let mut r = VerificationReport::new("det-factorization");
            for cross in cross_multisets(gamma.vertex_count(), g.vertex_count(), max_cross) {
                r.merge(karabegov::det_factorization_check(gamma, g, &cross)?);
            }
            Ok(r)
        })
        .collect::<Result<_>>()?;
    for r in parts {
        report.merge(r);
    }
    let mut rng = random::rng(cfg.seed());
    for _ in 0..trials {
        let (gamma, g, cross) = karabegov::random_block_pair(&mut rng, 4);
        report.merge(karabegov::det_factorization_check(&gamma, &g, &cross)?);
    }

    for case in [Case::Bt, Case::DualKbw, Case::Berezin] {
        for inst in karabegov::glued_instances(case, max_order)? {
            match case {
                Case::Berezin => {
                    let key = KeyOf(&inst.hdot);
                    let expected = inst.gamma.ordinary_det() * inst.g.ordinary_det();
                    report.check(key, expected, inst.hdot.ordinary_det());
                }
                _ => report.merge(karabegov::edge_sign_relation_check(case, &inst.gamma, Some(&inst.g), &inst.hdot)?),
            }
        }
    }

    for k in 0..=max_order {
        let spec = EnumSpec::new(1, k, StabilityClass::Stable).family(Family::Bt);
        let graphs: Vec<PointedGraph> = enumerate_graphs(&spec)?.into_iter().map(|r| r.key.to_graph()).collect();
        let with = |pick: fn((u32, u32)) -> u32| -> BTreeSet<_> {
            graphs
                .iter()
                .filter(|g| pick(g.degrees_unchecked(0)) == 1)
                .map(|g| g.canonical_key())
                .collect()
        };
        let out_one = with(|(_, out)| out);
        let in_one: BTreeSet<_> = with(|(inn, _)| inn);
        let transposed: BTreeSet<_> = out_one.iter().map(|key| key.to_graph().transpose().canonical_key()).collect();
        report.check(format!("transpose symmetry at weight {k}"), in_one.len(), transposed.len());
        report.check(format!("transpose symmetry at weight {k}"), true, in_one == transposed);
    }

    for case in [Case::Bt, Case::Berezin, Case::DualKbw] {
        for order in 0..=2 {
            report.merge(karabegov::low_order_obstruction_check(case, order)?);
        }
    }
    Ok(report)
}

/// Count table, the weight-4 BT and weight-5 KBW layers, the low-order
/// expansions and the weight-1 Bergman layer against the embedded data.
pub fn tables(cfg: &SuiteConfig) -> Result<VerificationReport> {
    let max_weight = cfg.max_weight.unwrap_or(6);
    let mut report = VerificationReport::new("tables").with_config("max_weight", max_weight);
    report.merge(table1_check(max_weight)?);
    for (name, golden_text, computed) in [
        (
            "bt-inverse weight 4",
            golden::BT_INVERSE_WEIGHT4,
            series::bt_inverse_series(4, Mode::Stable)?.layer(4),
        ),
        ("kbw weight 5", golden::KBW_WEIGHT5, series::kbw_series(5, Mode::Stable)?.layer(5)),
        ("berezin low", golden::BEREZIN_LOW, series::berezin_series(3, Mode::Stable)?),
        ("bt-inverse low", golden::BT_INVERSE_LOW, series::bt_inverse_series(3, Mode::Stable)?),
        ("kbw low", golden::KBW_LOW, series::kbw_series(4, Mode::Stable)?),
        ("kbw-inverse low", golden::KBW_INVERSE_LOW, series::kbw_inverse_series(3, Mode::Stable)?),
        ("bergman weight 1", golden::BERGMAN_WEIGHT1, series::bergman_log_series(1)?.layer(1)),
    ] {
        let expected = golden::parse_series(golden_text)?;
        let mut r = golden::compare_series(name, &expected, &computed);
        for f in &mut r.failures {
            f.key = format!("{name}: {}", f.key);
        }
        report.merge(r);
    }
    let b_row = golden::table1()?.b;
    let ber = series::berezin_series(4.min(max_weight), Mode::Stable)?;
    for k in 0..=4.min(max_weight) {
        report.check(format!("berezin support at weight {k}"), b_row[k as usize], ber.layer(k as i64).len() as u64);
    }
    Ok(report)
}

/// Computed stable counts against the embedded table for weights up to
/// `max_weight` (at most 6).
pub fn table1_check(max_weight: u32) -> Result<VerificationReport> {
    let top = max_weight.min(6);
    let expected = golden::table1()?;
    let actual = count_table(top)?;
    let mut report = VerificationReport::new("table1").with_config("max_weight", top);
    for (label, family) in [("all", Family::All), ("b", Family::B), ("bt", Family::Bt), ("s", Family::S)] {
        for k in 0..=top as usize {
            report.check(format!("{label}[{k}]"), expected.row(family)[k], actual.row(family)[k]);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn cross_multisets_count() {
        // 2 slots, at most 2 edges: {}, a, 2a, b, 2b, ab
        assert_eq!(cross_multisets(1, 2, 2).len(), 6);
        assert_eq!(cross_multisets(0, 3, 3).len(), 1);
    }

    #[test]
    fn small_suites_pass() {
        let cfg = SuiteConfig {
            max_weight: Some(2),
            trials: Some(20),
            ..Default::default()
        };
        for s in [Suite::Inversion, Suite::AcyclicSum, Suite::SubdivisionSign, Suite::CoefficientTheorem] {
            let r = run(s, &cfg).unwrap();
            assert!(r.is_pass(), "{s}: {:?}", &r.failures[..r.failures.len().min(3)]);
            assert!(r.instances > 0);
        }
    }
}
