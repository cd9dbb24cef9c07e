//! Combinatorial kernels behind the Karabegov-form identifications.
//!
//! A legged graph is a body of ordinary vertices with an incoming leg `l`
//! and an outgoing leg `k`. It is stored as a two-pointed graph: `f1` is the
//! source of the single edge into the `l` anchor and `f2` is the head of the
//! single edge out of the `k` anchor. Gluing the legs merges `f1` and `f2`.
//!
//! The order-`d` coefficient of `u^k * z^l - z^l u^k` collects three kinds of
//! contribution, each a one-pointed graph `Gamma` whose marked vertex has
//! out-degree 1:
//! - potential terms: `Gamma` of weight `d + 1` with marked in-degree 1 as
//!   well, split into a legged graph;
//! - Ricci terms: `Gamma` of weight `d`, its marked vertex replaced by a
//!   vertex with one loop carrying the `k` leg;
//! - Bergman terms: `Gamma` of weight `t < d`, its marked vertex replaced by
//!   a zero-pointed graph `G` of weight `d - t` that carries the `k` leg.
//!
//! When the marked vertex is replaced, its out-edge becomes the `l` leg, its
//! in-edges land on any vertex of the replacement, and a loop sends the `l`
//! leg to any vertex of the replacement.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::canon::{factorial, CanonicalKey, KeyOf};
use crate::enumerate::{enumerate_graphs, EnumSpec, Family, GraphRecord, StabilityClass};
use crate::error::{Error, Result};
use crate::graph::PointedGraph;
use crate::report::VerificationReport;
use crate::series::GraphSeries;
use crate::substitute::split_marked;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case {
    Bt,
    Berezin,
    DualKbw,
}

impl Case {
    fn family(&self) -> Family {
        match self {
            Case::Bt => Family::Bt,
            Case::Berezin | Case::DualKbw => Family::All,
        }
    }

    /// Star-product coefficient of a stable one-pointed graph.
    fn gamma_coefficient(&self, r: &GraphRecord) -> Rational {
        let num = match self {
            Case::Berezin => r.det,
            Case::Bt | Case::DualKbw => parity(r.edge_count),
        };
        Rational::new(num, r.aut as i128)
    }

    /// Sign of the potential in `u^k`.
    fn potential_sign(&self) -> i128 {
        match self {
            Case::Berezin => 1,
            Case::Bt | Case::DualKbw => -1,
        }
    }

    /// Coefficient of a zero-pointed graph inside `u^k`.
    fn g_coefficient(&self, r: &GraphRecord) -> Option<Rational> {
        let num = match self {
            Case::Bt => return None,
            Case::Berezin => -r.det,
            Case::DualKbw => -parity(r.edge_count),
        };
        Some(Rational::new(num, r.aut as i128))
    }

    fn has_ricci(&self) -> bool {
        !matches!(self, Case::Berezin)
    }
}

fn parity(e: u64) -> i128 {
    if e.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Body plus the two legs, stored as a two-pointed graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeggedGraph {
    graph: PointedGraph,
}

impl LeggedGraph {
    /// Legs on a zero-pointed body: `k` leaves `anchor_k`, `l` enters `anchor_l`.
    pub fn new(body: &PointedGraph, anchor_k: usize, anchor_l: usize) -> Result<Self> {
        if body.marked_count() != 0 {
            return Err(Error::UnsupportedPointCount(body.marked_count()));
        }
        let n = body.vertex_count();
        for a in [anchor_k, anchor_l] {
            if a >= n {
                return Err(Error::VertexOutOfRange { vertex: a, count: n });
            }
        }
        let mut g = PointedGraph::new(2, n);
        for u in 0..n {
            for w in 0..n {
                *g.mult_mut(u + 2, w + 2) = body.mult(u, w);
            }
        }
        *g.mult_mut(0, anchor_l + 2) += 1;
        *g.mult_mut(anchor_k + 2, 1) += 1;
        Ok(LeggedGraph { graph: g })
    }

    /// The bare connector: the `l` leg runs straight into the `k` leg.
    pub fn connector() -> Self {
        LeggedGraph {
            graph: PointedGraph::from_edges(2, 0, &[(0, 1, 1)]).expect("two marked vertices"),
        }
    }

    /// Accepts a two-pointed graph whose `f1` has a single out-edge and no
    /// in-edges and whose `f2` has a single in-edge and no out-edges.
    pub fn from_two_pointed(g: PointedGraph) -> Result<Self> {
        if g.marked_count() != 2 {
            return Err(Error::UnsupportedPointCount(g.marked_count()));
        }
        let (in1, out1) = g.degrees_unchecked(0);
        let (in2, out2) = g.degrees_unchecked(1);
        let connector = g.mult(0, 1) == 1;
        let ok = if connector {
            (in1, out1, in2, out2) == (0, 1, 1, 0)
        } else {
            (in1, out1, in2, out2) == (0, 1, 1, 0) && g.mult(0, 0) == 0 && g.mult(1, 1) == 0
        };
        if !ok {
            return Err(Error::MismatchedConstruction(format!("{g:?} does not carry exactly two legs")));
        }
        Ok(LeggedGraph { graph: g })
    }

    pub fn as_graph(&self) -> &PointedGraph {
        &self.graph
    }

    pub fn key(&self) -> CanonicalKey {
        self.graph.canonical_key()
    }

    /// Number of body edges.
    pub fn body_edge_count(&self) -> u64 {
        self.graph.edge_count() - 2 + u64::from(self.graph.mult(0, 1))
    }
}

/// Joins the head of `k` and the tail of `l` at a fresh marked vertex.
pub fn glue_legs(h: &LeggedGraph) -> PointedGraph {
    h.graph.merge_marked_unchecked()
}

/// Vertex of a block pair: the `Gamma` block or the `G` block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexRef {
    Gamma(usize),
    G(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossEdge {
    pub from: VertexRef,
    pub to: VertexRef,
    pub mult: u32,
}

/// The combined zero-pointed graph of two blocks joined by cross edges,
/// `Gamma` block first. Cross edges must run from `Gamma` to `G`.
pub fn combine_blocks(gamma: &PointedGraph, g: &PointedGraph, cross: &[CrossEdge]) -> Result<PointedGraph> {
    let (a, b) = (gamma.vertex_count(), g.vertex_count());
    let mut out = PointedGraph::new(0, a + b);
    for u in 0..a {
        for w in 0..a {
            *out.mult_mut(u, w) = gamma.mult(u, w);
        }
    }
    for u in 0..b {
        for w in 0..b {
            *out.mult_mut(a + u, a + w) = g.mult(u, w);
        }
    }
    for e in cross {
        let (VertexRef::Gamma(u), VertexRef::G(w)) = (e.from, e.to) else {
            return Err(Error::CrossEdgeDirection);
        };
        if u >= a {
            return Err(Error::VertexOutOfRange { vertex: u, count: a });
        }
        if w >= b {
            return Err(Error::VertexOutOfRange { vertex: w, count: b });
        }
        *out.mult_mut(u, a + w) += e.mult;
    }
    Ok(out)
}

/// `det(A(combined) - I) = det(A(Gamma) - I) det(A(G) - I)` for one-way cross edges.
pub fn det_factorization_check(
    gamma: &PointedGraph,
    g: &PointedGraph,
    cross: &[CrossEdge],
) -> Result<VerificationReport> {
    let combined = combine_blocks(gamma, g, cross)?;
    let mut report = VerificationReport::new("det-factorization");
    let expected = gamma.ordinary_det() * g.ordinary_det();
    report.check(KeyOf(&combined), expected, combined.ordinary_det());
    Ok(report)
}

/// Where a replaced marked vertex came from, for reporting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TermKind {
    Potential,
    Ricci,
    Bergman,
}

/// One legged graph produced by one `(Gamma, G)` pair.
#[derive(Clone, Debug, Serialize)]
pub struct Contribution {
    pub kind: TermKind,
    pub gamma: CanonicalKey,
    pub g: Option<CanonicalKey>,
    pub legged: CanonicalKey,
    pub coefficient: Rational,
}

/// The order-`d` coefficient as a sum over legged graphs.
#[derive(Clone, Debug)]
pub struct ObstructionSum {
    pub case: Case,
    pub order: u32,
    pub contributions: Vec<Contribution>,
    /// Two-pointed series of legged graphs.
    pub total: GraphSeries,
}

/// Replaces the marked vertex of `gamma` (out-degree 1) by the zero-pointed `g`
/// carrying the `k` leg. Returns each legged graph with its number of
/// endpoint assignments.
pub fn attach(gamma: &PointedGraph, g: &PointedGraph) -> Result<BTreeMap<CanonicalKey, u64>> {
    if gamma.marked_count() != 1 {
        return Err(Error::NotOnePointed(gamma.marked_count()));
    }
    let (_, out) = gamma.degrees_unchecked(0);
    if out != 1 {
        return Err(Error::MismatchedConstruction(format!(
            "marked vertex of {gamma:?} has out-degree {out}"
        )));
    }
    let ng = gamma.ordinary_count();
    let vg = g.vertex_count();
    if vg == 0 {
        return Ok(BTreeMap::new());
    }
    let gam = |v: usize| v + 1;
    let gv = |j: usize| 2 + ng + j;
    let mut base = PointedGraph::new(2, ng + vg);
    for u in 1..=ng {
        for w in 1..=ng {
            *base.mult_mut(gam(u), gam(w)) = gamma.mult(u, w);
        }
    }
    for u in 0..vg {
        for w in 0..vg {
            *base.mult_mut(gv(u), gv(w)) = g.mult(u, w);
        }
    }
    let target = (0..=ng).find(|&w| gamma.mult(0, w) > 0).expect("out-degree 1");
    let l_anchors: Vec<usize> = if target == 0 {
        (0..vg).map(gv).collect()
    } else {
        vec![gam(target)]
    };
    let in_classes: Vec<(usize, u32)> = (1..=ng)
        .filter(|&w| gamma.mult(w, 0) > 0)
        .map(|w| (gam(w), gamma.mult(w, 0)))
        .collect();
    let mut acc = BTreeMap::new();
    let mut partial = vec![(base, 1u64)];
    for &(src, c) in &in_classes {
        let mut next = Vec::new();
        for (h, weight) in &partial {
            let mut splits = Vec::new();
            split_count(c, vg, &mut Vec::new(), &mut splits);
            for parts in splits {
                let mut h2 = h.clone();
                for (j, &p) in parts.iter().enumerate() {
                    *h2.mult_mut(src, gv(j)) += p;
                }
                let ways = parts.iter().fold(factorial(c), |a, &p| a / factorial(p));
                next.push((h2, weight * ways));
            }
        }
        partial = next;
    }
    for (h, weight) in partial {
        for &la in &l_anchors {
            for kj in 0..vg {
                let mut h2 = h.clone();
                *h2.mult_mut(0, la) += 1;
                *h2.mult_mut(gv(kj), 1) += 1;
                *acc.entry(h2.canonical_key()).or_insert(0) += weight;
            }
        }
    }
    Ok(acc)
}

fn split_count(total: u32, cells: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    let used: u32 = cur.iter().sum();
    if cur.len() + 1 == cells {
        cur.push(total - used);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for x in 0..=total - used {
        cur.push(x);
        split_count(total, cells, cur, out);
        cur.pop();
    }
}

/// The vertex with one loop standing for the Ricci potential.
pub fn ricci_vertex() -> PointedGraph {
    PointedGraph::from_edges(0, 1, &[(0, 0, 1)]).expect("one vertex")
}

fn gammas(case: Case, weight: u32, both_degrees: bool) -> Result<Vec<GraphRecord>> {
    let spec = EnumSpec::new(1, weight, StabilityClass::Stable).family(case.family());
    Ok(enumerate_graphs(&spec)?
        .into_iter()
        .filter(|r| {
            let (inn, out) = r.key.to_graph().degrees_unchecked(0);
            out == 1 && (!both_degrees || inn == 1)
        })
        .collect())
}

/// Zero-pointed strongly connected graphs of the given weight able to sit
/// inside a stable glued graph.
fn replacement_graphs(weight: u32) -> Result<Vec<GraphRecord>> {
    let spec = EnumSpec::new(0, weight, StabilityClass::Scon).max_ordinary(weight as usize + 1);
    Ok(enumerate_graphs(&spec)?.into_iter().filter(|r| r.key.ordinary_count() > 0).collect())
}

/// One glued graph built from a replacement of the marked vertex.
#[derive(Clone, Debug)]
pub struct GluedInstance {
    pub case: Case,
    pub kind: TermKind,
    pub gamma: PointedGraph,
    pub g: PointedGraph,
    pub legged: LeggedGraph,
    pub hdot: PointedGraph,
}

/// Ricci and Bergman replacements whose glued graph is stable, with legged
/// graphs of weight `1..=max_order` (the weight of the glued graph minus one).
pub fn glued_instances(case: Case, max_order: u32) -> Result<Vec<GluedInstance>> {
    let mut out = Vec::new();
    for d in 1..=max_order {
        for (kind, gamma, g) in replacement_pairs(case, d)? {
            for key in attach(&gamma.key.to_graph(), &g.key.to_graph())?.into_keys() {
                let legged = LeggedGraph::from_two_pointed(key.to_graph())?;
                let hdot = glue_legs(&legged);
                if hdot.is_stable() {
                    out.push(GluedInstance {
                        case,
                        kind,
                        gamma: gamma.key.to_graph(),
                        g: g.key.to_graph(),
                        legged,
                        hdot,
                    });
                }
            }
        }
    }
    Ok(out)
}

fn replacement_pairs(case: Case, d: u32) -> Result<Vec<(TermKind, GraphRecord, GraphRecord)>> {
    let mut pairs = Vec::new();
    if case.has_ricci() {
        let ricci = GraphRecord::from_key(ricci_vertex().canonical_key());
        for gamma in gammas(case, d, false)? {
            pairs.push((TermKind::Ricci, gamma, ricci.clone()));
        }
    }
    if case.g_coefficient(&GraphRecord::from_key(ricci_vertex().canonical_key())).is_some() {
        for t in 1..d {
            let gs = replacement_graphs(d - t)?;
            for gamma in gammas(case, t, false)? {
                for g in &gs {
                    pairs.push((TermKind::Bergman, gamma.clone(), g.clone()));
                }
            }
        }
    }
    Ok(pairs)
}

/// Assembles the order-`d` coefficient (`d <= 2`) as a sum over legged graphs,
/// keeping those whose glued graph is stable.
pub fn obstruction_terms(case: Case, order: u32) -> Result<ObstructionSum> {
    if order > 2 {
        return Err(Error::OrderNotCovered(order as usize));
    }
    let mut contributions = Vec::new();
    for gamma in gammas(case, order + 1, true)? {
        let legged = LeggedGraph::from_two_pointed(split_marked(&gamma.key.to_graph())?)?;
        contributions.push(Contribution {
            kind: TermKind::Potential,
            coefficient: case.gamma_coefficient(&gamma) * case.potential_sign(),
            gamma: gamma.key.clone(),
            g: None,
            legged: legged.key(),
        });
    }
    for (kind, gamma, g) in replacement_pairs(case, order)? {
        let g_coeff = match kind {
            TermKind::Ricci => Rational::from(1),
            _ => case.g_coefficient(&g).expect("case has Bergman terms"),
        };
        let c = case.gamma_coefficient(&gamma) * g_coeff;
        for (key, ways) in attach(&gamma.key.to_graph(), &g.key.to_graph())? {
            if !key.to_graph().merge_marked_unchecked().is_stable() || c == Rational::from(0) {
                continue;
            }
            contributions.push(Contribution {
                kind,
                gamma: gamma.key.clone(),
                g: Some(g.key.clone()),
                legged: key,
                coefficient: c * ways as i128,
            });
        }
    }
    let mut total = GraphSeries::new(2);
    for c in &contributions {
        total.add_term(c.legged.clone(), c.coefficient)?;
    }
    Ok(ObstructionSum {
        case,
        order,
        contributions,
        total,
    })
}

/// Order 0 must give the bare connector with coefficient 1; orders 1 and 2 must vanish.
pub fn low_order_obstruction_check(case: Case, order: u32) -> Result<VerificationReport> {
    let sum = obstruction_terms(case, order)?;
    let mut expected = GraphSeries::new(2);
    if order == 0 {
        expected.add_term(LeggedGraph::connector().key(), Rational::from(1))?;
    }
    let mut report = VerificationReport::new("karabegov")
        .with_config("case", format!("{case:?}"))
        .with_config("order", order);
    let mut keys: Vec<&CanonicalKey> = sum.contributions.iter().map(|c| &c.legged).collect();
    keys.extend(expected.terms().map(|(k, _)| k));
    keys.sort();
    keys.dedup();
    for k in keys {
        report.check(k, expected.coefficient(k), sum.total.coefficient(k));
    }
    if report.instances == 0 {
        report.check("empty sum", 0, 0);
    }
    Ok(report)
}

/// Edge-count relation and sign cancellation between a replacement term and
/// its potential-term partner `hdot`.
///
/// BT: `|E(hdot)| = |E(gamma)| + 2`, so `-(-1)^|E(hdot)| + (-1)^|E(gamma)| = 0`.
/// Dual KBW: `|E(hdot)| = |E(gamma)| + |E(G)| + 1`, so
/// `-(-1)^|E(hdot)| + (-1)^|E(gamma)| (-1)^(|E(G)| + 1) = 0`.
pub fn edge_sign_relation_check(
    case: Case,
    gamma: &PointedGraph,
    g: Option<&PointedGraph>,
    hdot: &PointedGraph,
) -> Result<VerificationReport> {
    if gamma.marked_count() != 1 || hdot.marked_count() != 1 {
        return Err(Error::MismatchedConstruction("expected one-pointed graphs".into()));
    }
    if hdot.degrees_unchecked(0) != (1, 1) {
        return Err(Error::MismatchedConstruction(format!(
            "{hdot:?} is not a glued legged graph"
        )));
    }
    let e_gamma = gamma.edge_count();
    let e_hdot = hdot.edge_count();
    let mut report = VerificationReport::new("edge-sign").with_config("case", format!("{case:?}"));
    let key = hdot.canonical_key();
    match case {
        Case::Bt => {
            report.check(&key, e_gamma + 2, e_hdot);
            report.check(&key, 0, -parity(e_hdot) + parity(e_gamma));
        }
        Case::DualKbw => {
            let g = g.ok_or_else(|| Error::MismatchedConstruction("missing replacement graph".into()))?;
            let e_g = g.edge_count();
            report.check(&key, e_gamma + e_g + 1, e_hdot);
            report.check(&key, 0, -parity(e_hdot) + parity(e_gamma) * parity(e_g + 1));
        }
        Case::Berezin => {
            return Err(Error::MismatchedConstruction(
                "the Berezin case pairs determinants, not edge counts".into(),
            ))
        }
    }
    Ok(report)
}

/// Random block pair with at most `max_vertices` vertices per block and a
/// random one-way set of cross edges.
pub fn random_block_pair(
    rng: &mut impl Rng,
    max_vertices: usize,
) -> (PointedGraph, PointedGraph, Vec<CrossEdge>) {
    let gamma = crate::random::digraph(rng, max_vertices, 2);
    let g = crate::random::digraph(rng, max_vertices, 2);
    let count = rng.gen_range(0..=3);
    let cross = (0..count)
        .map(|_| CrossEdge {
            from: VertexRef::Gamma(rng.gen_range(0..gamma.vertex_count())),
            to: VertexRef::G(rng.gen_range(0..g.vertex_count())),
            mult: rng.gen_range(1..=2),
        })
        .collect();
    (gamma, g, cross)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn looped_cycle() -> PointedGraph {
        PointedGraph::from_edges(1, 1, &[(0, 1, 1), (1, 0, 1), (1, 1, 1)]).unwrap()
    }

    #[test]
    fn gluing_examples() {
        let h = LeggedGraph::new(&ricci_vertex(), 0, 0).unwrap();
        assert_eq!(glue_legs(&h), looped_cycle());
        let bare = LeggedGraph::new(&PointedGraph::new(0, 1), 0, 0).unwrap();
        let cycle = PointedGraph::from_edges(1, 1, &[(0, 1, 1), (1, 0, 1)]).unwrap();
        assert_eq!(glue_legs(&bare), cycle);
        assert_eq!(glue_legs(&h).edge_count(), h.body_edge_count() + 2);
        assert_eq!(glue_legs(&LeggedGraph::connector()), PointedGraph::marked_loops(1));
    }

    #[test]
    fn determinant_factorization_examples() {
        let empty = PointedGraph::new(0, 0);
        let g = PointedGraph::from_edges(0, 1, &[(0, 0, 2)]).unwrap();
        assert!(det_factorization_check(&empty, &g, &[]).unwrap().is_pass());
        let lone = PointedGraph::new(0, 1);
        let cross = [CrossEdge {
            from: VertexRef::Gamma(0),
            to: VertexRef::G(0),
            mult: 1,
        }];
        assert_eq!(combine_blocks(&lone, &g, &cross).unwrap().ordinary_det(), -1);
        assert!(det_factorization_check(&lone, &g, &cross).unwrap().is_pass());
        let backwards = [CrossEdge {
            from: VertexRef::G(0),
            to: VertexRef::Gamma(0),
            mult: 1,
        }];
        assert_eq!(det_factorization_check(&lone, &g, &backwards).unwrap_err(), Error::CrossEdgeDirection);
    }

    #[test]
    fn edge_sign_examples() {
        let hdot = glue_legs(&LeggedGraph::from_two_pointed(split_marked(&looped_cycle()).unwrap()).unwrap());
        assert_eq!(hdot, looped_cycle());
        let tri = PointedGraph::from_edges(1, 2, &[(0, 1, 1), (1, 2, 1), (2, 0, 1), (1, 1, 1), (2, 2, 1)])
            .unwrap();
        let r = edge_sign_relation_check(Case::Bt, &looped_cycle(), None, &tri).unwrap();
        assert!(r.is_pass());
        assert!(edge_sign_relation_check(Case::Bt, &looped_cycle(), None, &looped_cycle()).is_ok());
        assert!(!edge_sign_relation_check(Case::Bt, &looped_cycle(), None, &looped_cycle())
            .unwrap()
            .is_pass());
    }

    #[test]
    fn order_zero_is_the_connector() {
        for case in [Case::Bt, Case::Berezin, Case::DualKbw] {
            let sum = obstruction_terms(case, 0).unwrap();
            assert_eq!(sum.total.len(), 1);
            assert_eq!(sum.total.coefficient(&LeggedGraph::connector().key()), Rational::from(1));
        }
    }

    #[test]
    fn bt_order_one_cancels_in_pairs() {
        let sum = obstruction_terms(Case::Bt, 1).unwrap();
        assert!(sum.total.is_empty());
        let coeffs: Vec<Rational> = sum.contributions.iter().map(|c| c.coefficient).collect();
        assert_eq!(coeffs.len(), 2);
        assert!(coeffs.contains(&Rational::from(1)) && coeffs.contains(&Rational::from(-1)));
        let legged: Vec<_> = sum.contributions.iter().map(|c| c.legged.clone()).collect();
        assert_eq!(legged[0], legged[1]);
    }

    #[test]
    fn higher_orders_are_not_covered() {
        assert_eq!(obstruction_terms(Case::Bt, 3).unwrap_err(), Error::OrderNotCovered(3));
    }
}
