//! Formal graph series graded by weight, with exact rational coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num_traits::Zero;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon::CanonicalKey;
use crate::enumerate::{enumerate_graphs, EnumSpec, Family, GraphRecord, StabilityClass};
use crate::error::{Error, Result};
use crate::graph::PointedGraph;
use crate::substitute::{graft_into_slot_raw, split_marked};
use crate::Rational;

/// Which graphs a named series is summed over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    Stable,
    Semistable,
    /// Strongly connected graphs with at most this many ordinary vertices.
    Scon(usize),
}

impl Mode {
    fn spec(&self, marked: usize, weight: u32) -> EnumSpec {
        match *self {
            Mode::Stable => EnumSpec::new(marked, weight, StabilityClass::Stable),
            Mode::Semistable => EnumSpec::new(marked, weight, StabilityClass::Semistable),
            Mode::Scon(v) => EnumSpec::new(marked, weight, StabilityClass::Scon).max_ordinary(v),
        }
    }

    fn horizon(&self, max_weight: u32) -> Horizon {
        let (stability, max_ordinary) = match *self {
            Mode::Stable => (StabilityClass::Stable, None),
            Mode::Semistable => (StabilityClass::Semistable, None),
            Mode::Scon(v) => (StabilityClass::Scon, Some(v)),
        };
        Horizon {
            max_weight,
            stability,
            max_ordinary,
        }
    }
}

/// The part of the full series a truncated series is known to contain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Horizon {
    pub max_weight: u32,
    pub stability: StabilityClass,
    pub max_ordinary: Option<usize>,
}

/// `sum c_G G` over pointed graphs with a common number of marked vertices.
/// A series without a horizon is exact: it has no terms beyond those stored.
#[derive(Clone, Debug)]
pub struct GraphSeries {
    marked: usize,
    terms: BTreeMap<CanonicalKey, Rational>,
    horizon: Option<Horizon>,
}

impl PartialEq for GraphSeries {
    fn eq(&self, other: &Self) -> bool {
        self.marked == other.marked && self.terms == other.terms
    }
}

impl Eq for GraphSeries {}

impl GraphSeries {
    pub fn new(marked: usize) -> Self {
        GraphSeries {
            marked,
            terms: BTreeMap::new(),
            horizon: None,
        }
    }

    /// The edgeless `m`-pointed graph with coefficient 1.
    pub fn identity(marked: usize) -> Self {
        let mut s = Self::new(marked);
        s.terms.insert(PointedGraph::new(marked, 0).canonical_key(), Rational::from(1));
        s
    }

    pub fn with_horizon(mut self, horizon: Option<Horizon>) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn marked_count(&self) -> usize {
        self.marked
    }

    pub fn horizon(&self) -> Option<Horizon> {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: CanonicalKey, coeff: Rational) -> Result<()> {
        if key.marked_count() != self.marked {
            return Err(Error::UnsupportedPointCount(key.marked_count()));
        }
        match self.terms.entry(key) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                if !coeff.is_zero() {
                    e.insert(coeff);
                }
            }
        }
        Ok(())
    }

    pub fn coefficient(&self, key: &CanonicalKey) -> Rational {
        self.terms.get(key).copied().unwrap_or_else(|| Rational::from(0))
    }

    /// Terms in key order.
    pub fn terms(&self) -> impl Iterator<Item = (&CanonicalKey, &Rational)> {
        self.terms.iter()
    }

    /// Terms by ascending weight, then key.
    pub fn sorted_terms(&self) -> Vec<(&CanonicalKey, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| (a.0.weight(), a.0).cmp(&(b.0.weight(), b.0)));
        v
    }

    /// Terms of exactly weight `k`.
    pub fn layer(&self, k: i64) -> GraphSeries {
        self.filter(|key| key.weight() == k)
    }

    pub fn filter(&self, keep: impl Fn(&CanonicalKey) -> bool) -> GraphSeries {
        GraphSeries {
            marked: self.marked,
            terms: self.terms.iter().filter(|(k, _)| keep(k)).map(|(k, c)| (k.clone(), *c)).collect(),
            horizon: self.horizon,
        }
    }

    /// Multiplies the weight-`k` coefficients by `(-1)^k`.
    pub fn parity_flip(&self) -> GraphSeries {
        let mut out = self.clone();
        for (k, c) in out.terms.iter_mut() {
            if k.weight().rem_euclid(2) == 1 {
                *c = -*c;
            }
        }
        out
    }

    /// Splits the marked vertex of every term; coefficients are kept.
    pub fn to_star(&self) -> Result<GraphSeries> {
        if self.marked != 1 {
            return Err(Error::NotOnePointed(self.marked));
        }
        let mut out = GraphSeries::new(2).with_horizon(self.horizon);
        for (k, c) in &self.terms {
            out.add_term(split_marked(&k.to_graph())?.canonical_key(), *c)?;
        }
        Ok(out)
    }

    /// Merges the marked vertices of every term.
    pub fn merge_marked(&self) -> Result<GraphSeries> {
        let mut out = GraphSeries::new(1).with_horizon(self.horizon);
        for (k, c) in &self.terms {
            out.add_term(k.to_graph().merge_marked()?.canonical_key(), *c)?;
        }
        Ok(out)
    }
}

fn sign(exp: u64) -> i128 {
    if exp.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn named(
    marked: usize,
    weights: std::ops::RangeInclusive<u32>,
    mode: Mode,
    family: Family,
    coeff: impl Fn(&GraphRecord) -> Rational + Sync,
) -> Result<GraphSeries> {
    let max_weight = *weights.end();
    let mut out = GraphSeries::new(marked).with_horizon(Some(mode.horizon(max_weight)));
    for k in weights {
        let records = enumerate_graphs(&mode.spec(marked, k).family(family))?;
        let coeffs: Vec<Rational> = records.par_iter().map(&coeff).collect();
        for (r, c) in records.into_iter().zip(coeffs) {
            out.add_term(r.key, c)?;
        }
    }
    Ok(out)
}

fn over_aut(num: i128, r: &GraphRecord) -> Rational {
    Rational::new(num, r.aut as i128)
}

/// Berezin transform: `det(A(G_-) - I) / |Aut G|`.
pub fn berezin_series(kmax: u32, mode: Mode) -> Result<GraphSeries> {
    named(1, 0..=kmax, mode, Family::All, |r| over_aut(r.det, r))
}

/// Inverse Berezin transform: `(-1)^|E| / |Aut G|` over the BT family.
pub fn bt_inverse_series(kmax: u32, mode: Mode) -> Result<GraphSeries> {
    named(1, 0..=kmax, mode, Family::Bt, |r| over_aut(sign(r.edge_count), r))
}

/// KBW Berezin transform: `(-1)^|V| / |Aut G|` over the S family.
pub fn kbw_series(kmax: u32, mode: Mode) -> Result<GraphSeries> {
    named(1, 0..=kmax, mode, Family::S, |r| {
        over_aut(sign(r.key.ordinary_count() as u64), r)
    })
}

/// Inverse KBW transform: `(-1)^|E| / |Aut G|` over all graphs.
pub fn kbw_inverse_series(kmax: u32, mode: Mode) -> Result<GraphSeries> {
    named(1, 0..=kmax, mode, Family::All, |r| over_aut(sign(r.edge_count), r))
}

/// Logarithm of the Bergman kernel expansion: `-det(A(G) - I) / |Aut G|` over
/// zero-pointed semistable graphs of weight `1..=kmax`.
pub fn bergman_log_series(kmax: u32) -> Result<GraphSeries> {
    named(0, 1..=kmax.max(1), Mode::Semistable, Family::All, |r| over_aut(-r.det, r))
}

/// Bounds of a composition, or why it would be incomplete.
fn composition_horizon(outer: &GraphSeries, inner: &GraphSeries, vmax: usize) -> Result<Option<Horizon>> {
    let mut max_weight = None::<u32>;
    for (name, s) in [("outer", outer), ("inner", inner)] {
        if let Some(h) = s.horizon {
            if h.stability != StabilityClass::Scon {
                return Err(Error::IncompleteBounds(format!(
                    "{name} series is restricted by degree, not only by strong connectivity"
                )));
            }
            match h.max_ordinary {
                Some(v) if v >= vmax => {}
                _ => {
                    return Err(Error::IncompleteBounds(format!(
                        "{name} series has fewer than {vmax} ordinary vertices per term"
                    )))
                }
            }
            max_weight = Some(max_weight.map_or(h.max_weight, |w| w.min(h.max_weight)));
        }
    }
    Ok(max_weight.map(|w| Horizon {
        max_weight: w,
        stability: StabilityClass::Scon,
        max_ordinary: Some(vmax),
    }))
}

fn compose_at(outer: &GraphSeries, slot: usize, inner: &GraphSeries, vmax: usize) -> Result<GraphSeries> {
    let horizon = composition_horizon(outer, inner, vmax)?;
    let kmax = horizon.map_or(i64::MAX, |h| h.max_weight as i64);
    let marked = outer.marked - 1 + inner.marked;
    let outer_terms: Vec<_> = outer.terms.iter().collect();
    let parts: Vec<Result<BTreeMap<CanonicalKey, Rational>>> = outer_terms
        .par_iter()
        .map(|(gk, gc)| {
            let g = gk.to_graph();
            let mut acc = BTreeMap::new();
            for (hk, hc) in &inner.terms {
                if gk.weight() + hk.weight() > kmax || gk.ordinary_count() + hk.ordinary_count() > vmax {
                    continue;
                }
                for (target, count) in graft_into_slot_raw(&g, slot, &hk.to_graph())? {
                    *acc.entry(target).or_insert_with(|| Rational::from(0)) += **gc * *hc * count as i128;
                }
            }
            Ok(acc)
        })
        .collect();
    let mut out = GraphSeries::new(marked).with_horizon(horizon);
    for part in parts {
        for (k, c) in part? {
            out.add_term(k, c)?;
        }
    }
    Ok(out)
}

/// Substitutes `inner` into the marked vertex of every term of the one-pointed
/// `outer`. Coefficients already carry `1/|Aut|`, so each pair contributes its
/// coefficients times the raw assignment counts of the graft. Keeps targets with at most `vmax` ordinary vertices and weight
/// within both horizons. Truncated inputs must be strongly connected series
/// reaching `vmax` ordinary vertices, so that every retained target is complete.
pub fn compose(outer: &GraphSeries, inner: &GraphSeries, vmax: usize) -> Result<GraphSeries> {
    if outer.marked != 1 {
        return Err(Error::NotOnePointed(outer.marked));
    }
    compose_at(outer, 0, inner, vmax)
}

/// Substitutes the two-pointed `inner` into marked vertex `f_slot` (`slot` is 1 or 2)
/// of every term of the two-pointed `outer`, giving a three-pointed series.
pub fn star_compose(outer: &GraphSeries, inner: &GraphSeries, slot: usize, vmax: usize) -> Result<GraphSeries> {
    if outer.marked != 2 || inner.marked != 2 {
        return Err(Error::UnsupportedPointCount(if outer.marked != 2 { outer.marked } else { inner.marked }));
    }
    if !(1..=2).contains(&slot) {
        return Err(Error::VertexOutOfRange { vertex: slot, count: 2 });
    }
    compose_at(outer, slot - 1, inner, vmax)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(m: usize, n: usize, edges: &[(usize, usize, u32)]) -> CanonicalKey {
        PointedGraph::from_edges(m, n, edges).unwrap().canonical_key()
    }

    fn r(a: i128, b: i128) -> Rational {
        Rational::new(a, b)
    }

    #[test]
    fn low_order_coefficients() {
        let b = berezin_series(3, Mode::Stable).unwrap();
        assert_eq!(b.coefficient(&key(1, 0, &[(0, 0, 1)])), r(1, 1));
        assert_eq!(b.coefficient(&key(1, 1, &[(0, 1, 2), (1, 0, 2)])), r(-1, 4));
        assert_eq!(b.coefficient(&key(1, 1, &[(1, 1, 2), (0, 1, 1), (1, 0, 1)])), r(1, 2));
        let bt = bt_inverse_series(3, Mode::Stable).unwrap();
        assert_eq!(bt.coefficient(&key(1, 1, &[(0, 1, 1), (1, 0, 1), (1, 1, 1)])), r(-1, 1));
        let log = bergman_log_series(1).unwrap();
        assert_eq!(log.len(), 2);
        assert_eq!(log.coefficient(&key(0, 1, &[(0, 0, 2)])), r(-1, 2));
    }

    #[test]
    fn zero_terms_are_dropped() {
        let mut s = GraphSeries::new(1);
        let k = key(1, 0, &[(0, 0, 1)]);
        s.add_term(k.clone(), r(1, 2)).unwrap();
        s.add_term(k.clone(), r(-1, 2)).unwrap();
        assert!(s.is_empty());
        assert!(s.add_term(key(2, 0, &[]), r(1, 1)).is_err());
    }

    #[test]
    fn parity_and_star() {
        let b = berezin_series(2, Mode::Stable).unwrap();
        assert_eq!(b.parity_flip().coefficient(&key(1, 0, &[(0, 0, 1)])), r(-1, 1));
        assert_eq!(b.parity_flip().parity_flip(), b);
        assert_eq!(GraphSeries::identity(1).parity_flip(), GraphSeries::identity(1));
        let star = bt_inverse_series(1, Mode::Stable).unwrap().to_star().unwrap();
        assert_eq!(star.coefficient(&key(2, 0, &[(0, 1, 1)])), r(-1, 1));
        assert_eq!(star.coefficient(&key(2, 0, &[])), r(1, 1));
        assert_eq!(star.merge_marked().unwrap(), bt_inverse_series(1, Mode::Stable).unwrap());
    }

    #[test]
    fn compose_needs_complete_inputs() {
        let stable = berezin_series(1, Mode::Stable).unwrap();
        assert!(matches!(compose(&stable, &stable, 1), Err(Error::IncompleteBounds(_))));
        let scon = berezin_series(1, Mode::Scon(1)).unwrap();
        assert!(matches!(compose(&scon, &scon, 2), Err(Error::IncompleteBounds(_))));
        assert_eq!(compose(&scon, &GraphSeries::identity(1), 1).unwrap(), scon);
    }

    #[test]
    fn inverse_pair_through_weight_two() {
        let inv = bt_inverse_series(2, Mode::Scon(2)).unwrap();
        let b = berezin_series(2, Mode::Scon(2)).unwrap();
        assert_eq!(compose(&inv, &b, 2).unwrap(), GraphSeries::identity(1));
        assert_eq!(compose(&b, &inv, 2).unwrap(), GraphSeries::identity(1));
    }
}
