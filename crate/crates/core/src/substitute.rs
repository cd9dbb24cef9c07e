//! Substitution calculus: splitting the marked vertex, grafting one graph into
//! a marked vertex of another, contracting subgraphs, and the identities that
//! tie these operations together.
//!
//! Grafting treats edge instances as distinct: every endpoint formerly at the
//! slot picks a vertex of the inserted graph, and the result counts labelled
//! assignments. Subgraph selections record a chosen multiplicity per vertex
//! pair; a selection stands for `prod C(host, chosen)` concrete edge subsets.

use std::collections::{BTreeMap, HashMap};

use crate::canon::{factorial, CanonicalKey};
use crate::error::{Error, Result};
use crate::graph::PointedGraph;
use crate::report::VerificationReport;
use crate::Rational;

/// Replaces the marked vertex by `f1` (tail of its outward edges) and `f2`
/// (head of its inward edges); loops become `f1 -> f2` edges.
pub fn split_marked(g: &PointedGraph) -> Result<PointedGraph> {
    if g.marked_count() != 1 {
        return Err(Error::NotOnePointed(g.marked_count()));
    }
    let n = g.vertex_count();
    let mut h = PointedGraph::new(2, g.ordinary_count());
    let shift = |v: usize| v + 1;
    *h.mult_mut(0, 1) = g.mult(0, 0);
    for w in 1..n {
        *h.mult_mut(0, shift(w)) = g.mult(0, w);
        *h.mult_mut(shift(w), 1) = g.mult(w, 0);
        for x in 1..n {
            *h.mult_mut(shift(w), shift(x)) = g.mult(w, x);
        }
    }
    Ok(h)
}

/// A subgraph `H` of a host graph: a vertex subset containing every marked
/// vertex, and a chosen multiplicity for each pair inside it.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubgraphSelection {
    vertices: Vec<usize>,
    chosen: Vec<u32>,
}

impl SubgraphSelection {
    pub fn new(host: &PointedGraph, mut vertices: Vec<usize>, chosen: Vec<u32>) -> Result<Self> {
        let n = host.vertex_count();
        vertices.sort_unstable();
        vertices.dedup();
        let bad = |msg: &str| Err(Error::InvalidSelection(msg.to_string()));
        if chosen.len() != n * n {
            return bad("edge matrix has the wrong size");
        }
        if vertices.iter().any(|&v| v >= n) {
            return bad("vertex out of range");
        }
        if (0..host.marked_count()).any(|f| !vertices.contains(&f)) {
            return bad("every marked vertex must be selected");
        }
        if vertices.is_empty() {
            return bad("empty selection");
        }
        let mut inside = vec![false; n];
        for &v in &vertices {
            inside[v] = true;
        }
        for u in 0..n {
            for w in 0..n {
                let c = chosen[u * n + w];
                if c > host.mult(u, w) {
                    return bad("chosen multiplicity exceeds the host");
                }
                if c > 0 && !(inside[u] && inside[w]) {
                    return bad("selected edge leaves the vertex set");
                }
            }
        }
        Ok(SubgraphSelection { vertices, chosen })
    }

    /// Vertex set = marked vertices plus every endpoint of a chosen edge.
    pub fn from_edges(host: &PointedGraph, chosen: Vec<u32>) -> Result<Self> {
        let n = host.vertex_count();
        let mut vertices: Vec<usize> = (0..host.marked_count()).collect();
        for u in 0..n {
            for w in 0..n {
                if chosen.get(u * n + w).copied().unwrap_or(0) > 0 {
                    vertices.push(u);
                    vertices.push(w);
                }
            }
        }
        Self::new(host, vertices, chosen)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn chosen(&self, host: &PointedGraph, u: usize, v: usize) -> u32 {
        self.chosen[u * host.vertex_count() + v]
    }

    pub fn edge_count(&self) -> u64 {
        self.chosen.iter().map(|&c| c as u64).sum()
    }

    /// Number of concrete edge subsets this selection stands for.
    pub fn multiplicity(&self, host: &PointedGraph) -> u64 {
        host.matrix()
            .iter()
            .zip(&self.chosen)
            .map(|(&a, &c)| binomial(a, c))
            .product()
    }

    /// `H` as a pointed graph: the host's marked vertices, then the selected
    /// ordinary vertices in host order.
    pub fn induced(&self, host: &PointedGraph) -> PointedGraph {
        let n = host.vertex_count();
        let m = host.marked_count();
        let ordinary = self.vertices.iter().filter(|&&v| v >= m).count();
        let mut h = PointedGraph::new(m, ordinary);
        for (a, &u) in self.vertices.iter().enumerate() {
            for (b, &w) in self.vertices.iter().enumerate() {
                *h.mult_mut(a, b) = self.chosen[u * n + w];
            }
        }
        h
    }
}

pub(crate) fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn multinomial(parts: &[u32]) -> u64 {
    let total: u32 = parts.iter().sum();
    parts.iter().fold(factorial(total), |acc, &p| acc / factorial(p))
}

/// `G/H`: the selected vertices become one marked vertex, selected edges
/// disappear, and unselected edges inside the selection become marked loops.
pub fn contract(g: &PointedGraph, sel: &SubgraphSelection) -> Result<PointedGraph> {
    let n = g.vertex_count();
    let checked = SubgraphSelection::new(g, sel.vertices.clone(), sel.chosen.clone())?;
    let mut inside = vec![false; n];
    for &v in &checked.vertices {
        inside[v] = true;
    }
    let mut index = vec![0usize; n];
    let mut next = 1;
    for v in 0..n {
        if !inside[v] {
            index[v] = next;
            next += 1;
        }
    }
    let mut out = PointedGraph::new(1, n - checked.vertices.len());
    for u in 0..n {
        for w in 0..n {
            let left = g.mult(u, w) - checked.chosen[u * n + w];
            if left > 0 {
                *out.mult_mut(index[u], index[w]) += left;
            }
        }
    }
    Ok(out)
}

/// Every chosen-multiplicity matrix `0 <= c <= host` (all sub-multisets of edges).
fn edge_submultisets(host: &PointedGraph) -> Vec<Vec<u32>> {
    let mats = host.matrix();
    let mut out = vec![Vec::with_capacity(mats.len())];
    for &a in mats {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=a).map(move |c| {
                    let mut p = prefix.clone();
                    p.push(c);
                    p
                })
            })
            .collect();
    }
    out
}

fn one_pointed_scon(g: &PointedGraph) -> Result<()> {
    if g.marked_count() != 1 {
        return Err(Error::NotOnePointed(g.marked_count()));
    }
    if !g.strongly_connected() {
        return Err(Error::NotStronglyConnected);
    }
    Ok(())
}

fn scon_subgraphs(g: &PointedGraph, keep: impl Fn(&PointedGraph) -> bool) -> Result<Vec<SubgraphSelection>> {
    one_pointed_scon(g)?;
    let mut out = Vec::new();
    for chosen in edge_submultisets(g) {
        let sel = SubgraphSelection::from_edges(g, chosen)?;
        let h = sel.induced(g);
        if h.strongly_connected() && keep(&h) {
            out.push(sel);
        }
    }
    Ok(out)
}

/// Strongly connected one-pointed subgraphs in the BT family.
pub fn bt_subgraphs(g: &PointedGraph) -> Result<Vec<SubgraphSelection>> {
    scon_subgraphs(g, |h| h.families_unchecked().bt)
}

/// Strongly connected one-pointed subgraphs with acyclic ordinary part.
pub fn s_subgraphs(g: &PointedGraph) -> Result<Vec<SubgraphSelection>> {
    scon_subgraphs(g, |h| h.families_unchecked().s)
}

fn nontrivial(g: &PointedGraph) -> Result<()> {
    one_pointed_scon(g)?;
    if g.edge_count() == 0 {
        return Err(Error::TrivialGraph);
    }
    Ok(())
}

fn sign(exp: i64) -> i128 {
    if exp.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `sum over BT subgraphs H of (-1)^|E(H)| det(A((G/H)_-) - I)`; zero for every
/// nontrivial strongly connected one-pointed graph.
pub fn inversion_identity_check(g: &PointedGraph) -> Result<i128> {
    nontrivial(g)?;
    let mut total = 0;
    for sel in bt_subgraphs(g)? {
        let quotient = contract(g, &sel)?;
        total += sel.multiplicity(g) as i128 * sign(sel.edge_count() as i64) * quotient.ordinary_det();
    }
    Ok(total)
}

/// `sum over S subgraphs H of (-1)^w(H)`; zero for every nontrivial
/// strongly connected one-pointed graph.
pub fn acyclic_sum_check(g: &PointedGraph) -> Result<i128> {
    nontrivial(g)?;
    let mut total = 0;
    for sel in s_subgraphs(g)? {
        total += sel.multiplicity(g) as i128 * sign(sel.induced(g).weight());
    }
    Ok(total)
}

/// Where a slot endpoint lands in the grafted graph.
struct GraftLayout {
    slot: usize,
    outer_marked: usize,
    inner_marked: usize,
    inner_ordinary: usize,
    marked: usize,
}

impl GraftLayout {
    fn inner(&self, x: usize) -> usize {
        if x < self.inner_marked {
            self.slot + x
        } else {
            self.marked + (x - self.inner_marked)
        }
    }

    fn outer(&self, w: usize) -> usize {
        if w < self.slot {
            w
        } else if w < self.outer_marked {
            w - 1 + self.inner_marked
        } else {
            self.marked + self.inner_ordinary + (w - self.outer_marked)
        }
    }
}

enum SlotEdges {
    Out(usize, u32),
    In(usize, u32),
    Loops(u32),
}

/// Raw graft of `inner` into marked vertex `slot` of `outer`: isomorphism
/// class of each result and the number of endpoint assignments producing it.
///
/// Marked order of the result: outer's marked vertices before the slot,
/// inner's marked vertices, outer's marked vertices after the slot.
/// Ordinary vertices: inner's, then outer's.
pub fn graft_into_slot_raw(
    outer: &PointedGraph,
    slot: usize,
    inner: &PointedGraph,
) -> Result<BTreeMap<CanonicalKey, u64>> {
    if slot >= outer.marked_count() {
        return Err(Error::VertexOutOfRange {
            vertex: slot,
            count: outer.marked_count(),
        });
    }
    let layout = GraftLayout {
        slot,
        outer_marked: outer.marked_count(),
        inner_marked: inner.marked_count(),
        inner_ordinary: inner.ordinary_count(),
        marked: outer.marked_count() - 1 + inner.marked_count(),
    };
    let mut base = PointedGraph::new(layout.marked, inner.ordinary_count() + outer.ordinary_count());
    let vi = inner.vertex_count();
    for x in 0..vi {
        for y in 0..vi {
            *base.mult_mut(layout.inner(x), layout.inner(y)) += inner.mult(x, y);
        }
    }
    let vo = outer.vertex_count();
    let mut classes = Vec::new();
    for u in 0..vo {
        for w in 0..vo {
            let a = outer.mult(u, w);
            if a == 0 {
                continue;
            }
            match (u == slot, w == slot) {
                (false, false) => *base.mult_mut(layout.outer(u), layout.outer(w)) += a,
                (true, false) => classes.push(SlotEdges::Out(w, a)),
                (false, true) => classes.push(SlotEdges::In(u, a)),
                (true, true) => classes.push(SlotEdges::Loops(a)),
            }
        }
    }
    let mut acc: HashMap<CanonicalKey, u64> = HashMap::new();
    if vi == 0 {
        if classes.is_empty() {
            acc.insert(base.canonical_key(), 1);
        }
    } else {
        distribute(&layout, vi, &classes, base, 1, &mut acc);
    }
    Ok(acc.into_iter().collect())
}

fn distribute(
    layout: &GraftLayout,
    vi: usize,
    classes: &[SlotEdges],
    g: PointedGraph,
    weight: u64,
    acc: &mut HashMap<CanonicalKey, u64>,
) {
    let Some((first, rest)) = classes.split_first() else {
        *acc.entry(g.canonical_key()).or_insert(0) += weight;
        return;
    };
    let (count, cells) = match *first {
        SlotEdges::Out(_, c) | SlotEdges::In(_, c) => (c, vi),
        SlotEdges::Loops(c) => (c, vi * vi),
    };
    let mut parts = Vec::new();
    let mut all = Vec::new();
    split_into(count, cells, &mut parts, &mut all);
    for parts in all {
        let mut h = g.clone();
        for (cell, &p) in parts.iter().enumerate() {
            if p == 0 {
                continue;
            }
            let (a, b) = match *first {
                SlotEdges::Out(w, _) => (layout.inner(cell), layout.outer(w)),
                SlotEdges::In(u, _) => (layout.outer(u), layout.inner(cell)),
                SlotEdges::Loops(_) => (layout.inner(cell / vi), layout.inner(cell % vi)),
            };
            *h.mult_mut(a, b) += p;
        }
        distribute(layout, vi, rest, h, weight * multinomial(&parts), acc);
    }
}

fn split_into(total: u32, cells: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    let used: u32 = cur.iter().sum();
    if cur.len() + 1 == cells {
        cur.push(total - used);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for x in 0..=total - used {
        cur.push(x);
        split_into(total, cells, cur, out);
        cur.pop();
    }
}

/// Raw graft into the marked vertex of a one-pointed graph.
pub fn graft_raw(outer: &PointedGraph, inner: &PointedGraph) -> Result<BTreeMap<CanonicalKey, u64>> {
    if outer.marked_count() != 1 {
        return Err(Error::NotOnePointed(outer.marked_count()));
    }
    graft_into_slot_raw(outer, 0, inner)
}

/// Raw counts divided by `|Aut(outer)| |Aut(inner)|`.
pub fn graft_into_slot(
    outer: &PointedGraph,
    slot: usize,
    inner: &PointedGraph,
) -> Result<BTreeMap<CanonicalKey, Rational>> {
    let denom = (outer.aut_order() * inner.aut_order()) as i128;
    Ok(graft_into_slot_raw(outer, slot, inner)?
        .into_iter()
        .map(|(k, c)| (k, Rational::new(c as i128, denom)))
        .collect())
}

/// Normalized graft into the marked vertex of a one-pointed graph.
pub fn graft(outer: &PointedGraph, inner: &PointedGraph) -> Result<BTreeMap<CanonicalKey, Rational>> {
    if outer.marked_count() != 1 {
        return Err(Error::NotOnePointed(outer.marked_count()));
    }
    graft_into_slot(outer, 0, inner)
}

/// Subsets of `items` with exactly `k` elements, in order.
fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out = combinations(&items[1..], k - 1);
    for c in &mut out {
        c.insert(0, items[0]);
    }
    out.extend(combinations(&items[1..], k));
    out
}

/// Number of edge subsets `H'` of `host` with `H' ~ inner` and `host/H' ~ outer`.
pub fn alpha(outer: &PointedGraph, inner: &PointedGraph, host: &PointedGraph) -> Result<u64> {
    if outer.marked_count() != 1 {
        return Err(Error::NotOnePointed(outer.marked_count()));
    }
    let m = host.marked_count();
    if inner.marked_count() != m || inner.vertex_count() == 0 {
        return Ok(0);
    }
    let inner_key = inner.canonical_key();
    let outer_key = outer.canonical_key();
    let n = host.vertex_count();
    let ordinary: Vec<usize> = (m..n).collect();
    let target_edges = inner.edge_count() as u32;
    let mut total = 0;
    for pick in combinations(&ordinary, inner.ordinary_count()) {
        let vertices: Vec<usize> = (0..m).chain(pick).collect();
        let pairs: Vec<(usize, usize)> = vertices
            .iter()
            .flat_map(|&u| vertices.iter().map(move |&w| (u, w)))
            .collect();
        let mut chosen = vec![0u32; n * n];
        each_choice(host, &pairs, 0, target_edges, &mut chosen, &mut |chosen| {
            let sel = SubgraphSelection {
                vertices: vertices.clone(),
                chosen: chosen.to_vec(),
            };
            if sel.induced(host).canonical_key() == inner_key
                && contract(host, &sel).map(|q| q.canonical_key() == outer_key).unwrap_or(false)
            {
                total += sel.multiplicity(host);
            }
        });
    }
    Ok(total)
}

fn each_choice(
    host: &PointedGraph,
    pairs: &[(usize, usize)],
    at: usize,
    left: u32,
    chosen: &mut [u32],
    visit: &mut impl FnMut(&[u32]),
) {
    let n = host.vertex_count();
    if at == pairs.len() {
        if left == 0 {
            visit(chosen);
        }
        return;
    }
    let (u, w) = pairs[at];
    for c in 0..=host.mult(u, w).min(left) {
        chosen[u * n + w] = c;
        each_choice(host, pairs, at + 1, left - c, chosen, visit);
    }
    chosen[u * n + w] = 0;
}

/// Compares the normalized raw graft with `alpha / |Aut(G)|` on every target.
pub fn substitution_identity_check(outer: &PointedGraph, inner: &PointedGraph) -> Result<VerificationReport> {
    let mut report = VerificationReport::new("substitution")
        .with_config("outer", outer.canonical_key())
        .with_config("inner", inner.canonical_key());
    for (key, coeff) in graft(outer, inner)? {
        let host = key.to_graph();
        let a = alpha(outer, inner, &host)?;
        let expected = Rational::new(a as i128, host.aut_order() as i128);
        report.check(&key, expected, coeff);
    }
    Ok(report)
}
