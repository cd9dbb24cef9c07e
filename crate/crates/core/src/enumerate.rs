//! Enumeration of strongly connected pointed graphs by weight.
//!
//! For a fixed number `n` of ordinary vertices the edge count is `n + k`.
//! Each ordinary vertex gets a signature (loops, edges to and from each marked
//! vertex, out- and in-degree towards other ordinary vertices); signatures are
//! listed in non-decreasing order, which removes most relabelings up front.
//! The ordinary block is then filled as a contingency table with zero diagonal,
//! leftover edges go between marked vertices, and survivors are deduplicated
//! by canonical key.

use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon::CanonicalKey;
use crate::error::{Error, Result};
use crate::graph::{semistable_degrees, stable_degrees, FamilySet, PointedGraph};

/// Degree condition imposed on ordinary vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StabilityClass {
    /// Strongly connected only; needs an explicit bound on ordinary vertices.
    Scon,
    Semistable,
    Stable,
}

impl StabilityClass {
    pub fn admits(&self, g: &PointedGraph) -> bool {
        match self {
            StabilityClass::Scon => true,
            StabilityClass::Semistable => g.is_semistable(),
            StabilityClass::Stable => g.is_stable(),
        }
    }
}

/// Coefficient family of a one-pointed graph, decided by the SCCs of `G_-`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    All,
    /// `det(A(G_-) - I) != 0`.
    B,
    /// Every SCC of `G_-` is a loop-free vertex or a directed cycle.
    Bt,
    /// `G_-` is acyclic.
    S,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumSpec {
    pub marked: usize,
    pub weight: u32,
    pub stability: StabilityClass,
    pub family: Family,
    /// Overrides the default ordinary-vertex bound; required for `Scon`.
    pub max_ordinary: Option<usize>,
}

impl EnumSpec {
    pub fn new(marked: usize, weight: u32, stability: StabilityClass) -> Self {
        EnumSpec {
            marked,
            weight,
            stability,
            family: Family::All,
            max_ordinary: None,
        }
    }

    pub fn family(mut self, family: Family) -> Self {
        self.family = family;
        self
    }

    pub fn max_ordinary(mut self, bound: usize) -> Self {
        self.max_ordinary = Some(bound);
        self
    }

    /// Largest ordinary-vertex count generated.
    pub fn ordinary_bound(&self) -> Result<usize> {
        let k = self.weight as usize;
        match (self.max_ordinary, self.stability) {
            (Some(b), _) => Ok(b),
            (None, StabilityClass::Stable) => Ok(k),
            (None, StabilityClass::Semistable) => Ok(2 * k),
            (None, StabilityClass::Scon) => Err(Error::MissingMaxOrdinary),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.marked > 3 {
            return Err(Error::UnsupportedPointCount(self.marked));
        }
        if self.family != Family::All && self.marked != 1 {
            return Err(Error::UnsupportedFamily);
        }
        self.ordinary_bound().map(|_| ())
    }
}

/// One enumerated graph with its metadata.
#[derive(Clone, Debug, Serialize)]
pub struct GraphRecord {
    pub key: CanonicalKey,
    pub weight: i64,
    pub edge_count: u64,
    pub aut: u64,
    /// `det(A(G_-) - I)`.
    pub det: i128,
    /// Present for one-pointed graphs only.
    pub families: Option<FamilySet>,
}

impl GraphRecord {
    pub fn from_key(key: CanonicalKey) -> Self {
        let g = key.to_graph();
        let families = (g.marked_count() == 1).then(|| g.families_unchecked());
        GraphRecord {
            weight: key.weight(),
            edge_count: key.edge_count(),
            aut: g.aut_order(),
            det: g.ordinary_det(),
            families,
            key,
        }
    }
}

/// Every isomorphism class matching `spec`, sorted by key.
pub fn enumerate(spec: &EnumSpec) -> Result<Vec<CanonicalKey>> {
    spec.validate()?;
    let all = enumerate_unfiltered(spec)?;
    if spec.family == Family::All {
        return Ok(all);
    }
    Ok(all
        .into_par_iter()
        .filter(|k| k.to_graph().families_unchecked().contains(spec.family))
        .collect())
}

/// [`enumerate`] plus per-graph metadata.
pub fn enumerate_graphs(spec: &EnumSpec) -> Result<Vec<GraphRecord>> {
    Ok(enumerate(spec)?.into_par_iter().map(GraphRecord::from_key).collect())
}

fn enumerate_unfiltered(spec: &EnumSpec) -> Result<Vec<CanonicalKey>> {
    let bound = spec.ordinary_bound()?;
    let m = spec.marked;
    let k = spec.weight as usize;
    let mut seen = BTreeSet::new();
    for n in 0..=bound {
        let gen = Generator {
            m,
            n,
            edges: (n + k) as u32,
            stability: spec.stability,
        };
        seen.extend(gen.run());
    }
    Ok(seen.into_iter().collect())
}

/// Stable one-pointed counts per family, weights `0..=max_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTable {
    pub all: Vec<u64>,
    pub b: Vec<u64>,
    pub bt: Vec<u64>,
    pub s: Vec<u64>,
}

impl CountTable {
    pub fn row(&self, family: Family) -> &[u64] {
        match family {
            Family::All => &self.all,
            Family::B => &self.b,
            Family::Bt => &self.bt,
            Family::S => &self.s,
        }
    }
}

pub fn count_table(max_k: u32) -> Result<CountTable> {
    let mut t = CountTable {
        all: Vec::new(),
        b: Vec::new(),
        bt: Vec::new(),
        s: Vec::new(),
    };
    for k in 0..=max_k {
        let keys = enumerate(&EnumSpec::new(1, k, StabilityClass::Stable))?;
        let fams: Vec<FamilySet> = keys
            .par_iter()
            .map(|key| key.to_graph().families_unchecked())
            .collect();
        t.all.push(keys.len() as u64);
        t.b.push(fams.iter().filter(|f| f.b).count() as u64);
        t.bt.push(fams.iter().filter(|f| f.bt).count() as u64);
        t.s.push(fams.iter().filter(|f| f.s).count() as u64);
    }
    Ok(t)
}

/// Per-vertex edge profile of an ordinary vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Signature {
    /// Edges charged to this vertex: loops, marked edges both ways, ordinary out-edges.
    cost: u32,
    loops: u32,
    to_marked: Vec<u32>,
    from_marked: Vec<u32>,
    out_ord: u32,
    in_ord: u32,
}

struct Generator {
    m: usize,
    n: usize,
    edges: u32,
    stability: StabilityClass,
}

impl Generator {
    fn vertex_ok(&self, inn: u32, out: u32) -> bool {
        match self.stability {
            StabilityClass::Stable => stable_degrees(inn, out),
            StabilityClass::Semistable => semistable_degrees(inn, out),
            StabilityClass::Scon => self.m + self.n <= 1 || (inn >= 1 && out >= 1),
        }
    }

    fn signatures(&self) -> Vec<Signature> {
        let e = self.edges;
        let mut out = Vec::new();
        let mut marked_vecs = Vec::new();
        compositions_upto(self.m, e, &mut Vec::new(), &mut marked_vecs);
        let ord_cap = if self.n >= 2 { e } else { 0 };
        for loops in 0..=e {
            for t in &marked_vecs {
                let ts: u32 = t.iter().sum();
                for f in &marked_vecs {
                    let fs: u32 = f.iter().sum();
                    let base = loops + ts + fs;
                    if base > e {
                        continue;
                    }
                    for o in 0..=(e - base).min(ord_cap) {
                        for i in 0..=ord_cap {
                            if self.vertex_ok(i + loops + fs, o + loops + ts) {
                                out.push(Signature {
                                    cost: base + o,
                                    loops,
                                    to_marked: t.clone(),
                                    from_marked: f.clone(),
                                    out_ord: o,
                                    in_ord: i,
                                });
                            }
                        }
                    }
                }
            }
        }
        out.sort();
        out
    }

    fn run(&self) -> HashSet<CanonicalKey> {
        if self.m == 0 && self.n == 0 {
            let mut s = HashSet::new();
            if self.edges == 0 {
                s.insert(PointedGraph::new(0, 0).canonical_key());
            }
            return s;
        }
        let sigs = self.signatures();
        let mut seqs = Vec::new();
        self.choose(&sigs, 0, self.edges, 0, 0, &mut Vec::new(), &mut seqs);
        seqs.par_iter()
            .fold(HashSet::new, |mut acc, seq| {
                let chosen: Vec<&Signature> = seq.iter().map(|&i| &sigs[i]).collect();
                self.fill(&chosen, &mut acc);
                acc
            })
            .reduce(HashSet::new, |mut a, b| {
                a.extend(b);
                a
            })
    }

    /// Non-decreasing sequences of `n` signature indices within the edge budget.
    #[allow(clippy::too_many_arguments)]
    fn choose(
        &self,
        sigs: &[Signature],
        start: usize,
        budget: u32,
        sum_out: u32,
        sum_in: u32,
        seq: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let left = self.n - seq.len();
        if left == 0 {
            if sum_out != sum_in {
                return;
            }
            if self.m >= 1 && self.n >= 1 {
                let to: u32 = seq.iter().map(|&i| sigs[i].to_marked.iter().sum::<u32>()).sum();
                let from: u32 = seq.iter().map(|&i| sigs[i].from_marked.iter().sum::<u32>()).sum();
                if to == 0 || from == 0 {
                    return;
                }
            }
            if self.m == 0 && budget != 0 {
                return;
            }
            out.push(seq.clone());
            return;
        }
        for idx in start..sigs.len() {
            let s = &sigs[idx];
            if s.cost * left as u32 > budget {
                break;
            }
            let so = sum_out + s.out_ord;
            let si = sum_in + s.in_ord;
            // later vertices can add at most the remaining budget of ordinary out-edges
            if si > so + (budget - s.cost) {
                continue;
            }
            seq.push(idx);
            self.choose(sigs, idx, budget - s.cost, so, si, seq, out);
            seq.pop();
        }
    }

    fn fill(&self, chosen: &[&Signature], acc: &mut HashSet<CanonicalKey>) {
        let (m, n) = (self.m, self.n);
        let mut base = PointedGraph::new(m, n);
        let mut used = 0;
        for (j, s) in chosen.iter().enumerate() {
            let v = m + j;
            *base.mult_mut(v, v) = s.loops;
            for f in 0..m {
                *base.mult_mut(v, f) = s.to_marked[f];
                *base.mult_mut(f, v) = s.from_marked[f];
            }
            used += s.cost;
        }
        let rest = self.edges - used;
        let rows: Vec<u32> = chosen.iter().map(|s| s.out_ord).collect();
        let cols: Vec<u32> = chosen.iter().map(|s| s.in_ord).collect();
        let mut tables = Vec::new();
        zero_diagonal_tables(&rows, &mut vec![0; n * n], 0, &mut cols.clone(), &mut tables);
        let mut marked_blocks = Vec::new();
        compositions_exact(m * m, rest, &mut Vec::new(), &mut marked_blocks);
        for t in &tables {
            let mut g = base.clone();
            for a in 0..n {
                for b in 0..n {
                    if a != b {
                        *g.mult_mut(m + a, m + b) = t[a * n + b];
                    }
                }
            }
            for block in &marked_blocks {
                let mut h = g.clone();
                for a in 0..m {
                    for b in 0..m {
                        *h.mult_mut(a, b) = block[a * m + b];
                    }
                }
                if h.strongly_connected() {
                    acc.insert(h.canonical_key());
                }
            }
        }
    }
}

/// All vectors of `len` non-negative entries with sum at most `max`.
fn compositions_upto(len: usize, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if cur.len() == len {
        out.push(cur.clone());
        return;
    }
    let used: u32 = cur.iter().sum();
    for x in 0..=max - used {
        cur.push(x);
        compositions_upto(len, max, cur, out);
        cur.pop();
    }
}

/// All vectors of `len` non-negative entries with sum exactly `total`.
fn compositions_exact(len: usize, total: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if len == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return;
    }
    let used: u32 = cur.iter().sum();
    if cur.len() + 1 == len {
        cur.push(total - used);
        out.push(cur.clone());
        cur.pop();
        return;
    }
    for x in 0..=total - used {
        cur.push(x);
        compositions_exact(len, total, cur, out);
        cur.pop();
    }
}

/// Square non-negative matrices with zero diagonal, row sums `rows` and column sums `col_left`.
fn zero_diagonal_tables(
    rows: &[u32],
    cur: &mut Vec<u32>,
    cell: usize,
    col_left: &mut Vec<u32>,
    out: &mut Vec<Vec<u32>>,
) {
    let n = rows.len();
    if cell == n * n {
        if col_left.iter().all(|&c| c == 0) {
            out.push(cur.clone());
        }
        return;
    }
    let (r, c) = (cell / n, cell % n);
    let row_used: u32 = cur[r * n..r * n + c].iter().sum();
    let row_left = rows[r] - row_used;
    if r == c {
        // the diagonal stays empty; a row must be complete by its last cell
        if c == n - 1 && row_left != 0 {
            return;
        }
        zero_diagonal_tables(rows, cur, cell + 1, col_left, out);
        return;
    }
    let last_in_row = c == n - 1 || (c == n - 2 && r == n - 1);
    let capacity: u32 = (c + 1..n).filter(|&j| j != r).map(|j| col_left[j]).sum();
    let lo = row_left.saturating_sub(capacity);
    let hi = row_left.min(col_left[c]);
    let range = if last_in_row { row_left..=row_left } else { lo..=hi };
    for x in range {
        if x > col_left[c] {
            continue;
        }
        cur[cell] = x;
        col_left[c] -= x;
        zero_diagonal_tables(rows, cur, cell + 1, col_left, out);
        col_left[c] += x;
    }
    cur[cell] = 0;
}
