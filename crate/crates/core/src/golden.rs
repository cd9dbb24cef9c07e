//! Reference tables and low-order expansions, transcribed by hand into TOML
//! and kept independent of the enumeration code.
//!
//! Graphs are written as comma-separated edges `from>to` or `from>to*mult`.
//! The first `points` vertex indices are marked.

use serde::Deserialize;

use crate::enumerate::CountTable;
use crate::error::{Error, Result};
use crate::graph::PointedGraph;
use crate::report::VerificationReport;
use crate::series::GraphSeries;
use crate::Rational;

pub const TABLE1: &str = include_str!("../data/table1.toml");
pub const BT_INVERSE_WEIGHT4: &str = include_str!("../data/bt_inverse_weight4.toml");
pub const KBW_WEIGHT5: &str = include_str!("../data/kbw_weight5.toml");
pub const BEREZIN_LOW: &str = include_str!("../data/berezin_low.toml");
pub const BT_INVERSE_LOW: &str = include_str!("../data/bt_inverse_low.toml");
pub const KBW_LOW: &str = include_str!("../data/kbw_low.toml");
pub const KBW_INVERSE_LOW: &str = include_str!("../data/kbw_inverse_low.toml");
pub const BERGMAN_WEIGHT1: &str = include_str!("../data/bergman_weight1.toml");

#[derive(Deserialize)]
struct CountFile {
    all: Vec<u64>,
    b: Vec<u64>,
    bt: Vec<u64>,
    s: Vec<u64>,
}

#[derive(Deserialize)]
struct SeriesFile {
    points: usize,
    #[serde(rename = "term")]
    terms: Vec<TermEntry>,
}

#[derive(Deserialize)]
struct TermEntry {
    edges: String,
    coefficient: String,
    #[serde(default)]
    vertices: Option<usize>,
}

fn golden_err(e: impl std::fmt::Display) -> Error {
    Error::Golden(e.to_string())
}

/// Stable one-pointed counts by weight, rows all / B / BT / S.
pub fn table1() -> Result<CountTable> {
    let f: CountFile = toml::from_str(TABLE1).map_err(golden_err)?;
    Ok(CountTable {
        all: f.all,
        b: f.b,
        bt: f.bt,
        s: f.s,
    })
}

/// Parses `"0>1*2, 1>0"` into a graph with `points` marked vertices.
pub fn parse_edges(points: usize, edges: &str, vertices: Option<usize>) -> Result<PointedGraph> {
    let mut list = Vec::new();
    for item in edges.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (pair, mult) = match item.split_once('*') {
            Some((p, m)) => (p, m.trim().parse::<u32>().map_err(golden_err)?),
            None => (item, 1),
        };
        let (u, w) = pair
            .split_once('>')
            .ok_or_else(|| Error::Golden(format!("edge `{item}` lacks `>`")))?;
        let u = u.trim().parse::<usize>().map_err(golden_err)?;
        let w = w.trim().parse::<usize>().map_err(golden_err)?;
        list.push((u, w, mult));
    }
    let seen = list.iter().map(|&(u, w, _)| u.max(w) + 1).max().unwrap_or(0);
    let total = vertices.unwrap_or(seen).max(points);
    PointedGraph::from_edges(points, total - points, &list)
}

/// Reads a series data file into a graph series.
pub fn parse_series(text: &str) -> Result<GraphSeries> {
    let f: SeriesFile = toml::from_str(text).map_err(golden_err)?;
    let mut s = GraphSeries::new(f.points);
    for t in &f.terms {
        let g = parse_edges(f.points, &t.edges, t.vertices)?;
        let c: Rational = t.coefficient.parse().map_err(golden_err)?;
        let key = g.canonical_key();
        if s.coefficient(&key) != Rational::from(0) {
            return Err(Error::Golden(format!("{key} listed twice")));
        }
        s.add_term(key, c)?;
    }
    Ok(s)
}

/// Term-by-term comparison of two series over the union of their supports.
pub fn compare_series(name: &str, expected: &GraphSeries, actual: &GraphSeries) -> VerificationReport {
    let mut report = VerificationReport::new(name);
    let mut keys: Vec<_> = expected.terms().chain(actual.terms()).map(|(k, _)| k.clone()).collect();
    keys.sort();
    keys.dedup();
    for k in keys {
        report.check(&k, expected.coefficient(&k), actual.coefficient(&k));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_files_parse() {
        for text in [
            BT_INVERSE_WEIGHT4,
            KBW_WEIGHT5,
            BEREZIN_LOW,
            BT_INVERSE_LOW,
            KBW_LOW,
            KBW_INVERSE_LOW,
            BERGMAN_WEIGHT1,
        ] {
            parse_series(text).unwrap();
        }
        assert_eq!(parse_series(BT_INVERSE_WEIGHT4).unwrap().len(), 24);
        assert_eq!(parse_series(KBW_WEIGHT5).unwrap().len(), 15);
        assert_eq!(table1().unwrap().all[6], 5906);
    }

    #[test]
    fn edge_syntax() {
        let g = parse_edges(1, "0>1*2, 1>0", None).unwrap();
        assert_eq!(g.mult(0, 1), 2);
        assert_eq!(g.mult(1, 0), 1);
        assert_eq!(parse_edges(1, "", None).unwrap(), PointedGraph::point());
        assert!(parse_edges(1, "0-1", None).is_err());
    }
}
