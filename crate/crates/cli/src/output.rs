use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::ValueEnum;
use serde::Serialize;
use stargraph::enumerate::GraphRecord;
use stargraph::{CanonicalKey, CountTable, Family, Rational, VerificationReport};

pub const SCHEMA: &str = "stargraph-output/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Latex,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RationalOut {
    pub num: i128,
    pub den: i128,
}

impl From<Rational> for RationalOut {
    fn from(r: Rational) -> Self {
        RationalOut {
            num: *r.numer(),
            den: *r.denom(),
        }
    }
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn frac(r: Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema: &'static str,
    command: &'a str,
    config: &'a BTreeMap<String, String>,
    data: T,
}

pub fn json<T: Serialize>(command: &str, config: &BTreeMap<String, String>, data: T) -> String {
    let env = Envelope {
        schema: SCHEMA,
        command,
        config,
        data,
    };
    let mut s = serde_json::to_string_pretty(&env).expect("output is serializable");
    s.push('\n');
    s
}

fn text_header(command: &str, config: &BTreeMap<String, String>) -> String {
    let parts: Vec<String> = config.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("# {command} {}\n", parts.join(" "))
}

#[derive(Serialize)]
pub struct GraphRow {
    pub key: CanonicalKey,
    pub weight: i64,
    pub edges: u64,
    pub aut: u64,
    pub det: i128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub families: Option<Vec<&'static str>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficient: Option<RationalOut>,
}

impl GraphRow {
    pub fn new(r: &GraphRecord, coefficient: Option<Rational>) -> Self {
        GraphRow {
            key: r.key.clone(),
            weight: r.weight,
            edges: r.edge_count,
            aut: r.aut,
            det: r.det,
            families: r.families.map(|f| f.labels()),
            coefficient: coefficient.map(RationalOut::from),
        }
    }

    fn families_text(&self) -> String {
        self.families.as_ref().map_or_else(|| "-".to_string(), |f| f.join(" "))
    }

    fn coefficient_text(&self) -> String {
        self.coefficient
            .map(|c| frac(Rational::new(c.num, c.den)))
            .unwrap_or_default()
    }
}

pub fn graph_rows(command: &str, config: &BTreeMap<String, String>, rows: &[GraphRow], format: Format) -> String {
    let with_coeff = rows.iter().any(|r| r.coefficient.is_some());
    match format {
        Format::Json => json(command, config, rows),
        Format::Csv => {
            let mut header = vec!["key", "weight", "edges", "aut", "det", "families"];
            if with_coeff {
                header.push("coefficient");
            }
            csv_table(
                &header,
                rows.iter().map(|r| {
                    let mut rec = vec![
                        r.key.to_string(),
                        r.weight.to_string(),
                        r.edges.to_string(),
                        r.aut.to_string(),
                        r.det.to_string(),
                        r.families_text(),
                    ];
                    if with_coeff {
                        rec.push(r.coefficient_text());
                    }
                    rec
                }),
            )
        }
        Format::Latex => {
            let mut s = String::new();
            if with_coeff {
                s.push_str("\\begin{tabular}{|l|r|r|}\n\\hline graph & $w$ & coefficient \\\\\n");
                for r in rows {
                    let _ = writeln!(s, "\\hline \\texttt{{{}}} & {} & ${}$ \\\\", r.key, r.weight, r.coefficient_text());
                }
            } else {
                s.push_str("\\begin{tabular}{|l|r|r|r|r|}\n\\hline graph & $w$ & $|E|$ & $|\\mathrm{Aut}|$ & $\\det$ \\\\\n");
                for r in rows {
                    let _ = writeln!(s, "\\hline \\texttt{{{}}} & {} & {} & {} & {} \\\\", r.key, r.weight, r.edges, r.aut, r.det);
                }
            }
            s.push_str("\\hline\n\\end{tabular}\n");
            s
        }
        Format::Text => {
            let mut s = text_header(command, config);
            for r in rows {
                if with_coeff {
                    let _ = write!(s, "{:>10}  ", r.coefficient_text());
                }
                let _ = writeln!(
                    s,
                    "{}  w={} |E|={} aut={} det={} [{}]",
                    r.key,
                    r.weight,
                    r.edges,
                    r.aut,
                    r.det,
                    r.families_text()
                );
            }
            let _ = writeln!(s, "# {} rows", rows.len());
            s
        }
    }
}

#[derive(Serialize)]
struct TableOut<'a> {
    k: Vec<u32>,
    all: &'a [u64],
    b: &'a [u64],
    bt: &'a [u64],
    s: &'a [u64],
    #[serde(skip_serializing_if = "Option::is_none")]
    check: Option<&'a VerificationReport>,
}

const ROWS: [(&str, Family); 4] = [("all", Family::All), ("b", Family::B), ("bt", Family::Bt), ("s", Family::S)];

pub fn count_table(
    config: &BTreeMap<String, String>,
    t: &CountTable,
    check: Option<&VerificationReport>,
    format: Format,
) -> String {
    let width = t.all.len();
    match format {
        Format::Json => json(
            "table1",
            config,
            TableOut {
                k: (0..width as u32).collect(),
                all: &t.all,
                b: &t.b,
                bt: &t.bt,
                s: &t.s,
                check,
            },
        ),
        Format::Csv => {
            let ks: Vec<String> = (0..width).map(|k| k.to_string()).collect();
            let mut header = vec!["family"];
            header.extend(ks.iter().map(String::as_str));
            csv_table(
                &header,
                ROWS.iter().map(|(name, fam)| {
                    std::iter::once(name.to_string())
                        .chain(t.row(*fam).iter().map(u64::to_string))
                        .collect()
                }),
            )
        }
        Format::Latex => {
            let mut s = format!("\\begin{{tabular}}{{|c||{}}}\n\\hline $k$", "c|".repeat(width));
            for k in 0..width {
                let _ = write!(s, " & ${k}$");
            }
            s.push_str(" \\\\\n");
            for (name, fam) in ROWS {
                let _ = write!(s, "\\hline {name}");
                for v in t.row(fam) {
                    let _ = write!(s, " & ${v}$");
                }
                s.push_str(" \\\\\n");
            }
            s.push_str("\\hline\n\\end{tabular}\n");
            s
        }
        Format::Text => {
            let mut s = text_header("table1", config);
            let _ = write!(s, "{:<4}", "k");
            for k in 0..width {
                let _ = write!(s, "{k:>7}");
            }
            s.push('\n');
            for (name, fam) in ROWS {
                let _ = write!(s, "{name:<4}");
                for v in t.row(fam) {
                    let _ = write!(s, "{v:>7}");
                }
                s.push('\n');
            }
            if let Some(r) = check {
                s.push_str(&report_text(r));
            }
            s
        }
    }
}

pub fn report_text(r: &VerificationReport) -> String {
    let status = if r.is_pass() { "PASS" } else { "FAIL" };
    let mut s = format!("{status} {}: {}/{} checks passed\n", r.suite, r.passed, r.instances);
    for f in &r.failures {
        let _ = writeln!(s, "  {}: expected {}, got {}", f.key, f.expected, f.actual);
    }
    s
}

pub fn report(command: &str, config: &BTreeMap<String, String>, r: &VerificationReport, format: Format) -> String {
    match format {
        Format::Json => json(command, config, r),
        Format::Csv => {
            let summary = vec![
                r.suite.clone(),
                r.instances.to_string(),
                r.passed.to_string(),
                r.failures.len().to_string(),
                String::new(),
                String::new(),
                String::new(),
            ];
            let failures = r.failures.iter().map(|f| {
                vec![
                    r.suite.clone(),
                    String::new(),
                    String::new(),
                    String::new(),
                    f.key.clone(),
                    f.expected.clone(),
                    f.actual.clone(),
                ]
            });
            csv_table(
                &["suite", "instances", "passed", "failed", "key", "expected", "actual"],
                std::iter::once(summary).chain(failures),
            )
        }
        Format::Latex => {
            let mut s = String::from("\\begin{tabular}{|l|r|r|}\n\\hline suite & checks & passed \\\\\n");
            let _ = writeln!(s, "\\hline {} & {} & {} \\\\", r.suite, r.instances, r.passed);
            s.push_str("\\hline\n\\end{tabular}\n");
            s
        }
        Format::Text => text_header(command, config) + &report_text(r),
    }
}

#[derive(Serialize)]
pub struct ContributionRow {
    pub kind: &'static str,
    pub gamma: CanonicalKey,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<CanonicalKey>,
    pub legged: CanonicalKey,
    pub coefficient: RationalOut,
}

#[derive(Serialize)]
pub struct TermRow {
    pub key: CanonicalKey,
    pub coefficient: RationalOut,
}

#[derive(Serialize)]
pub struct KarabegovOut<'a> {
    pub contributions: Vec<ContributionRow>,
    pub total: Vec<TermRow>,
    pub report: &'a VerificationReport,
}

pub fn karabegov(config: &BTreeMap<String, String>, out: &KarabegovOut<'_>, format: Format) -> String {
    match format {
        Format::Json => json("karabegov", config, out),
        Format::Csv => csv_table(
            &["kind", "gamma", "g", "legged", "coefficient"],
            out.contributions.iter().map(|c| {
                vec![
                    c.kind.to_string(),
                    c.gamma.to_string(),
                    c.g.as_ref().map(|k| k.to_string()).unwrap_or_default(),
                    c.legged.to_string(),
                    frac(Rational::new(c.coefficient.num, c.coefficient.den)),
                ]
            }),
        ),
        Format::Latex => {
            let mut s = String::from("\\begin{tabular}{|l|r|}\n\\hline legged graph & coefficient \\\\\n");
            for t in &out.total {
                let coeff = frac(Rational::new(t.coefficient.num, t.coefficient.den));
                let _ = writeln!(s, "\\hline \\texttt{{{}}} & ${coeff}$ \\\\", t.key);
            }
            s.push_str("\\hline\n\\end{tabular}\n");
            s
        }
        Format::Text => {
            let mut s = text_header("karabegov", config);
            for c in &out.contributions {
                let coeff = frac(Rational::new(c.coefficient.num, c.coefficient.den));
                let g = c.g.as_ref().map(|k| format!(" with {k}")).unwrap_or_default();
                let _ = writeln!(s, "{:>10}  {:<9} {}{} -> {}", coeff, c.kind, c.gamma, g, c.legged);
            }
            s.push_str("# total\n");
            for t in &out.total {
                let coeff = frac(Rational::new(t.coefficient.num, t.coefficient.den));
                let _ = writeln!(s, "{:>10}  {}", coeff, t.key);
            }
            if out.total.is_empty() {
                s.push_str("         0  (empty sum)\n");
            }
            s.push_str(&report_text(out.report));
            s
        }
    }
}
