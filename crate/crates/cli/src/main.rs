//! `stargraph`: enumerate graphs, print series coefficients and run the
//! verification suites. Exit status is 0 on success, 1 when a check fails
//! and 2 on a usage error.

mod output;

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stargraph::enumerate::{count_table, enumerate_graphs, GraphRecord};
use stargraph::karabegov::{self, Case, TermKind};
use stargraph::random::{self, DEFAULT_SEED};
use stargraph::series::{self, GraphSeries, Mode};
use stargraph::suites::{self, Suite, SuiteConfig};
use stargraph::{EnumSpec, Family, StabilityClass};

use output::{ContributionRow, Format, GraphRow, KarabegovOut, RationalOut, TermRow};

#[derive(Parser)]
#[command(name = "stargraph", version, about = "Exact graph calculus for Berezin-type star products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List every graph of one weight, stability class and family.
    Enum(EnumArgs),
    /// Counts of stable one-pointed graphs by weight and family.
    Table1(TableArgs),
    /// Coefficients of a named graph series.
    Series(SeriesArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Low-order coefficients of the Karabegov-form commutator.
    Karabegov(KarabegovArgs),
}

#[derive(Args)]
struct Sink {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Class {
    All,
    B,
    Bt,
    S,
}

impl From<Class> for Family {
    fn from(c: Class) -> Family {
        match c {
            Class::All => Family::All,
            Class::B => Family::B,
            Class::Bt => Family::Bt,
            Class::S => Family::S,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Stability {
    Stable,
    Ss,
    Scon,
}

impl Stability {
    fn class(self) -> StabilityClass {
        match self {
            Stability::Stable => StabilityClass::Stable,
            Stability::Ss => StabilityClass::Semistable,
            Stability::Scon => StabilityClass::Scon,
        }
    }

    fn mode(self, max_ordinary: Option<usize>) -> Result<Mode, String> {
        match (self, max_ordinary) {
            (Stability::Stable, _) => Ok(Mode::Stable),
            (Stability::Ss, _) => Ok(Mode::Semistable),
            (Stability::Scon, Some(v)) => Ok(Mode::Scon(v)),
            (Stability::Scon, None) => Err("--stability scon requires --max-ordinary".into()),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Ss => "ss",
            Stability::Scon => "scon",
        }
    }
}

#[derive(Args)]
struct EnumArgs {
    /// Number of marked vertices (0, 1 or 2).
    #[arg(long, default_value_t = 1)]
    points: usize,
    /// Edge count minus vertex count.
    #[arg(long)]
    weight: u32,
    /// Family filter for one-pointed graphs.
    #[arg(long, value_enum, default_value = "all")]
    class: Class,
    #[arg(long, value_enum, default_value = "stable")]
    stability: Stability,
    /// Bound on unmarked vertices; required for scon.
    #[arg(long)]
    max_ordinary: Option<usize>,
    #[command(flatten)]
    sink: Sink,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long, default_value_t = 6)]
    max_weight: u32,
    /// Compare against the embedded reference counts (weights up to 6).
    #[arg(long)]
    check: bool,
    #[command(flatten)]
    sink: Sink,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Berezin,
    BtInverse,
    BergmanLog,
    Kbw,
    KbwInverse,
    BtStar,
    KbwStar,
}

#[derive(Args)]
struct SeriesArgs {
    #[arg(long, value_enum)]
    which: Which,
    #[arg(long, default_value_t = 3)]
    max_weight: u32,
    /// Ignored for bergman-log, which always runs over semistable graphs.
    #[arg(long, value_enum, default_value = "stable")]
    stability: Stability,
    #[arg(long)]
    max_ordinary: Option<usize>,
    #[command(flatten)]
    sink: Sink,
}

#[derive(Args)]
struct VerifyArgs {
    /// One of: inversion, acyclic-sum, substitution, subdivision-sign,
    /// coefficient-theorem, compose-inverse, associativity, karabegov, tables.
    #[arg(long, value_parser = parse_suite)]
    suite: Suite,
    /// Largest weight in the exhaustive population.
    #[arg(long)]
    max_weight: Option<u32>,
    /// Bound on unmarked vertices for scon populations.
    #[arg(long)]
    max_ordinary: Option<usize>,
    /// Random instances on top of the exhaustive population.
    #[arg(long)]
    trials: Option<u64>,
    /// Seed for the random instances.
    #[arg(long)]
    seed: Option<u64>,
    /// Vertex bound for random graphs.
    #[arg(long)]
    max_vertices: Option<usize>,
    /// Edge multiplicity bound for random graphs.
    #[arg(long)]
    max_multiplicity: Option<u32>,
    /// Edge bound for random and exhaustive small graphs.
    #[arg(long)]
    max_edges: Option<u32>,
    #[command(flatten)]
    sink: Sink,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: stargraph::Error| e.to_string())
}

#[derive(Clone, Copy, ValueEnum)]
enum CaseArg {
    Bt,
    Berezin,
    DualKbw,
}

impl From<CaseArg> for Case {
    fn from(c: CaseArg) -> Case {
        match c {
            CaseArg::Bt => Case::Bt,
            CaseArg::Berezin => Case::Berezin,
            CaseArg::DualKbw => Case::DualKbw,
        }
    }
}

#[derive(Args)]
struct KarabegovArgs {
    #[arg(long, value_enum)]
    case: CaseArg,
    /// Power of the deformation parameter (0, 1 or 2).
    #[arg(long, value_parser = clap::value_parser!(u32).range(0..=2))]
    order: u32,
    /// Also check determinant factorization on this many random block pairs.
    #[arg(long)]
    fuzz: Option<u64>,
    /// Seed for the random block pairs.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    sink: Sink,
}

enum Failure {
    Check,
    Usage(String),
}

impl From<stargraph::Error> for Failure {
    fn from(e: stargraph::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn emit(sink: &Sink, text: &str) -> Outcome {
    match &sink.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn config(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "default".to_string(), |x| x.to_string())
}

fn cmd_enum(a: &EnumArgs) -> Outcome {
    let mut spec = EnumSpec::new(a.points, a.weight, a.stability.class()).family(a.class.into());
    if let Some(b) = a.max_ordinary {
        spec = spec.max_ordinary(b);
    }
    let records = enumerate_graphs(&spec)?;
    let rows: Vec<GraphRow> = records.iter().map(|r| GraphRow::new(r, None)).collect();
    let cfg = config(&[
        ("points", a.points.to_string()),
        ("weight", a.weight.to_string()),
        ("class", format!("{:?}", Family::from(a.class)).to_lowercase()),
        ("stability", a.stability.name().to_string()),
        ("max_ordinary", spec.ordinary_bound()?.to_string()),
    ]);
    emit(&a.sink, &output::graph_rows("enum", &cfg, &rows, a.sink.format))
}

fn cmd_table1(a: &TableArgs) -> Outcome {
    let table = count_table(a.max_weight)?;
    let check = if a.check {
        Some(suites::table1_check(a.max_weight)?)
    } else {
        None
    };
    let cfg = config(&[("max_weight", a.max_weight.to_string()), ("check", a.check.to_string())]);
    emit(&a.sink, &output::count_table(&cfg, &table, check.as_ref(), a.sink.format))?;
    match check {
        Some(r) if !r.is_pass() => {
            if a.sink.format != Format::Text {
                eprint!("{}", output::report_text(&r));
            }
            Err(Failure::Check)
        }
        _ => Ok(()),
    }
}

fn build_series(which: Which, max_weight: u32, mode: Mode) -> stargraph::Result<GraphSeries> {
    match which {
        Which::Berezin => series::berezin_series(max_weight, mode),
        Which::BtInverse => series::bt_inverse_series(max_weight, mode),
        Which::BergmanLog => series::bergman_log_series(max_weight),
        Which::Kbw => series::kbw_series(max_weight, mode),
        Which::KbwInverse => series::kbw_inverse_series(max_weight, mode),
        Which::BtStar => series::bt_inverse_series(max_weight, mode)?.to_star(),
        Which::KbwStar => series::kbw_series(max_weight, mode)?.to_star(),
    }
}

fn cmd_series(a: &SeriesArgs) -> Outcome {
    let mode = a.stability.mode(a.max_ordinary).map_err(Failure::Usage)?;
    let s = build_series(a.which, a.max_weight, mode)?;
    let rows: Vec<GraphRow> = s
        .sorted_terms()
        .into_iter()
        .map(|(k, c)| GraphRow::new(&GraphRecord::from_key(k.clone()), Some(*c)))
        .collect();
    let which = Which::to_possible_value(&a.which).expect("named variant");
    let cfg = config(&[
        ("which", which.get_name().to_string()),
        ("max_weight", a.max_weight.to_string()),
        ("stability", a.stability.name().to_string()),
        ("max_ordinary", opt(a.max_ordinary)),
    ]);
    emit(&a.sink, &output::graph_rows("series", &cfg, &rows, a.sink.format))
}

fn cmd_verify(a: &VerifyArgs) -> Outcome {
    let cfg = SuiteConfig {
        max_weight: a.max_weight,
        max_ordinary: a.max_ordinary,
        trials: a.trials,
        seed: a.seed,
        max_vertices: a.max_vertices,
        max_multiplicity: a.max_multiplicity,
        max_edges: a.max_edges,
    };
    let report = suites::run(a.suite, &cfg)?;
    let mut header = report.config.clone();
    header.insert("suite".into(), a.suite.to_string());
    emit(&a.sink, &output::report("verify", &header, &report, a.sink.format))?;
    if report.is_pass() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn kind_name(k: TermKind) -> &'static str {
    match k {
        TermKind::Potential => "potential",
        TermKind::Ricci => "ricci",
        TermKind::Bergman => "bergman",
    }
}

fn cmd_karabegov(a: &KarabegovArgs) -> Outcome {
    let case: Case = a.case.into();
    let sum = karabegov::obstruction_terms(case, a.order)?;
    let mut report = karabegov::low_order_obstruction_check(case, a.order)?;
    let seed = a.seed.unwrap_or(DEFAULT_SEED);
    if let Some(n) = a.fuzz {
        let mut rng = random::rng(seed);
        for _ in 0..n {
            let (gamma, g, cross) = karabegov::random_block_pair(&mut rng, 4);
            report.merge(karabegov::det_factorization_check(&gamma, &g, &cross)?);
        }
    }
    let case_name = CaseArg::to_possible_value(&a.case).expect("named variant");
    let cfg = config(&[
        ("case", case_name.get_name().to_string()),
        ("order", a.order.to_string()),
        ("fuzz", opt(a.fuzz)),
        ("seed", seed.to_string()),
    ]);
    let out = KarabegovOut {
        contributions: sum
            .contributions
            .iter()
            .map(|c| ContributionRow {
                kind: kind_name(c.kind),
                gamma: c.gamma.clone(),
                g: c.g.clone(),
                legged: c.legged.clone(),
                coefficient: RationalOut::from(c.coefficient),
            })
            .collect(),
        total: sum
            .total
            .sorted_terms()
            .into_iter()
            .map(|(k, c)| TermRow {
                key: k.clone(),
                coefficient: RationalOut::from(*c),
            })
            .collect(),
        report: &report,
    };
    emit(&a.sink, &output::karabegov(&cfg, &out, a.sink.format))?;
    if report.is_pass() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Enum(a) => cmd_enum(a),
        Command::Table1(a) => cmd_table1(a),
        Command::Series(a) => cmd_series(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Karabegov(a) => cmd_karabegov(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
