use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stargraph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let o = run(&full);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let schema: Value = serde_json::from_str(include_str!("../schema/output.schema.json")).unwrap();
    if let Err(e) = jsonschema::validate(&schema, &v) {
        panic!("{args:?} output violates the schema: {e}");
    }
    v
}

fn csv_rows(args: &[&str]) -> usize {
    let mut full = args.to_vec();
    full.extend(["--format", "csv"]);
    let o = run(&full);
    assert!(o.status.success());
    stdout(&o).lines().count() - 1
}

#[test]
fn enum_row_counts() {
    let bt4 = ["enum", "--points", "1", "--weight", "4", "--class", "bt", "--stability", "stable"];
    assert_eq!(csv_rows(&bt4), 24);
    assert_eq!(csv_rows(&["enum", "--points", "1", "--weight", "0", "--class", "all", "--stability", "stable"]), 1);
    assert_eq!(csv_rows(&["enum", "--points", "1", "--weight", "2", "--class", "s", "--stability", "stable"]), 1);
    let v = json(&bt4);
    assert_eq!(v["data"].as_array().unwrap().len(), 24);
    assert_eq!(v["config"]["class"], "bt");
}

#[test]
fn table1_rows_and_check() {
    let v = json(&["table1", "--max-weight", "3"]);
    assert_eq!(v["data"]["all"], serde_json::json!([1, 1, 2, 9]));
    assert_eq!(v["data"]["b"], serde_json::json!([1, 1, 1, 5]));
    assert_eq!(v["data"]["bt"], serde_json::json!([1, 1, 2, 6]));
    assert_eq!(v["data"]["s"], serde_json::json!([1, 1, 1, 2]));
    let zero = json(&["table1", "--max-weight", "0"]);
    for row in ["all", "b", "bt", "s"] {
        assert_eq!(zero["data"][row], serde_json::json!([1]));
    }
    let o = run(&["table1", "--max-weight", "6", "--check"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("PASS table1: 28/28"));
}

#[test]
fn series_latex_has_the_weight_four_layer() {
    let o = run(&["series", "--which", "bt-inverse", "--max-weight", "4", "--stability", "stable", "--format", "latex"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("\\begin{tabular}"));
    let layer4 = text.lines().filter(|l| l.contains("\\texttt") && l.contains("} & 4 &")).count();
    assert_eq!(layer4, 24);
    assert!(text.contains("\\texttt{P1V0:4} & 4 & $1/24$"));
}

#[test]
fn series_coefficients_are_exact_fractions() {
    let v = json(&["series", "--which", "bergman-log", "--max-weight", "1"]);
    let coeffs: Vec<(i64, i64)> = v["data"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| (r["coefficient"]["num"].as_i64().unwrap(), r["coefficient"]["den"].as_i64().unwrap()))
        .collect();
    assert_eq!(coeffs, vec![(-1, 2), (1, 2)]);
    let star = json(&["series", "--which", "kbw-star", "--max-weight", "2", "--stability", "scon", "--max-ordinary", "2"]);
    assert!(star["data"].as_array().unwrap().iter().all(|r| r["key"].as_str().unwrap().starts_with("P2")));
}

#[test]
fn verify_suites_pass() {
    let o = run(&["verify", "--suite", "inversion", "--max-weight", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["verify", "--suite", "associativity", "--max-weight", "2", "--max-ordinary", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let v = json(&["verify", "--suite", "coefficient-theorem", "--trials", "100", "--seed", "11"]);
    assert_eq!(v["data"]["config"]["seed"], "11");
    assert_eq!(v["data"]["failures"], serde_json::json!([]));
}

#[test]
fn karabegov_fixtures() {
    for case in ["bt", "berezin", "dual-kbw"] {
        let zero = json(&["karabegov", "--case", case, "--order", "0"]);
        assert_eq!(zero["data"]["total"], serde_json::json!([{"key": "P2V0:0,1|0,0", "coefficient": {"num": 1, "den": 1}}]));
        for order in ["1", "2"] {
            let v = json(&["karabegov", "--case", case, "--order", order, "--fuzz", "20"]);
            assert_eq!(v["data"]["total"], serde_json::json!([]), "{case} {order}");
        }
    }
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["enum", "--weight", "1", "--stability", "scon"],
        vec!["enum", "--points", "2", "--weight", "1", "--class", "bt"],
        vec!["verify", "--suite", "no-such-suite"],
        vec!["series", "--which", "nothing"],
        vec!["karabegov", "--case", "bt", "--order", "3"],
        vec!["series", "--which", "berezin", "--stability", "scon"],
        vec!["table1", "--format", "yaml"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn output_is_deterministic_and_can_go_to_a_file() {
    let args = ["verify", "--suite", "acyclic-sum", "--max-weight", "2", "--trials", "30", "--format", "json"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let path = std::env::temp_dir().join(format!("stargraph-cli-test-{}.csv", std::process::id()));
    let o = run(&["enum", "--weight", "3", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(written.lines().count(), 1 + 9);
}
