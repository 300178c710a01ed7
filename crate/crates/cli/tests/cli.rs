use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use aitlab_core::induction::fair_vs_ones_closed_form;
use aitlab_core::rational;
use serde_json::Value;

fn aitlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aitlab")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = aitlab(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

/// Exit code and the diagnostic, which must be a single line.
fn failure(args: &[&str]) -> (i32, String) {
    let out = aitlab(args);
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.trim_end().lines().count(), 1, "{args:?}: {err:?}");
    assert!(out.stdout.is_empty());
    (out.status.code().unwrap(), err)
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const BERN_ONES: &str = r#"[
  {"kind": "bernoulli", "name": "fair coin", "c": 2, "q": "1/2"},
  {"kind": "pattern", "name": "all ones", "c": 2, "cycle": "1"}
]"#;

#[test]
fn estimate_from_a_machine_file() {
    let dir = tempfile::tempdir().unwrap();
    let copy = write(&dir, "copy.json", &stdout(&["show-machine", "--machine", "builtin:copy"]));
    let v = json(&["estimate", "--machine", &copy, "--x", "101", "--L", "3", "--S", "100"]);
    assert_eq!(v["result"]["reports"][0]["m_lower"], "1/8");
    assert_eq!(v["result"]["reports"][0]["km_upper"], 3);
    assert_eq!(v["provenance"]["params"]["L"], 3);
    assert_eq!(v["provenance"]["params"]["S"], 100);
    let e = json(&["estimate", "--machine", &copy, "--x", "101", "--L", "3", "--S", "100", "--method", "enumerate"]);
    assert_eq!(e["result"]["reports"][0]["m_lower"], "1/8");
}

#[test]
fn estimate_by_depth_reports_kraft_sums() {
    let v = json(&["estimate", "--machine", "builtin:copy", "--depth", "3", "--L", "5", "--S", "100"]);
    assert_eq!(v["result"]["reports"].as_array().unwrap().len(), 15);
    assert_eq!(v["result"]["kraft_sums"], serde_json::json!(["1/1", "1/1", "1/1", "1/1"]));
}

#[test]
fn persist_writes_the_curve_as_csv() {
    let dir = tempfile::tempdir().unwrap();
    let family = write(&dir, "bern-ones.json", BERN_ONES);
    let csv = stdout(&["persist", "--family", &family, "--test", "last_bit", "--n", "32", "--weight", "1/4"]);
    let mut lines = csv.lines().skip_while(|l| l.starts_with("# "));
    assert_eq!(lines.next(), Some("n,p1,cum_exception"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|c| c.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 32);
    for (j, row) in rows.iter().enumerate() {
        assert_eq!(row[0], j as f64);
        assert!((row[1] - rational::to_f64(&fair_vs_ones_closed_form(j))).abs() < 1e-12);
        assert!(row[2] <= 2.0);
    }
    assert!(csv.contains("# weight = \"1/4\""));
    assert!(csv.contains("holds"));
}

#[test]
fn persist_json_includes_the_bound_check() {
    let dir = tempfile::tempdir().unwrap();
    let family = write(&dir, "bern-ones.json", BERN_ONES);
    let v = json(&[
        "persist",
        "--family",
        &family,
        "--test",
        "last_bit",
        "--n",
        "8",
        "--weight-member",
        "1",
        "--format",
        "json",
    ]);
    assert_eq!(v["result"]["bound_check"]["weight"], "1/2");
    assert_eq!(v["result"]["bound_check"]["cumulative_holds"], true);
    assert_eq!(v["result"]["curve"]["points"][0]["p1"]["lower"], "3/4");
}

#[test]
fn persist_with_a_machine_predictor() {
    let v = json(&[
        "persist",
        "--machine",
        "builtin:copy",
        "--L",
        "6",
        "--S",
        "100",
        "--test",
        "last_bit",
        "--n",
        "4",
        "--format",
        "json",
    ]);
    // copy's normalized measure is the fair coin
    for p in v["result"]["curve"]["points"].as_array().unwrap() {
        assert_eq!(p["p1"]["lower"], "1/2");
    }
}

#[test]
fn identical_inputs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let family = write(&dir, "family.json", BERN_ONES);
    let runs: [&[&str]; 3] = [
        &["bell", "simulate", "--paper-model", "--rounds", "20000", "--seed", "11"],
        &[
            "mixture",
            "concentrate",
            "--family",
            &family,
            "--true-member",
            "1",
            "--trajectories",
            "50",
            "--length",
            "10",
            "--horizon",
            "3",
            "--seed",
            "5",
        ],
        &["estimate", "--machine", "builtin:doubler", "--depth", "4", "--L", "8", "--S", "200"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let a = dir.path().join(format!("a{i}"));
        let b = dir.path().join(format!("b{i}"));
        for path in [&a, &b] {
            let mut full = args.to_vec();
            full.extend(["--out", path.to_str().unwrap()]);
            assert!(aitlab(&full).status.success(), "{full:?}");
        }
        assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap(), "{args:?}");
    }
}

#[test]
fn seeds_are_recorded_and_matter() {
    let a = json(&["bell", "simulate", "--paper-model", "--rounds", "5000", "--seed", "1"]);
    let b = json(&["bell", "simulate", "--paper-model", "--rounds", "5000", "--seed", "2"]);
    assert_eq!(a["provenance"]["params"]["seed"], 1);
    assert_ne!(a["result"]["counts"], b["result"]["counts"]);
}

#[test]
fn input_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(&dir, "broken.json", "[{\"kind\": \"bernoulli\", \"c\": 1}]");
    let heavy = write(
        &dir,
        "heavy.json",
        r#"[{"kind": "bernoulli", "c": 0, "q": "1/2"}, {"kind": "bernoulli", "c": 0, "q": "1/3"}]"#,
    );
    let bad_table = write(&dir, "table.json", r#"{"null_outcome": false, "rows": []}"#);
    let cases: [&[&str]; 9] = [
        &["estimate", "--no-such-flag"],
        &["frobnicate"],
        &["run", "--machine", "builtin:nope"],
        &["run", "--machine", "/no/such/file.json"],
        &["mixture", "posterior", "--family", &broken],
        &["mixture", "posterior", "--family", &heavy],
        &["bell", "chsh", "--table", &bad_table],
        &["persist", "--family", &heavy, "--test", "last_bit(", "--n", "3"],
        &["run", "--machine", "builtin:copy", "--format", "csv"],
    ];
    for args in cases {
        let (code, err) = failure(args);
        assert_eq!(code, 2, "{args:?}: {err}");
        assert!(err.starts_with("aitlab: "), "{err}");
    }
}

#[test]
fn precondition_errors_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let family = write(&dir, "family.json", BERN_ONES);
    let always_null = write(&dir, "null.json", r#"{"values": [{"lambda": "∅∅++", "q": "1"}]}"#);
    let only_ones = write(&dir, "ones.json", r#"[{"kind": "pattern", "c": 1, "cycle": "1"}]"#);
    let cases: [&[&str]; 5] = [
        &["mixture", "posterior", "--family", &only_ones, "--z", "10"],
        &["mixture", "zombie", "--family", &family, "--z", "0", "--member", "1", "--horizon", "2"],
        &["bell", "chsh", "--paper-model"],
        &["bell", "postselect", "--hvm", &always_null],
        &["bell", "simulate", "--hvm", &always_null, "--rounds", "10", "--seed", "0"],
    ];
    for args in cases {
        let (code, err) = failure(args);
        assert_eq!(code, 3, "{args:?}: {err}");
    }
}

#[test]
fn tables_round_trip_through_reports() {
    let dir = tempfile::tempdir().unwrap();
    let p0 = dir.path().join("p0.json");
    stdout(&["bell", "build", "--paper-model", "--out", p0.to_str().unwrap()]);
    let post = json(&["bell", "postselect", "--table", p0.to_str().unwrap()]);
    let pr = json(&["bell", "postselect", "--pr-box"]);
    assert_eq!(post["result"], pr["result"]);
    let chsh = json(&["bell", "chsh", "--table", p0.to_str().unwrap(), "--postselect"]);
    assert_eq!(chsh["result"]["value"], "4/1");
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Set `AITLAB_BLESS=1` to rewrite the golden files after an intended change.
fn check_golden(name: &str, actual: &str) {
    let path = golden_path(name);
    if std::env::var_os("AITLAB_BLESS").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, actual).unwrap();
    }
    let expected = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert!(expected == actual, "{name} differs from its golden file");
}

#[test]
fn demos_match_golden_files() {
    for module in ["mtm", "algprob", "induction", "mixture", "bell"] {
        check_golden(&format!("demo-{module}.json"), &stdout(&["demo-paper", module, "--format", "json"]));
        check_golden(&format!("demo-{module}.txt"), &stdout(&["demo-paper", module]));
    }
    assert_eq!(stdout(&["bell", "demo-paper"]), stdout(&["demo-paper", "bell"]));
}
