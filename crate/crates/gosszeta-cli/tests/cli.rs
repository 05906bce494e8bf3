use std::process::Command as Proc;

use clap::Parser;
use gosszeta::minperm::MinpermError;
use gosszeta_cli::{run, Failure, RunConfig, EXIT_FALSIFIED, EXIT_OK, EXIT_PRECISION, EXIT_USAGE};
use serde_json::Value;

fn cfg(args: &[&str]) -> RunConfig {
    let mut v = vec!["gosszeta"];
    v.extend_from_slice(args);
    RunConfig::parse_from(v)
}

fn run_json(args: &[&str]) -> (Value, i32) {
    let (out, code) = run(&cfg(args));
    (
        serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out}")),
        code,
    )
}

#[test]
fn predict_examples() {
    let (v, code) = run_json(&["predict", "--p", "3", "--y", "-1", "--nmax", "3"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(
        v["slopes"],
        serde_json::json!([[2, 1, 1], [8, 1, 1], [26, 1, 1]])
    );
    assert_eq!(v["certified_through"], 3);

    let (v, _) = run_json(&["predict", "--p", "3", "--y", "0"]);
    assert_eq!(v["slopes"], serde_json::json!([]));

    let (v, _) = run_json(&["predict", "--q", "4", "--y", "-1", "--nmax", "1"]);
    assert_eq!(v["alpha"], serde_json::json!(["1"]));
    assert_eq!(v["slopes"], serde_json::json!([[3, 1, 1]]));
}

#[test]
fn predict_curve_shape() {
    let (v, _) = run_json(&[
        "predict", "--p", "5", "--y", "-1", "--g", "1", "--d", "1", "--nmax", "2",
    ]);
    assert_eq!(v["real_parts"], serde_json::json!(["0", "4", "24"]));
}

#[test]
fn compare_agrees() {
    for args in [
        [
            "compare", "--p", "3", "--y", "-1", "--xdeg", "3", "--nmax", "3",
        ],
        [
            "compare", "--p", "2", "--y", "-1", "--xdeg", "4", "--nmax", "4",
        ],
        [
            "compare", "--p", "3", "--y", "0", "--xdeg", "2", "--nmax", "2",
        ],
    ] {
        let (v, code) = run_json(&args);
        assert_eq!(code, EXIT_OK, "{v}");
        assert_eq!(v["agree"], true);
    }
}

#[test]
fn verify_minperm_rows() {
    let (out, code) = run(&cfg(&[
        "verify-minperm",
        "--p",
        "3",
        "--y",
        "-1",
        "--nmax",
        "3",
        "--format",
        "csv",
    ]));
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[1..].iter().all(|l| l.starts_with("pass,")));
    assert!(lines[1].starts_with("pass,3,1,-1,0,1,0,"));

    let (v, code) = run_json(&["verify-minperm", "--q", "4", "--y", "-1", "--nmax", "2"]);
    assert_eq!(code, EXIT_OK);
    assert!(v.as_array().unwrap().iter().all(|r| r["status"] == "pass"));

    let (v, _) = run_json(&[
        "verify-minperm",
        "--p",
        "2",
        "--b",
        "2",
        "--nmax",
        "3",
        "--budget",
        "10",
    ]);
    assert_eq!(v[3]["status"], "skipped");
}

#[test]
fn special_value_and_vadic() {
    let (v, code) = run_json(&["special-value", "--q", "3", "--j", "-2"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["polynomial"], "1 + 2*x");
    assert_eq!(v["order_at_one"], 1);
    let (v, _) = run_json(&["special-value", "--q", "3", "--j", "-1"]);
    assert_eq!(v["order_at_one"], 0);

    let (v, code) = run_json(&[
        "vadic",
        "--q",
        "3",
        "--f",
        "t",
        "--y",
        "-1",
        "--xdeg",
        "4",
        "--precision",
        "12",
    ]);
    assert_eq!(code, EXIT_OK, "{v}");
    assert_eq!(v["comparison"]["equal"], true);
    assert_eq!(v["dv"], 1);
}

#[test]
fn curve_report() {
    let (v, code) = run_json(&[
        "curve",
        "--p",
        "5",
        "--a4",
        "1",
        "--a6",
        "1",
        "--xdeg",
        "4",
        "--precision",
        "64",
    ]);
    assert_eq!(code, EXIT_OK, "{v}");
    assert_eq!(v["host"]["h"], 9);
    assert_eq!(
        v["slopes"],
        serde_json::json!([[0, 1, 1], [4, 1, 1], [24, 1, 1]])
    );
}

#[test]
fn exit_codes() {
    assert_eq!(run(&cfg(&["predict", "--y", "-1"])).1, EXIT_USAGE);
    assert_eq!(
        run(&cfg(&["predict", "--p", "3", "--y", "ratio:1/3"])).1,
        EXIT_USAGE
    );
    assert_eq!(
        run(&cfg(&["curve", "--p", "5", "--a4", "0", "--a6", "0"])).1,
        EXIT_USAGE
    );
    assert_eq!(
        run(&cfg(&["zeta-affine", "--p", "3", "--xdeg", "40"])).1,
        EXIT_PRECISION
    );
    assert_eq!(
        run(&cfg(&["predict", "--p", "2", "--y", "digits:2:1,1"])).1,
        EXIT_PRECISION
    );
    let f: Failure = MinpermError::TheoremViolation("x".into()).into();
    assert_eq!(f.code, EXIT_FALSIFIED);
}

#[test]
fn config_round_trip_is_deterministic() {
    for args in [
        &["predict", "--q", "9", "--y", "ratio:-7/5", "--nmax", "3"][..],
        &[
            "zeta-affine",
            "--p",
            "2",
            "--b",
            "2",
            "--y",
            "-3",
            "--xdeg",
            "3",
            "--format",
            "table",
        ][..],
        &[
            "verify-minperm",
            "--p",
            "2",
            "--nmax",
            "2",
            "--samples",
            "2",
            "--seed",
            "7",
        ][..],
    ] {
        let c = cfg(args);
        let text = serde_json::to_string(&c).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(run(&back), run(&c));
    }
}

#[test]
fn binary_reads_config_file() {
    let bin = env!("CARGO_BIN_EXE_gosszeta");
    let out = Proc::new(bin)
        .args([
            "predict",
            "--p",
            "3",
            "--y",
            "-1",
            "--nmax",
            "2",
            "--emit-config",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let path = std::env::temp_dir().join(format!("gosszeta-cli-{}.json", std::process::id()));
    std::fs::write(&path, &out.stdout).unwrap();
    let out = Proc::new(bin)
        .args(["predict", "--config", path.to_str().unwrap()])
        .output()
        .unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["slopes"], serde_json::json!([[2, 1, 1], [8, 1, 1]]));

    let out = Proc::new(bin).args(["nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
