use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardy-sharp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn cp_table_in_every_format() {
    let out = run(&["cp", "--pmin", "1", "--pmax", "2", "--step", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2]["cp"].as_f64().unwrap(), 1.0);
    assert_eq!(rows[0]["cp"].as_f64().unwrap(), 2.0 / std::f64::consts::E);

    let out = run(&["cp", "--p-range", "1..2", "--step", "0.5", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,cp,cp_root,p_minus_1,cp_prime"));
    let last: Vec<f64> = lines.last().unwrap().split(',').map(|s| s.parse().unwrap()).collect();
    assert_eq!(last[..4], [2.0, 1.0, 1.0, 1.0]);

    let out = run(&["cp", "--format", "table"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("cp_root"));
}

#[test]
fn cp_cross_check_with_tolerance() {
    let out = run(&["cp", "--tol", "1e-12"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["rows"].as_array().unwrap().iter().all(|r| r["rel_diff"].as_f64().unwrap() <= 1e-12));
}

#[test]
fn verify_echoes_seed_and_passes() {
    let out = run(&["verify", "--suite", "main", "--samples", "50", "--seed", "11"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["seed"], 11);
    assert_eq!(v["suite"], "main");
    assert_eq!(v["passed"], true);
    for r in v["reports"].as_array().unwrap() {
        for key in ["check_name", "samples", "worst_violation", "tolerance", "passed"] {
            assert!(r.get(key).is_some());
        }
    }

    let out = run(&["verify", "--suite", "kolyada", "--samples", "20", "--seed", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# suite=kolyada samples=20 seed=3\ncheck_name,"));
}

#[test]
fn verify_fails_with_exit_one_under_impossible_tolerance() {
    // the isometry defect is a few ulps, never below the smallest subnormal
    let out = run(&["verify", "--suite", "main", "--samples", "30", "--p", "2", "--tol", "5e-324"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["passed"], false);
}

#[test]
fn verify_is_reproducible_across_thread_counts() {
    let args = ["verify", "--suite", "sqrd", "--samples", "40", "--seed", "5"];
    let a = Command::new(env!("CARGO_BIN_EXE_hardy-sharp"))
        .args(args)
        .env("HARDY_SHARP_THREADS", "1")
        .output()
        .unwrap();
    let b = Command::new(env!("CARGO_BIN_EXE_hardy-sharp"))
        .args(args)
        .env("HARDY_SHARP_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn extremal_reports_witness_and_seed() {
    let out = run(&["extremal", "--p", "3", "--mode", "inf", "--budget", "800", "--restarts", "2", "--seed", "9"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["seed"], 9);
    assert_eq!(v["result"]["mode"], "inf");
    let f = &v["result"]["best_function"];
    assert!(f["breakpoints"].is_array() && f["values"].is_array());
    assert!(v["ceiling_excess"].as_f64().unwrap() <= 1e-10);

    let out = run(&["extremal", "--p", "1.5", "--budget", "300", "--restarts", "1", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# p=1.5 mode=sup seed=0"));
    assert_eq!(lines[1], "p,norm_f,norm_hardy_osc,norm_dual_osc,ratio_dual,ratio_hardy,ratio_dual_over_hardy");
    assert_eq!(lines[2].split(',').count(), 7);

    let out = run(&["extremal", "--p", "1.5", "--budget", "300", "--restarts", "1", "--format", "csv", "--trace"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().nth(1), Some("iteration,ratio"));
}

#[test]
fn family_and_keps() {
    let v = json(&run(&["family", "--p", "3"]));
    assert_eq!(v["q_list"].as_array().unwrap().len(), 4);
    assert_eq!(v["passed"], true);
    let r = v["ratios_test1"].as_array().unwrap();
    assert!((r[3].as_f64().unwrap() - 2.0).abs() < 1e-3);

    let out = run(&["keps", "--p", "1.5", "--eps", "0.1,0.01", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with("eps,norm_dual,norm_dual_osc\n"));
}

#[test]
fn plot_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cp.svg");
    let out = run(&["plot", "--what", "cp-root", "--pmin", "1", "--pmax", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let svg = std::fs::read_to_string(&path).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("polyline"));

    let out = run(&["plot", "--what", "keps", "--p", "3"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("</svg>"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&[]).status.code(), Some(2));
    assert_eq!(run(&["nope"]).status.code(), Some(2));
    assert_eq!(run(&["cp", "--format", "xml"]).status.code(), Some(2));
    assert_eq!(run(&["cp", "--pmin", "3", "--pmax", "1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "everything"]).status.code(), Some(2));
    assert_eq!(run(&["family", "--p", "0.5"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(run(&["cp", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn io_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.json");
    let out = run(&["cp", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn out_flag_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fam.json");
    run(&["family", "--p", "2.5", "--out", path.to_str().unwrap()]);
    let stdout = run(&["family", "--p", "2.5"]).stdout;
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
}
