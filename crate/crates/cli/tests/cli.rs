use std::process::{Command, Output};

use ggjet::jets::{gg_rank, JetConfig};
use serde_json::Value;

fn ggjet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ggjet")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn tmp(name: &str) -> std::path::PathBuf {
    std::env::temp_dir().join(format!("ggjet-cli-{}-{name}", std::process::id()))
}

#[test]
fn rank_matches_library() {
    let v = json(&ggjet(&["rank", "--n", "2", "--kappa", "2", "--m", "2", "--format", "json"]));
    let expected = gg_rank(&JetConfig::new(2, 2, 2).unwrap(), 100).unwrap();
    assert_eq!(v["rank"], expected.to_string());
    assert_eq!(v["rank"], "5");
}

#[test]
fn rank_range_rows() {
    let v = json(&ggjet(&["rank", "--n", "3", "--kappa", "2", "--m-range", "1..4"]));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    for r in rows {
        let m = r["m"].as_u64().unwrap();
        let exp = gg_rank(&JetConfig::new(3, 2, m).unwrap(), 100).unwrap();
        assert_eq!(r["rank"], exp.to_string());
    }
}

#[test]
fn decompose_single_entry() {
    let v = json(&ggjet(&["decompose", "--n", "1", "--kappa", "1", "--m", "5"]));
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 1);
    assert_eq!(entries[0]["partition"], serde_json::json!([5]));
    assert_eq!(entries[0]["mult"], 1);
    assert_eq!(v["rank"], "1");
}

#[test]
fn verify_rank_consistency_passes() {
    let out = ggjet(&["verify", "--suite", "rank-consistency", "--max-m", "12"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["suites"][0]["status"], "PASS");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(ggjet(&["rank", "--n", "2"]).status.code(), Some(2));
    assert_eq!(ggjet(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(ggjet(&["rank", "--n", "2", "--kappa", "2", "--m-range", "5..1"]).status.code(), Some(2));
    assert_eq!(ggjet(&["verify", "--suite", "no-such-suite"]).status.code(), Some(2));
    let out = ggjet(&["chi", "--n", "2", "--d", "0", "--partition", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert!(out.stdout.is_empty());
}

#[test]
fn capacity_exits_3() {
    let out = ggjet(&["rank", "--n", "2", "--kappa", "2", "--m", "500", "--max-cells", "10"]);
    assert_eq!(out.status.code(), Some(3));
    // float-only workloads are refused in exact mode
    let out = ggjet(&["asymptotics", "polylog", "--kappa", "1000000", "--q", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn output_is_deterministic() {
    let args = ["report", "--n", "2", "--d", "6", "--kappa", "2", "--m", "4"];
    let a = ggjet(&args);
    let b = ggjet(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let args = ["asymptotics", "kernel", "--n", "3", "--kappa", "3..8", "--alpha", "6,0", "--mode", "float"];
    assert_eq!(ggjet(&args).stdout, ggjet(&args).stdout);
}

#[test]
fn exact_mode_has_no_decimals() {
    let v = json(&ggjet(&["asymptotics", "polylog", "--kappa", "10", "--q", "2"]));
    let row = &v["rows"][0];
    assert_eq!(row["value"]["mode"], "exact");
    assert_eq!(row["value"]["value"], "32160403/6350400");
    assert!(row["value"].get("approx").is_none());
}

#[test]
fn float_mode_is_tagged() {
    let v = json(&ggjet(&["asymptotics", "polylog", "--kappa", "1000", "--q", "1", "--mode", "float"]));
    let row = &v["rows"][0];
    assert_eq!(row["value"]["approx"], true);
    assert_eq!(row["predicted"]["approx"], true);
    let x = row["value"]["value"].as_f64().unwrap();
    assert!((x - 7.485470860550345).abs() < 1e-9);
}

#[test]
fn convergence_csv_columns() {
    let out = ggjet(&[
        "asymptotics",
        "leading-coefficient",
        "--n",
        "1",
        "--d",
        "5",
        "--kappa",
        "1",
        "--m-range",
        "3..5",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("parameter,exact_or_float,value_numerator,value_denominator,float_value,predicted,ratio"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..7], &["3", "exact", "10", "1", "", "10/1", "1/1"]);
}

#[test]
fn chi_routes_agree_on_cli() {
    // for a line bundle the conormal route and the closed form must give the same χ
    let a = json(&ggjet(&["chi", "--n", "2", "--d", "5", "--partition", "0", "--twist", "3"]));
    let b = json(&ggjet(&["cohomology", "--route", "line", "--n", "2", "--d", "5", "--twist", "3"]));
    assert_eq!(a["chi"], b["cohomology"]["chi"]);
}

#[test]
fn plucker_relations_vanish() {
    let v = json(&ggjet(&["plucker", "--n", "3", "--kappa", "4", "--points", "5"]));
    assert_eq!(v["all_vanish"], true);
    assert!(!v["relations"].as_array().unwrap().is_empty());
}

#[test]
fn config_file_sits_under_flags() {
    let cfg = tmp("sweep.cfg");
    std::fs::write(&cfg, "n = 3\nkappa = 2\nm = 4\n").unwrap();
    let v = json(&ggjet(&["rank", "--config", cfg.to_str().unwrap(), "--n", "2"]));
    std::fs::remove_file(&cfg).unwrap();
    let exp = gg_rank(&JetConfig::new(2, 2, 4).unwrap(), 100).unwrap();
    assert_eq!(v["rank"], exp.to_string());
}

#[test]
fn out_writes_file() {
    let path = tmp("out.csv");
    let out = ggjet(&["vanishing", "--n", "2", "--d", "7", "--size-range", "1..2", "--format", "csv", "--out",
        path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(text.lines().next(), Some("partition,size,threshold,vanishes"));
    assert_eq!(text.lines().count(), 1 + 3);
}
