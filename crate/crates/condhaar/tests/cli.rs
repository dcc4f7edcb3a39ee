use std::process::{Command, Output};

use condhaar::experiments::registry;
use condhaar::report::ExperimentReport;

fn condhaar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_condhaar")).args(args).output().expect("binary runs")
}

fn reports(out: &Output) -> Vec<ExperimentReport> {
    serde_json::from_slice(&out.stdout).expect("JSON array of reports")
}

fn stat(r: &ExperimentReport, name: &str) -> f64 {
    r.statistics.iter().find(|s| s.name == name).unwrap_or_else(|| panic!("no statistic {name}")).value
}

#[test]
fn list_prints_every_id_with_an_anchor() {
    let out = condhaar(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for e in registry() {
        let line = text.lines().find(|l| l.starts_with(&format!("{}\t", e.id))).expect("listed");
        assert!(line.split('\t').nth(2).is_some_and(|a| !a.is_empty()));
    }
}

#[test]
fn unknown_id_is_a_usage_error() {
    let out = condhaar(&["verify", "unknown"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown"));
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(condhaar(&["verify", "det_identity", "--bogus"]).status.code(), Some(2));
    assert_eq!(condhaar(&["verify", "det_identity", "--n", "x"]).status.code(), Some(2));
    assert_eq!(condhaar(&["verify", "det_identity", "--p", "2"]).status.code(), Some(2));
    assert_eq!(condhaar(&["verify"]).status.code(), Some(2));
    assert_eq!(condhaar(&["sample", "--group", "sun"]).status.code(), Some(2));
    assert_eq!(condhaar(&["sample", "--format", "xml"]).status.code(), Some(2));
}

#[test]
fn identity_check_at_n6() {
    let out = condhaar(&["verify", "det_identity", "--n", "6", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = &reports(&out)[0];
    assert!(r.pass);
    assert!(stat(r, "max_deviation_n6") <= 6e-9);
}

#[test]
fn route_equivalence_at_n8_p1() {
    let out = condhaar(&["verify", "route_equivalence", "--n", "8", "--p", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = &reports(&out)[0];
    assert!(stat(r, "p1_abs_z_ks_p") > 0.01);
}

#[test]
fn sample_csv_has_header_and_rows() {
    let out = condhaar(&["sample", "--group", "unitary-conditional", "--n", "8", "--p", "2", "--count", "1000", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("re_z,im_z"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 1000);
    for row in rows {
        let v: Vec<f64> = row.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(v.len(), 2);
    }
}

#[test]
fn sample_other_groups() {
    for (group, header) in [("so", "det_plus,det_minus"), ("usp", "det_plus,det_minus"), ("jacobi", "det_plus,det_minus")] {
        let out = condhaar(&["sample", "--group", group, "--n", "4", "--count", "10", "--format", "csv"]);
        assert_eq!(out.status.code(), Some(0), "{group}");
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(text.lines().next(), Some(header));
        assert_eq!(text.lines().count(), 11);
    }
    let out = condhaar(&["sample", "--group", "orthogonal-conditional", "--n", "3", "--p", "1", "--count", "2"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v[1]["re"].as_array().unwrap().len(), 9);
}

#[test]
fn out_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = condhaar(&["verify", "jacobi_one_level", "--count", "2000", "--out", path.to_str().unwrap()]);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let parsed: Vec<ExperimentReport> = serde_json::from_str(&text).unwrap();
    assert_eq!(parsed[0].experiment_id, "jacobi_one_level");
    assert_eq!(parsed[0].schema, 1);
    assert_eq!(out.status.code(), Some(if parsed[0].pass { 0 } else { 1 }));
    let again = serde_json::to_string_pretty(&parsed).unwrap();
    assert_eq!(again.trim_end(), text.trim_end());
}

#[test]
fn density_so_slope_near_three_halves() {
    let out = condhaar(&["density", "--group", "so", "--p", "1", "--count", "1000000"]);
    let r = &reports(&out)[0];
    let slope = stat(r, "so_n4_p1_slope");
    assert!((slope - 1.5).abs() <= 0.15, "slope {slope}");
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn failing_verification_exits_one() {
    // The det⁻ variance ratio sits near 1.5 at this n.
    let out = condhaar(&["verify", "clt_so", "--n", "10000", "--count", "1000", "--no-timing"]);
    let r = &reports(&out)[0];
    assert!(!r.pass);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(r.runtime_ms, 0);
}

#[test]
fn csv_report_format() {
    let out = condhaar(&["verify", "det_identity", "--n", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("experiment_id,seed,statistic,value,stderr,threshold,lo,hi,passed\n"));
    assert!(text.contains("det_identity,7,max_deviation_n3,"));
}
