use std::path::Path;
use std::process::{Command, Output};

use weyl_uncertainty::output::{OutputEnvelope, CSV_HEADER};

fn weyl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weyl-uncert"))
        .args(args)
        .env_remove("WEYL_UNCERT_MAX_NMAX")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines
        .next()
        .unwrap()
        .split(',')
        .position(|c| c == name)
        .unwrap();
    lines
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

fn argmin(xs: &[f64]) -> usize {
    (0..xs.len()).min_by(|&a, &b| xs[a].total_cmp(&xs[b])).unwrap()
}

#[test]
fn verify_suites_exit_zero() {
    let o = weyl(&["verify", "--suite", "spin", "--samples", "1000", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = weyl(&["verify", "--suite", "fock", "--samples", "100", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("-det G+/G-"));
    assert_eq!(weyl(&["verify", "--suite", "all", "--samples", "0"]).status.code(), Some(2));
}

#[test]
fn verify_output_is_deterministic() {
    let a = weyl(&["verify", "--suite", "fock", "--samples", "50", "--seed", "3"]);
    let b = weyl(&["verify", "--suite", "fock", "--samples", "50", "--seed", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn scan_phase_coherent_matches_fig1_equivalent() {
    let o = weyl(&[
        "scan", "--family", "phase-coherent", "--param", "xi", "--from", "0.01", "--to", "0.995", "--steps", "99",
        "--k", "1", "--phi-over-pi", "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = stdout(&o);
    assert_eq!(csv.lines().next(), Some(CSV_HEADER));
    assert_eq!(csv.lines().count(), 100);
    assert!(!csv.contains('\r'));
    let u = column(&csv, "U");
    let xi = column(&csv, "param");
    let i = argmin(&u);
    // (1 + t)^3 = 4 (1 - t) at t = |xi|^2 = 0.36466
    assert!((xi[i] * xi[i] - 0.36466).abs() < 0.01);
}

#[test]
fn scan_bessel_minimum() {
    let o = weyl(&[
        "scan", "--family", "bessel", "--param", "lambda", "--from", "0.1", "--to", "3", "--steps", "128", "--k",
        "1", "--phi-over-pi", "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    let lambda = column(&csv, "param");
    let i = argmin(&column(&csv, "U"));
    assert!((lambda[i] - 0.77).abs() < 0.02, "{}", lambda[i]);
}

#[test]
fn scan_number_rows_constant() {
    let o = weyl(&["scan", "--family", "number", "--param", "n", "--from", "0", "--to", "5", "--steps", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    for u in column(&csv, "U") {
        assert_eq!(u, 1.0);
    }
    for v in column(&csv, "V") {
        assert_eq!(v, 0.0);
    }
}

#[test]
fn scan_parse_error_reports_position() {
    let o = weyl(&["scan", "--family", "gaussian:nbar=400,q=1", "--param", "a", "--from", "0.01", "--to", "0.02", "--steps", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("byte 18"), "{}", stderr(&o));
}

#[test]
fn scan_truncation_cap_and_env_override() {
    let args = [
        "scan", "--family", "phase-coherent", "--param", "xi", "--from", "0.99", "--to", "0.999", "--steps", "2",
    ];
    let o = weyl(&args);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("WEYL_UNCERT_MAX_NMAX"));
    let o = Command::new(env!("CARGO_BIN_EXE_weyl-uncert"))
        .args(args)
        .env("WEYL_UNCERT_MAX_NMAX", "20000")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn scan_json_envelope() {
    let o = weyl(&[
        "scan", "--family", "bessel:lambda=1", "--param", "lambda", "--from", "0.5", "--to", "1", "--steps", "3",
        "--format", "json",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let env = OutputEnvelope::from_json(&stdout(&o)).unwrap();
    assert_eq!(env.schema_version, "1");
    assert_eq!(env.command, "scan");
    assert_eq!(env.parameters["steps"], 3);
    assert_eq!(env.payload["rows"].as_array().unwrap().len(), 3);
    assert_eq!(env.to_json().unwrap(), stdout(&o));
}

#[test]
fn figure_one_minimum_and_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig1.csv");
    let o = weyl(&["figure", "--id", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    let nbar = column(&csv, "nbar");
    let i = argmin(&column(&csv, "U"));
    assert!((0.5..=0.7).contains(&nbar[i]), "{}", nbar[i]);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    assert!(!Path::new(&format!("{}.tmp", path.display())).exists());
}

#[test]
fn figure_id_out_of_range() {
    assert_eq!(weyl(&["figure", "--id", "0"]).status.code(), Some(2));
    assert_eq!(weyl(&["figure", "--id", "5"]).status.code(), Some(2));
}

#[test]
fn extremum_example() {
    let o = weyl(&[
        "extremum", "--family", "phase-coherent", "--param", "xi", "--functional", "V", "--kind", "max", "--from",
        "0.05", "--to", "0.95",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let env = OutputEnvelope::from_json(&stdout(&o)).unwrap();
    let p = env.payload["param"].as_f64().unwrap();
    let v = env.payload["value"].as_f64().unwrap();
    assert!((p - 0.486).abs() < 0.001 && (v - 0.300).abs() < 0.001, "{p} {v}");
    assert_eq!(env.payload["kind"], "max");
    assert_eq!(env.payload["at_boundary"], false);
}

#[test]
fn extremum_boundary_is_flagged_not_an_error() {
    let o = weyl(&[
        "extremum", "--family", "phase-coherent", "--param", "xi", "--functional", "U", "--kind", "max", "--from",
        "0.2", "--to", "0.5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let env = OutputEnvelope::from_json(&stdout(&o)).unwrap();
    assert_eq!(env.payload["at_boundary"], true);
}

#[test]
fn qubit_report() {
    let o = weyl(&["qubit", "--sx", "0.7071", "--sy", "0", "--sz", "0.7071"]);
    assert_eq!(o.status.code(), Some(0));
    let env = OutputEnvelope::from_json(&stdout(&o)).unwrap();
    assert!((env.payload["u"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    assert!((env.payload["v"].as_f64().unwrap() - 0.5).abs() < 1e-3);
    assert!(env.notes[0].contains("i s_y"));
    assert_eq!(weyl(&["qubit", "--sx", "0.8", "--sy", "0.8", "--sz", "0"]).status.code(), Some(2));
    assert_eq!(weyl(&["qubit", "--sx", "-0.5", "--sy", "0", "--sz", "-0.5"]).status.code(), Some(0));
}

#[test]
fn help_lists_subcommands_and_grammar() {
    let o = weyl(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for cmd in ["verify", "scan", "figure", "extremum", "qubit"] {
        assert!(text.contains(cmd));
    }
    let o = weyl(&["scan", "--help"]);
    assert!(stdout(&o).contains("phase-coherent:xi,arg"));
}
