use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn convrad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_convrad"))
        .args(args)
        .env_remove("CONVRAD_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

/// Data rows of a CSV with `#` provenance lines, header dropped.
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn sphere_report_at_r_one() {
    let out = stdout(&convrad(&["radii", "--r", "1"]));
    let v: Value = serde_json::from_str(&out).unwrap();
    let rep = &v["report"];
    assert!((rep["conj"].as_f64().unwrap() - PI).abs() < 1e-5);
    assert!((rep["foc"].as_f64().unwrap() - FRAC_PI_2).abs() < 1e-5);
    assert_eq!(v["provenance"]["config"]["profile"]["kind"], "sphere");
    assert_eq!(v["provenance"]["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn cone_config_gives_the_developed_injectivity_radius() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "cone.toml", "[profile]\nkind = \"cone\"\nparams = { delta = 0.05 }\n");
    let out = stdout(&convrad(&["--config", &cfg, "radii", "--r", "2"]));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["report"]["inj"].as_f64().unwrap() - 1.993833).abs() < 1e-5);
    // defaults are written back into the embedded config
    assert_eq!(v["provenance"]["config"]["profile"]["params"]["r_cap"], 1e-3);
}

#[test]
fn gulliver_sweep_has_a_finite_focal_plateau() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "g.toml", "[profile]\nkind = \"gulliver\"\n");
    let csv = stdout(&convrad(&["--config", &cfg, "radii", "--sweep", "0:0.8:41"]));
    assert!(csv.starts_with("# convrad "));
    let foc: Vec<f64> = rows(&csv).iter().filter(|r| r[2] != "inf").map(|r| r[2].parse().unwrap()).collect();
    assert!(!foc.is_empty());
    assert!(foc.iter().all(|&f| f <= 2.0));
    assert_eq!(rows(&csv)[0][2], "inf");
}

#[test]
fn cut_locus_rows() {
    let sphere = stdout(&convrad(&["cutlocus", "--r", "0", "--n-psi", "8"]));
    for r in rows(&sphere) {
        assert!((r[1].parse::<f64>().unwrap() - PI).abs() < 1e-6, "{r:?}");
    }
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "p.toml", "[profile]\nkind = \"plane\"\n");
    let plane = stdout(&convrad(&["--config", &cfg, "cutlocus", "--r", "1", "--n-psi", "8"]));
    assert_eq!(rows(&plane).len(), 8);
    assert!(rows(&plane).iter().all(|r| r[1] == "inf"));
}

#[test]
fn outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        // identical command lines, including the output path position
        let o = convrad(&["cutlocus", "--r", "0.7", "--n-psi", "16", "--seed", "3", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    let (ta, tb) = (std::fs::read_to_string(&a).unwrap(), std::fs::read_to_string(&b).unwrap());
    let strip = |s: &str| s.lines().skip(2).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(&ta), strip(&tb));
    assert!(ta.lines().nth(1).unwrap().contains("\"seed\":3"));
}

#[test]
fn trace_and_profile_tables() {
    let csv = stdout(&convrad(&["trace", "--r", "1", "--psi", "1", "--length", "0.1", "--step", "0.05"]));
    let rs = rows(&csv);
    assert_eq!(rs.len(), 3);
    assert_eq!(rs[0][1].parse::<f64>().unwrap(), 1.0);
    let table = stdout(&convrad(&["profile", "--r1", "1", "--step", "0.5"]));
    let rs = rows(&table);
    assert_eq!(rs.len(), 3);
    assert!((rs[2][1].parse::<f64>().unwrap() - 1f64.sin()).abs() < 1e-9);
}

#[test]
fn verify_cone_suite_passes() {
    let o = convrad(&["verify", "cone"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["provenance"]["config"]["profile"]["kind"], "cone");
    assert_eq!(v["summary"]["non_vacuous_failures"], 0);
    assert!(v["records"].as_array().unwrap().iter().all(|r| r["claim"] == "cone-sharpness"));
}

#[test]
fn verify_writes_a_summary_table() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.csv");
    let o = convrad(&["verify", "radius-ordering", "--points", "2", "--summary", s.to_str().unwrap()]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(&s).unwrap();
    assert!(rows(&csv).iter().all(|r| r[0] == "radius-ordering" && r[3] == "pass"));
}

#[test]
fn exit_codes() {
    // a tolerance below the cut-decay resolution turns the sphere bound into failures
    let o = convrad(&["--tol", "1e-12", "verify", "convexity-bound", "--points", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(convrad(&["verify", "no-such-suite"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "bad.toml", "[profile]\nkind = \"cone\"\nparams = { delta = 2.0 }\n");
    assert_eq!(convrad(&["--config", &bad, "radii", "--r", "1"]).status.code(), Some(2));
    let typo = write_config(dir.path(), "typo.toml", "[profile]\nkind = \"cone\"\nparms = 1\n");
    let o = convrad(&["--config", &typo, "radii", "--r", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    let sphere = write_config(dir.path(), "s.toml", "[profile]\nkind = \"sphere\"\n");
    assert_eq!(convrad(&["--config", &sphere, "verify", "gulliver"]).status.code(), Some(2));
    assert_eq!(convrad(&["radii", "--r", "1", "--horizon", "-1"]).status.code(), Some(2));
    assert_eq!(convrad(&["radii", "--sweep", "1:0:3"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_convrad"))
        .args(["radii", "--r", "1"])
        .env("CONVRAD_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    // outside the domain of the sphere
    assert_eq!(convrad(&["trace", "--r", "4", "--psi", "0"]).status.code(), Some(3));
}
