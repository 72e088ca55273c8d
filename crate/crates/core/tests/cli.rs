use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_headway-corr"))
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("run.conf");
    fs::write(&path, body).unwrap();
    path
}

fn run(config: &Path, extra: &[&str]) -> Output {
    bin().arg("--config").arg(config).args(extra).output().unwrap()
}

const SMALL: &str = "\
r0 = 150
eta = 3
u = 10
t_lo = 0
t_hi = 30
t_points = 4
methods = ppp, expansion, pcf-approx, simulation
n_samples = 1000
seed = 7
n_partitions = 2
format = csv

[traffic]
lambda = 0.02
c = 4

[traffic]
lambda = 0.05
c = 4
";

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(run(&cfg, &["--out", a.to_str().unwrap()]).status.success());
    assert!(run(&cfg, &["--out", b.to_str().unwrap(), "--partitions", "1"]).status.success());
    for name in ["rho_ppp.csv", "rho_expansion.csv", "rho_pcf-approx.csv", "rho_simulation.csv", "manifest.json"] {
        let x = fs::read(a.join(name)).unwrap();
        let y = fs::read(b.join(name)).unwrap();
        if name == "manifest.json" {
            // records the partition count, which differs here
            continue;
        }
        assert_eq!(x, y, "{name}");
    }
    let c = dir.path().join("c");
    assert!(run(&cfg, &["--out", c.to_str().unwrap(), "--seed", "8"]).status.success());
    assert_ne!(fs::read(a.join("rho_simulation.csv")).unwrap(), fs::read(c.join("rho_simulation.csv")).unwrap());
}

#[test]
fn ppp_values_do_not_depend_on_intensity() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("ppp, expansion, pcf-approx, simulation", "ppp"));
    let out = dir.path().join("o");
    assert!(run(&cfg, &["--out", out.to_str().unwrap()]).status.success());
    let mut reader = csv::Reader::from_path(out.join("rho_ppp.csv")).unwrap();
    let headers = reader.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let (vi, li) = (col("value"), col("lambda"));
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    let by = |l: &str| rows.iter().filter(|r| &r[li] == l).map(|r| r[vi].to_string()).collect::<Vec<_>>();
    assert_eq!(by("0.02"), by("0.05"));
    assert_eq!(by("0.02").len(), 4);
}

#[test]
fn config_error_names_line_and_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("eta = 3", "eta = 1.5"));
    let out = run(&cfg, &["--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2") && err.contains("eta"), "{err}");
    assert!(!dir.path().join("o").exists());

    let missing = run(&dir.path().join("nope.conf"), &[]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn json_output_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SMALL.replace("ppp, expansion, pcf-approx, simulation", "expansion"));
    let out = dir.path().join("o");
    let res = run(&cfg, &["--out", out.to_str().unwrap(), "--format", "json"]);
    assert!(res.status.success());
    let rows: serde_json::Value = serde_json::from_slice(&fs::read(out.join("rho_expansion.json")).unwrap()).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 8);
    // t = 0 lies below t1, so the expansion has no value there
    assert_eq!(rows[0]["valid"], false);
    assert!(rows[0]["value"].is_null());
    assert!(rows[1]["value"].as_f64().unwrap() > 0.0);
    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["format"], "json");
    assert_eq!(manifest["files"][0]["valid"][0], false);
}

#[test]
fn fig2_writes_normalized_pcf() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL);
    let out = dir.path().join("o");
    let res = run(&cfg, &["--out", out.to_str().unwrap(), "--fig2"]);
    assert!(res.status.success());
    let mut reader = csv::Reader::from_path(out.join("pcf_normalized.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1600);
    let first: f64 = rows[0][1].parse().unwrap();
    let tail: f64 = rows[799][1].parse().unwrap();
    assert_eq!(first, 0.0);
    assert!((tail - 0.92).abs() < 1e-3, "{tail}");

    let poisson = write_config(dir.path(), &SMALL.replace("c = 4", "c = 0"));
    assert_eq!(run(&poisson, &["--out", out.to_str().unwrap(), "--fig2"]).status.code(), Some(1));
}
