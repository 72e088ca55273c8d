//! Sweep driver behind the `headway-corr` binary: reads a [`RunConfig`],
//! evaluates every traffic × method × lag cell and writes one curve file per
//! method plus a manifest.
//!
//! Exit codes: 0 ok, 1 configuration or I/O error, 2 numeric failure.

mod config;

pub use config::{ConfigError, Format, RunConfig, RunMethod, TimeGrid, DEFAULT_SAMPLES};

use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Serialize;
use thiserror::Error;

use crate::analytic::{rho, AnalyticError};
use crate::model::{pcf_normalized, NetworkGeometry, TrafficModel};
use crate::sim::{MonteCarlo, SimError};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Config { path: String, source: ConfigError },
    #[error("{0}")]
    Io(String),
    #[error("numeric failure for {method} at t = {t} s: {source}")]
    Numeric {
        method: &'static str,
        t: f64,
        source: AnalyticError,
    },
    #[error("simulation failed at t = {t} s: {source}")]
    Simulation { t: f64, source: SimError },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Io(_) => 1,
            CliError::Numeric { .. } | CliError::Simulation { .. } => 2,
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Command-line flags; values given here override the configuration file.
#[derive(Debug, Clone, Parser)]
#[command(name = "headway-corr", version, about = "Temporal interference correlation on a road with shifted-exponential headways")]
pub struct Args {
    /// Run configuration (flat key = value with [traffic] blocks)
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Output directory
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Monte Carlo seed
    #[arg(long, value_name = "N")]
    pub seed: Option<u64>,
    /// Worker threads for the Monte Carlo runs
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    pub partitions: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Write the normalized pair correlation curves instead of a sweep
    #[arg(long)]
    pub fig2: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

impl Args {
    /// Reads the configuration file and applies the overriding flags.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let path = self.config.display().to_string();
        let text = fs::read_to_string(&self.config).map_err(|e| io_err(&self.config, e))?;
        let mut cfg = RunConfig::parse(&text).map_err(|source| CliError::Config { path, source })?;
        if let Some(out) = &self.out {
            cfg.out = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(p) = self.partitions {
            cfg.n_partitions = p as usize;
        }
        if let Some(f) = self.format {
            cfg.format = match f {
                FormatArg::Csv => Format::Csv,
                FormatArg::Json => Format::Json,
            };
        }
        Ok(cfg)
    }
}

/// Runs the binary's logic and returns its exit code, reporting errors on
/// stderr.
pub fn execute(args: &Args) -> i32 {
    let result = args.resolve().and_then(|cfg| {
        if args.fig2 {
            fig2(&cfg).map(|p| vec![p])
        } else {
            run(&cfg).map(|r| r.files)
        }
    });
    match result {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// One output row. `value` is empty for lags outside the method's domain;
/// `stderr` is empty for analytic methods.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub t: f64,
    pub value: Option<f64>,
    pub stderr: Option<f64>,
    pub method: &'static str,
    pub lambda: f64,
    pub c: f64,
    pub r0: f64,
    pub eta: f64,
    pub u: f64,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Series {
    pub method: &'static str,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub series: Vec<Series>,
    /// Written paths, manifest last.
    pub files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct ManifestFile<'a> {
    path: String,
    method: &'a str,
    rows: usize,
    valid: Vec<bool>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'a str,
    version: &'a str,
    seed: u64,
    n_samples: u64,
    n_partitions: usize,
    format: Format,
    /// Canonical configuration; feeding it back reproduces the run.
    config: String,
    files: Vec<ManifestFile<'a>>,
}

fn row(t: f64, method: &'static str, traffic: &TrafficModel, geom: &NetworkGeometry) -> Row {
    Row {
        t,
        value: None,
        stderr: None,
        method,
        lambda: traffic.lambda(),
        c: traffic.c(),
        r0: geom.r0(),
        eta: geom.eta(),
        u: geom.u(),
        valid: false,
    }
}

/// Evaluates every traffic × method × lag cell; no files are touched.
pub fn evaluate(cfg: &RunConfig) -> Result<Vec<Series>, CliError> {
    let grid = cfg.t_grid.values();
    let geom = &cfg.geometry;
    let mut out = Vec::new();
    for &method in &cfg.methods {
        let tag = method.tag();
        let mut rows = Vec::new();
        for traffic in &cfg.traffic {
            for &t in &grid {
                let mut r = row(t, tag, traffic, geom);
                match method {
                    RunMethod::Analytic(m) => match rho(t, traffic, geom, m) {
                        Ok(v) => {
                            r.value = Some(v);
                            r.valid = true;
                        }
                        Err(e) if e.is_domain() => {}
                        Err(source) => return Err(CliError::Numeric { method: tag, t, source }),
                    },
                    RunMethod::Simulation => {
                        let mc = MonteCarlo::new(cfg.n_samples, cfg.seed, cfg.n_partitions)
                            .map_err(|source| CliError::Simulation { t, source })?;
                        let e = mc.estimate(traffic, geom, t).map_err(|source| CliError::Simulation { t, source })?;
                        r.value = Some(e.rho);
                        r.stderr = Some(e.se_rho);
                        r.valid = true;
                    }
                }
                rows.push(r);
            }
        }
        out.push(Series { method: tag, rows });
    }
    Ok(out)
}

fn encode_rows<T: Serialize>(rows: &[T], format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
            }
            w.into_inner().map_err(|e| CliError::Io(e.to_string()))
        }
        Format::Json => {
            let mut v = serde_json::to_vec_pretty(rows).map_err(|e| CliError::Io(e.to_string()))?;
            v.push(b'\n');
            Ok(v)
        }
    }
}

/// Writes through a temporary file and a rename, so a reader never sees a
/// partial file.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

/// Evaluates the sweep, then writes `rho_<method>.<ext>` for each method and
/// `manifest.json`. Nothing is written if any cell fails.
pub fn run(cfg: &RunConfig) -> Result<RunReport, CliError> {
    let series = evaluate(cfg)?;
    fs::create_dir_all(&cfg.out).map_err(|e| io_err(&cfg.out, e))?;
    let mut encoded = Vec::new();
    for s in &series {
        let name = format!("rho_{}.{}", s.method, cfg.format.extension());
        encoded.push((name, encode_rows(&s.rows, cfg.format)?));
    }
    let manifest = Manifest {
        tool: "headway-corr",
        version: env!("CARGO_PKG_VERSION"),
        seed: cfg.seed,
        n_samples: cfg.n_samples,
        n_partitions: cfg.n_partitions,
        format: cfg.format,
        config: cfg.to_text(),
        files: series
            .iter()
            .zip(&encoded)
            .map(|(s, (name, _))| ManifestFile {
                path: name.clone(),
                method: s.method,
                rows: s.rows.len(),
                valid: s.rows.iter().map(|r| r.valid).collect(),
            })
            .collect(),
    };
    let mut manifest_bytes = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
    manifest_bytes.push(b'\n');
    encoded.push(("manifest.json".to_string(), manifest_bytes));

    let mut files = Vec::new();
    for (name, bytes) in &encoded {
        let path = cfg.out.join(name);
        write_atomic(&path, bytes)?;
        files.push(path);
    }
    Ok(RunReport { series, files })
}

/// Points per tracking distance in the normalized PCF curves.
pub const FIG2_RESOLUTION: usize = 100;
/// Largest normalized distance `d/c` in the curves.
pub const FIG2_EXTENT: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcfRow {
    pub d_over_c: f64,
    pub value: f64,
    pub asymptote: f64,
    pub lambda: f64,
    pub c: f64,
}

/// Normalized PCF `ρ⁽²⁾(d)/(λμ)` on `d/c ∈ (0, 8]` for each traffic block,
/// next to its far-field level `1 − λc`.
pub fn pcf_curves(traffic: &[TrafficModel]) -> Result<Vec<PcfRow>, ConfigError> {
    let mut rows = Vec::new();
    for (k, t) in traffic.iter().enumerate() {
        if t.is_poisson() {
            return Err(ConfigError {
                line: 0,
                field: "c".into(),
                message: format!("traffic block {} has c = 0; the normalized PCF needs c > 0", k + 1),
            });
        }
        for i in 1..=FIG2_RESOLUTION * FIG2_EXTENT {
            let x = i as f64 / FIG2_RESOLUTION as f64;
            rows.push(PcfRow {
                d_over_c: x,
                value: pcf_normalized(x, t).expect("c > 0 checked above"),
                asymptote: 1.0 - t.load(),
                lambda: t.lambda(),
                c: t.c(),
            });
        }
    }
    Ok(rows)
}

/// Writes `pcf_normalized.<ext>` for the configured traffic.
pub fn fig2(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let rows = pcf_curves(&cfg.traffic).map_err(|source| CliError::Config {
        path: "config".into(),
        source,
    })?;
    fs::create_dir_all(&cfg.out).map_err(|e| io_err(&cfg.out, e))?;
    let path = cfg.out.join(format!("pcf_normalized.{}", cfg.format.extension()));
    write_atomic(&path, &encode_rows(&rows, cfg.format)?)?;
    Ok(path)
}
