//! Flat `key = value` run configuration.
//!
//! ```text
//! r0 = 150
//! eta = 3
//! u = 10
//! t_lo = 0
//! t_hi = 30
//! t_points = 31
//! methods = ppp, expansion, pcf-approx, simulation
//!
//! [traffic]
//! lambda = 0.02
//! c = 4
//! ```
//!
//! Run-wide keys come first; each `[traffic]` line opens a block holding
//! exactly `lambda` and `c`. `#` starts a comment.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::analytic::Method;
use crate::model::{NetworkGeometry, TrafficModel};

/// A problem in the configuration text. `line` is 1-based; 0 means the
/// problem is with the file as a whole (a missing key, say).
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}field `{field}`: {message}", if *.line > 0 { format!("line {}, ", .line) } else { String::new() })]
pub struct ConfigError {
    pub line: usize,
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(line: usize, field: &str, message: impl Into<String>) -> Self {
        ConfigError {
            line,
            field: field.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("expected csv or json, got `{other}`")),
        }
    }
}

/// One output series: an analytic method or the Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMethod {
    Analytic(Method),
    Simulation,
}

impl RunMethod {
    pub fn tag(self) -> &'static str {
        match self {
            RunMethod::Analytic(m) => m.tag(),
            RunMethod::Simulation => "simulation",
        }
    }

    pub fn from_tag(tag: &str) -> Option<RunMethod> {
        if tag == "simulation" {
            return Some(RunMethod::Simulation);
        }
        Method::from_tag(tag).map(RunMethod::Analytic)
    }
}

/// `points` evenly spaced lags from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl TimeGrid {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| if i + 1 == self.points { self.hi } else { self.lo + i as f64 * step })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub traffic: Vec<TrafficModel>,
    pub geometry: NetworkGeometry,
    pub t_grid: TimeGrid,
    pub methods: Vec<RunMethod>,
    pub n_samples: u64,
    pub seed: u64,
    pub n_partitions: usize,
    pub out: PathBuf,
    pub format: Format,
}

pub const DEFAULT_SAMPLES: u64 = 100_000;
const MIN_SAMPLES: u64 = 1_000;

const RUN_KEYS: [&str; 12] = [
    "r0", "eta", "u", "t_lo", "t_hi", "t_points", "methods", "n_samples", "seed", "n_partitions", "out", "format",
];

struct Entry {
    line: usize,
    value: String,
}

/// Attributes a model error to the first entry its message names, else the
/// last entry.
fn blame(message: String, entries: &[(&str, &Entry)]) -> ConfigError {
    let (key, e) = entries
        .iter()
        .find(|(k, _)| message.contains(&format!(" {k} must")) || message.contains(&format!(": {k} must")))
        .unwrap_or(&entries[entries.len() - 1]);
    ConfigError::new(e.line, key, message)
}

fn parse_value<T: FromStr>(e: &Entry, field: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    e.value
        .parse()
        .map_err(|err| ConfigError::new(e.line, field, format!("cannot parse `{}`: {err}", e.value)))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
        let mut run: Vec<(String, Entry)> = Vec::new();
        // (header line, lambda, c)
        let mut blocks: Vec<(usize, Option<Entry>, Option<Entry>)> = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if content.starts_with('[') {
                if content != "[traffic]" {
                    return Err(ConfigError::new(line, content, "unknown section; only [traffic] is allowed"));
                }
                blocks.push((line, None, None));
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::new(line, content, "expected `key = value`"));
            };
            let (key, value) = (key.trim(), value.trim().to_string());
            if value.is_empty() {
                return Err(ConfigError::new(line, key, "empty value"));
            }
            let entry = Entry { line, value };
            match blocks.last_mut() {
                Some((_, lambda, c)) => {
                    let slot = match key {
                        "lambda" => lambda,
                        "c" => c,
                        _ => {
                            let hint = if RUN_KEYS.contains(&key) { "; run-wide keys go before the first [traffic]" } else { "" };
                            return Err(ConfigError::new(line, key, format!("not a traffic key (expected lambda or c){hint}")));
                        }
                    };
                    if slot.is_some() {
                        return Err(ConfigError::new(line, key, "given twice in this [traffic] block"));
                    }
                    *slot = Some(entry);
                }
                None => {
                    if !RUN_KEYS.contains(&key) {
                        return Err(ConfigError::new(line, key, "unknown key"));
                    }
                    if run.iter().any(|(k, _)| k == key) {
                        return Err(ConfigError::new(line, key, "given twice"));
                    }
                    run.push((key.to_string(), entry));
                }
            }
        }

        let get = |key: &str| run.iter().find(|(k, _)| k == key).map(|(_, e)| e);
        let require = |key: &str| get(key).ok_or_else(|| ConfigError::new(0, key, "missing"));

        let r0 = require("r0")?;
        let eta = require("eta")?;
        let u = require("u")?;
        let geometry = NetworkGeometry::new(parse_value(r0, "r0")?, parse_value(eta, "eta")?, parse_value(u, "u")?)
            .map_err(|e| blame(e.to_string(), &[("r0", r0), ("eta", eta), ("u", u)]))?;

        let t_lo = require("t_lo")?;
        let t_hi = require("t_hi")?;
        let t_points = require("t_points")?;
        let t_grid = TimeGrid {
            lo: parse_value(t_lo, "t_lo")?,
            hi: parse_value(t_hi, "t_hi")?,
            points: parse_value(t_points, "t_points")?,
        };
        if t_grid.points == 0 {
            return Err(ConfigError::new(t_points.line, "t_points", "grid must be nonempty"));
        }
        if !(t_grid.lo.is_finite() && t_grid.lo >= 0.0) {
            return Err(ConfigError::new(t_lo.line, "t_lo", "must be a finite lag >= 0"));
        }
        if !(t_grid.hi.is_finite() && t_grid.hi >= t_grid.lo) || (t_grid.points > 1 && t_grid.hi == t_grid.lo) {
            return Err(ConfigError::new(t_hi.line, "t_hi", "must exceed t_lo (or equal it with t_points = 1)"));
        }

        let m = require("methods")?;
        let mut methods = Vec::new();
        for tag in m.value.split(',').map(str::trim) {
            let method = RunMethod::from_tag(tag).ok_or_else(|| {
                ConfigError::new(
                    m.line,
                    "methods",
                    format!("unknown method `{tag}` (expected exact-quadrature, pcf-approx, expansion, ppp or simulation)"),
                )
            })?;
            if methods.contains(&method) {
                return Err(ConfigError::new(m.line, "methods", format!("`{tag}` listed twice")));
            }
            methods.push(method);
        }

        let n_samples = get("n_samples").map(|e| parse_value(e, "n_samples")).transpose()?.unwrap_or(DEFAULT_SAMPLES);
        if methods.contains(&RunMethod::Simulation) && n_samples < MIN_SAMPLES {
            let line = get("n_samples").map_or(m.line, |e| e.line);
            return Err(ConfigError::new(line, "n_samples", format!("simulation needs at least {MIN_SAMPLES} samples")));
        }
        let seed = get("seed").map(|e| parse_value(e, "seed")).transpose()?.unwrap_or(0);
        let n_partitions = get("n_partitions").map(|e| parse_value(e, "n_partitions")).transpose()?.unwrap_or(1);
        if n_partitions == 0 {
            return Err(ConfigError::new(get("n_partitions").map_or(0, |e| e.line), "n_partitions", "must be >= 1"));
        }
        let out = get("out").map_or_else(|| PathBuf::from("out"), |e| PathBuf::from(&e.value));
        let format = get("format").map(|e| parse_value(e, "format")).transpose()?.unwrap_or(Format::Csv);

        if blocks.is_empty() {
            return Err(ConfigError::new(0, "[traffic]", "at least one traffic block is required"));
        }
        let mut traffic = Vec::new();
        for (header, lambda, c) in blocks {
            let lambda = lambda.ok_or_else(|| ConfigError::new(header, "lambda", "missing in [traffic] block"))?;
            let c = c.ok_or_else(|| ConfigError::new(header, "c", "missing in [traffic] block"))?;
            let model = TrafficModel::new(parse_value(&lambda, "lambda")?, parse_value(&c, "c")?)
                .map_err(|e| blame(e.to_string(), &[("c", &c), ("lambda", &lambda)]))?;
            traffic.push(model);
        }

        Ok(RunConfig {
            traffic,
            geometry,
            t_grid,
            methods,
            n_samples,
            seed,
            n_partitions,
            out,
            format,
        })
    }

    /// Canonical text form; `parse(to_text())` gives back the same config.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let g = &self.geometry;
        let methods: Vec<&str> = self.methods.iter().map(|m| m.tag()).collect();
        // writing to a String cannot fail
        let _ = writeln!(s, "r0 = {}\neta = {}\nu = {}", g.r0(), g.eta(), g.u());
        let _ = writeln!(s, "t_lo = {}\nt_hi = {}\nt_points = {}", self.t_grid.lo, self.t_grid.hi, self.t_grid.points);
        let _ = writeln!(s, "methods = {}", methods.join(", "));
        let _ = writeln!(s, "n_samples = {}\nseed = {}\nn_partitions = {}", self.n_samples, self.seed, self.n_partitions);
        let _ = writeln!(s, "out = {}\nformat = {}", self.out.display(), self.format.extension());
        for t in &self.traffic {
            let _ = writeln!(s, "\n[traffic]\nlambda = {}\nc = {}", t.lambda(), t.c());
        }
        s
    }
}
