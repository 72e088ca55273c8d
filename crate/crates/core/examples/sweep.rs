//! A small configured sweep written to disk, as the binary would.
//!
//! Usage: `cargo run --release --example sweep -- [out_dir]`
use headway_interference::cli::{run, RunConfig};

const CONFIG: &str = "\
r0 = 150
eta = 3
u = 10
t_lo = 0
t_hi = 30
t_points = 7
methods = ppp, pcf-approx, simulation
n_samples = 5000
seed = 11
n_partitions = 2
out = out/sweep
format = csv

[traffic]
lambda = 0.05
c = 4
";

fn main() {
    let mut cfg = RunConfig::parse(CONFIG).unwrap();
    if let Some(dir) = std::env::args().nth(1) {
        cfg.out = dir.into();
    }
    let report = run(&cfg).unwrap();
    for s in &report.series {
        println!("{}", s.method);
        for r in &s.rows {
            let v = r.value.map_or("-".to_string(), |v| format!("{v:.4}"));
            println!("  t = {:>4}  {v}", r.t);
        }
    }
    for f in &report.files {
        println!("wrote {}", f.display());
    }
}
