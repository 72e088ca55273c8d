//! Monte Carlo estimate of ρ(t) next to the pcf-approx curve.
//!
//! Usage: `cargo run --release --example monte_carlo -- [n_samples] [seed]`
use headway_interference::analytic::{rho, Method};
use headway_interference::sim::MonteCarlo;
use headway_interference::{NetworkGeometry, TrafficModel};

fn main() {
    let mut args = std::env::args().skip(1);
    let n: u64 = args.next().map_or(20_000, |s| s.parse().expect("n_samples"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mc = MonteCarlo::new(n, seed, threads).unwrap();
    let geom = NetworkGeometry::new(150.0, 3.0, 10.0).unwrap();
    let traffic = TrafficModel::new(0.05, 4.0).unwrap();
    println!("{:>5} {:>9} {:>9} {:>11} {:>12}", "t", "sim ρ", "se", "pcf-approx", "sim Var");
    for t in [1.0, 5.0, 10.0, 20.0, 28.0] {
        let e = mc.estimate(&traffic, &geom, t).unwrap();
        let a = rho(t, &traffic, &geom, Method::PcfApprox).unwrap();
        println!("{t:>5} {:>9.4} {:>9.4} {a:>11.4} {:>12.4e}", e.rho, e.se_rho, e.variance);
    }
}
