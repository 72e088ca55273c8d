//! Empirical pair-distance density from sampled roads against the PCF.
use headway_interference::sim::{pair_distance_histogram, Window};
use headway_interference::{pcf, TrafficModel};

fn main() {
    let traffic = TrafficModel::new(0.05, 4.0).unwrap();
    let window = Window::new(-1000.0, 1000.0).unwrap();
    let h = pair_distance_histogram(&traffic, &window, 2_000, 20, 2.0, 3).unwrap();
    println!("{:>6} {:>12} {:>10} {:>12}", "d", "density", "se", "pcf(mid)");
    for k in 0..h.counts.len() {
        let d = h.bin_mid(k);
        println!("{d:>6} {:>12.4e} {:>10.2e} {:>12.4e}", h.density[k], h.stderr[k], pcf(d, &traffic).unwrap());
    }
}
