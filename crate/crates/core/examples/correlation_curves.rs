//! ρ(t) from every analytic method at two traffic intensities.
use headway_interference::analytic::{curve, Method};
use headway_interference::{NetworkGeometry, TimeLagWindow, TrafficModel};

fn main() {
    let geom = NetworkGeometry::new(150.0, 3.0, 10.0).unwrap();
    for lambda in [0.02, 0.05] {
        let traffic = TrafficModel::new(lambda, 4.0).unwrap();
        let w = TimeLagWindow::new(&traffic, &geom).unwrap();
        let grid: Vec<f64> = (0..=12).map(|k| w.t1 + (w.t2 - w.t1) * k as f64 / 12.0).collect();
        let curves: Vec<_> = Method::ALL.iter().map(|&m| curve(&grid, &traffic, &geom, m).unwrap()).collect();
        println!("λ = {lambda}, c = 4");
        print!("{:>8}", "t");
        for c in &curves {
            print!(" {:>17}", c.method.tag());
        }
        println!();
        for (i, t) in grid.iter().enumerate() {
            print!("{t:>8.3}");
            for c in &curves {
                print!(" {:>17.6}", c.values[i]);
            }
            println!();
        }
    }
}
