//! Normalized pair correlation ρ⁽²⁾(d)/(λμ) of the shifted-exponential
//! headway process against d/c.
use headway_interference::{pcf_normalized, TrafficModel};

fn main() {
    let loads = [0.08, 0.2, 0.5, 0.8];
    let models: Vec<TrafficModel> = loads.iter().map(|&lc| TrafficModel::new(lc / 4.0, 4.0).unwrap()).collect();
    print!("{:>6}", "d/c");
    for lc in loads {
        print!("  λc={lc:<6}");
    }
    println!();
    for i in 0..=32 {
        let x = 0.25 * i as f64;
        print!("{x:>6.2}");
        for m in &models {
            print!("  {:<9.5}", pcf_normalized(x, m).unwrap());
        }
        println!();
    }
    print!("{:>6}", "1−λc");
    for lc in loads {
        print!("  {:<9.5}", 1.0 - lc);
    }
    println!();
}
