//! Gauss hypergeometric and upper incomplete gamma values used by the
//! closed-form terms.
use headway_interference::specfun::{hyp2f1, upper_gamma};

fn main() {
    let eta = 3.0;
    println!("2F1(2η−1, η; 2η; z) for η = {eta}");
    for z in [0.0, -0.25, -0.5, -1.0, -1.5, -2.0, -2.1] {
        println!("  z = {z:>5}: {:.15}", hyp2f1(2.0 * eta - 1.0, eta, 2.0 * eta, z).unwrap());
    }
    println!("Γ(a, x), negative orders by recurrence");
    for (a, x) in [(-2.0, 1.0), (-2.5, 0.5), (-1.0, 4.0), (0.0, 1.0), (0.5, 2.0)] {
        println!("  Γ({a}, {x}) = {:.15e}", upper_gamma(a, x).unwrap());
    }
}
