mod common;

use common::{midpoint, rel, simpson, simpson_to_infinity};
use headway_interference::analytic::{i_gt2c_exact, i_lt2c_numeric};
use headway_interference::specfun::{hyp2f1, upper_gamma, QuadratureSpec};
use headway_interference::{mean_interference, pathloss, pcf, NetworkGeometry, TrafficModel};

fn geom() -> NetworkGeometry {
    NetworkGeometry::new(150.0, 3.0, 10.0).unwrap()
}

#[test]
fn mean_interference_matches_quadrature() {
    let g = geom();
    for (lambda, c) in [(0.05, 4.0), (0.02, 0.0), (0.1, 2.0)] {
        let t = TrafficModel::new(lambda, c).unwrap();
        let oracle = 2.0 * lambda * simpson_to_infinity(|r| r.powf(-g.eta()), g.r0(), 10_000);
        assert!(rel(mean_interference(&t, &g), oracle) < 1e-10);
    }
    assert!(rel(mean_interference(&TrafficModel::new(0.05, 4.0).unwrap(), &g), 2.2222222e-6) < 1e-7);
}

/// Midpoint sum of `f` over `[a, b]` on `n` cells in total, with cells
/// aligned to the jump points `cuts`.
fn midpoint_split<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cuts: &[f64], n: usize) -> f64 {
    let mut pts: Vec<f64> = cuts.iter().copied().filter(|&p| p > a && p < b).collect();
    pts.extend([a, b]);
    pts.sort_by(f64::total_cmp);
    pts.windows(2)
        .map(|w| {
            let k = ((w[1] - w[0]) / (b - a) * n as f64).ceil() as usize;
            midpoint(&f, w[0], w[1], k.max(1))
        })
        .sum()
}

#[test]
fn near_band_matches_riemann_sum() {
    // ∫_{|x|>r0} g(x) ∫_{c<|d|<2c} λμ e^{−μ(|d|−c)} g(x + d + tu) dd dx on a
    // 10⁴ × 10³ grid; outer x = ±r0/s, inner cells split where g jumps
    let g = geom();
    let t = TrafficModel::new(0.05, 4.0).unwrap();
    let (lambda, mu, c, r0) = (t.lambda(), t.mu(), t.c(), g.r0());
    let lag = 1.0;
    let shift = lag * g.u();
    let inner = |x: f64| {
        let y = x + shift;
        let band = |d: f64| lambda * mu * (-mu * (d - c)).exp() * (pathloss(y + d, &g) + pathloss(y - d, &g));
        midpoint_split(band, c, 2.0 * c, &[r0 - y, -r0 - y, y - r0, y + r0], 1_000)
    };
    let outer = |sign: f64| midpoint(|s| r0 / (s * s) * pathloss(sign * r0 / s, &g) * inner(sign * r0 / s), 0.0, 1.0, 10_000);
    let oracle = outer(1.0) + outer(-1.0);
    let lib = i_lt2c_numeric(lag, &t, &g, &QuadratureSpec::default()).unwrap();
    assert!(rel(lib, oracle) < 1e-6, "{lib} vs {oracle}");
}

#[test]
fn far_term_matches_simpson() {
    // λ² ∫_{|x|>r0} g(x) ∫_{|y|>2c} g(x + y + tu) dy dx, the inner integral
    // taken as the whole-line gain minus the ±2c band
    let g = geom();
    let t = TrafficModel::new(0.05, 4.0).unwrap();
    let (eta, r0, c) = (g.eta(), g.r0(), t.c());
    let s = 5.0 * g.u();
    let gain = |z: f64| if z.abs() > r0 { z.abs().powf(-eta) } else { 0.0 };
    let whole_line = 2.0 * r0.powf(1.0 - eta) / (eta - 1.0);
    let beyond_band = |x: f64| {
        let (lo, hi) = (x + s - 2.0 * c, x + s + 2.0 * c);
        let mut pts: Vec<f64> = [lo, -r0, r0, hi].into_iter().filter(|&p| p >= lo && p <= hi).collect();
        pts.sort_by(f64::total_cmp);
        whole_line - pts.windows(2).map(|w| simpson(gain, w[0], w[1], 2_000)).sum::<f64>()
    };
    let right = simpson_to_infinity(|x| x.powf(-eta) * beyond_band(x), r0, 4_000);
    let left = simpson_to_infinity(|x| x.powf(-eta) * beyond_band(-x), r0, 4_000);
    let oracle = t.lambda().powi(2) * (right + left);
    let lib = i_gt2c_exact(5.0, &t, &g).unwrap();
    assert!(rel(lib, oracle) < 1e-6, "{lib} vs {oracle}");
}

#[test]
fn upper_gamma_negative_order_matches_quadrature() {
    for (a, x) in [(-2.0, 1.0), (-0.5, 0.3), (-3.5, 2.0), (1.5, 0.7)] {
        let oracle = simpson_to_infinity(|s: f64| s.powf(a - 1.0) * (-s).exp(), x, 200_000);
        assert!(rel(upper_gamma(a, x).unwrap(), oracle) < 1e-9, "a={a} x={x}");
    }
    // Γ(−2, 1) = E₁(1) / 2 by the recurrence, E₁(1) = 0.21938393439552027
    assert!(rel(upper_gamma(-2.0, 1.0).unwrap(), 0.219_383_934_395_520_27 / 2.0) < 1e-12);
}

#[test]
fn hyp2f1_derivative_identity() {
    // d/dz 2F1(a,b;c;z) = ab/c 2F1(a+1,b+1;c+1;z)
    let h = 1e-5;
    for (a, b, c, z) in [(5.0, 3.0, 6.0, -0.4), (4.0, 3.0, 5.0, -1.5), (6.0, 4.0, 7.0, -2.05), (3.2, 2.2, 4.4, 0.3)] {
        let fd = (hyp2f1(a, b, c, z + h).unwrap() - hyp2f1(a, b, c, z - h).unwrap()) / (2.0 * h);
        let exact = a * b / c * hyp2f1(a + 1.0, b + 1.0, c + 1.0, z).unwrap();
        assert!(rel(fd, exact) < 1e-7, "{fd} vs {exact}");
    }
}

#[test]
fn hyp2f1_pfaff_consistency() {
    // 2F1(a,b;c;z) = (1−z)^{−b} 2F1(c−a, b; c; z/(z−1))
    for (a, b, c, z) in [(5.0, 3.0, 6.0, -0.4), (4.0, 3.0, 5.0, -1.5), (2.5, 1.25, 3.5, -2.1), (7.0, 4.0, 8.0, 0.45)] {
        let lhs = hyp2f1(a, b, c, z).unwrap();
        let rhs = (1.0 - z).powf(-b) * hyp2f1(c - a, b, c, z / (z - 1.0)).unwrap();
        assert!(rel(lhs, rhs) < 1e-12, "{lhs} vs {rhs}");
    }
}

#[test]
fn pcf_reference_values() {
    let t = TrafficModel::new(0.05, 4.0).unwrap();
    assert!((t.mu() - 0.0625).abs() < 1e-15);
    assert!(rel(pcf(4.0 + 1e-12, &t).unwrap(), 0.05 * 0.0625) < 1e-9);
    assert_eq!(pcf(3.999, &t).unwrap(), 0.0);
    // far field settles at λ²
    assert!(rel(pcf(400.0, &t).unwrap(), 0.0025) < 1e-9);
}

#[test]
fn pathloss_reference_values() {
    let g = geom();
    assert_eq!(pathloss(150.0, &g), 0.0);
    assert_eq!(pathloss(-149.0, &g), 0.0);
    assert!(rel(pathloss(300.0, &g), 3.7037037037e-8) < 1e-10);
    assert_eq!(pathloss(-300.0, &g), pathloss(300.0, &g));
}
