//! The pieces of the interference covariance for each analytic method.
use headway_interference::analytic::{covariance, variance, Method, VarianceMethod};
use headway_interference::{NetworkGeometry, TimeLagWindow, TrafficModel};

fn main() {
    let geom = NetworkGeometry::new(150.0, 3.0, 10.0).unwrap();
    let traffic = TrafficModel::new(0.05, 4.0).unwrap();
    let w = TimeLagWindow::new(&traffic, &geom).unwrap();
    println!("λ = {}, c = {}, valid lags [{:.3}, {:.3}] s", traffic.lambda(), traffic.c(), w.t1, w.t2);
    for m in [VarianceMethod::ExactQuadrature, VarianceMethod::Approx, VarianceMethod::Ppp] {
        println!("Var[I] ({m:?}) = {:.5e}", variance(&traffic, &geom, m).unwrap());
    }
    println!("{:>6} {:>17} {:>12} {:>12} {:>12} {:>12} {:>12}", "t", "method", "J", "I>2c", "I<2c", "E²", "cov");
    for t in [1.0, 5.0, 15.0, 28.0] {
        for m in Method::ALL {
            let b = covariance(t, &traffic, &geom, m).unwrap();
            println!(
                "{t:>6} {:>17} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e}",
                m.tag(),
                b.j_term,
                b.i_gt2c,
                b.i_lt2c,
                b.mean_sq,
                b.covariance
            );
        }
    }
}
