//! Thresholded interaction graphs against Erdos-Renyi graphs with the
//! matched edge probability.

use viralwalk::harness::bridge_max_z;
use viralwalk::igraph::threshold;
use viralwalk::theory::{sample_er, sample_lambda, TheoryParams};
use viralwalk::InfectiousPeriod;

fn main() -> viralwalk::Result<()> {
    let (n, r, k, rho) = (5000, 3, 40, 1.0);
    let xi = InfectiousPeriod::Finite(viralwalk::theory::xi_for_phi(2.0, k, n, r, rho)?);
    let t = TheoryParams::new(n, r, k, rho, xi);
    println!(
        "xi={xi} q={:.3e} q_hat={:.4} phi={:.4} C={:.4}",
        t.q,
        t.q_hat,
        t.phi_threshold,
        t.giant_fraction.unwrap()
    );

    let samples = 2000;
    let mut from_lambda = 0;
    let mut from_er = 0;
    for s in 0..samples {
        from_lambda += threshold(&sample_lambda(k, t.q, s)?, xi)?.largest_component();
        from_er += sample_er(k, t.q_hat, s)?.largest_component();
    }
    println!(
        "mean largest component: thresholded reference {:.2}, direct {:.2}, C k = {:.2}",
        from_lambda as f64 / samples as f64,
        from_er as f64 / samples as f64,
        t.giant_fraction.unwrap() * k as f64
    );
    println!(
        "per-edge max |z| over 2000 samples at k=30: {:.2}",
        bridge_max_z(30, n, r, rho, 2.0, 2000, 1)?
    );
    Ok(())
}
