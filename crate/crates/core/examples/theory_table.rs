//! Closed-form quantities for a few parameter points.

use viralwalk::theory::{giant_fraction, two_particle_chain, xi_for_phi, TheoryParams};
use viralwalk::InfectiousPeriod;

fn main() -> viralwalk::Result<()> {
    println!(
        "{:>3} {:>5} {:>8} {:>8} {:>8}",
        "r", "rho", "psi", "phi_T", "check"
    );
    for r in [3, 4, 6] {
        for rho in [0.25, 0.5, 1.0] {
            let c = two_particle_chain(rho, r);
            println!(
                "{r:>3} {rho:>5} {:>8.5} {:>8.5} {:>8.1e}",
                c.psi_check,
                c.phi_t,
                (c.psi_check - viralwalk::theory::psi(rho, r)).abs()
            );
        }
    }

    println!();
    for c in [1.5, 2.0, 3.0, 5.0] {
        println!("C({c}) = {:.10}", giant_fraction(c)?);
    }

    println!();
    let (n, r, k) = (20_000, 3, 200);
    for phi in [0.5, 2.0, 3.0 * (k as f64).ln()] {
        let xi = xi_for_phi(phi, k, n, r, 1.0)?;
        let t = TheoryParams::new(n, r, k, 1.0, InfectiousPeriod::Finite(xi));
        println!("{}", serde_json::to_string(&t).expect("params serialise"));
    }
    Ok(())
}
