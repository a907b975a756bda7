//! SIR outbreak sizes across the threshold: small outbreaks below `phi = 1`,
//! a giant outbreak with probability about `C(phi)` above it, and full
//! infection past `ln k`. Prints the sweep as CSV.

use viralwalk::harness::{classify_regime, sweep, write_sweep_csv, ExperimentConfig};

fn main() -> viralwalk::Result<()> {
    let base = ExperimentConfig {
        n: 8000,
        k: 80,
        trials: 80,
        ..Default::default()
    };
    let phis = [0.5, 0.9, 1.5, 2.0, 3.0, 3.0 * (base.k as f64).ln()];
    for &phi in &phis {
        eprintln!(
            "phi={phi:.2}: {:?}",
            classify_regime(phi, base.k, base.regime_eps)
        );
    }
    let rows = sweep(&base, &phis)?;
    write_sweep_csv(std::io::stdout().lock(), &rows)?;
    Ok(())
}
