//! SI completion time for several numbers of particles, next to the limiting
//! prediction `2 theta_r n ln k / (psi k)`.

use viralwalk::harness::{run_experiment, ExperimentConfig, ExperimentKind};

fn main() -> viralwalk::Result<()> {
    println!(
        "{:>4} {:>5} {:>10} {:>10} {:>7}",
        "k", "rho", "median T_k", "predicted", "ratio"
    );
    for rho in [1.0, 0.5] {
        for k in [10, 25, 50] {
            let cfg = ExperimentConfig {
                kind: ExperimentKind::Completion,
                n: 3000,
                k,
                rho,
                trials: 60,
                ..Default::default()
            };
            let (_, rep) = run_experiment(&cfg)?;
            let med = rep.t_k.map_or(f64::NAN, |s| s.median);
            println!(
                "{k:>4} {rho:>5} {med:>10.0} {:>10.0} {:>7.3}",
                rep.theory.completion_prediction,
                rep.completion_ratio.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}
