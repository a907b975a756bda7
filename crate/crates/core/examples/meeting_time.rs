//! First-meeting times of two walks against the geometric law with mean
//! `theta_r n`.

use viralwalk::harness::{run_experiment, ExperimentConfig, ExperimentKind};

fn main() -> viralwalk::Result<()> {
    let cfg = ExperimentConfig {
        kind: ExperimentKind::MeetingTime,
        n: 4000,
        k: 2,
        trials: 400,
        burn_in: 200,
        ..Default::default()
    };
    let (_, rep) = run_experiment(&cfg)?;
    let m = rep.meeting_time.expect("meetings observed");
    println!(
        "n={} trials={} censored={}",
        cfg.n, rep.trials, rep.censored
    );
    println!(
        "mean first meeting {:.0} (95% CI {:.0}..{:.0})",
        m.mean, m.ci95.0, m.ci95.1
    );
    println!("theta_r n          {:.0}", rep.meeting_prediction);
    if let Some(ks) = rep.ks {
        println!(
            "KS vs Geom(1/theta_r n): D={:.4} p={:.3} pass={}",
            ks.statistic, ks.p_value, ks.pass
        );
    }
    Ok(())
}
