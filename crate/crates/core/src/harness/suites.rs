//! Named validation suites with pass/fail checks.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    experiment_records, interaction_fraction, ks_geometric, run_experiment, AggregateReport,
    ExperimentConfig, ExperimentKind, Record, Tally,
};
use crate::epidemic::InfectiousPeriod;
use crate::error::{Error, Result};
use crate::igraph::threshold;
use crate::rrg::{
    check_typical, generate_regular, second_eigenvalue, RegularGraph, TypicalityConfig,
};
use crate::theory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Lemmas,
    Weights,
    Meeting,
    Interaction,
    Completion,
    Regimes,
    Er,
    Spectral,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Lemmas,
        Suite::Weights,
        Suite::Meeting,
        Suite::Interaction,
        Suite::Completion,
        Suite::Regimes,
        Suite::Er,
        Suite::Spectral,
    ];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_owned()))
            .map_err(|_| Error::Parse(format!("unknown suite {s:?}")))
    }
}

/// Scale overrides applied to every experiment in a suite.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteOverrides {
    pub n: Option<usize>,
    pub k: Option<usize>,
    /// Trials per experiment; graphs for the spectral suite.
    pub trials: Option<usize>,
    pub base_seed: Option<u64>,
    /// Monte Carlo samples for checks that are not trial batches.
    pub samples: Option<usize>,
}

impl SuiteOverrides {
    fn apply(&self, mut cfg: ExperimentConfig) -> ExperimentConfig {
        cfg.n = self.n.unwrap_or(cfg.n);
        cfg.k = self.k.unwrap_or(cfg.k);
        cfg.trials = self.trials.unwrap_or(cfg.trials);
        cfg.base_seed = cfg.base_seed.wrapping_add(self.base_seed.unwrap_or(0));
        if let Some(s) = self.samples {
            cfg.er_samples = s;
        }
        cfg
    }

    fn seed(&self) -> u64 {
        self.base_seed.unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub observed: f64,
    pub target: String,
    pub pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, observed: f64, target: impl Into<String>, pass: bool) -> Self {
        Check {
            name: name.into(),
            observed,
            target: target.into(),
            pass,
        }
    }

    fn within(name: impl Into<String>, observed: Option<f64>, expected: f64, abs_tol: f64) -> Self {
        let v = observed.unwrap_or(f64::NAN);
        Check::new(
            name,
            v,
            format!("{expected} +/- {abs_tol}"),
            (v - expected).abs() <= abs_tol,
        )
    }

    fn relative(
        name: impl Into<String>,
        observed: Option<f64>,
        expected: f64,
        rel_tol: f64,
    ) -> Self {
        let v = observed.unwrap_or(f64::NAN);
        Check::new(
            name,
            v,
            format!("within {}% of {expected}", rel_tol * 100.0),
            (v / expected - 1.0).abs() <= rel_tol,
        )
    }

    fn at_least(name: impl Into<String>, observed: Option<f64>, bound: f64) -> Self {
        let v = observed.unwrap_or(f64::NAN);
        Check::new(name, v, format!(">= {bound}"), v >= bound)
    }

    fn tally(name: impl Into<String>, tally: Option<Tally>, expected_total: usize) -> Self {
        let t = tally.unwrap_or(Tally { pass: 0, total: 0 });
        Check::new(
            name,
            t.pass as f64,
            format!("all {expected_total} trials"),
            t.all() && t.total == expected_total,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub pass: bool,
    pub checks: Vec<Check>,
}

struct Runner<'a> {
    overrides: &'a SuiteOverrides,
    records: Vec<Record>,
}

impl Runner<'_> {
    fn experiment(&mut self, cfg: ExperimentConfig) -> Result<(ExperimentConfig, AggregateReport)> {
        let cfg = self.overrides.apply(cfg);
        let (trials, rep) = run_experiment(&cfg)?;
        self.records.extend(experiment_records(&cfg, &trials)?);
        self.records.push(Record::Aggregate(Box::new(rep.clone())));
        Ok((cfg, rep))
    }
}

/// Runs one suite, returning every record for the results file (ending with
/// the suite verdict) and the verdict itself.
pub fn run_suite(suite: Suite, overrides: &SuiteOverrides) -> Result<(Vec<Record>, SuiteReport)> {
    let mut run = Runner {
        overrides,
        records: Vec::new(),
    };
    let checks = match suite {
        Suite::Lemmas => lemmas(&mut run)?,
        Suite::Weights => weights(&mut run)?,
        Suite::Meeting => meeting(&mut run)?,
        Suite::Interaction => interaction(overrides)?,
        Suite::Completion => completion(&mut run)?,
        Suite::Regimes => regimes(&mut run)?,
        Suite::Er => er(&mut run)?,
        Suite::Spectral => spectral(overrides)?,
    };
    let report = SuiteReport {
        suite,
        pass: checks.iter().all(|c| c.pass),
        checks,
    };
    run.records.push(Record::Suite(report.clone()));
    Ok((run.records, report))
}

/// Both interaction graphs at several infectious periods; every structural
/// check must hold in every trial.
fn lemmas(run: &mut Runner) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut total = 0;
    let mut usable = 0;
    let mut tallies: [(&str, usize, usize); 4] = [
        ("time_distance", 0, 0),
        ("infect_component", 0, 0),
        ("threshold_distance", 0, 0),
        ("triangle", 0, 0),
    ];
    let mut point = 0u64;
    for rho in [1.0, 0.5] {
        for xi in [50, 200, 500, 2000, 10_000] {
            let (cfg, rep) = run.experiment(ExperimentConfig {
                kind: ExperimentKind::LemmaAudit,
                n: 5000,
                k: 20,
                rho,
                xi: Some(InfectiousPeriod::Finite(xi)),
                trials: 50,
                base_seed: point * 1_000_000,
                ..Default::default()
            })?;
            point += 1;
            total += cfg.trials;
            usable += rep.trials - rep.failed - rep.censored;
            for (slot, t) in tallies.iter_mut().zip([
                rep.time_distance,
                rep.infect_component,
                rep.threshold_distance,
                rep.triangle,
            ]) {
                if let Some(t) = t {
                    slot.1 += t.pass;
                    slot.2 += t.total;
                }
            }
        }
    }
    checks.push(Check::new(
        "uncensored_trials",
        usable as f64,
        format!("= {total}"),
        usable == total,
    ));
    for (name, pass, seen) in tallies {
        checks.push(Check::tally(name, Some(Tally { pass, total: seen }), total));
    }
    Ok(checks)
}

fn weights(run: &mut Runner) -> Result<Vec<Check>> {
    let (cfg, rep) = run.experiment(ExperimentConfig {
        kind: ExperimentKind::WeightFit,
        n: 10_000,
        k: 10,
        trials: 20,
        ..Default::default()
    })?;
    let mut checks = vec![
        Check::at_least("upsilon_ks_p", rep.ks.map(|k| k.p_value), super::KS_LEVEL),
        Check::tally("good_weights", rep.good_weights, cfg.trials),
    ];
    // The reference model itself, at the same size, as a control.
    let q = rep.theory.q;
    let reference: Vec<u64> = (0..cfg.trials)
        .map(|i| theory::sample_lambda(cfg.k, q, cfg.trial_seed(i)))
        .collect::<Result<Vec<_>>>()?
        .iter()
        .flat_map(|w| w.resolved_weights().map(|(_, x)| x).collect::<Vec<_>>())
        .collect();
    let ks = ks_geometric(&reference, q)?;
    checks.push(Check::at_least(
        "lambda_ks_p",
        Some(ks.p_value),
        super::KS_LEVEL,
    ));
    Ok(checks)
}

fn meeting(run: &mut Runner) -> Result<Vec<Check>> {
    let (_, rep) = run.experiment(ExperimentConfig {
        kind: ExperimentKind::MeetingTime,
        n: 10_000,
        k: 2,
        trials: 2000,
        burn_in: 200,
        ..Default::default()
    })?;
    Ok(vec![
        Check::tally(
            "uncensored",
            Some(Tally {
                pass: rep.trials - rep.failed - rep.censored,
                total: rep.trials,
            }),
            rep.trials,
        ),
        Check::relative(
            "mean_meeting_time",
            rep.meeting_time.map(|s| s.mean),
            rep.meeting_prediction,
            0.05,
        ),
        Check::at_least("ks_p", rep.ks.map(|k| k.p_value), super::KS_LEVEL),
    ])
}

fn interaction(o: &SuiteOverrides) -> Result<Vec<Check>> {
    let (r, rho) = (3, 0.5);
    let frac = interaction_fraction(
        o.n.unwrap_or(100_000),
        r,
        rho,
        10,
        o.samples.unwrap_or(20_000),
        200,
        o.seed(),
    )?;
    Ok(vec![Check::within(
        "interaction_fraction",
        Some(frac),
        theory::psi(rho, r),
        0.02,
    )])
}

fn completion(run: &mut Runner) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for rho in [1.0, 0.5] {
        let (_, rep) = run.experiment(ExperimentConfig {
            kind: ExperimentKind::Completion,
            n: 5000,
            k: 50,
            rho,
            trials: 200,
            ..Default::default()
        })?;
        let pred = rep.theory.completion_prediction;
        checks.push(Check::relative(
            format!("median_T_k_rho_{rho}"),
            rep.t_k.map(|s| s.median),
            pred,
            0.20,
        ));
    }
    Ok(checks)
}

fn regimes(run: &mut Runner) -> Result<Vec<Check>> {
    let base = ExperimentConfig {
        kind: ExperimentKind::Regimes,
        n: 20_000,
        k: 200,
        trials: 300,
        ..Default::default()
    };
    let k = run.overrides.k.unwrap_or(base.k) as f64;
    let mut checks = Vec::new();

    let (_, sub) = run.experiment(ExperimentConfig {
        phi: Some(0.5),
        ..base.clone()
    })?;
    let small = 4.0 * k.ln();
    let frac_small = sub
        .m_k_histogram
        .iter()
        .filter(|(m, _)| *m as f64 <= small)
        .map(|(_, c)| c)
        .sum::<usize>() as f64
        / sub.m_k.map_or(f64::NAN, |s| s.count as f64);
    checks.push(Check::at_least(
        "subcritical_small_fraction",
        Some(frac_small),
        0.95,
    ));

    let (_, sup) = run.experiment(ExperimentConfig {
        phi: Some(2.0),
        ..base.clone()
    })?;
    let c = sup.theory.giant_fraction.unwrap_or(f64::NAN);
    checks.push(Check::within(
        "supercritical_large_fraction",
        sup.frac_large,
        c,
        0.10,
    ));
    checks.push(Check::within(
        "supercritical_large_size",
        sup.large_mean_fraction,
        c,
        0.10,
    ));

    let (_, full) = run.experiment(ExperimentConfig {
        phi: Some(3.0 * k.ln()),
        ..base
    })?;
    checks.push(Check::at_least(
        "full_all_infected",
        full.frac_all_infected,
        0.90,
    ));
    Ok(checks)
}

fn er(run: &mut Runner) -> Result<Vec<Check>> {
    let (_, rep) = run.experiment(ExperimentConfig {
        kind: ExperimentKind::ErCompare,
        n: 5000,
        k: 40,
        phi: Some(2.0),
        trials: 300,
        er_samples: 10_000,
        ..Default::default()
    })?;
    let mut checks = vec![Check::relative(
        "largest_component_vs_er",
        rep.largest_component.map(|s| s.mean),
        rep.er_largest_component.unwrap_or(f64::NAN),
        0.10,
    )];
    let z = bridge_max_z(
        30,
        5000,
        3,
        1.0,
        2.0,
        run.overrides.samples.unwrap_or(10_000),
        2024 + run.overrides.seed(),
    )?;
    checks.push(Check::new("threshold_bridge_max_z", z, "<= 3", z <= 3.0));
    Ok(checks)
}

/// Largest per-edge z-score of presence frequencies in thresholded reference
/// samples against `q_hat`.
pub fn bridge_max_z(
    k: usize,
    n: usize,
    r: usize,
    rho: f64,
    phi: f64,
    samples: usize,
    base_seed: u64,
) -> Result<f64> {
    let xi = InfectiousPeriod::Finite(theory::xi_for_phi(phi, k, n, r, rho)?);
    let q = theory::pair_rate(n, r, rho);
    let qh = theory::q_hat(q, xi);
    let m = k * (k - 1) / 2;
    let counts = (0..samples)
        .into_par_iter()
        .map(|j| -> Result<Vec<u32>> {
            let pg = threshold(
                &theory::sample_lambda(k, q, base_seed.wrapping_add(j as u64))?,
                xi,
            )?;
            let mut c = vec![0u32; m];
            for &(a, b) in &pg.edges {
                c[crate::igraph::edge_index(k, a, b)] += 1;
            }
            Ok(c)
        })
        .try_reduce(
            || vec![0u32; m],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                Ok(a)
            },
        )?;
    let sd = (qh * (1.0 - qh) / samples as f64).sqrt();
    Ok(counts
        .iter()
        .map(|&c| (c as f64 / samples as f64 - qh).abs() / sd)
        .fold(0.0, f64::max))
}

fn spectral(o: &SuiteOverrides) -> Result<Vec<Check>> {
    let graphs = o.trials.unwrap_or(100);
    let n = o.n.unwrap_or(2000);
    let reports = (0..graphs)
        .into_par_iter()
        .map(|i| {
            let seed = o.seed().wrapping_add(i as u64);
            let g = generate_regular(n, 3, seed)?;
            check_typical(
                &g,
                &TypicalityConfig {
                    sample_size: 200,
                    seed,
                    ..Default::default()
                },
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let frac = |f: &dyn Fn(&crate::rrg::TypicalityReport) -> bool| {
        reports.iter().filter(|r| f(r)).count() as f64 / graphs as f64
    };
    let petersen = second_eigenvalue(&RegularGraph::petersen(), 1e-10)?;
    Ok(vec![
        Check::at_least(
            "spectral_bound_fraction",
            Some(frac(&|r| r.spectral_bound_holds)),
            0.95,
        ),
        Check::new(
            "connected_fraction",
            frac(&|r| r.connected),
            "= 1",
            frac(&|r| r.connected) == 1.0,
        ),
        Check::new(
            "non_bipartite_fraction",
            frac(&|r| !r.bipartite),
            "= 1",
            frac(&|r| !r.bipartite) == 1.0,
        ),
        Check::within("petersen_lambda2", Some(petersen), 1.0, 1e-8),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names() {
        for s in Suite::ALL {
            let name = serde_json::to_value(s).unwrap();
            assert_eq!(name.as_str().unwrap().parse::<Suite>().unwrap(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
    }

    #[test]
    fn overrides_shift_seeds_and_scale() {
        let o = SuiteOverrides {
            n: Some(400),
            trials: Some(3),
            base_seed: Some(7),
            ..Default::default()
        };
        let cfg = o.apply(ExperimentConfig {
            base_seed: 100,
            ..Default::default()
        });
        assert_eq!((cfg.n, cfg.trials, cfg.base_seed, cfg.k), (400, 3, 107, 20));
    }

    #[test]
    fn small_lemma_suite_passes() {
        let o = SuiteOverrides {
            n: Some(500),
            k: Some(6),
            trials: Some(2),
            ..Default::default()
        };
        let (records, report) = run_suite(Suite::Lemmas, &o).unwrap();
        assert!(report.pass, "{report:?}");
        // Ten experiments, each a config line, two trials and an aggregate.
        assert_eq!(records.len(), 10 * 4 + 1);
    }
}
