//! Seeded multi-trial experiments, aggregation and the validation suites.
//!
//! Trial `i` uses seed `base_seed + i` for its graph, placement, walks and
//! interaction draws, so a batch is reproducible and independent of the
//! number of worker threads.

mod stats;
mod suites;

use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::epidemic::{
    run_epidemic, weight_horizon, EpidemicConfig, InfectiousPeriod, InteractionProcess,
};
use crate::error::{invalid, Error, Result};
use crate::igraph::{self, threshold};
use crate::rng;
use crate::rrg::{generate_regular, RegularGraph};
use crate::theory::{self, TheoryParams};
use crate::walker::{self, ParticleStreams, WalkState};

pub use stats::{
    histogram, kolmogorov_survival, ks_geometric, median, summarize, KsResult, Summary, KS_LEVEL,
    KS_MIN_SAMPLES,
};
pub use suites::{bridge_max_z, run_suite, Check, Suite, SuiteOverrides, SuiteReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// First meeting of two walks after a burn-in.
    MeetingTime,
    /// SI completion time.
    Completion,
    /// SIR outbreak size.
    Regimes,
    /// SI interaction-graph weights against the geometric law.
    WeightFit,
    /// Exact structural checks on both interaction graphs.
    LemmaAudit,
    /// Largest thresholded component against direct random-graph samples.
    ErCompare,
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.replace('-', "_")))
            .map_err(|_| Error::Parse(format!("unknown experiment kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub n: usize,
    pub r: usize,
    pub k: usize,
    pub rho: f64,
    /// Infectious period; infinite when neither this nor `phi` is set.
    pub xi: Option<InfectiousPeriod>,
    /// Target threshold parameter, inverted to the smallest `xi` reaching it.
    pub phi: Option<f64>,
    pub trials: usize,
    pub base_seed: u64,
    pub alpha: f64,
    pub max_steps: Option<u64>,
    /// Steps walked before meeting times are measured.
    pub burn_in: u64,
    /// Direct random-graph samples for the comparison experiment.
    pub er_samples: usize,
    /// Slack in the full-infection regime boundary `(1 + eps) ln k`.
    pub regime_eps: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            kind: ExperimentKind::Regimes,
            n: 5000,
            r: 3,
            k: 20,
            rho: 1.0,
            xi: None,
            phi: None,
            trials: 100,
            base_seed: 0,
            alpha: 1.0,
            max_steps: None,
            burn_in: 200,
            er_samples: 10_000,
            regime_eps: 1.0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.k < 2 {
            return Err(invalid(format!("need k >= 2, got {}", self.k)));
        }
        crate::epidemic::check_rho(self.rho)?;
        if self.xi.is_some() && self.phi.is_some() {
            return Err(invalid("give either xi or phi, not both"));
        }
        if self.r < 3 || self.n <= self.r || self.n * self.r % 2 == 1 {
            return Err(invalid(format!(
                "no simple {}-regular graph on {} vertices",
                self.r, self.n
            )));
        }
        if self.regime_eps.is_nan() || self.regime_eps <= 0.0 {
            return Err(invalid("regime_eps must be positive"));
        }
        let xi = self.resolve_xi()?;
        let needs_finite = matches!(self.kind, ExperimentKind::ErCompare);
        if needs_finite && xi.is_infinite() {
            return Err(invalid("this experiment needs a finite infectious period"));
        }
        Ok(())
    }

    pub fn resolve_xi(&self) -> Result<InfectiousPeriod> {
        match (self.xi, self.phi) {
            (Some(xi), None) => Ok(xi),
            (None, Some(phi)) => theory::xi_for_phi(phi, self.k, self.n, self.r, self.rho)
                .map(InfectiousPeriod::Finite),
            (None, None) => Ok(InfectiousPeriod::Infinite),
            (Some(_), Some(_)) => Err(invalid("give either xi or phi, not both")),
        }
    }

    pub fn theory(&self) -> Result<TheoryParams> {
        Ok(TheoryParams::new(
            self.n,
            self.r,
            self.k,
            self.rho,
            self.resolve_xi()?,
        ))
    }

    fn epidemic(&self, xi: InfectiousPeriod) -> EpidemicConfig {
        EpidemicConfig {
            alpha: self.alpha,
            max_steps: self.max_steps,
            ..EpidemicConfig::new(self.k, self.rho, xi)
        }
    }

    pub fn trial_seed(&self, trial: usize) -> u64 {
        self.base_seed.wrapping_add(trial as u64)
    }
}

/// Outcome of one trial. Fields a trial kind does not measure are omitted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trial: usize,
    pub seed: u64,
    #[serde(rename = "M_k", default, skip_serializing_if = "Option::is_none")]
    pub m_k: Option<usize>,
    #[serde(rename = "T_k", default)]
    pub t_k: Option<u64>,
    pub censored: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub good_weights: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_distance: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub infect_component: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold_distance: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triangle: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub largest_component: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meeting_time: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TrialSummary {
    fn new(trial: usize, seed: u64) -> Self {
        TrialSummary {
            trial,
            seed,
            m_k: None,
            t_k: None,
            censored: false,
            good_weights: None,
            time_distance: None,
            infect_component: None,
            threshold_distance: None,
            triangle: None,
            largest_component: None,
            meeting_time: None,
            weights: None,
            error: None,
        }
    }

    /// Completed without error or censoring.
    pub fn usable(&self) -> bool {
        self.error.is_none() && !self.censored
    }

    /// Every lemma check that ran came out true.
    pub fn lemmas_hold(&self) -> bool {
        [
            self.time_distance,
            self.infect_component,
            self.threshold_distance,
            self.triangle,
        ]
        .iter()
        .all(|c| c.unwrap_or(true))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Subcritical,
    Supercritical,
    Full,
}

/// `phi <= 1` subcritical, `phi <= (1 + eps) ln k` supercritical, otherwise
/// full.
pub fn classify_regime(phi: f64, k: usize, eps: f64) -> Regime {
    if phi <= 1.0 {
        Regime::Subcritical
    } else if phi <= (1.0 + eps) * (k as f64).ln() {
        Regime::Supercritical
    } else {
        Regime::Full
    }
}

/// Outbreak size counted as large: `C k / 2` above the threshold, `4 ln k`
/// at or below it.
pub fn large_outbreak_threshold(theory: &TheoryParams) -> f64 {
    match theory.giant_fraction {
        Some(c) => c * theory.k as f64 / 2.0,
        None => 4.0 * (theory.k as f64).ln(),
    }
}

/// Pass counts of one structural check over usable trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub pass: usize,
    pub total: usize,
}

impl Tally {
    fn of(trials: &[&TrialSummary], f: impl Fn(&TrialSummary) -> Option<bool>) -> Option<Tally> {
        let vals: Vec<bool> = trials.iter().filter_map(|t| f(t)).collect();
        (!vals.is_empty()).then(|| Tally {
            pass: vals.iter().filter(|&&v| v).count(),
            total: vals.len(),
        })
    }

    pub fn all(&self) -> bool {
        self.pass == self.total
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub kind: ExperimentKind,
    pub trials: usize,
    pub failed: usize,
    pub censored: usize,
    pub xi: InfectiousPeriod,
    pub phi_target: Option<f64>,
    pub phi_achieved: f64,
    pub regime: Regime,
    pub theory: TheoryParams,
    #[serde(rename = "M_k")]
    pub m_k: Option<Summary>,
    #[serde(rename = "M_k_histogram")]
    pub m_k_histogram: Vec<(usize, usize)>,
    #[serde(rename = "T_k")]
    pub t_k: Option<Summary>,
    pub frac_all_infected: Option<f64>,
    pub large_threshold: f64,
    pub frac_large: Option<f64>,
    /// Mean `M_k / k` among large outbreaks.
    pub large_mean_fraction: Option<f64>,
    /// Median `T_k` over the limiting completion time.
    pub completion_ratio: Option<f64>,
    pub meeting_time: Option<Summary>,
    /// `theta_r n`.
    pub meeting_prediction: f64,
    pub ks: Option<KsResult>,
    pub time_distance: Option<Tally>,
    pub infect_component: Option<Tally>,
    pub threshold_distance: Option<Tally>,
    pub triangle: Option<Tally>,
    pub good_weights: Option<Tally>,
    pub largest_component: Option<Summary>,
    /// Mean largest component over direct random-graph samples.
    pub er_largest_component: Option<f64>,
}

fn fractions<T>(items: &[T], pred: impl Fn(&T) -> bool) -> Option<f64> {
    (!items.is_empty())
        .then(|| items.iter().filter(|x| pred(x)).count() as f64 / items.len() as f64)
}

/// Aggregates trial summaries. Depends only on the config and the summaries,
/// so serialized results can be re-aggregated.
pub fn aggregate(cfg: &ExperimentConfig, trials: &[TrialSummary]) -> Result<AggregateReport> {
    let xi = cfg.resolve_xi()?;
    let theory = TheoryParams::new(cfg.n, cfg.r, cfg.k, cfg.rho, xi);
    let usable: Vec<&TrialSummary> = trials.iter().filter(|t| t.usable()).collect();
    let m_k: Vec<usize> = usable.iter().filter_map(|t| t.m_k).collect();
    let m_k_f: Vec<f64> = m_k.iter().map(|&m| m as f64).collect();
    let t_k: Vec<f64> = usable
        .iter()
        .filter_map(|t| t.t_k)
        .map(|t| t as f64)
        .collect();
    let large_threshold = large_outbreak_threshold(&theory);
    let large: Vec<usize> = m_k
        .iter()
        .copied()
        .filter(|&m| m as f64 >= large_threshold)
        .collect();
    let meetings: Vec<u64> = usable.iter().filter_map(|t| t.meeting_time).collect();

    let ks = match cfg.kind {
        ExperimentKind::MeetingTime => {
            ks_geometric(&meetings, 1.0 / (theory.theta_r * cfg.n as f64)).ok()
        }
        ExperimentKind::WeightFit => {
            let w: Vec<u64> = usable
                .iter()
                .filter_map(|t| t.weights.as_ref())
                .flatten()
                .copied()
                .collect();
            ks_geometric(&w, theory.q).ok()
        }
        _ => None,
    };

    let completion_ratio = (cfg.kind == ExperimentKind::Completion && !t_k.is_empty())
        .then(|| median(&t_k) / theory.completion_prediction);

    let er_largest_component = if cfg.kind == ExperimentKind::ErCompare {
        let sizes: Vec<usize> = (0..cfg.er_samples)
            .into_par_iter()
            .map(|j| theory::sample_er(cfg.k, theory.q_hat, cfg.base_seed.wrapping_add(j as u64)))
            .map(|g| g.map(|g| g.largest_component()))
            .collect::<Result<_>>()?;
        (!sizes.is_empty()).then(|| sizes.iter().sum::<usize>() as f64 / sizes.len() as f64)
    } else {
        None
    };

    let largest: Vec<f64> = usable
        .iter()
        .filter_map(|t| t.largest_component)
        .map(|c| c as f64)
        .collect();

    Ok(AggregateReport {
        kind: cfg.kind,
        trials: trials.len(),
        failed: trials.iter().filter(|t| t.error.is_some()).count(),
        censored: trials
            .iter()
            .filter(|t| t.error.is_none() && t.censored)
            .count(),
        xi,
        phi_target: cfg.phi,
        phi_achieved: theory.phi_threshold,
        regime: classify_regime(theory.phi_threshold, cfg.k, cfg.regime_eps),
        theory,
        m_k: summarize(&m_k_f),
        m_k_histogram: histogram(m_k.iter().copied()),
        t_k: summarize(&t_k),
        frac_all_infected: fractions(&m_k, |&m| m == cfg.k),
        large_threshold,
        frac_large: fractions(&m_k, |&m| m as f64 >= large_threshold),
        large_mean_fraction: (!large.is_empty())
            .then(|| large.iter().sum::<usize>() as f64 / (large.len() * cfg.k) as f64),
        completion_ratio,
        meeting_time: summarize(&meetings.iter().map(|&m| m as f64).collect::<Vec<_>>()),
        meeting_prediction: theory.theta_r * cfg.n as f64,
        ks,
        time_distance: Tally::of(&usable, |t| t.time_distance),
        infect_component: Tally::of(&usable, |t| t.infect_component),
        threshold_distance: Tally::of(&usable, |t| t.threshold_distance),
        triangle: Tally::of(&usable, |t| t.triangle),
        good_weights: Tally::of(&usable, |t| t.good_weights),
        largest_component: summarize(&largest),
        er_largest_component,
    })
}

/// Runs every trial in parallel and aggregates them in seed order. A failing
/// trial is recorded in its summary rather than aborting the batch.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<(Vec<TrialSummary>, AggregateReport)> {
    cfg.validate()?;
    let xi = cfg.resolve_xi()?;
    let trials: Vec<TrialSummary> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| run_trial(cfg, xi, i))
        .collect();
    let report = aggregate(cfg, &trials)?;
    Ok((trials, report))
}

pub fn run_trial(cfg: &ExperimentConfig, xi: InfectiousPeriod, trial: usize) -> TrialSummary {
    let seed = cfg.trial_seed(trial);
    let mut s = TrialSummary::new(trial, seed);
    if let Err(e) = fill_trial(cfg, xi, seed, &mut s) {
        s.error = Some(e.to_string());
    }
    s
}

fn fill_trial(
    cfg: &ExperimentConfig,
    xi: InfectiousPeriod,
    seed: u64,
    s: &mut TrialSummary,
) -> Result<()> {
    let g = generate_regular(cfg.n, cfg.r, seed)?;
    match cfg.kind {
        ExperimentKind::MeetingTime => {
            let cap = cfg.max_steps.unwrap_or_else(|| weight_horizon(cfg.n));
            s.meeting_time = meeting_time(&g, cfg.burn_in, cap, seed)?;
            s.censored = s.meeting_time.is_none();
        }
        ExperimentKind::Completion | ExperimentKind::Regimes => {
            let xi = if cfg.kind == ExperimentKind::Completion {
                InfectiousPeriod::Infinite
            } else {
                xi
            };
            let trace = run_epidemic(&g, &cfg.epidemic(xi), seed)?;
            s.m_k = Some(trace.m_k);
            s.t_k = trace.t_k;
            s.censored = trace.censored;
        }
        ExperimentKind::WeightFit => {
            let (w, trace) =
                igraph::build_upsilon(&g, &cfg.epidemic(InfectiousPeriod::Infinite), seed)?;
            s.m_k = Some(trace.m_k);
            s.t_k = trace.t_k;
            s.censored = w.censored();
            s.good_weights = Some(igraph::good_weights(&w, cfg.n));
            s.weights = Some(w.resolved_weights().map(|(_, x)| x).collect());
        }
        ExperimentKind::LemmaAudit => {
            let (ups, utrace) =
                igraph::build_upsilon(&g, &cfg.epidemic(InfectiousPeriod::Infinite), seed)?;
            s.censored = ups.censored();
            s.good_weights = Some(igraph::good_weights(&ups, cfg.n));
            s.m_k = Some(utrace.m_k);
            s.t_k = utrace.t_k;
            if !ups.censored() {
                s.time_distance = Some(igraph::check_time_distance(&ups, &utrace)?);
                s.triangle = Some(igraph::check_triangle(
                    &ups,
                    &utrace,
                    InfectiousPeriod::Infinite,
                ));
            }
            if !xi.is_infinite() {
                let (psi, ptrace) = igraph::build_psi(&g, &cfg.epidemic(xi), seed)?;
                s.censored |= psi.censored();
                s.m_k = Some(ptrace.m_k);
                s.t_k = ptrace.t_k;
                if !psi.censored() {
                    s.infect_component = Some(igraph::check_infect_component(&psi, &ptrace, xi)?);
                    s.threshold_distance =
                        Some(igraph::check_threshold_distance(&psi, &ptrace, xi)?);
                    s.triangle = Some(
                        s.triangle.unwrap_or(true) && igraph::check_triangle(&psi, &ptrace, xi),
                    );
                    s.largest_component = Some(threshold(&psi, xi)?.largest_component());
                }
            }
        }
        ExperimentKind::ErCompare => {
            let (psi, trace) = igraph::build_psi(&g, &cfg.epidemic(xi), seed)?;
            s.m_k = Some(trace.m_k);
            s.t_k = trace.t_k;
            s.censored = psi.censored();
            if !psi.censored() {
                s.largest_component = Some(threshold(&psi, xi)?.largest_component());
            }
        }
    }
    Ok(())
}

/// First coincidence of two uniformly placed walks, counted from the end of
/// a `burn_in`-step warm-up. `None` if they have not met within `cap` steps.
pub fn meeting_time(g: &RegularGraph, burn_in: u64, cap: u64, seed: u64) -> Result<Option<u64>> {
    let mut state = walker::init_general_position(g, 2, 0.0, seed)?;
    let mut streams = ParticleStreams::new(seed, 2);
    for _ in 0..burn_in {
        walker::step(&mut state, g, &mut streams);
    }
    for t in 1..=cap {
        walker::step(&mut state, g, &mut streams);
        if state.positions[0] == state.positions[1] {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

/// Starts two walks on one uniformly chosen vertex and reports whether they
/// interact at the meeting itself or within `window` further steps.
pub fn interaction_after_meeting(
    g: &RegularGraph,
    rho: f64,
    window: u64,
    seed: u64,
) -> Result<bool> {
    crate::epidemic::check_rho(rho)?;
    let mut aux = rng::stream(seed, rng::AUX_STREAM);
    let v = aux.random_range(0..g.n());
    if aux.random_bool(rho) {
        return Ok(true);
    }
    let state = WalkState {
        positions: vec![v, v],
        step: 0,
    };
    let mut process = InteractionProcess::from_state(g, state, rho, seed);
    let mut pairs = Vec::new();
    for _ in 0..window {
        process.advance(&mut pairs);
        if !pairs.is_empty() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Fraction of `meetings` co-located starts that interact within `window`
/// steps, spread over `graphs` graphs on `n` vertices.
pub fn interaction_fraction(
    n: usize,
    r: usize,
    rho: f64,
    graphs: usize,
    meetings: usize,
    window: u64,
    base_seed: u64,
) -> Result<f64> {
    if graphs == 0 || meetings == 0 {
        return Err(invalid("need at least one graph and one meeting"));
    }
    let per_graph = meetings.div_ceil(graphs);
    let hits: Vec<usize> = (0..graphs)
        .into_par_iter()
        .map(|gi| -> Result<usize> {
            let g = generate_regular(n, r, base_seed.wrapping_add(gi as u64))?;
            let mut hits = 0;
            for j in 0..per_graph {
                let seed = base_seed.wrapping_add((gi * per_graph + j) as u64);
                hits += usize::from(interaction_after_meeting(&g, rho, window, seed)?);
            }
            Ok(hits)
        })
        .collect::<Result<_>>()?;
    Ok(hits.iter().sum::<usize>() as f64 / (per_graph * graphs) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub phi: f64,
    #[serde(rename = "mean_Mk")]
    pub mean_mk: f64,
    pub frac_large: f64,
    #[serde(rename = "C_pred")]
    pub c_pred: f64,
}

pub const SWEEP_CSV_HEADER: &str = "phi,mean_Mk,frac_large,C_pred";

/// Runs the regimes experiment at each target `phi`.
pub fn sweep(base: &ExperimentConfig, phis: &[f64]) -> Result<Vec<SweepRow>> {
    phis.iter()
        .map(|&phi| {
            let cfg = ExperimentConfig {
                kind: ExperimentKind::Regimes,
                phi: Some(phi),
                xi: None,
                ..base.clone()
            };
            let (_, rep) = run_experiment(&cfg)?;
            Ok(SweepRow {
                phi,
                mean_mk: rep.m_k.map_or(f64::NAN, |s| s.mean),
                frac_large: rep.frac_large.unwrap_or(f64::NAN),
                c_pred: rep.theory.giant_fraction.unwrap_or(0.0),
            })
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(mut out: W, rows: &[SweepRow]) -> Result<()> {
    writeln!(out, "{SWEEP_CSV_HEADER}")?;
    for row in rows {
        writeln!(
            out,
            "{},{},{},{}",
            row.phi, row.mean_mk, row.frac_large, row.c_pred
        )?;
    }
    Ok(())
}

/// One line of a results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum Record {
    /// Precedes the trials of one experiment.
    Config {
        config: ExperimentConfig,
        theory: TheoryParams,
    },
    Trial(TrialSummary),
    Aggregate(Box<AggregateReport>),
    Suite(SuiteReport),
}

pub fn write_jsonl<W: Write>(mut out: W, records: &[Record]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl<R: BufRead>(input: R) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    for line in input.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}

/// The records `run` writes: config header then one line per trial.
pub fn experiment_records(cfg: &ExperimentConfig, trials: &[TrialSummary]) -> Result<Vec<Record>> {
    let mut out = vec![Record::Config {
        config: cfg.clone(),
        theory: cfg.theory()?,
    }];
    out.extend(trials.iter().cloned().map(Record::Trial));
    Ok(out)
}

/// Re-aggregates every experiment found in a results file.
pub fn reaggregate(records: &[Record]) -> Result<Vec<AggregateReport>> {
    let mut reports = Vec::new();
    let mut current: Option<(&ExperimentConfig, Vec<TrialSummary>)> = None;
    for r in records {
        match r {
            Record::Config { config, .. } => {
                if let Some((cfg, trials)) = current.take() {
                    reports.push(aggregate(cfg, &trials)?);
                }
                current = Some((config, Vec::new()));
            }
            Record::Trial(t) => match current.as_mut() {
                Some((_, trials)) => trials.push(t.clone()),
                None => return Err(Error::Parse("trial record before any config record".into())),
            },
            Record::Aggregate(_) | Record::Suite(_) => {}
        }
    }
    if let Some((cfg, trials)) = current {
        reports.push(aggregate(cfg, &trials)?);
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: ExperimentKind) -> ExperimentConfig {
        ExperimentConfig {
            kind,
            n: 600,
            k: 6,
            trials: 6,
            base_seed: 40,
            er_samples: 200,
            ..Default::default()
        }
    }

    #[test]
    fn regime_labels() {
        assert_eq!(classify_regime(0.5, 200, 1.0), Regime::Subcritical);
        assert_eq!(classify_regime(2.0, 200, 1.0), Regime::Supercritical);
        assert_eq!(classify_regime(3.0 * 200f64.ln(), 200, 1.0), Regime::Full);
        assert_eq!(classify_regime(1.0, 200, 1.0), Regime::Subcritical);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!(
            "lemma_audit".parse::<ExperimentKind>().unwrap(),
            ExperimentKind::LemmaAudit
        );
        assert_eq!(
            "er-compare".parse::<ExperimentKind>().unwrap(),
            ExperimentKind::ErCompare
        );
        assert!("nope".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn config_rejects_bad_values() {
        let ok = small(ExperimentKind::Regimes);
        ok.validate().unwrap();
        for bad in [
            ExperimentConfig {
                trials: 0,
                ..ok.clone()
            },
            ExperimentConfig {
                rho: 0.0,
                ..ok.clone()
            },
            ExperimentConfig { k: 1, ..ok.clone() },
            ExperimentConfig {
                n: 601,
                ..ok.clone()
            },
            ExperimentConfig {
                xi: Some(InfectiousPeriod::Finite(5)),
                phi: Some(2.0),
                ..ok.clone()
            },
            ExperimentConfig {
                kind: ExperimentKind::ErCompare,
                ..ok.clone()
            },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn phi_target_is_inverted() {
        let cfg = ExperimentConfig {
            n: 20000,
            k: 200,
            phi: Some(2.0),
            ..Default::default()
        };
        assert_eq!(cfg.resolve_xi().unwrap(), InfectiousPeriod::Finite(403));
        let t = cfg.theory().unwrap();
        assert!(t.phi_threshold >= 2.0 && t.phi_threshold < 2.01);
    }

    #[test]
    fn config_json_defaults_and_unknown_fields() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"kind":"completion","k":50,"xi":"inf"}"#).unwrap();
        assert_eq!(cfg.kind, ExperimentKind::Completion);
        assert_eq!(cfg.k, 50);
        assert_eq!(cfg.n, 5000);
        assert_eq!(cfg.xi, Some(InfectiousPeriod::Infinite));
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"kk":1}"#).is_err());
    }

    #[test]
    fn every_kind_runs() {
        for kind in [
            ExperimentKind::MeetingTime,
            ExperimentKind::Completion,
            ExperimentKind::Regimes,
            ExperimentKind::WeightFit,
            ExperimentKind::LemmaAudit,
            ExperimentKind::ErCompare,
        ] {
            let mut cfg = small(kind);
            if matches!(
                kind,
                ExperimentKind::ErCompare | ExperimentKind::LemmaAudit | ExperimentKind::Regimes
            ) {
                cfg.phi = Some(2.0);
            }
            let (trials, rep) = run_experiment(&cfg).unwrap();
            assert_eq!(trials.len(), 6);
            assert_eq!(rep.failed, 0, "{kind:?}: {trials:?}");
            assert!(trials.iter().all(|t| t.lemmas_hold()));
            let seeds: Vec<u64> = trials.iter().map(|t| t.seed).collect();
            assert_eq!(seeds, (40..46).collect::<Vec<_>>());
        }
    }

    #[test]
    fn trial_failures_are_recorded() {
        // Pigeonhole: 40 particles cannot be spread out on 50 vertices.
        let cfg = ExperimentConfig {
            kind: ExperimentKind::Completion,
            n: 50,
            k: 40,
            alpha: 3.0,
            trials: 2,
            ..Default::default()
        };
        let (trials, rep) = run_experiment(&cfg).unwrap();
        assert_eq!(rep.failed, 2);
        assert!(trials[0].error.as_deref().unwrap().contains("placement"));
    }

    #[test]
    fn single_trial_matches_batch() {
        let cfg = small(ExperimentKind::Completion);
        let (trials, _) = run_experiment(&cfg).unwrap();
        let xi = cfg.resolve_xi().unwrap();
        assert_eq!(run_trial(&cfg, xi, 3), trials[3]);
    }

    #[test]
    fn results_round_trip_and_reaggregate() {
        let mut cfg = small(ExperimentKind::LemmaAudit);
        cfg.xi = Some(InfectiousPeriod::Finite(300));
        let (trials, rep) = run_experiment(&cfg).unwrap();
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &experiment_records(&cfg, &trials).unwrap()).unwrap();
        let back = read_jsonl(std::io::Cursor::new(buf)).unwrap();
        assert_eq!(reaggregate(&back).unwrap(), vec![rep]);
    }

    #[test]
    fn sweep_csv_shape() {
        let base = ExperimentConfig {
            n: 800,
            k: 10,
            trials: 4,
            ..Default::default()
        };
        let rows = sweep(&base, &[0.5, 2.0]).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "phi,mean_Mk,frac_large,C_pred");
        assert_eq!(lines.len(), 3);
        assert!(lines[1].starts_with("0.5,") && lines[1].ends_with(",0"));
        assert!(rows[1].c_pred > 0.79 && rows[1].c_pred < 0.81);
    }

    #[test]
    fn co_located_walks_interact_when_rho_is_one() {
        let g = generate_regular(200, 3, 1).unwrap();
        assert!(interaction_after_meeting(&g, 1.0, 0, 5).unwrap());
    }
}
