//! SIR/SI dynamics driven by the walks.
//!
//! Within step `t` the walks move first. Every coincident pair then draws an
//! independent Bernoulli(`rho`) interaction. A particle that was susceptible at
//! the end of step `t - 1` becomes infected at `t` if it interacts with a
//! particle that was infected at the end of `t - 1`. A particle infected at
//! `t_x` is recovered at every `t >= t_x + xi`. Infection is therefore not
//! transitive within a step, and a particle can still infect on the step at
//! which its period runs out.

use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Result};
use crate::rng;
use crate::rrg::RegularGraph;
use crate::theory;
use crate::walker::{self, CoincidenceScratch, MeetingEvent, ParticleStreams, WalkState};

/// Infectious period: a positive number of steps, or never recovering (SI).
///
/// Serialises as an integer, or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InfectiousPeriod {
    Finite(u64),
    Infinite,
}

impl InfectiousPeriod {
    pub fn is_infinite(self) -> bool {
        matches!(self, InfectiousPeriod::Infinite)
    }

    /// Whether a particle infected at `infected_at` is recovered at step `t`.
    #[inline]
    pub fn recovered(self, infected_at: u64, t: u64) -> bool {
        match self {
            InfectiousPeriod::Finite(xi) => infected_at + xi <= t,
            InfectiousPeriod::Infinite => false,
        }
    }

    /// `weight <= xi`.
    #[inline]
    pub fn admits(self, weight: u64) -> bool {
        match self {
            InfectiousPeriod::Finite(xi) => weight <= xi,
            InfectiousPeriod::Infinite => true,
        }
    }
}

impl fmt::Display for InfectiousPeriod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InfectiousPeriod::Finite(x) => write!(f, "{x}"),
            InfectiousPeriod::Infinite => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for InfectiousPeriod {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(InfectiousPeriod::Infinite),
            other => other
                .parse::<u64>()
                .map(InfectiousPeriod::Finite)
                .map_err(|_| invalid(format!("bad infectious period `{other}`"))),
        }
    }
}

impl Serialize for InfectiousPeriod {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            InfectiousPeriod::Finite(x) => s.serialize_u64(*x),
            InfectiousPeriod::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for InfectiousPeriod {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(InfectiousPeriod::Finite(x)),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Susceptible,
    Infected,
    Recovered,
}

/// Per-particle infection state.
#[derive(Debug, Clone)]
pub struct EpidemicState {
    status: Vec<Status>,
    infected_at: Vec<Option<u64>>,
    xi: InfectiousPeriod,
    initial: usize,
    step: u64,
}

impl EpidemicState {
    pub fn new(k: usize, xi: InfectiousPeriod, initial_infectives: &[usize]) -> Result<Self> {
        if initial_infectives.is_empty() {
            return Err(invalid("need at least one initial infective"));
        }
        if let InfectiousPeriod::Finite(0) = xi {
            return Err(invalid("infectious period must be positive"));
        }
        let mut status = vec![Status::Susceptible; k];
        let mut infected_at = vec![None; k];
        for &x in initial_infectives {
            if x >= k {
                return Err(invalid(format!(
                    "initial infective {x} out of range (k={k})"
                )));
            }
            if infected_at[x].is_some() {
                return Err(invalid(format!("initial infective {x} listed twice")));
            }
            status[x] = Status::Infected;
            infected_at[x] = Some(0);
        }
        Ok(EpidemicState {
            status,
            infected_at,
            xi,
            initial: initial_infectives.len(),
            step: 0,
        })
    }

    pub fn status(&self) -> &[Status] {
        &self.status
    }

    pub fn infected_at(&self) -> &[Option<u64>] {
        &self.infected_at
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    /// Member of `I(t - 1)`.
    #[inline]
    pub fn infectious_before(&self, x: usize, t: u64) -> bool {
        matches!(self.infected_at[x], Some(tx) if tx < t && !self.xi.recovered(tx, t - 1))
    }

    pub fn any_infected(&self) -> bool {
        self.status.contains(&Status::Infected)
    }

    pub fn ever_infected(&self) -> usize {
        self.infected_at.iter().filter(|t| t.is_some()).count()
    }

    /// Applies step `t` given its interactions; returns the particles newly
    /// infected at `t`.
    pub fn advance(&mut self, t: u64, interactions: &[(usize, usize)]) -> Vec<usize> {
        debug_assert_eq!(t, self.step + 1);
        let mut fresh = Vec::new();
        for &(a, b) in interactions {
            for (s, i) in [(a, b), (b, a)] {
                if self.infected_at[s].is_none() && self.infectious_before(i, t) {
                    fresh.push(s);
                }
            }
        }
        fresh.sort_unstable();
        fresh.dedup();
        for &x in &fresh {
            self.infected_at[x] = Some(t);
        }
        for (st, at) in self.status.iter_mut().zip(&self.infected_at) {
            if *st == Status::Infected && self.xi.recovered(at.unwrap(), t) {
                *st = Status::Recovered;
            }
        }
        for &x in &fresh {
            self.status[x] = if self.xi.recovered(t, t) {
                Status::Recovered
            } else {
                Status::Infected
            };
        }
        self.step = t;
        #[cfg(debug_assertions)]
        self.check_invariants();
        fresh
    }

    #[cfg(debug_assertions)]
    fn check_invariants(&self) {
        for (st, at) in self.status.iter().zip(&self.infected_at) {
            match (st, at) {
                (Status::Susceptible, None) => {}
                (Status::Infected, Some(tx)) => assert!(!self.xi.recovered(*tx, self.step)),
                (Status::Recovered, Some(tx)) => assert!(self.xi.recovered(*tx, self.step)),
                other => panic!("inconsistent particle state {other:?}"),
            }
        }
    }

    pub(crate) fn into_trace_public(
        self,
        interactions: Vec<Interaction>,
        censored: bool,
    ) -> EpidemicTrace {
        self.into_trace(TraceHeader::default(), interactions, censored)
    }

    fn into_trace(
        self,
        header: TraceHeader,
        interactions: Vec<Interaction>,
        censored: bool,
    ) -> EpidemicTrace {
        let m_k = self.ever_infected();
        let t_k = if m_k > self.initial {
            self.infected_at.iter().flatten().copied().max()
        } else {
            None
        };
        EpidemicTrace {
            seed: header.seed,
            n: header.n,
            r: header.r,
            k: self.status.len(),
            rho: header.rho,
            xi: self.xi,
            infected_at: self.infected_at,
            interactions,
            m_k,
            t_k,
            censored,
            steps: self.step,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interaction {
    pub step: u64,
    pub pair: (usize, usize),
}

/// Outcome of one epidemic run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpidemicTrace {
    pub seed: Option<u64>,
    pub n: Option<usize>,
    pub r: Option<usize>,
    pub k: usize,
    pub rho: Option<f64>,
    pub xi: InfectiousPeriod,
    pub infected_at: Vec<Option<u64>>,
    /// Every interaction, infecting or not, in step order.
    pub interactions: Vec<Interaction>,
    #[serde(rename = "M_k")]
    pub m_k: usize,
    /// Last infection time; `None` when nobody beyond the initial infectives
    /// was infected.
    #[serde(rename = "T_k")]
    pub t_k: Option<u64>,
    /// The step cap was hit while the process was still live.
    pub censored: bool,
    /// Last simulated step.
    pub steps: u64,
}

impl EpidemicTrace {
    pub fn initial_infectives(&self) -> Vec<usize> {
        (0..self.k)
            .filter(|&x| self.infected_at[x] == Some(0))
            .collect()
    }

    pub fn infected_set(&self) -> Vec<usize> {
        (0..self.k)
            .filter(|&x| self.infected_at[x].is_some())
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serialises")
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct TraceHeader {
    seed: Option<u64>,
    n: Option<usize>,
    r: Option<usize>,
    rho: Option<f64>,
}

/// Parameters of a simulated epidemic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpidemicConfig {
    pub k: usize,
    pub rho: f64,
    pub xi: InfectiousPeriod,
    pub initial_infectives: Vec<usize>,
    /// General-position constant; `0` places particles uniformly.
    pub alpha: f64,
    /// `None` picks [`default_max_steps`].
    pub max_steps: Option<u64>,
}

impl EpidemicConfig {
    /// One initial infective (particle 0) and `alpha = 1`.
    pub fn new(k: usize, rho: f64, xi: InfectiousPeriod) -> Self {
        EpidemicConfig {
            k,
            rho,
            xi,
            initial_infectives: vec![0],
            alpha: 1.0,
            max_steps: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(invalid(format!("need k >= 2, got {}", self.k)));
        }
        check_rho(self.rho)?;
        if self.max_steps == Some(0) {
            return Err(invalid("max_steps must be at least 1"));
        }
        EpidemicState::new(self.k, self.xi, &self.initial_infectives).map(|_| ())
    }
}

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho <= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("rho must lie in (0, 1], got {rho}")))
    }
}

/// SI runs: ten times the limiting completion time. SIR runs: `ceil(n^1.5)`.
pub fn default_max_steps(n: usize, r: usize, k: usize, rho: f64, xi: InfectiousPeriod) -> u64 {
    match xi {
        InfectiousPeriod::Infinite => {
            10 * theory::completion_prediction(n, k, r, rho).ceil() as u64
        }
        InfectiousPeriod::Finite(_) => weight_horizon(n),
    }
}

/// `ceil(n^1.5)`, the horizon within which good interaction weights fall.
pub fn weight_horizon(n: usize) -> u64 {
    (n as f64).powf(1.5).ceil() as u64
}

/// The walks plus the per-pair interaction draws.
pub struct InteractionProcess<'g> {
    graph: &'g RegularGraph,
    state: WalkState,
    streams: ParticleStreams,
    draws: ChaCha8Rng,
    rho: f64,
    scratch: CoincidenceScratch,
    events: Vec<MeetingEvent>,
}

impl<'g> InteractionProcess<'g> {
    pub fn new(graph: &'g RegularGraph, k: usize, rho: f64, alpha: f64, seed: u64) -> Result<Self> {
        check_rho(rho)?;
        let state = walker::init_general_position(graph, k, alpha, seed)?;
        Ok(Self::from_state(graph, state, rho, seed))
    }

    pub fn from_state(graph: &'g RegularGraph, state: WalkState, rho: f64, seed: u64) -> Self {
        let k = state.positions.len();
        InteractionProcess {
            graph,
            state,
            streams: ParticleStreams::new(seed, k),
            draws: rng::stream(seed, rng::INTERACTION_STREAM),
            rho,
            scratch: CoincidenceScratch::new(graph.n()),
            events: Vec::new(),
        }
    }

    pub fn walk_state(&self) -> &WalkState {
        &self.state
    }

    /// Advances one step and fills `out` with the interacting pairs.
    pub fn advance(&mut self, out: &mut Vec<(usize, usize)>) -> u64 {
        out.clear();
        walker::step(&mut self.state, self.graph, &mut self.streams);
        self.scratch.find(&self.state, &mut self.events);
        for ev in &self.events {
            for pair in ev.pairs() {
                if self.draws.random_bool(self.rho) {
                    out.push(pair);
                }
            }
        }
        self.state.step
    }
}

pub fn run_epidemic(g: &RegularGraph, cfg: &EpidemicConfig, seed: u64) -> Result<EpidemicTrace> {
    run_epidemic_observed(g, cfg, seed, |_| {})
}

/// [`run_epidemic`], calling `observe` with the walk state after every step.
pub fn run_epidemic_observed(
    g: &RegularGraph,
    cfg: &EpidemicConfig,
    seed: u64,
    mut observe: impl FnMut(&WalkState),
) -> Result<EpidemicTrace> {
    cfg.validate()?;
    let mut state = EpidemicState::new(cfg.k, cfg.xi, &cfg.initial_infectives)?;
    let mut process = InteractionProcess::new(g, cfg.k, cfg.rho, cfg.alpha, seed)?;
    let max_steps = cfg
        .max_steps
        .unwrap_or_else(|| default_max_steps(g.n(), g.degree(), cfg.k, cfg.rho, cfg.xi));
    let mut pairs = Vec::new();
    let mut log = Vec::new();
    let mut live = true;
    observe(process.walk_state());
    while live && state.step() < max_steps {
        let t = process.advance(&mut pairs);
        observe(process.walk_state());
        log.extend(pairs.iter().map(|&pair| Interaction { step: t, pair }));
        state.advance(t, &pairs);
        live = if cfg.xi.is_infinite() {
            state.ever_infected() < cfg.k
        } else {
            state.any_infected()
        };
    }
    let header = TraceHeader {
        seed: Some(seed),
        n: Some(g.n()),
        r: Some(g.degree()),
        rho: Some(cfg.rho),
    };
    Ok(state.into_trace(header, log, live))
}

/// Replays a fixed interaction schedule: each `(pair, step)` is an
/// interaction at that step.
pub fn run_scripted(
    k: usize,
    schedule: &[((usize, usize), u64)],
    xi: InfectiousPeriod,
    initial_infectives: &[usize],
) -> Result<EpidemicTrace> {
    let mut state = EpidemicState::new(k, xi, initial_infectives)?;
    for w in schedule.windows(2) {
        if w[1].1 < w[0].1 {
            return Err(invalid("schedule steps must be non-decreasing"));
        }
    }
    for &((a, b), t) in schedule {
        if t == 0 {
            return Err(invalid("scheduled interactions start at step 1"));
        }
        if a >= k || b >= k || a == b {
            return Err(invalid(format!("bad scheduled pair ({a}, {b}) for k={k}")));
        }
    }
    let last = schedule.last().map_or(0, |e| e.1);
    let mut log = Vec::with_capacity(schedule.len());
    let mut idx = 0;
    let mut pairs = Vec::new();
    for t in 1..=last {
        pairs.clear();
        while idx < schedule.len() && schedule[idx].1 == t {
            let (a, b) = schedule[idx].0;
            pairs.push((a.min(b), a.max(b)));
            log.push(Interaction {
                step: t,
                pair: (a.min(b), a.max(b)),
            });
            idx += 1;
        }
        state.advance(t, &pairs);
    }
    Ok(state.into_trace(TraceHeader::default(), log, false))
}
