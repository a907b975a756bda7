//! Weighted interaction graphs on the particle set.
//!
//! Edge `(x, y)` becomes active at `t(e) = min(t(x), t(y))`, the first time
//! one endpoint is infected, and is weighted by the delay to the next `xy`
//! interaction. In an SI run ([`build_upsilon`]) infection times are exactly
//! weighted distances from the initial infectives. For SIR ([`build_psi`]) a
//! second phase seeds a pseudo-infection among the survivors so every edge
//! gets a weight, and the infected set is exactly the union of components of
//! the initial infectives after dropping edges heavier than `xi`.

use serde::{Deserialize, Serialize};

use crate::epidemic::{
    EpidemicConfig, EpidemicState, EpidemicTrace, InfectiousPeriod, Interaction, InteractionProcess,
};
use crate::error::{invalid, Error, Result};
use crate::rrg::RegularGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhaseTag {
    /// Weighted in an SI run.
    Si,
    /// Weighted by the genuine SIR process.
    Phase1,
    /// Weighted by the pseudo-infection among phase-1 survivors.
    Phase2,
    /// Drawn from the i.i.d. geometric reference model.
    Reference,
}

/// Index of the unordered pair `a < b` in upper-triangular row order.
#[inline]
pub fn edge_index(k: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    a * (2 * k - a - 1) / 2 + (b - a - 1)
}

/// Complete graph on `k` particles with per-edge weight, activation time and
/// phase tag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedInteractionGraph {
    k: usize,
    weights: Vec<Option<u64>>,
    activation: Vec<Option<u64>>,
    phase: Vec<Option<PhaseTag>>,
    censored: bool,
}

impl WeightedInteractionGraph {
    fn empty(k: usize) -> Self {
        let m = k * k.saturating_sub(1) / 2;
        WeightedInteractionGraph {
            k,
            weights: vec![None; m],
            activation: vec![None; m],
            phase: vec![None; m],
            censored: false,
        }
    }

    /// A fully weighted graph from upper-triangular weights.
    pub fn from_weights(k: usize, weights: Vec<u64>, tag: PhaseTag) -> Result<Self> {
        let mut g = Self::empty(k);
        if weights.len() != g.weights.len() {
            return Err(invalid(format!(
                "k={k} needs {} weights, got {}",
                g.weights.len(),
                weights.len()
            )));
        }
        if weights.contains(&0) {
            return Err(invalid("weights must be at least 1"));
        }
        g.weights = weights.into_iter().map(Some).collect();
        g.phase = vec![Some(tag); g.weights.len()];
        Ok(g)
    }

    /// A fully weighted graph from `((a, b), w)` entries covering every pair.
    pub fn from_table(k: usize, table: &[((usize, usize), u64)], tag: PhaseTag) -> Result<Self> {
        let mut weights = vec![0; k * k.saturating_sub(1) / 2];
        for &((a, b), w) in table {
            if a == b || a >= k || b >= k {
                return Err(invalid(format!("bad pair ({a}, {b})")));
            }
            weights[edge_index(k, a, b)] = w;
        }
        Self::from_weights(k, weights, tag)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn censored(&self) -> bool {
        self.censored
    }

    pub fn weight(&self, a: usize, b: usize) -> Option<u64> {
        self.weights[edge_index(self.k, a, b)]
    }

    pub fn activation(&self, a: usize, b: usize) -> Option<u64> {
        self.activation[edge_index(self.k, a, b)]
    }

    pub fn phase(&self, a: usize, b: usize) -> Option<PhaseTag> {
        self.phase[edge_index(self.k, a, b)]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.k).flat_map(move |a| (a + 1..self.k).map(move |b| (a, b)))
    }

    /// `((a, b), w)` for every weighted edge.
    pub fn resolved_weights(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.pairs()
            .zip(&self.weights)
            .filter_map(|(p, w)| w.map(|w| (p, w)))
    }

    pub fn unresolved_count(&self) -> usize {
        self.weights.iter().filter(|w| w.is_none()).count()
    }

    pub fn is_fully_resolved(&self) -> bool {
        self.unresolved_count() == 0
    }

    fn require_resolved(&self) -> Result<()> {
        match self.pairs().zip(&self.weights).find(|(_, w)| w.is_none()) {
            Some(((a, b), _)) => Err(Error::UnresolvedEdge(a, b)),
            None => Ok(()),
        }
    }

    /// Activation epochs: each distinct activation time `tau_j` with the edges
    /// active (activated, not yet resolved) on entering it.
    pub fn epochs(&self) -> Vec<(u64, Vec<(usize, usize)>)> {
        let mut taus: Vec<u64> = self.activation.iter().flatten().copied().collect();
        taus.sort_unstable();
        taus.dedup();
        taus.into_iter()
            .map(|tau| {
                let active = self
                    .pairs()
                    .enumerate()
                    .filter(|&(i, _)| {
                        matches!(self.activation[i], Some(a) if a <= tau)
                            && self.weights[i].is_none_or(|w| self.activation[i].unwrap() + w > tau)
                    })
                    .map(|(_, p)| p)
                    .collect();
                (tau, active)
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serialises")
    }
}

#[derive(Serialize, Deserialize)]
struct EdgeRecord {
    a: usize,
    b: usize,
    weight: Option<u64>,
    activation: Option<u64>,
    phase: Option<PhaseTag>,
}

#[derive(Serialize, Deserialize)]
struct GraphRecord {
    k: usize,
    censored: bool,
    edges: Vec<EdgeRecord>,
}

impl Serialize for WeightedInteractionGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let edges = self
            .pairs()
            .enumerate()
            .map(|(i, (a, b))| EdgeRecord {
                a,
                b,
                weight: self.weights[i],
                activation: self.activation[i],
                phase: self.phase[i],
            })
            .collect();
        GraphRecord {
            k: self.k,
            censored: self.censored,
            edges,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightedInteractionGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rec = GraphRecord::deserialize(d)?;
        let mut g = WeightedInteractionGraph::empty(rec.k);
        if rec.edges.len() != g.weights.len() {
            return Err(serde::de::Error::custom(
                "edge list does not cover every pair",
            ));
        }
        for e in rec.edges {
            if e.a >= e.b || e.b >= rec.k {
                return Err(serde::de::Error::custom(format!(
                    "bad pair ({}, {})",
                    e.a, e.b
                )));
            }
            let i = edge_index(rec.k, e.a, e.b);
            g.weights[i] = e.weight;
            g.activation[i] = e.activation;
            g.phase[i] = e.phase;
        }
        g.censored = rec.censored;
        Ok(g)
    }
}

/// Simple undirected graph on the particle set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParticleGraph {
    pub k: usize,
    /// Sorted pairs `(a, b)` with `a < b`.
    pub edges: Vec<(usize, usize)>,
}

impl ParticleGraph {
    pub fn new(k: usize, mut edges: Vec<(usize, usize)>) -> Self {
        for e in edges.iter_mut() {
            if e.0 > e.1 {
                *e = (e.1, e.0);
            }
        }
        edges.sort_unstable();
        edges.dedup();
        ParticleGraph { k, edges }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edges.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    /// Connected components, members ascending, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut dsu = DisjointSets::new(self.k);
        for &(a, b) in &self.edges {
            dsu.union(a, b);
        }
        let mut index = vec![usize::MAX; self.k];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for x in 0..self.k {
            let root = dsu.find(x);
            if index[root] == usize::MAX {
                index[root] = out.len();
                out.push(Vec::new());
            }
            out[index[root]].push(x);
        }
        out
    }

    pub fn largest_component(&self) -> usize {
        self.components().iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Union of the components containing any of `seeds`, ascending.
    pub fn reachable_from(&self, seeds: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .components()
            .into_iter()
            .filter(|c| seeds.iter().any(|s| c.binary_search(s).is_ok()))
            .flatten()
            .collect();
        out.sort_unstable();
        out
    }
}

struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
    }
}

/// Keeps the edges with weight at most `xi`.
pub fn threshold(w: &WeightedInteractionGraph, xi: InfectiousPeriod) -> Result<ParticleGraph> {
    w.require_resolved()?;
    let edges = w
        .resolved_weights()
        .filter(|&(_, wt)| xi.admits(wt))
        .map(|(p, _)| p)
        .collect();
    Ok(ParticleGraph::new(w.k, edges))
}

pub fn components(pg: &ParticleGraph) -> Vec<Vec<usize>> {
    pg.components()
}

/// Weighted distance from the nearest source, over every edge.
pub fn weighted_distances(w: &WeightedInteractionGraph, sources: &[usize]) -> Result<Vec<u64>> {
    w.require_resolved()?;
    Ok(dijkstra(w, sources, InfectiousPeriod::Infinite)
        .into_iter()
        .map(|d| d.expect("complete graph is connected"))
        .collect())
}

/// Weighted distance using only edges of weight at most `xi`; `None` when
/// unreachable.
pub fn thresholded_distances(
    w: &WeightedInteractionGraph,
    sources: &[usize],
    xi: InfectiousPeriod,
) -> Result<Vec<Option<u64>>> {
    w.require_resolved()?;
    Ok(dijkstra(w, sources, xi))
}

/// Array-based Dijkstra, O(k^2), which is optimal on a dense graph.
fn dijkstra(
    w: &WeightedInteractionGraph,
    sources: &[usize],
    xi: InfectiousPeriod,
) -> Vec<Option<u64>> {
    let k = w.k;
    let mut dist: Vec<Option<u64>> = vec![None; k];
    let mut done = vec![false; k];
    for &s in sources {
        dist[s] = Some(0);
    }
    loop {
        let next = (0..k)
            .filter(|&x| !done[x])
            .filter_map(|x| dist[x].map(|d| (d, x)))
            .min();
        let Some((d, x)) = next else { break };
        done[x] = true;
        for y in 0..k {
            if y == x || done[y] {
                continue;
            }
            if let Some(wt) = w.weight(x, y).filter(|&wt| xi.admits(wt)) {
                let cand = d + wt;
                if dist[y].is_none_or(|cur| cand < cur) {
                    dist[y] = Some(cand);
                }
            }
        }
    }
    dist
}

/// Edge bookkeeping shared by the builders.
struct EdgeBook {
    graph: WeightedInteractionGraph,
    active: usize,
    unresolved: usize,
}

impl EdgeBook {
    fn new(k: usize) -> Self {
        let graph = WeightedInteractionGraph::empty(k);
        let unresolved = graph.weights.len();
        EdgeBook {
            graph,
            active: 0,
            unresolved,
        }
    }

    /// Activates every not-yet-active edge at `x`, restricted to `allowed`
    /// partners.
    fn activate(&mut self, x: usize, t: u64, tag: PhaseTag, allowed: impl Fn(usize) -> bool) {
        let k = self.graph.k;
        for y in (0..k).filter(|&y| y != x && allowed(y)) {
            let i = edge_index(k, x, y);
            if self.graph.activation[i].is_none() {
                self.graph.activation[i] = Some(t);
                self.graph.phase[i] = Some(tag);
                self.active += 1;
            }
        }
    }

    fn interact(&mut self, a: usize, b: usize, t: u64) {
        let i = edge_index(self.graph.k, a, b);
        if let (Some(act), None) = (self.graph.activation[i], self.graph.weights[i]) {
            if act < t {
                self.graph.weights[i] = Some(t - act);
                self.active -= 1;
                self.unresolved -= 1;
            }
        }
    }
}

fn trace_header(trace: &mut EpidemicTrace, g: &RegularGraph, rho: f64, seed: u64) {
    trace.seed = Some(seed);
    trace.n = Some(g.n());
    trace.r = Some(g.degree());
    trace.rho = Some(rho);
}

/// SI interaction graph. The walk continues past full infection until every
/// edge is weighted or `max_steps` (default `ceil(n^1.5)`) is reached.
///
/// `cfg.xi` is ignored; the run is SI.
pub fn build_upsilon(
    g: &RegularGraph,
    cfg: &EpidemicConfig,
    seed: u64,
) -> Result<(WeightedInteractionGraph, EpidemicTrace)> {
    let xi = InfectiousPeriod::Infinite;
    let cfg = EpidemicConfig { xi, ..cfg.clone() };
    cfg.validate()?;
    let max_steps = cfg
        .max_steps
        .unwrap_or_else(|| crate::epidemic::weight_horizon(g.n()));
    let mut state = EpidemicState::new(cfg.k, xi, &cfg.initial_infectives)?;
    let mut process = InteractionProcess::new(g, cfg.k, cfg.rho, cfg.alpha, seed)?;
    let mut book = EdgeBook::new(cfg.k);
    for &s in &cfg.initial_infectives {
        book.activate(s, 0, PhaseTag::Si, |_| true);
    }
    let mut pairs = Vec::new();
    let mut log = Vec::new();
    while book.unresolved > 0 && state.step() < max_steps {
        let t = process.advance(&mut pairs);
        for &(a, b) in &pairs {
            book.interact(a, b, t);
        }
        log.extend(pairs.iter().map(|&pair| Interaction { step: t, pair }));
        for x in state.advance(t, &pairs) {
            book.activate(x, t, PhaseTag::Si, |_| true);
        }
    }
    let censored = book.unresolved > 0;
    book.graph.censored = censored;
    let mut trace = finish(state, log, censored && cfg.k > 0);
    trace_header(&mut trace, g, cfg.rho, seed);
    // The SI trace itself is only censored if someone is still uninfected.
    trace.censored = trace.m_k < cfg.k;
    Ok((book.graph, trace))
}

/// Two-phase SIR interaction graph.
///
/// Phase 1 runs the genuine SIR process, activating edges at genuine
/// infections, until no edge is active. Phase 2 pseudo-infects the
/// lowest-indexed survivor with an infinite period and runs SI among the
/// survivors; if that ever stalls with edges left, the next survivor with an
/// unweighted edge is seeded. Pseudo-infections are not counted in the trace.
pub fn build_psi(
    g: &RegularGraph,
    cfg: &EpidemicConfig,
    seed: u64,
) -> Result<(WeightedInteractionGraph, EpidemicTrace)> {
    cfg.validate()?;
    if cfg.xi.is_infinite() {
        return Err(invalid(
            "the two-phase graph needs a finite infectious period",
        ));
    }
    let k = cfg.k;
    let max_steps = cfg
        .max_steps
        .unwrap_or_else(|| crate::epidemic::weight_horizon(g.n()));
    let mut state = EpidemicState::new(k, cfg.xi, &cfg.initial_infectives)?;
    let mut process = InteractionProcess::new(g, k, cfg.rho, cfg.alpha, seed)?;
    let mut book = EdgeBook::new(k);
    for &s in &cfg.initial_infectives {
        book.activate(s, 0, PhaseTag::Phase1, |_| true);
    }
    let mut survivors: Option<Vec<bool>> = None;
    let mut pseudo_at: Vec<Option<u64>> = vec![None; k];
    let mut pairs = Vec::new();
    let mut log = Vec::new();

    while book.unresolved > 0 && state.step() < max_steps {
        let t = process.advance(&mut pairs);
        for &(a, b) in &pairs {
            book.interact(a, b, t);
        }
        log.extend(pairs.iter().map(|&pair| Interaction { step: t, pair }));
        for x in state.advance(t, &pairs) {
            book.activate(x, t, PhaseTag::Phase1, |_| true);
        }

        match &survivors {
            None => {
                if book.active == 0 && !state.any_infected() && book.unresolved > 0 {
                    let s: Vec<bool> = state.infected_at().iter().map(Option::is_none).collect();
                    survivors = Some(s);
                    seed_pseudo(&mut book, &mut pseudo_at, survivors.as_ref().unwrap(), t);
                }
            }
            Some(surv) => {
                let mut fresh = Vec::new();
                for &(a, b) in &pairs {
                    for (s, i) in [(a, b), (b, a)] {
                        if surv[s]
                            && pseudo_at[s].is_none()
                            && matches!(pseudo_at[i], Some(ti) if ti < t)
                        {
                            fresh.push(s);
                        }
                    }
                }
                fresh.sort_unstable();
                fresh.dedup();
                for &x in &fresh {
                    pseudo_at[x] = Some(t);
                    book.activate(x, t, PhaseTag::Phase2, |y| surv[y]);
                }
                if book.active == 0 && book.unresolved > 0 {
                    seed_pseudo(&mut book, &mut pseudo_at, surv, t);
                }
            }
        }
    }
    let censored = book.unresolved > 0;
    book.graph.censored = censored;
    let live = state.any_infected();
    let mut trace = finish(state, log, censored || live);
    trace_header(&mut trace, g, cfg.rho, seed);
    Ok((book.graph, trace))
}

/// Pseudo-infects the lowest-indexed survivor that still has an unweighted
/// edge to another survivor.
fn seed_pseudo(book: &mut EdgeBook, pseudo_at: &mut [Option<u64>], surv: &[bool], t: u64) {
    let k = book.graph.k;
    let pick = (0..k).find(|&x| {
        surv[x]
            && pseudo_at[x].is_none()
            && (0..k)
                .any(|y| y != x && surv[y] && book.graph.weights[edge_index(k, x, y)].is_none())
    });
    if let Some(x) = pick {
        pseudo_at[x] = Some(t);
        book.activate(x, t, PhaseTag::Phase2, |y| surv[y]);
    }
}

fn finish(state: EpidemicState, log: Vec<Interaction>, censored: bool) -> EpidemicTrace {
    state.into_trace_public(log, censored)
}

/// Infection times equal weighted distances from the initial infectives, and
/// every activation time equals the smaller endpoint distance.
pub fn check_time_distance(w: &WeightedInteractionGraph, trace: &EpidemicTrace) -> Result<bool> {
    let d = weighted_distances(w, &trace.initial_infectives())?;
    let times_match = (0..w.k).all(|x| trace.infected_at[x] == Some(d[x]));
    let activations_match = w
        .pairs()
        .all(|(a, b)| w.activation(a, b) == Some(d[a].min(d[b])));
    Ok(times_match && activations_match)
}

/// The SIR-infected set is the union of the components of the initial
/// infectives in the thresholded graph.
pub fn check_infect_component(
    psi: &WeightedInteractionGraph,
    trace: &EpidemicTrace,
    xi: InfectiousPeriod,
) -> Result<bool> {
    let pg = threshold(psi, xi)?;
    Ok(pg.reachable_from(&trace.initial_infectives()) == trace.infected_set())
}

/// Infection times equal weighted distances over edges of weight at most
/// `xi`.
pub fn check_threshold_distance(
    psi: &WeightedInteractionGraph,
    trace: &EpidemicTrace,
    xi: InfectiousPeriod,
) -> Result<bool> {
    let d = thresholded_distances(psi, &trace.initial_infectives(), xi)?;
    Ok(d == trace.infected_at)
}

/// `|t(x) - t(y)| <= w(x, y)` for every edge of weight at most `xi` between
/// infected particles. Heavier edges bound nothing: the earlier endpoint may
/// recover before the interaction.
pub fn check_triangle(
    w: &WeightedInteractionGraph,
    trace: &EpidemicTrace,
    xi: InfectiousPeriod,
) -> bool {
    w.resolved_weights()
        .filter(|&(_, wt)| xi.admits(wt))
        .all(
            |((a, b), wt)| match (trace.infected_at[a], trace.infected_at[b]) {
                (Some(ta), Some(tb)) => ta.abs_diff(tb) <= wt,
                _ => true,
            },
        )
}

/// Weight sum at most `k^2 n ln n` and every weight below `n^1.5`.
pub fn good_weights(w: &WeightedInteractionGraph, n: usize) -> bool {
    let nf = n as f64;
    let k = w.k as f64;
    let sum: f64 = w.resolved_weights().map(|(_, x)| x as f64).sum();
    w.is_fully_resolved()
        && sum <= k * k * nf * nf.ln()
        && w.resolved_weights().all(|(_, x)| (x as f64) < nf.powf(1.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::epidemic::run_epidemic;
    use crate::rrg::generate_regular;
    use proptest::prelude::*;

    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;
    const D: usize = 3;

    fn counterexample_weights() -> WeightedInteractionGraph {
        WeightedInteractionGraph::from_table(
            4,
            &[
                ((A, B), 9),
                ((A, C), 100),
                ((A, D), 11),
                ((B, C), 9),
                ((B, D), 91),
                ((C, D), 11),
            ],
            PhaseTag::Si,
        )
        .unwrap()
    }

    #[test]
    fn edge_index_is_a_bijection() {
        let k = 9;
        let mut seen = vec![false; k * (k - 1) / 2];
        for a in 0..k {
            for b in a + 1..k {
                let i = edge_index(k, a, b);
                assert_eq!(i, edge_index(k, b, a));
                assert!(!seen[i]);
                seen[i] = true;
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn counterexample_threshold_isolates_d() {
        let pg = threshold(&counterexample_weights(), InfectiousPeriod::Finite(10)).unwrap();
        assert_eq!(pg.edges, vec![(A, B), (B, C)]);
        assert_eq!(components(&pg), vec![vec![A, B, C], vec![D]]);
    }

    #[test]
    fn threshold_extremes() {
        let w = counterexample_weights();
        assert_eq!(
            threshold(&w, InfectiousPeriod::Finite(0))
                .unwrap()
                .edge_count(),
            0
        );
        assert_eq!(
            threshold(&w, InfectiousPeriod::Infinite)
                .unwrap()
                .edge_count(),
            6
        );
        assert_eq!(components(&ParticleGraph::new(5, vec![])).len(), 5);
        let full = threshold(&w, InfectiousPeriod::Infinite).unwrap();
        assert_eq!(components(&full), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn unresolved_edges_error() {
        let w = WeightedInteractionGraph::empty(3);
        match threshold(&w, InfectiousPeriod::Infinite) {
            Err(Error::UnresolvedEdge(0, 1)) => {}
            other => panic!("{other:?}"),
        }
        assert!(weighted_distances(&w, &[0]).is_err());
    }

    #[test]
    fn distance_basics() {
        let w = WeightedInteractionGraph::from_weights(2, vec![17], PhaseTag::Si).unwrap();
        assert_eq!(weighted_distances(&w, &[0]).unwrap(), vec![0, 17]);
        let w = counterexample_weights();
        assert_eq!(weighted_distances(&w, &[0, 1, 2, 3]).unwrap(), vec![0; 4]);
        // a -> b (9), a -> d (11), a -> b -> c (18).
        assert_eq!(weighted_distances(&w, &[A]).unwrap(), vec![0, 9, 18, 11]);
        let capped = thresholded_distances(&w, &[A], InfectiousPeriod::Finite(10)).unwrap();
        assert_eq!(capped, vec![Some(0), Some(9), Some(18), None]);
    }

    /// Floyd-Warshall oracle for the Dijkstra routine.
    fn floyd(w: &WeightedInteractionGraph, sources: &[usize]) -> Vec<u64> {
        let k = w.k();
        let mut d = vec![vec![u64::MAX / 4; k]; k];
        for (i, row) in d.iter_mut().enumerate() {
            row[i] = 0;
        }
        for ((a, b), x) in w.resolved_weights() {
            d[a][b] = x;
            d[b][a] = x;
        }
        for m in 0..k {
            for i in 0..k {
                for j in 0..k {
                    d[i][j] = d[i][j].min(d[i][m] + d[m][j]);
                }
            }
        }
        (0..k)
            .map(|x| sources.iter().map(|&s| d[s][x]).min().unwrap())
            .collect()
    }

    proptest! {
        #[test]
        fn dijkstra_matches_floyd(k in 2usize..9, seed in 0u64..1000, srcs in prop::collection::vec(0usize..9, 1..3)) {
            let w = crate::theory::sample_lambda(k, 0.3, seed).unwrap();
            let sources: Vec<usize> = srcs.into_iter().map(|s| s % k).collect();
            prop_assert_eq!(weighted_distances(&w, &sources).unwrap(), floyd(&w, &sources));
        }

        #[test]
        fn json_round_trip(k in 2usize..8, seed in 0u64..100) {
            let w = crate::theory::sample_lambda(k, 0.2, seed).unwrap();
            let back: WeightedInteractionGraph = serde_json::from_str(&w.to_json()).unwrap();
            prop_assert_eq!(back, w);
        }
    }

    #[test]
    fn upsilon_pair() {
        let g = generate_regular(300, 3, 5).unwrap();
        let cfg = EpidemicConfig::new(2, 1.0, InfectiousPeriod::Infinite);
        let (w, tr) = build_upsilon(&g, &cfg, 3).unwrap();
        assert!(!w.censored());
        assert_eq!(w.activation(0, 1), Some(0));
        assert_eq!(w.weight(0, 1), tr.t_k);
        assert_eq!(w.phase(0, 1), Some(PhaseTag::Si));
    }

    #[test]
    fn upsilon_lemmas_hold() {
        let g = generate_regular(800, 3, 5).unwrap();
        for seed in 0..15 {
            let rho = if seed % 2 == 0 { 1.0 } else { 0.5 };
            let mut cfg = EpidemicConfig::new(8, rho, InfectiousPeriod::Infinite);
            if seed % 3 == 0 {
                cfg.initial_infectives = vec![2, 5];
            }
            let (w, tr) = build_upsilon(&g, &cfg, seed).unwrap();
            assert!(!w.censored());
            assert!(check_time_distance(&w, &tr).unwrap(), "seed {seed}");
            assert!(check_triangle(&w, &tr, InfectiousPeriod::Infinite));
            assert!(good_weights(&w, g.n()));
            assert!(w.resolved_weights().all(|(_, x)| x >= 1));
        }
    }

    #[test]
    fn upsilon_trace_matches_plain_run() {
        let g = generate_regular(600, 3, 1).unwrap();
        let mut cfg = EpidemicConfig::new(6, 0.7, InfectiousPeriod::Infinite);
        cfg.max_steps = Some(1_000_000);
        let (_, tr) = build_upsilon(&g, &cfg, 11).unwrap();
        let plain = run_epidemic(&g, &cfg, 11).unwrap();
        assert_eq!(tr.infected_at, plain.infected_at);
        assert_eq!(tr.t_k, plain.t_k);
    }

    #[test]
    fn psi_lemmas_hold() {
        let g = generate_regular(600, 3, 5).unwrap();
        for seed in 0..20 {
            let xi = [5, 60, 400, 3000][seed as usize % 4];
            let cfg = EpidemicConfig::new(7, 1.0, InfectiousPeriod::Finite(xi));
            let (w, tr) = build_psi(&g, &cfg, seed).unwrap();
            assert!(!w.censored());
            assert!(w.is_fully_resolved());
            let xi = InfectiousPeriod::Finite(xi);
            assert!(check_infect_component(&w, &tr, xi).unwrap(), "seed {seed}");
            assert!(
                check_threshold_distance(&w, &tr, xi).unwrap(),
                "seed {seed}"
            );
            assert!(check_triangle(&w, &tr, xi), "seed {seed}");
            // Same seed, same dynamics: the plain SIR run agrees.
            let plain = run_epidemic(&g, &cfg, seed).unwrap();
            assert_eq!(plain.infected_at, tr.infected_at);
        }
    }

    #[test]
    fn psi_with_long_period_equals_upsilon() {
        let g = generate_regular(400, 3, 5).unwrap();
        let big = 10_000_000;
        let cfg = EpidemicConfig::new(6, 1.0, InfectiousPeriod::Finite(big));
        let (psi, ptr) = build_psi(&g, &cfg, 4).unwrap();
        let (ups, utr) = build_upsilon(&g, &cfg, 4).unwrap();
        assert_eq!(ptr.m_k, 6);
        assert_eq!(ptr.infected_at, utr.infected_at);
        for (a, b) in ups.pairs() {
            assert_eq!(psi.weight(a, b), ups.weight(a, b));
            assert_eq!(psi.activation(a, b), ups.activation(a, b));
            assert_eq!(psi.phase(a, b), Some(PhaseTag::Phase1));
        }
    }

    #[test]
    fn psi_phase_two_covers_survivor_edges() {
        // xi = 1 on a large graph: the initial infective almost surely recovers
        // before meeting anyone.
        let g = generate_regular(3000, 3, 5).unwrap();
        let cfg = EpidemicConfig::new(3, 1.0, InfectiousPeriod::Finite(1));
        let (w, tr) = build_psi(&g, &cfg, 2).unwrap();
        assert_eq!(tr.m_k, 1);
        assert!(w.is_fully_resolved());
        assert_eq!(w.phase(0, 1), Some(PhaseTag::Phase1));
        assert_eq!(w.phase(0, 2), Some(PhaseTag::Phase1));
        assert_eq!(w.phase(1, 2), Some(PhaseTag::Phase2));
        assert!(check_infect_component(&w, &tr, InfectiousPeriod::Finite(1)).unwrap());
    }

    #[test]
    fn psi_rejects_infinite_period() {
        let g = generate_regular(100, 3, 5).unwrap();
        let cfg = EpidemicConfig::new(3, 1.0, InfectiousPeriod::Infinite);
        assert!(build_psi(&g, &cfg, 2).is_err());
    }

    #[test]
    fn censored_graph_is_flagged() {
        let g = generate_regular(5000, 3, 5).unwrap();
        let mut cfg = EpidemicConfig::new(5, 1.0, InfectiousPeriod::Infinite);
        cfg.max_steps = Some(10);
        let (w, _) = build_upsilon(&g, &cfg, 2).unwrap();
        assert!(w.censored());
        assert!(w.unresolved_count() > 0);
    }

    #[test]
    fn epochs_from_activation() {
        let g = generate_regular(300, 3, 5).unwrap();
        let cfg = EpidemicConfig::new(4, 1.0, InfectiousPeriod::Infinite);
        let (w, tr) = build_upsilon(&g, &cfg, 8).unwrap();
        let epochs = w.epochs();
        // One epoch per distinct infection time, except that the last
        // particle infected has no edges left to activate.
        let mut times: Vec<u64> = tr.infected_at.iter().flatten().copied().collect();
        times.sort_unstable();
        times.dedup();
        times.pop();
        assert_eq!(epochs.iter().map(|e| e.0).collect::<Vec<_>>(), times);
        // At time 0 the initial infective's three edges are active.
        assert_eq!(epochs[0].1, vec![(0, 1), (0, 2), (0, 3)]);
    }
}
