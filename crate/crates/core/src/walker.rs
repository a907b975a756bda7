//! Independent synchronous random walks and coincidence detection.

use std::collections::HashMap;
use std::io::Write;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng;
use crate::rrg::RegularGraph;

/// Full placements tried before giving up.
pub const PLACEMENT_RETRY_BUDGET: usize = 200;
/// Uniform draws per particle within one placement attempt.
pub const DRAWS_PER_PARTICLE: usize = 1000;

const NONE: u32 = u32::MAX;
const GROUP: u32 = 1 << 31;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkState {
    pub positions: Vec<usize>,
    pub step: u64,
}

/// Particles coincident on one vertex after a step.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeetingEvent {
    pub step: u64,
    pub vertex: usize,
    /// Ascending particle ids, at least two.
    pub particles: Vec<usize>,
}

impl MeetingEvent {
    /// Unordered pairs `(a, b)`, `a < b`, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.particles
            .iter()
            .enumerate()
            .flat_map(move |(i, &a)| self.particles[i + 1..].iter().map(move |&b| (a, b)))
    }
}

/// `ceil(alpha * (ln ln n + ln k))`, clamped at zero.
pub fn min_separation(n: usize, k: usize, alpha: f64) -> usize {
    let raw = alpha * ((n as f64).ln().ln() + (k as f64).ln());
    if raw.is_nan() || raw <= 0.0 {
        0
    } else {
        raw.ceil() as usize
    }
}

/// Places `k` particles with pairwise graph distance at least
/// `min_separation(n, k, alpha)`.
///
/// Particles are placed one at a time, each by rejection from uniform draws.
/// `alpha = 0` imposes no constraint at all, coincidences included.
pub fn init_general_position(
    g: &RegularGraph,
    k: usize,
    alpha: f64,
    seed: u64,
) -> Result<WalkState> {
    if k < 2 {
        return Err(invalid(format!("need at least two particles, got {k}")));
    }
    if alpha.is_nan() || alpha < 0.0 {
        return Err(invalid(format!("alpha must be non-negative, got {alpha}")));
    }
    let n = g.n();
    let d_min = min_separation(n, k, alpha);
    let mut rng = rng::stream(seed, rng::PLACEMENT_STREAM);
    if d_min == 0 {
        return Ok(WalkState {
            positions: (0..k).map(|_| rng.random_range(0..n)).collect(),
            step: 0,
        });
    }

    let mut owner = vec![NONE; n];
    let mut touched = Vec::new();
    let mut failure = (0, 0);
    'attempt: for _ in 0..PLACEMENT_RETRY_BUDGET {
        for &v in &touched {
            owner[v] = NONE;
        }
        touched.clear();
        let mut positions = Vec::with_capacity(k);
        for i in 0..k {
            let mut placed = None;
            for _ in 0..DRAWS_PER_PARTICLE {
                let v = rng.random_range(0..n);
                if owner[v] == NONE {
                    placed = Some(v);
                    break;
                }
                failure = (i, owner[v] as usize);
            }
            let Some(v) = placed else {
                continue 'attempt;
            };
            positions.push(v);
            for (u, _) in g.ball(v, d_min - 1) {
                if owner[u] == NONE {
                    owner[u] = i as u32;
                    touched.push(u);
                }
            }
        }
        return Ok(WalkState { positions, step: 0 });
    }
    Err(Error::PlacementExhausted {
        attempts: PLACEMENT_RETRY_BUDGET,
        particle: failure.0,
        conflict: failure.1,
        min_distance: d_min,
    })
}

/// One ChaCha8 stream per particle.
#[derive(Debug, Clone)]
pub struct ParticleStreams {
    streams: Vec<ChaCha8Rng>,
}

impl ParticleStreams {
    pub fn new(seed: u64, k: usize) -> Self {
        ParticleStreams {
            streams: (0..k).map(|i| rng::particle_stream(seed, i)).collect(),
        }
    }
}

/// Moves every particle to a uniform neighbour; particle `i` draws from
/// stream `i`.
pub fn step(state: &mut WalkState, g: &RegularGraph, streams: &mut ParticleStreams) {
    let r = g.degree();
    for (pos, rng) in state.positions.iter_mut().zip(streams.streams.iter_mut()) {
        *pos = g.neighbors(*pos)[rng.random_range(0..r)];
    }
    state.step += 1;
}

/// Groups of coincident particles at the current step, one event per shared
/// vertex, ordered by the second-lowest particle id of each group.
pub fn coincident_pairs(state: &WalkState) -> Vec<MeetingEvent> {
    let mut slot: HashMap<usize, u32> = HashMap::with_capacity(state.positions.len());
    let mut events = Vec::new();
    for (i, &v) in state.positions.iter().enumerate() {
        let entry = slot.entry(v).or_insert(NONE);
        bucket(entry, i, v, state.step, &mut events);
    }
    events
}

#[inline]
fn bucket(slot: &mut u32, i: usize, v: usize, step: u64, events: &mut Vec<MeetingEvent>) {
    match *slot {
        NONE => *slot = i as u32,
        s if s & GROUP != 0 => events[(s & !GROUP) as usize].particles.push(i),
        first => {
            events.push(MeetingEvent {
                step,
                vertex: v,
                particles: vec![first as usize, i],
            });
            *slot = GROUP | (events.len() - 1) as u32;
        }
    }
}

/// Reusable per-vertex buckets for [`coincident_pairs`] in hot loops.
#[derive(Debug, Clone)]
pub struct CoincidenceScratch {
    slot: Vec<u32>,
}

impl CoincidenceScratch {
    pub fn new(n: usize) -> Self {
        CoincidenceScratch {
            slot: vec![NONE; n],
        }
    }

    pub fn find(&mut self, state: &WalkState, events: &mut Vec<MeetingEvent>) {
        events.clear();
        for (i, &v) in state.positions.iter().enumerate() {
            bucket(&mut self.slot[v], i, v, state.step, events);
        }
        for &v in &state.positions {
            self.slot[v] = NONE;
        }
    }
}

/// Writes `step,particle,vertex` rows.
pub struct TrajectoryCsv<W: Write> {
    out: W,
}

impl<W: Write> TrajectoryCsv<W> {
    pub fn new(mut out: W) -> std::io::Result<Self> {
        writeln!(out, "step,particle,vertex")?;
        Ok(TrajectoryCsv { out })
    }

    pub fn record(&mut self, state: &WalkState) -> std::io::Result<()> {
        for (i, v) in state.positions.iter().enumerate() {
            writeln!(self.out, "{},{},{}", state.step, i, v)?;
        }
        Ok(())
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}
