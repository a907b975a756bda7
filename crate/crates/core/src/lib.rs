//! Epidemics carried by random walks on random regular graphs.
//!
//! `k` particles walk independently and synchronously on a uniformly random
//! `r`-regular graph. Coincident particles interact with probability `rho`, and
//! an interaction between an infected and a susceptible particle passes the
//! infection on. Infected particles recover after `xi` steps (SIR) or never (SI).
//!
//! The crate simulates that process and reduces each run to a weighted
//! interaction graph on the particle set. Infection times are weighted
//! distances in that graph and, after thresholding at `xi`, the infected set is
//! a union of connected components. The thresholded graph behaves like an
//! Erdos-Renyi graph, which gives closed-form predictions for outbreak sizes
//! and completion times ([`theory`]). [`harness`] runs seeded, parallel
//! experiments that compare simulation against those predictions.
//!
//! | module | contents |
//! |---|---|
//! | [`rrg`] | configuration-model generator, typicality diagnostics, second eigenvalue |
//! | [`walker`] | general-position placement, synchronous steps, coincidence detection |
//! | [`epidemic`] | SIR/SI dynamics, scripted schedules |
//! | [`igraph`] | interaction graphs, thresholding, components, weighted distances |
//! | [`theory`] | closed forms and reference samplers |
//! | [`harness`] | experiments, statistics, regime classification, validation suites |

pub mod epidemic;
pub mod error;
pub mod harness;
pub mod igraph;
pub mod rng;
pub mod rrg;
pub mod theory;
pub mod walker;

pub use epidemic::{EpidemicConfig, EpidemicTrace, InfectiousPeriod, Status};
pub use error::{Error, Result};
pub use igraph::{ParticleGraph, WeightedInteractionGraph};
pub use rrg::RegularGraph;
pub use theory::TheoryParams;
pub use walker::{MeetingEvent, WalkState};
