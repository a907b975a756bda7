//! Closed-form predictions and the reference samplers used as oracles.
//!
//! Two quantities named "phi" live here. [`phi_threshold`] is the expected
//! number of onward infections; [`TwoParticleChain::phi_escape`] is the
//! probability that two coincident particles separate without interacting.

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::epidemic::InfectiousPeriod;
use crate::error::{invalid, Result};
use crate::igraph::{ParticleGraph, PhaseTag, WeightedInteractionGraph};
use crate::rng;

/// Absolute tolerance of the giant-fraction root.
pub const GIANT_TOL: f64 = 1e-12;

/// Effective per-meeting interaction probability
/// `rho (r - 1) / (r - 2 + rho)`.
pub fn psi(rho: f64, r: usize) -> f64 {
    let r = r as f64;
    rho * (r - 1.0) / (r - 2.0 + rho)
}

/// `(r - 1) / (r - 2)`: pairwise meeting times scale as `theta_r * n`.
pub fn theta(r: usize) -> f64 {
    let r = r as f64;
    (r - 1.0) / (r - 2.0)
}

/// Per-step interaction rate of a pair, `psi / (theta_r n)`.
pub fn pair_rate(n: usize, r: usize, rho: f64) -> f64 {
    psi(rho, r) / (theta(r) * n as f64)
}

/// `1 - (1 - q)^xi`, with `x^inf = 0`.
pub fn q_hat(q: f64, xi: InfectiousPeriod) -> f64 {
    match xi {
        InfectiousPeriod::Infinite => 1.0,
        InfectiousPeriod::Finite(steps) => -(steps as f64 * (-q).ln_1p()).exp_m1(),
    }
}

/// `k (1 - (1 - psi / (theta_r n))^xi)`.
pub fn phi_threshold(k: usize, n: usize, r: usize, rho: f64, xi: InfectiousPeriod) -> f64 {
    k as f64 * q_hat(pair_rate(n, r, rho), xi)
}

/// Smallest `xi` with `phi_threshold(xi) >= target`.
pub fn xi_for_phi(target: f64, k: usize, n: usize, r: usize, rho: f64) -> Result<u64> {
    if !(target > 0.0 && target < k as f64) {
        return Err(invalid(format!(
            "phi target must lie in (0, k={k}), got {target}"
        )));
    }
    let q = pair_rate(n, r, rho);
    let xi = ((-target / k as f64).ln_1p() / (-q).ln_1p()).ceil();
    Ok((xi as u64).max(1))
}

/// Unique root in `(0, 1)` of `1 - x = exp(-c x)`, for `c > 1`.
pub fn giant_fraction(c: f64) -> Result<f64> {
    if !c.is_finite() || c <= 1.0 {
        return Err(invalid(format!("giant fraction needs c > 1, got {c}")));
    }
    // g(x) = 1 - x - exp(-c x) is positive on (0, C) and negative on (C, 1].
    let g = |x: f64| 1.0 - x - (-c * x).exp();
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > GIANT_TOL * 0.5 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Limiting SI completion time `2 theta_r n ln k / (psi k)`.
pub fn completion_prediction(n: usize, k: usize, r: usize, rho: f64) -> f64 {
    2.0 * theta(r) * n as f64 * (k as f64).ln() / (psi(rho, r) * k as f64)
}

/// Leading-order first-visit probability `p / (1 + p)^(t + 1)`.
pub fn first_visit_pmf(t: u64, p: f64) -> f64 {
    p * (-((t + 1) as f64) * p.ln_1p()).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoParticleChain {
    /// No interaction before two co-located walkers separate.
    pub phi_escape: f64,
    /// Return to coincidence after leaving by different edges.
    pub f: f64,
    /// No interaction before the walkers drift apart for good.
    pub phi_t: f64,
    /// `1 - phi_t`; equals [`psi`].
    pub psi_check: f64,
}

pub fn two_particle_chain(rho: f64, r: usize) -> TwoParticleChain {
    let rf = r as f64;
    let phi_escape = (1.0 - rho) * (rf - 1.0) / (rf - 1.0 + rho);
    let f = 1.0 / ((rf - 1.0) * (rf - 1.0));
    let phi_t = phi_escape * (1.0 - f) / (1.0 - phi_escape * f);
    TwoParticleChain {
        phi_escape,
        f,
        phi_t,
        psi_check: 1.0 - phi_t,
    }
}

/// Geometric on `{1, 2, ...}` with success probability `q`.
pub fn sample_geometric<R: Rng + ?Sized>(q: f64, rng: &mut R) -> u64 {
    Geometric::new(q).expect("q in (0, 1]").sample(rng) + 1
}

/// The reference weighting: every pair gets an independent `Geom(q)` weight.
pub fn sample_lambda(k: usize, q: f64, seed: u64) -> Result<WeightedInteractionGraph> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(invalid(format!("q must lie in (0, 1], got {q}")));
    }
    let mut rng = rng::stream(seed, rng::SAMPLER_STREAM);
    let weights = (0..k * (k - 1) / 2)
        .map(|_| sample_geometric(q, &mut rng))
        .collect();
    WeightedInteractionGraph::from_weights(k, weights, PhaseTag::Reference)
}

/// Erdos-Renyi graph on `k` vertices with edge probability `q_hat`.
pub fn sample_er(k: usize, q_hat: f64, seed: u64) -> Result<ParticleGraph> {
    if !(0.0..=1.0).contains(&q_hat) {
        return Err(invalid(format!("q_hat must lie in [0, 1], got {q_hat}")));
    }
    let mut rng = rng::stream(seed, rng::SAMPLER_STREAM);
    let mut edges = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            if rng.random_bool(q_hat) {
                edges.push((a, b));
            }
        }
    }
    Ok(ParticleGraph::new(k, edges))
}

/// Every derived quantity for one parameter point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TheoryParams {
    pub n: usize,
    pub r: usize,
    pub k: usize,
    pub rho: f64,
    pub xi: InfectiousPeriod,
    pub psi: f64,
    pub theta_r: f64,
    pub q: f64,
    pub q_hat: f64,
    pub phi_threshold: f64,
    /// Giant-component fraction, when `phi_threshold > 1`.
    pub giant_fraction: Option<f64>,
    pub completion_prediction: f64,
}

impl TheoryParams {
    pub fn new(n: usize, r: usize, k: usize, rho: f64, xi: InfectiousPeriod) -> Self {
        let q = pair_rate(n, r, rho);
        let phi = phi_threshold(k, n, r, rho, xi);
        TheoryParams {
            n,
            r,
            k,
            rho,
            xi,
            psi: psi(rho, r),
            theta_r: theta(r),
            q,
            q_hat: q_hat(q, xi),
            phi_threshold: phi,
            giant_fraction: giant_fraction(phi).ok(),
            completion_prediction: completion_prediction(n, k, r, rho),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Independent bisection on `1 - x - exp(-c x)` by plain halving, used as
    /// an oracle for frozen values.
    fn oracle_root(c: f64) -> f64 {
        let (mut lo, mut hi) = (1e-9, 1.0);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if 1.0 - m - (-c * m).exp() > 0.0 {
                lo = m;
            } else {
                hi = m;
            }
        }
        lo
    }

    #[test]
    fn psi_values() {
        for r in 3..12 {
            assert_eq!(psi(1.0, r), 1.0);
        }
        assert_relative_eq!(psi(0.5, 3), 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn psi_bounds_and_monotonicity() {
        for r in 3..=20 {
            let mut prev = 0.0;
            for i in 1..=100 {
                let rho = i as f64 / 100.0;
                let p = psi(rho, r);
                assert!(p >= rho - 1e-15 && p <= 1.0 + 1e-15);
                assert!(p > prev);
                prev = p;
                if i < 100 {
                    assert!(psi(rho, r + 1) < p);
                    assert!(p < 1.0);
                }
            }
        }
    }

    #[test]
    fn theta_values() {
        assert_eq!(theta(3), 2.0);
        assert_eq!(theta(4), 1.5);
        assert_relative_eq!(theta(1002), 1.001, epsilon = 1e-12);
        for r in 3..50 {
            assert!(theta(r) > 1.0);
        }
    }

    #[test]
    fn phi_special_cases() {
        assert_eq!(
            phi_threshold(37, 1000, 3, 0.7, InfectiousPeriod::Infinite),
            37.0
        );
        let one = phi_threshold(50, 1000, 4, 0.5, InfectiousPeriod::Finite(1));
        assert_relative_eq!(
            one,
            50.0 * psi(0.5, 4) / (theta(4) * 1000.0),
            max_relative = 1e-12
        );
    }

    #[test]
    fn invert_phi_two() {
        // ln(1 - 2/200) / ln(1 - 1/40000) = 402.008..., so the ceiling is 403.
        let xi = xi_for_phi(2.0, 200, 20_000, 3, 1.0).unwrap();
        assert_eq!(xi, 403);
        for x in [402, 403] {
            let phi = phi_threshold(200, 20_000, 3, 1.0, InfectiousPeriod::Finite(x));
            assert!((1.99..=2.01).contains(&phi), "{phi}");
        }
        assert!(phi_threshold(200, 20_000, 3, 1.0, InfectiousPeriod::Finite(403)) >= 2.0);
        assert!(phi_threshold(200, 20_000, 3, 1.0, InfectiousPeriod::Finite(402)) < 2.0);
        assert!(xi_for_phi(250.0, 200, 20_000, 3, 1.0).is_err());
    }

    #[test]
    fn giant_fraction_values() {
        assert!(giant_fraction(1.0001).unwrap() < 0.001);
        // Frozen from the oracle: C(2) = 0.79681213002...
        assert!((giant_fraction(2.0).unwrap() - 0.796_812_130_02).abs() < 1e-10);
        for c in [1.1, 1.5, 2.0, 3.0, 5.0, 10.0] {
            let x = giant_fraction(c).unwrap();
            assert!((1.0 - x - (-c * x).exp()).abs() <= 1e-12, "c = {c}");
            assert!((x - oracle_root(c)).abs() < 1e-11);
        }
        assert!(giant_fraction(20.0).unwrap() > 0.999999);
        assert!(giant_fraction(1.0).is_err());
        assert!(giant_fraction(0.5).is_err());
    }

    #[test]
    fn giant_fraction_is_monotone() {
        let mut prev = 0.0;
        for i in 1..200 {
            let c = 1.0 + i as f64 * 0.05;
            let x = giant_fraction(c).unwrap();
            assert!(x > prev);
            prev = x;
        }
    }

    #[test]
    fn completion_values() {
        let t = completion_prediction(5000, 50, 3, 1.0);
        assert!((t - 1564.809).abs() < 1e-3, "{t}");
        assert_relative_eq!(
            completion_prediction(5000, 50, 3, 0.5),
            1.5 * t,
            max_relative = 1e-12
        );
        let k = 40usize;
        let k2 = (k as f64 * std::f64::consts::E.powi(2)).round() as usize;
        let ratio =
            completion_prediction(5000, k2, 3, 1.0) / completion_prediction(5000, k, 3, 1.0);
        let exact = ((k2 as f64).ln() / k2 as f64) / ((k as f64).ln() / k as f64);
        assert_relative_eq!(ratio, exact, max_relative = 1e-12);
    }

    #[test]
    fn two_particle_values() {
        let c = two_particle_chain(1.0, 3);
        assert_eq!((c.phi_escape, c.phi_t, c.psi_check), (0.0, 0.0, 1.0));
        let c = two_particle_chain(0.5, 3);
        assert_relative_eq!(c.phi_escape, 0.4, epsilon = 1e-15);
        assert_relative_eq!(c.f, 0.25, epsilon = 1e-15);
        assert_relative_eq!(c.phi_t, 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(c.psi_check, psi(0.5, 3), epsilon = 1e-15);
    }

    #[test]
    fn escape_probability_matches_series() {
        // Direct summation of sum_i (1-rho)^i (1/r)^(i-1) (1 - 1/r).
        for r in 3..8 {
            for rho in [0.1f64, 0.35, 0.8] {
                let rf = r as f64;
                let series: f64 = (1..400)
                    .map(|i| (1.0 - rho).powi(i) * (1.0 / rf).powi(i - 1) * (1.0 - 1.0 / rf))
                    .sum();
                assert_relative_eq!(
                    two_particle_chain(rho, r).phi_escape,
                    series,
                    epsilon = 1e-14
                );
            }
        }
    }

    #[test]
    fn chain_identity_on_grid() {
        for r in 3..=10 {
            for i in 1..=100 {
                let rho = i as f64 / 100.0;
                let c = two_particle_chain(rho, r);
                assert!((c.psi_check - psi(rho, r)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lambda_sampler() {
        let q = 0.02;
        let g = sample_lambda(60, q, 9).unwrap();
        let w: Vec<f64> = g.resolved_weights().map(|(_, w)| w as f64).collect();
        assert_eq!(w.len(), 60 * 59 / 2);
        let mean = w.iter().sum::<f64>() / w.len() as f64;
        let se = ((1.0 - q) / (q * q)).sqrt() / (w.len() as f64).sqrt();
        assert!((mean - 1.0 / q).abs() < 3.0 * se, "{mean}");
        let ones = sample_lambda(10, 1.0, 1).unwrap();
        assert!(ones.resolved_weights().all(|(_, w)| w == 1));
        assert_eq!(
            sample_lambda(20, q, 4).unwrap(),
            sample_lambda(20, q, 4).unwrap()
        );
    }

    #[test]
    fn er_sampler() {
        assert_eq!(sample_er(30, 0.0, 1).unwrap().edge_count(), 0);
        assert_eq!(sample_er(30, 1.0, 1).unwrap().edge_count(), 435);
        let k = 200;
        let p = 0.1;
        let g = sample_er(k, p, 5).unwrap();
        let m = (k * (k - 1) / 2) as f64;
        let sigma = (m * p * (1.0 - p)).sqrt();
        assert!((g.edge_count() as f64 - m * p).abs() < 3.0 * sigma);
    }

    #[test]
    fn first_visit_tail() {
        let p = 1.0 / 20_000.0;
        for t0 in [0u64, 10, 5000] {
            let tail: f64 = (t0..t0 + 2_000_000).map(|t| first_visit_pmf(t, p)).sum();
            let exact = (1.0 + p).powf(-(t0 as f64));
            assert!((tail - exact).abs() < 1e-6, "{tail} vs {exact}");
        }
        assert!(first_visit_pmf(0, p) > first_visit_pmf(1, p));
    }

    #[test]
    fn theory_params_invariants() {
        let tp = TheoryParams::new(20_000, 3, 200, 1.0, InfectiousPeriod::Finite(403));
        assert_eq!(tp.psi, 1.0);
        assert!(tp.q > 0.0 && tp.q < 1.0 && tp.q_hat > 0.0 && tp.q_hat < 1.0);
        let c = tp.giant_fraction.unwrap();
        assert!(c > 0.79 && c < 0.80);
        let sub = TheoryParams::new(20_000, 3, 200, 1.0, InfectiousPeriod::Finite(101));
        assert!(sub.giant_fraction.is_none());
    }
}
