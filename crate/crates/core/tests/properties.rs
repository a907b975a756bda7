//! Cross-module invariants.

use proptest::prelude::*;
use viralwalk::epidemic::{run_epidemic, EpidemicConfig, InfectiousPeriod};
use viralwalk::harness::{run_experiment, ExperimentConfig, ExperimentKind, TrialSummary};
use viralwalk::igraph::threshold;
use viralwalk::rrg::generate_regular;
use viralwalk::theory::{
    giant_fraction, phi_threshold, psi, q_hat, sample_er, sample_lambda, xi_for_phi,
};

#[test]
fn psi_grid_monotonicity() {
    for r in 3..=12 {
        for i in 1..100 {
            let (lo, hi) = (i as f64 / 100.0, (i + 1) as f64 / 100.0);
            assert!(psi(lo, r) < psi(hi, r));
            // Higher degree makes escape likelier, so psi falls with r.
            assert!(psi(lo, r + 1) < psi(lo, r));
        }
        assert_eq!(psi(1.0, r), 1.0);
    }
}

#[test]
fn giant_fraction_limits() {
    assert!(giant_fraction(20.0).unwrap() > 0.999_999);
    let mut prev = 0.0;
    for i in 1..200 {
        let c = giant_fraction(1.0 + i as f64 * 0.05).unwrap();
        assert!(c > prev);
        prev = c;
    }
}

proptest! {
    #[test]
    fn xi_inversion_is_minimal(target in 0.1f64..10.0, k in 20usize..300, n in 1000usize..50_000) {
        let n = n * 2;
        let xi = xi_for_phi(target, k, n, 3, 1.0).unwrap();
        prop_assert!(phi_threshold(k, n, 3, 1.0, InfectiousPeriod::Finite(xi)) >= target * (1.0 - 1e-12));
        if xi > 1 {
            prop_assert!(phi_threshold(k, n, 3, 1.0, InfectiousPeriod::Finite(xi - 1)) < target);
        }
    }

    #[test]
    fn q_hat_is_monotone(q in 1e-6f64..0.5, a in 0u64..5000, b in 0u64..5000) {
        let (lo, hi) = (a.min(b), a.max(b));
        let (x, y) = (q_hat(q, InfectiousPeriod::Finite(lo)), q_hat(q, InfectiousPeriod::Finite(hi)));
        prop_assert!((0.0..=1.0).contains(&x) && x <= y);
    }

    #[test]
    fn thresholds_nest(k in 2usize..25, seed in 0u64..500, a in 0u64..400, b in 0u64..400) {
        let w = sample_lambda(k, 0.01, seed).unwrap();
        let lo = threshold(&w, InfectiousPeriod::Finite(a.min(b))).unwrap();
        let hi = threshold(&w, InfectiousPeriod::Finite(a.max(b))).unwrap();
        prop_assert!(lo.edges.iter().all(|&(x, y)| hi.has_edge(x, y)));
        prop_assert_eq!(threshold(&w, InfectiousPeriod::Infinite).unwrap().edge_count(), k * (k - 1) / 2);
        prop_assert_eq!(threshold(&w, InfectiousPeriod::Finite(0)).unwrap().edge_count(), 0);
    }

    #[test]
    fn er_extremes(k in 2usize..40, seed in 0u64..100) {
        prop_assert_eq!(sample_er(k, 0.0, seed).unwrap().edge_count(), 0);
        prop_assert_eq!(sample_er(k, 1.0, seed).unwrap().edge_count(), k * (k - 1) / 2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The walks and interaction draws do not depend on the period, so a
    /// longer period can only enlarge the infected set.
    #[test]
    fn longer_periods_infect_supersets(seed in 0u64..10_000, a in 1u64..3000, b in 1u64..3000) {
        let g = generate_regular(1000, 3, seed).unwrap();
        let run = |xi| {
            let cfg = EpidemicConfig { max_steps: Some(200_000), ..EpidemicConfig::new(8, 0.7, InfectiousPeriod::Finite(xi)) };
            run_epidemic(&g, &cfg, seed).unwrap()
        };
        let (lo, hi) = (run(a.min(b)), run(a.max(b)));
        for x in 0..8 {
            if let Some(t) = lo.infected_at[x] {
                prop_assert!(hi.infected_at[x].is_some_and(|u| u <= t));
            }
        }
    }

    #[test]
    fn summaries_round_trip(seed in 0u64..1000) {
        let cfg = ExperimentConfig {
            kind: ExperimentKind::LemmaAudit,
            n: 300,
            k: 5,
            xi: Some(InfectiousPeriod::Finite(100)),
            trials: 2,
            base_seed: seed,
            ..Default::default()
        };
        let (ts, _) = run_experiment(&cfg).unwrap();
        for t in ts {
            let back: TrialSummary = serde_json::from_str(&serde_json::to_string(&t).unwrap()).unwrap();
            prop_assert_eq!(back, t);
        }
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let cfg = ExperimentConfig {
        kind: ExperimentKind::Regimes,
        n: 2000,
        k: 15,
        phi: Some(2.0),
        trials: 12,
        ..Default::default()
    };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_experiment(&cfg).unwrap())
    };
    let (a, ra) = run(1);
    let (b, rb) = run(4);
    assert_eq!(a, b);
    assert_eq!(ra, rb);
    assert_eq!(
        serde_json::to_string(&ra).unwrap(),
        serde_json::to_string(&rb).unwrap()
    );
}
