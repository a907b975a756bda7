//! Build both interaction graphs for one run and check the exact reductions:
//! SI infection times are weighted distances, and the SIR infected set is the
//! set of components of the initial infective once heavy edges are dropped.

use viralwalk::epidemic::{EpidemicConfig, InfectiousPeriod};
use viralwalk::igraph::{
    build_psi, build_upsilon, check_infect_component, check_time_distance, good_weights, threshold,
    PhaseTag,
};
use viralwalk::rrg::generate_regular;
use viralwalk::theory::xi_for_phi;

fn main() -> viralwalk::Result<()> {
    let (n, k, seed) = (5000, 20, 11);
    let g = generate_regular(n, 3, seed)?;

    let si = EpidemicConfig::new(k, 1.0, InfectiousPeriod::Infinite);
    let (ups, trace) = build_upsilon(&g, &si, seed)?;
    println!("SI: M_k={} T_k={:?}", trace.m_k, trace.t_k);
    println!(
        "  infection times = distances: {}",
        check_time_distance(&ups, &trace)?
    );
    println!("  good weights: {}", good_weights(&ups, n));

    let xi = InfectiousPeriod::Finite(xi_for_phi(2.0, k, n, 3, 1.0)?);
    let sir = EpidemicConfig::new(k, 1.0, xi);
    let (psi, trace) = build_psi(&g, &sir, seed)?;
    let phase2 = psi
        .pairs()
        .filter(|&(a, b)| psi.phase(a, b) == Some(PhaseTag::Phase2))
        .count();
    println!(
        "SIR xi={xi}: M_k={} ({} of {} edges weighted in phase 2)",
        trace.m_k,
        phase2,
        k * (k - 1) / 2
    );
    println!(
        "  infected set = thresholded components: {}",
        check_infect_component(&psi, &trace, xi)?
    );
    let comps = threshold(&psi, xi)?.components();
    println!(
        "  components after thresholding: {:?}",
        comps.iter().map(Vec::len).collect::<Vec<_>>()
    );
    Ok(())
}
