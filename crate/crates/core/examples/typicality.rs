//! Typicality diagnostics for a few random graphs and for the Petersen graph.

use viralwalk::rrg::{
    check_typical, generate_regular, second_eigenvalue, RegularGraph, TypicalityConfig,
};

fn main() -> viralwalk::Result<()> {
    let cfg = TypicalityConfig {
        sample_size: 500,
        ..Default::default()
    };
    println!(
        "{:>6} {:>5} {:>8} {:>4} {:>12} {:>8} {:>8}",
        "n", "seed", "lambda2", "L1", "small-cycle", "P4", "typical"
    );
    for n in [500, 2000, 10_000] {
        for seed in 0..3 {
            let g = generate_regular(n, 3, seed)?;
            let rep = check_typical(&g, &TypicalityConfig { seed, ..cfg })?;
            println!(
                "{n:>6} {seed:>5} {:>8.4} {:>4} {:>12} {:>8} {:>8}",
                rep.lambda2,
                rep.l1,
                rep.small_cycle_vertex_count,
                rep.p4_violation,
                rep.is_typical()
            );
        }
    }

    let p = RegularGraph::petersen();
    println!("\npetersen lambda2 = {:.12}", second_eigenvalue(&p, 1e-12)?);
    let rep = check_typical(&p, &TypicalityConfig::default())?;
    println!(
        "{}",
        serde_json::to_string_pretty(&rep).expect("report serialises")
    );
    Ok(())
}
