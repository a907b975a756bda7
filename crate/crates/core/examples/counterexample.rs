//! Four particles where the SIR outcome and the thresholded SI weights
//! disagree: with a period of 10, d is infected along a, b, c, d, yet every
//! SI-style edge into d is heavier than 10.

use viralwalk::epidemic::{run_scripted, InfectiousPeriod};
use viralwalk::igraph::{threshold, PhaseTag, WeightedInteractionGraph};

const NAMES: [char; 4] = ['a', 'b', 'c', 'd'];

fn main() -> viralwalk::Result<()> {
    let (a, b, c, d) = (0, 1, 2, 3);
    let schedule = [
        ((a, b), 9),
        ((a, d), 11),
        ((b, c), 18),
        ((c, d), 22),
        ((c, d), 27),
        ((a, c), 100),
        ((b, d), 100),
    ];
    let xi = InfectiousPeriod::Finite(10);
    let trace = run_scripted(4, &schedule, xi, &[a])?;
    for (x, t) in trace.infected_at.iter().enumerate() {
        println!("{} infected at {:?}", NAMES[x], t);
    }

    let table = WeightedInteractionGraph::from_table(
        4,
        &[
            ((a, b), 9),
            ((a, c), 100),
            ((a, d), 11),
            ((b, c), 9),
            ((b, d), 91),
            ((c, d), 11),
        ],
        PhaseTag::Si,
    )?;
    let kept = threshold(&table, xi)?;
    let comps: Vec<String> = kept
        .components()
        .iter()
        .map(|c| c.iter().map(|&x| NAMES[x]).collect())
        .collect();
    println!(
        "thresholded SI weights keep {:?}; components {comps:?}",
        kept.edges
    );
    Ok(())
}
