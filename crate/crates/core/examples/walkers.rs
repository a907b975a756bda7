//! Place particles in general position, walk them and report coincidences.
//! Writes the first 50 steps of the trajectory as CSV.

use viralwalk::rrg::generate_regular;
use viralwalk::walker::{self, coincident_pairs, min_separation, ParticleStreams, TrajectoryCsv};

fn main() -> viralwalk::Result<()> {
    let (n, k, seed) = (2000, 12, 3);
    let g = generate_regular(n, 3, seed)?;
    let mut state = walker::init_general_position(&g, k, 1.0, seed)?;
    println!(
        "minimum pairwise distance at start: {}",
        min_separation(n, k, 1.0)
    );

    let path = std::env::temp_dir().join("viralwalk-trajectory.csv");
    let mut csv = TrajectoryCsv::new(std::fs::File::create(&path)?)?;
    let mut streams = ParticleStreams::new(seed, k);
    let mut meetings = 0;
    csv.record(&state)?;
    for _ in 0..20_000 {
        walker::step(&mut state, &g, &mut streams);
        if state.step <= 50 {
            csv.record(&state)?;
        }
        for ev in coincident_pairs(&state) {
            meetings += ev.pairs().count();
            if meetings <= 5 {
                println!(
                    "step {:>6}: particles {:?} meet at vertex {}",
                    ev.step, ev.particles, ev.vertex
                );
            }
        }
    }
    // A pair shares a vertex with probability 1/n at any step. Fresh meetings
    // are rarer, 1/(theta_r n) per step, because met pairs tend to re-meet.
    let pairs = (k * (k - 1) / 2) as f64;
    println!(
        "{meetings} coincident pair-steps in 20000 steps; about {:.0} expected, from about {:.0} separate meetings",
        pairs * 20_000.0 / n as f64,
        pairs * 20_000.0 / (viralwalk::theory::theta(3) * n as f64)
    );
    println!("trajectory written to {}", path.display());
    Ok(())
}
