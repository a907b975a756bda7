//! Generate a random 3-regular graph, save it, load it back and print a few
//! structural facts.
//!
//! cargo run --example generate_graph -- 1000 3 7

use viralwalk::rrg::{generate_regular, second_eigenvalue, RegularGraph};

fn main() -> viralwalk::Result<()> {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("integer argument"))
        .collect();
    let n = args.first().copied().unwrap_or(1000) as usize;
    let r = args.get(1).copied().unwrap_or(3) as usize;
    let seed = args.get(2).copied().unwrap_or(7);

    let g = generate_regular(n, r, seed)?;
    let path = std::env::temp_dir().join(format!("viralwalk-{n}-{r}-{seed}.txt"));
    g.save(&path)?;
    let back = RegularGraph::load(&path)?;
    assert_eq!(back, g);

    let dist = g.distances_from(0);
    let diameter_from_0 = dist.iter().max().unwrap();
    println!("n={n} r={r} seed={seed} edges={}", g.edge_count());
    println!("saved to {}", path.display());
    println!(
        "connected={} bipartite={}",
        g.is_connected(),
        g.is_bipartite()
    );
    println!("eccentricity of vertex 0: {diameter_from_0}");
    println!("neighbours of 0: {:?}", g.neighbors(0));
    println!(
        "lambda2 = {:.4} (Ramanujan bound {:.4})",
        second_eigenvalue(&g, 1e-8)?,
        2.0 * ((r - 1) as f64).sqrt()
    );
    Ok(())
}
