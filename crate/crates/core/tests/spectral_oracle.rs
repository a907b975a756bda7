//! Lanczos second eigenvalue against a dense symmetric eigensolver.

use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use viralwalk::rrg::{generate_regular, second_eigenvalue, RegularGraph};

fn dense_lambda2(g: &RegularGraph) -> f64 {
    let n = g.n();
    let a = DMatrix::from_fn(n, n, |i, j| if g.has_edge(i, j) { 1.0 } else { 0.0 });
    let mut ev: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev[1]
}

#[test]
fn petersen_is_exact() {
    let g = RegularGraph::petersen();
    assert!((second_eigenvalue(&g, 1e-12).unwrap() - 1.0).abs() < 1e-10);
    assert!((dense_lambda2(&g) - 1.0).abs() < 1e-10);
}

#[test]
fn moderate_graphs() {
    for (n, r, seed) in [(300, 3, 1), (400, 4, 2), (250, 5, 3), (500, 3, 4)] {
        let g = generate_regular(n, r, seed).unwrap();
        let got = second_eigenvalue(&g, 1e-10).unwrap();
        let want = dense_lambda2(&g);
        assert!((got - want).abs() < 1e-7, "n={n} r={r}: {got} vs {want}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn small_graphs(half in 3usize..60, r in 3usize..6, seed in 0u64..1000) {
        let n = 2 * half;
        prop_assume!(n > r);
        let g = match generate_regular(n, r, seed) {
            Ok(g) => g,
            Err(_) => return Ok(()),
        };
        let got = second_eigenvalue(&g, 1e-10).unwrap();
        let want = dense_lambda2(&g);
        prop_assert!((got - want).abs() < 1e-7, "n={} r={}: {} vs {}", n, r, got, want);
    }
}
