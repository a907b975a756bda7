//! Typicality diagnostics: connectivity, bipartiteness, the spectral bound,
//! short cycles and treelike neighbourhoods.

use std::collections::HashMap;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{second_eigenvalue, RegularGraph};
use crate::error::{invalid, Result};
use crate::rng;

/// Tolerance used for lambda_2 inside the report.
pub const SPECTRAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypicalityConfig {
    /// Radius constant: `L1 = floor(eps1 * log_r n)`.
    pub eps1: f64,
    /// Slack on the spectral bound `2 sqrt(r - 1) + eps`.
    pub eps: f64,
    /// Vertices sampled for the treelike fraction; `n` gives the exact value.
    pub sample_size: usize,
    pub seed: u64,
}

impl Default for TypicalityConfig {
    fn default() -> Self {
        TypicalityConfig {
            eps1: 0.25,
            eps: 0.1,
            sample_size: usize::MAX,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypicalityReport {
    pub n: usize,
    pub r: usize,
    pub connected: bool,
    pub bipartite: bool,
    pub lambda2: f64,
    pub spectral_bound: f64,
    pub spectral_bound_holds: bool,
    pub l1: usize,
    /// Vertices lying on a cycle of length at most `l1`.
    pub small_cycle_vertex_count: usize,
    pub small_cycle_bound_holds: bool,
    /// Some small-cycle vertex sees two independent cycles within distance
    /// `100 * l1`.
    pub p4_violation: bool,
    pub treelike_fraction: f64,
    pub sample_size: usize,
}

impl TypicalityReport {
    pub fn is_typical(&self) -> bool {
        self.connected
            && !self.bipartite
            && self.spectral_bound_holds
            && self.small_cycle_bound_holds
            && !self.p4_violation
    }
}

pub fn l1_radius(n: usize, r: usize, eps1: f64) -> usize {
    // The small epsilon guards exact powers of r, where log_r n is an
    // integer that floating point may land just under.
    (eps1 * (n as f64).ln() / (r as f64).ln() + 1e-12).floor() as usize
}

pub fn check_typical(g: &RegularGraph, cfg: &TypicalityConfig) -> Result<TypicalityReport> {
    if !(cfg.eps1 > 0.0 && cfg.eps1 < 1.0) {
        return Err(invalid(format!(
            "eps1 must lie in (0, 1), got {}",
            cfg.eps1
        )));
    }
    if cfg.eps <= 0.0 {
        return Err(invalid(format!("eps must be positive, got {}", cfg.eps)));
    }
    let n = g.n();
    let r = g.degree();
    let sample_size = cfg.sample_size.min(n);
    let l1 = l1_radius(n, r, cfg.eps1);

    let connected = g.is_connected();
    let bipartite = g.is_bipartite();
    let lambda2 = second_eigenvalue(g, SPECTRAL_TOL)?;
    let spectral_bound = 2.0 * ((r - 1) as f64).sqrt() + cfg.eps;

    let small: Vec<usize> = (0..n)
        .into_par_iter()
        .filter(|&v| shortest_cycle_through(g, v, l1).is_some_and(|len| len <= l1))
        .collect();
    let p4_violation = small
        .par_iter()
        .any(|&v| cyclomatic_number(g, v, 100 * l1) >= 2);

    let vertices: Vec<usize> = if sample_size == n {
        (0..n).collect()
    } else {
        let mut rng = rng::stream(cfg.seed, rng::SAMPLER_STREAM);
        let mut s = index::sample(&mut rng, n, sample_size).into_vec();
        s.sort_unstable();
        s
    };
    let treelike = vertices
        .par_iter()
        .filter(|&&v| cyclomatic_number(g, v, l1) == 0)
        .count();
    let treelike_fraction = if vertices.is_empty() {
        1.0
    } else {
        treelike as f64 / vertices.len() as f64
    };

    Ok(TypicalityReport {
        n,
        r,
        connected,
        bipartite,
        lambda2,
        spectral_bound,
        spectral_bound_holds: lambda2 <= spectral_bound,
        l1,
        small_cycle_vertex_count: small.len(),
        small_cycle_bound_holds: (small.len() as f64) <= (n as f64).powf(2.0 * cfg.eps1),
        p4_violation,
        treelike_fraction,
        sample_size: vertices.len(),
    })
}

/// Length of the shortest cycle through `v` whose vertices all lie within
/// `radius` of `v`, if any.
pub fn shortest_cycle_through(g: &RegularGraph, v: usize, radius: usize) -> Option<usize> {
    // BFS recording depth and the first-hop branch each vertex hangs off.
    let mut info: HashMap<usize, (usize, usize, usize)> = HashMap::new(); // vertex -> (depth, branch, parent)
    let mut order = vec![v];
    info.insert(v, (0, usize::MAX, usize::MAX));
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        let (d, branch, _) = info[&u];
        if d == radius {
            continue;
        }
        for &w in g.neighbors(u) {
            if let std::collections::hash_map::Entry::Vacant(e) = info.entry(w) {
                let b = if u == v { w } else { branch };
                e.insert((d + 1, b, u));
                order.push(w);
            }
        }
    }
    let mut best: Option<usize> = None;
    for &u in &order[1..] {
        let (du, bu, pu) = info[&u];
        for &w in g.neighbors(u) {
            if w == pu || w == v {
                continue;
            }
            if let Some(&(dw, bw, pw)) = info.get(&w) {
                if pw == u || bw == bu {
                    continue;
                }
                let len = du + dw + 1;
                best = Some(best.map_or(len, |b: usize| b.min(len)));
            }
        }
    }
    best
}

/// `E - V + 1` of the subgraph induced by the ball of radius `radius` around
/// `v`. The ball is connected, so this is zero exactly when it is a tree.
pub fn cyclomatic_number(g: &RegularGraph, v: usize, radius: usize) -> usize {
    let ball = g.ball(v, radius);
    let members: std::collections::HashSet<usize> = ball.iter().map(|&(u, _)| u).collect();
    let twice_edges: usize = ball
        .iter()
        .map(|&(u, _)| {
            g.neighbors(u)
                .iter()
                .filter(|w| members.contains(w))
                .count()
        })
        .sum();
    twice_edges / 2 + 1 - ball.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rrg::generate_regular;

    fn petersen() -> RegularGraph {
        RegularGraph::petersen()
    }

    #[test]
    fn k4_report() {
        let g = generate_regular(4, 3, 0).unwrap();
        let rep = check_typical(
            &g,
            &TypicalityConfig {
                eps1: 0.1,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(rep.connected);
        assert!(!rep.bipartite);
        assert_eq!(rep.l1, 0);
        assert_eq!(rep.treelike_fraction, 1.0);
        assert_eq!(rep.small_cycle_vertex_count, 0);
        assert!((rep.lambda2 + 1.0).abs() < 1e-6);
    }

    #[test]
    fn eps1_out_of_range() {
        let g = generate_regular(10, 3, 0).unwrap();
        let cfg = TypicalityConfig {
            eps1: 1.5,
            ..Default::default()
        };
        assert!(check_typical(&g, &cfg).is_err());
    }

    #[test]
    fn girth_of_petersen_is_five() {
        let g = petersen();
        for v in 0..10 {
            assert_eq!(shortest_cycle_through(&g, v, 10), Some(5));
            assert_eq!(shortest_cycle_through(&g, v, 2), Some(5));
            assert_eq!(shortest_cycle_through(&g, v, 1), None);
        }
    }

    #[test]
    fn k4_has_triangles_everywhere() {
        let g = generate_regular(4, 3, 0).unwrap();
        for v in 0..4 {
            assert_eq!(shortest_cycle_through(&g, v, 2), Some(3));
            assert_eq!(shortest_cycle_through(&g, v, 1), Some(3));
        }
        assert_eq!(cyclomatic_number(&g, 0, 1), 3);
    }

    #[test]
    fn cycle_detection_matches_brute_force() {
        // Brute force: v lies on a cycle of length <= L iff some neighbour u
        // reaches v again in <= L - 1 steps without using edge (v, u).
        let g = generate_regular(60, 3, 17).unwrap();
        for v in 0..60 {
            let fast = shortest_cycle_through(&g, v, 8);
            let mut brute = None;
            for &u in g.neighbors(v) {
                // BFS from u avoiding the edge v-u.
                let mut dist = vec![usize::MAX; 60];
                dist[u] = 0;
                let mut q = std::collections::VecDeque::from([u]);
                while let Some(x) = q.pop_front() {
                    for &y in g.neighbors(x) {
                        if (x == u && y == v) || dist[y] != usize::MAX {
                            continue;
                        }
                        dist[y] = dist[x] + 1;
                        q.push_back(y);
                    }
                }
                if dist[v] != usize::MAX {
                    let len = dist[v] + 1;
                    brute = Some(brute.map_or(len, |b: usize| b.min(len)));
                }
            }
            // Every cycle of length <= 2 * 8 + 1 fits inside the radius-8 ball.
            match brute {
                Some(len) if len <= 17 => assert_eq!(fast, Some(len), "vertex {v}"),
                _ => assert_eq!(fast, None, "vertex {v}"),
            }
        }
    }

    #[test]
    fn random_graph_is_typical_at_n_2000() {
        let g = generate_regular(2000, 3, 4).unwrap();
        let rep = check_typical(&g, &TypicalityConfig::default()).unwrap();
        assert!(rep.connected && !rep.bipartite);
        assert!(rep.lambda2 < 3.0);
        assert_eq!(rep.sample_size, 2000);
        assert!(rep.treelike_fraction > 0.95);
    }

    #[test]
    fn sampled_report_is_reproducible() {
        let g = generate_regular(3000, 3, 8).unwrap();
        let cfg = TypicalityConfig {
            sample_size: 500,
            seed: 3,
            ..Default::default()
        };
        let a = check_typical(&g, &cfg).unwrap();
        let b = check_typical(&g, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.sample_size, 500);
    }
}
