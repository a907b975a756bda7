//! Uniform random `r`-regular simple graphs.

mod io;
pub mod spectral;
pub mod typical;

use rand::seq::SliceRandom;
use std::collections::VecDeque;

use crate::error::{invalid, Error, Result};
use crate::rng;

pub use spectral::{second_eigenvalue, top_pair_residual};
pub use typical::{check_typical, TypicalityConfig, TypicalityReport};

/// Rejected pairings tolerated before giving up.
pub const MAX_PAIRING_ATTEMPTS: usize = 1000;

/// An immutable simple `r`-regular graph on vertices `0..n`.
///
/// Adjacency is stored flat: the neighbours of `v` are
/// `adjacency[v * r..(v + 1) * r]`, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularGraph {
    n: usize,
    r: usize,
    adjacency: Vec<usize>,
}

impl RegularGraph {
    /// Builds a graph from explicit neighbour lists, checking regularity,
    /// simplicity and symmetry.
    pub fn from_adjacency(lists: Vec<Vec<usize>>) -> Result<Self> {
        let n = lists.len();
        if n == 0 {
            return Err(invalid("graph has no vertices"));
        }
        let r = lists[0].len();
        let mut adjacency = Vec::with_capacity(n * r);
        for (v, list) in lists.iter().enumerate() {
            if list.len() != r {
                return Err(invalid(format!(
                    "vertex {v} has degree {} but vertex 0 has degree {r}",
                    list.len()
                )));
            }
            let mut sorted = list.clone();
            sorted.sort_unstable();
            for w in sorted.windows(2) {
                if w[0] == w[1] {
                    return Err(invalid(format!("parallel edge {v}-{}", w[0])));
                }
            }
            for &u in &sorted {
                if u >= n {
                    return Err(invalid(format!(
                        "vertex {v} lists out-of-range neighbour {u}"
                    )));
                }
                if u == v {
                    return Err(invalid(format!("self-loop at {v}")));
                }
            }
            adjacency.extend_from_slice(&sorted);
        }
        let g = RegularGraph { n, r, adjacency };
        for v in 0..n {
            for &u in g.neighbors(v) {
                if !g.has_edge(u, v) {
                    return Err(invalid(format!("edge {v}->{u} has no reverse")));
                }
            }
        }
        Ok(g)
    }

    /// The Petersen graph: 3-regular, girth 5, eigenvalues 3, 1 and -2.
    pub fn petersen() -> RegularGraph {
        let mut lists = vec![Vec::new(); 10];
        let mut add = |a: usize, b: usize| {
            lists[a].push(b);
            lists[b].push(a);
        };
        for i in 0..5 {
            add(i, (i + 1) % 5);
            add(i, i + 5);
            add(5 + i, 5 + (i + 2) % 5);
        }
        RegularGraph::from_adjacency(lists).expect("petersen graph is 3-regular")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.r
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v * self.r..(v + 1) * self.r]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.n * self.r / 2
    }

    /// BFS distances from `source`, `usize::MAX` for unreachable vertices.
    pub fn distances_from(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            for &u in self.neighbors(v) {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    /// Vertices within distance `radius` of `center`, in BFS order, with their
    /// distances.
    pub fn ball(&self, center: usize, radius: usize) -> Vec<(usize, usize)> {
        let mut seen = std::collections::HashSet::new();
        let mut out = vec![(center, 0)];
        seen.insert(center);
        let mut head = 0;
        while head < out.len() {
            let (v, d) = out[head];
            head += 1;
            if d == radius {
                continue;
            }
            for &u in self.neighbors(v) {
                if seen.insert(u) {
                    out.push((u, d + 1));
                }
            }
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.distances_from(0).iter().all(|&d| d != usize::MAX)
    }

    /// Two-colouring by BFS over every component.
    pub fn is_bipartite(&self) -> bool {
        let mut color = vec![u8::MAX; self.n];
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if color[start] != u8::MAX {
                continue;
            }
            color[start] = 0;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &u in self.neighbors(v) {
                    if color[u] == u8::MAX {
                        color[u] = 1 - color[v];
                        queue.push_back(u);
                    } else if color[u] == color[v] {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Draws a uniform simple `r`-regular graph on `n` vertices with the
/// configuration model, rejecting pairings that contain loops or parallel
/// edges.
pub fn generate_regular(n: usize, r: usize, seed: u64) -> Result<RegularGraph> {
    if r < 3 {
        return Err(invalid(format!("degree must be at least 3, got {r}")));
    }
    if n <= r {
        return Err(invalid(format!("need n > r, got n={n}, r={r}")));
    }
    if !(n * r).is_multiple_of(2) {
        return Err(invalid(format!("n*r must be even, got n={n}, r={r}")));
    }
    let mut rng = rng::stream(seed, rng::GRAPH_STREAM);
    let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, r)).collect();
    let mut adjacency = vec![0usize; n * r];
    let mut fill = vec![0usize; n];

    'attempt: for _ in 0..MAX_PAIRING_ATTEMPTS {
        stubs.shuffle(&mut rng);
        fill.iter_mut().for_each(|f| *f = 0);
        for pair in stubs.chunks_exact(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v || adjacency[u * r..u * r + fill[u]].contains(&v) {
                continue 'attempt;
            }
            adjacency[u * r + fill[u]] = v;
            adjacency[v * r + fill[v]] = u;
            fill[u] += 1;
            fill[v] += 1;
        }
        for v in 0..n {
            adjacency[v * r..(v + 1) * r].sort_unstable();
        }
        return Ok(RegularGraph { n, r, adjacency });
    }
    Err(Error::PairingExhausted {
        n,
        r,
        attempts: MAX_PAIRING_ATTEMPTS,
    })
}
