//! Second-largest adjacency eigenvalue by Lanczos iteration.
//!
//! The top eigenpair of a connected `r`-regular graph is `(r, 1/sqrt(n))`.
//! The Krylov basis is kept orthogonal to it (and to itself, by full
//! reorthogonalisation), so the largest Ritz value of the projected
//! tridiagonal matrix converges to lambda_2. Convergence is declared when the
//! Ritz residual `|beta_m * s_m|`, which bounds the eigenvalue error, drops
//! below the tolerance, or when the Krylov space becomes invariant.

use rand::Rng;

use super::RegularGraph;
use crate::error::{Error, Result};
use crate::rng;

const MAX_ITERATIONS: usize = 2000;
const START_SEED: u64 = 0x1A2C_2057;

/// `||A 1 - r 1||_inf`; zero exactly for a regular graph.
pub fn top_pair_residual(g: &RegularGraph) -> f64 {
    let ones = vec![1.0; g.n()];
    let mut y = vec![0.0; g.n()];
    matvec(g, &ones, &mut y);
    y.iter()
        .map(|&v| (v - g.degree() as f64).abs())
        .fold(0.0, f64::max)
}

/// Second-largest eigenvalue of the adjacency matrix of `g`, to absolute
/// accuracy `tol`.
pub fn second_eigenvalue(g: &RegularGraph, tol: f64) -> Result<f64> {
    let n = g.n();
    let r = g.degree() as f64;
    let inv_sqrt_n = 1.0 / (n as f64).sqrt();

    let mut start_rng = rng::stream(START_SEED, 0);
    let mut v: Vec<f64> = (0..n).map(|_| start_rng.random::<f64>() - 0.5).collect();
    deflate(&mut v, inv_sqrt_n);
    normalize(&mut v);

    let cap = MAX_ITERATIONS.min(n.saturating_sub(1)).max(1);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut estimate = f64::NAN;
    let mut residual = f64::INFINITY;

    for _ in 0..cap {
        matvec(g, &v, &mut w);
        let a = dot(&w, &v);
        alpha.push(a);
        basis.push(v.clone());
        // Two passes of classical Gram-Schmidt keep the basis orthogonal to
        // working precision.
        for _ in 0..2 {
            deflate(&mut w, inv_sqrt_n);
            for q in &basis {
                let c = dot(&w, q);
                axpy(-c, q, &mut w);
            }
        }
        let b = norm(&w);

        let (theta, last) = top_ritz(&alpha, &beta);
        estimate = theta;
        residual = (b * last).abs();
        if residual < tol || b <= 1e-10 * r {
            return Ok(theta);
        }
        beta.push(b);
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / b;
        }
    }
    Err(Error::NoConvergence {
        iterations: cap,
        estimate,
        residual,
    })
}

fn matvec(g: &RegularGraph, x: &[f64], y: &mut [f64]) {
    for (v, out) in y.iter_mut().enumerate() {
        *out = g.neighbors(v).iter().map(|&u| x[u]).sum();
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn normalize(a: &mut [f64]) {
    let s = norm(a);
    a.iter_mut().for_each(|x| *x /= s);
}

fn axpy(c: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += c * xi;
    }
}

fn deflate(x: &mut [f64], inv_sqrt_n: f64) {
    let c: f64 = x.iter().sum::<f64>() * inv_sqrt_n;
    x.iter_mut().for_each(|xi| *xi -= c * inv_sqrt_n);
}

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `alpha` and off-diagonal `beta`, and the last component of its unit
/// eigenvector.
fn top_ritz(alpha: &[f64], beta: &[f64]) -> (f64, f64) {
    let m = alpha.len();
    if m == 1 {
        return (alpha[0], 1.0);
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..m {
        let off = if i > 0 { beta[i - 1].abs() } else { 0.0 }
            + if i + 1 < m { beta[i].abs() } else { 0.0 };
        lo = lo.min(alpha[i] - off);
        hi = hi.max(alpha[i] + off);
    }
    // Bisection on the Sturm count for the largest eigenvalue.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(alpha, beta, mid) == m {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let theta = hi;
    let vec = inverse_iteration(alpha, beta, theta);
    (theta, vec[m - 1])
}

/// Number of eigenvalues strictly below `x`.
fn count_below(alpha: &[f64], beta: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..alpha.len() {
        let b2 = if i > 0 {
            beta[i - 1] * beta[i - 1]
        } else {
            0.0
        };
        d = alpha[i] - x - if i > 0 { b2 / d } else { 0.0 };
        if d == 0.0 {
            d = -f64::MIN_POSITIVE;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn inverse_iteration(alpha: &[f64], beta: &[f64], theta: f64) -> Vec<f64> {
    let m = alpha.len();
    let scale = alpha
        .iter()
        .chain(beta)
        .fold(1.0f64, |a, &b| a.max(b.abs()));
    let shift = theta + 1e-13 * scale;
    let mut x = vec![1.0; m];
    for _ in 0..3 {
        x = solve_shifted(alpha, beta, shift, &x);
        let s = norm(&x);
        x.iter_mut().for_each(|v| *v /= s);
    }
    x
}

/// Solves `(T - shift I) x = rhs` by Gaussian elimination with partial
/// pivoting on the tridiagonal band.
fn solve_shifted(alpha: &[f64], beta: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    let m = alpha.len();
    let tiny = 1e-300;
    // Row i holds up to three nonzeros starting at column i after elimination.
    let mut d: Vec<f64> = alpha.iter().map(|a| a - shift).collect();
    let mut du: Vec<f64> = beta.to_vec();
    du.push(0.0);
    let mut du2 = vec![0.0; m];
    let mut dl: Vec<f64> = beta.to_vec();
    let mut b = rhs.to_vec();
    for i in 0..m - 1 {
        if d[i].abs() >= dl[i].abs() {
            let p = if d[i] == 0.0 { tiny } else { d[i] };
            d[i] = p;
            let f = dl[i] / p;
            d[i + 1] -= f * du[i];
            b[i + 1] -= f * b[i];
            dl[i] = 0.0;
        } else {
            let f = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            du[i] = tmp;
            if i + 1 < m - 1 {
                du2[i] = du[i + 1];
                du[i + 1] = -f * du2[i];
            }
            b.swap(i, i + 1);
            b[i + 1] -= f * b[i];
        }
    }
    if d[m - 1] == 0.0 {
        d[m - 1] = tiny;
    }
    let mut x = vec![0.0; m];
    x[m - 1] = b[m - 1] / d[m - 1];
    if m >= 2 {
        x[m - 2] = (b[m - 2] - du[m - 2] * x[m - 1]) / d[m - 2];
    }
    for i in (0..m.saturating_sub(2)).rev() {
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    x
}
