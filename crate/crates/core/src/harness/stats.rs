//! Summary statistics and the Kolmogorov-Smirnov test against a geometric law.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two-sided normal quantile for a 95% interval.
const Z95: f64 = 1.959_963_984_540_054;

/// KS significance level.
pub const KS_LEVEL: f64 = 0.01;

/// Fewest samples [`ks_geometric`] accepts.
pub const KS_MIN_SAMPLES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub std_dev: f64,
    /// Normal-approximation 95% interval for the mean.
    pub ci95: (f64, f64),
    pub min: f64,
    pub max: f64,
}

pub fn summarize(values: &[f64]) -> Option<Summary> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let std_dev = var.sqrt();
    let half = Z95 * std_dev / n.sqrt();
    Some(Summary {
        count: values.len(),
        mean,
        median: median(values),
        std_dev,
        ci95: (mean - half, mean + half),
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Midpoint median; NaN for an empty slice.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// `(value, count)` pairs in ascending value order.
pub fn histogram(values: impl IntoIterator<Item = usize>) -> Vec<(usize, usize)> {
    let mut map = std::collections::BTreeMap::new();
    for v in values {
        *map.entry(v).or_insert(0) += 1;
    }
    map.into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub samples: usize,
    pub q: f64,
    pub statistic: f64,
    pub p_value: f64,
    pub pass: bool,
}

/// Two-sided KS test of positive integer samples against `Geom(q)` on
/// `{1, 2, ...}`.
///
/// The statistic is the exact supremum over the integers. The p-value uses
/// the asymptotic Kolmogorov law with Stephens' finite-sample correction,
/// which is conservative for a discrete null.
pub fn ks_geometric(samples: &[u64], q: f64) -> Result<KsResult> {
    if samples.len() < KS_MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: KS_MIN_SAMPLES,
            got: samples.len(),
        });
    }
    if !(q > 0.0 && q <= 1.0) {
        return Err(crate::error::invalid(format!(
            "q must lie in (0, 1], got {q}"
        )));
    }
    let mut s = samples.to_vec();
    s.sort_unstable();
    let n = s.len() as f64;
    let cdf = |x: u64| -> f64 { -(x as f64 * (-q).ln_1p()).exp_m1() };
    let mut d: f64 = 0.0;
    let mut i = 0;
    while i < s.len() {
        let x = s[i];
        // Both step functions are flat between integers, so checking each
        // distinct sample value and the integer just below it is exact.
        let below = i as f64 / n;
        d = d.max((below - cdf(x.saturating_sub(1))).abs());
        while i < s.len() && s[i] == x {
            i += 1;
        }
        d = d.max((i as f64 / n - cdf(x)).abs());
    }
    let sqrt_n = n.sqrt();
    let p_value = kolmogorov_survival((sqrt_n + 0.12 + 0.11 / sqrt_n) * d);
    Ok(KsResult {
        samples: s.len(),
        q,
        statistic: d,
        p_value,
        pass: p_value >= KS_LEVEL,
    })
}

/// `P(K > x)` for the Kolmogorov distribution.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 1.18 {
        // The alternating series converges slowly here; use the theta-function
        // form of the CDF instead.
        let y = -std::f64::consts::PI.powi(2) / (8.0 * x * x);
        let s: f64 = (1..=7)
            .map(|j| ((2 * j - 1) as f64).powi(2) * y)
            .map(f64::exp)
            .sum();
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / x * s).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let term = (-2.0 * (j * j) as f64 * x * x).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}
