//! Paired comparisons of cross-validated scores.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::encoders::quantile;
use crate::error::{Error, Result};

/// Largest non-zero sample size evaluated by exact enumeration.
pub const EXACT_MAX_N: usize = 25;

/// Score differences `a - b`, aligned by (repeat, fold).
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample(Vec<f64>);

impl PairedSample {
    pub fn new(diffs: Vec<f64>) -> Result<Self> {
        if diffs.is_empty() {
            return Err(Error::EmptySample);
        }
        if diffs.iter().any(|d| !d.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(PairedSample(diffs))
    }

    pub fn from_pairs(a: &[f64], b: &[f64]) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch("paired samples differ in length".into()));
        }
        Self::new(a.iter().zip(b).map(|(x, y)| x - y).collect())
    }

    pub fn diffs(&self) -> &[f64] {
        &self.0
    }

    pub fn negated(&self) -> PairedSample {
        PairedSample(self.0.iter().map(|d| -d).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonResult {
    /// `min(T+, T-)` over the non-zero differences.
    pub statistic: f64,
    /// Two-sided.
    pub p_value: f64,
    pub n_used: usize,
    pub method: PValueMethod,
    /// Set when every difference was zero.
    pub degenerate: bool,
}

/// Two-sided Wilcoxon signed-rank test. Exact for up to [`EXACT_MAX_N`] non-zero
/// differences, normal approximation beyond.
pub fn wilcoxon_signed_rank(sample: &PairedSample) -> WilcoxonResult {
    wilcoxon_signed_rank_with(sample, None)
}

/// As [`wilcoxon_signed_rank`] with the p-value method forced.
///
/// Zero differences are dropped, tied magnitudes get average ranks. The exact null
/// distribution is computed on doubled ranks (always integers), so ties are handled
/// exactly and the result equals a full enumeration of the `2^n` sign patterns.
pub fn wilcoxon_signed_rank_with(sample: &PairedSample, method: Option<PValueMethod>) -> WilcoxonResult {
    let nonzero: Vec<f64> = sample.0.iter().copied().filter(|&d| d != 0.0).collect();
    let n = nonzero.len();
    if n == 0 {
        return WilcoxonResult {
            statistic: 0.0,
            p_value: 1.0,
            n_used: 0,
            method: method.unwrap_or(PValueMethod::Exact),
            degenerate: true,
        };
    }
    let (ranks2, tie_sizes) = doubled_ranks(&nonzero);
    let t_plus2: u64 = nonzero.iter().zip(&ranks2).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let total2 = (n * (n + 1)) as u64;
    let t_minus2 = total2 - t_plus2;
    let statistic = t_plus2.min(t_minus2) as f64 / 2.0;

    let method = method.unwrap_or(if n <= EXACT_MAX_N { PValueMethod::Exact } else { PValueMethod::Normal });
    let p_value = match method {
        PValueMethod::Exact => exact_p(&ranks2, t_plus2),
        PValueMethod::Normal => normal_p(n, &tie_sizes, t_plus2 as f64 / 2.0),
    };
    WilcoxonResult { statistic, p_value, n_used: n, method, degenerate: false }
}

/// Twice the average rank of each `|d|`, and the sizes of tie groups.
fn doubled_ranks(diffs: &[f64]) -> (Vec<u64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..diffs.len()).collect();
    order.sort_by(|&a, &b| diffs[a].abs().total_cmp(&diffs[b].abs()));
    let mut ranks = vec![0u64; diffs.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && diffs[order[j + 1]].abs() == diffs[order[i]].abs() {
            j += 1;
        }
        // Ranks i+1..=j+1 averaged, doubled.
        let r2 = (i + j + 2) as u64;
        for &k in &order[i..=j] {
            ranks[k] = r2;
        }
        ties.push(j - i + 1);
        i = j + 1;
    }
    (ranks, ties)
}

fn exact_p(ranks2: &[u64], t_plus2: u64) -> f64 {
    let total2: u64 = ranks2.iter().sum();
    // counts[s] = number of sign patterns whose positive doubled-rank sum is s.
    let mut counts = vec![0u64; total2 as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in ranks2 {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] != 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    // The null distribution is symmetric about total2 / 2; count the patterns at least as
    // far from the center as the observation. Doubling both sides keeps this integral.
    let dev = (2 * t_plus2).abs_diff(total2);
    let extreme: u64 = counts
        .iter()
        .enumerate()
        .filter(|(s, _)| (2 * *s as u64).abs_diff(total2) >= dev)
        .map(|(_, c)| c)
        .sum();
    let patterns = 2f64.powi(ranks2.len() as i32);
    (extreme as f64 / patterns).min(1.0)
}

fn normal_p(n: usize, tie_sizes: &[usize], t_plus: f64) -> f64 {
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let tie_term: f64 = tie_sizes.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / 48.0;
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term;
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((t_plus - mean).abs() - 0.5).max(0.0) / var.sqrt();
    erfc(z / std::f64::consts::SQRT_2).min(1.0)
}

fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Scott's rule: `min(std, IQR / 1.349) * n^(-1/5)`, falling back to `std` when the IQR is zero.
pub fn scott_bandwidth(values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n < 2 {
        return Err(Error::EmptySample);
    }
    let nf = n as f64;
    let mean = values.iter().sum::<f64>() / nf;
    let std = (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (nf - 1.0)).sqrt();
    let iqr = quantile(values, 0.75)? - quantile(values, 0.25)?;
    let robust = iqr / 1.349;
    let sigma = if robust > 0.0 { std.min(robust) } else { std };
    Ok(sigma * nf.powf(-0.2))
}

/// Probability that `a` beats `b` when the sample holds error differences `a - b`:
/// the mass below zero of a Gaussian KDE of the differences.
///
/// With fewer than two differences, or no spread, returns 1, 0 or 0.5 according to the
/// common sign.
pub fn outperformance_probability(sample: &PairedSample) -> f64 {
    let d = &sample.0;
    let first = d[0];
    if d.len() < 2 || d.iter().all(|&v| v == first) {
        return sign_indicator(first);
    }
    let h = match scott_bandwidth(d) {
        Ok(h) if h > 0.0 => h,
        _ => return sign_indicator(d.iter().sum::<f64>() / d.len() as f64),
    };
    d.iter().map(|&v| std_normal_cdf(-v / h)).sum::<f64>() / d.len() as f64
}

fn sign_indicator(v: f64) -> f64 {
    if v < 0.0 {
        1.0
    } else if v > 0.0 {
        0.0
    } else {
        0.5
    }
}
