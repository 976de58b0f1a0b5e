//! Independent reference implementations used by the integration tests.
//!
//! Nothing here calls into the code paths it is compared against.

#![allow(dead_code)]

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Sort, then interpolate between closest ranks.
pub fn brute_quantile(values: &[f64], p: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let h = (v.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    if lo + 1 >= v.len() {
        return v[v.len() - 1];
    }
    v[lo] + (h - lo as f64) * (v[lo + 1] - v[lo])
}

pub fn brute_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Literal `(local * n + global * m) / (n + m)` per category.
pub fn brute_encoding(labels: &[String], y: &[f64], stat: impl Fn(&[f64]) -> f64, m: f64) -> BTreeMap<String, f64> {
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (l, v) in labels.iter().zip(y) {
        groups.entry(l.clone()).or_default().push(*v);
    }
    let global = stat(y);
    groups
        .into_iter()
        .map(|(k, ys)| {
            let n = ys.len() as f64;
            let local = stat(&ys);
            (k, (local * n + global * m) / (n + m))
        })
        .collect()
}

/// Two-sided signed-rank p-value by enumerating all sign patterns of the given ranks.
pub fn brute_wilcoxon_p(ranks: &[f64], observed_positive: &[bool]) -> (f64, f64) {
    let n = ranks.len();
    let total: f64 = ranks.iter().sum();
    let t_plus: f64 = ranks.iter().zip(observed_positive).filter(|(_, p)| **p).map(|(r, _)| r).sum();
    let w_obs = t_plus.min(total - t_plus);
    let mut extreme = 0u64;
    for mask in 0u64..(1 << n) {
        let tp: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if tp.min(total - tp) <= w_obs {
            extreme += 1;
        }
    }
    (w_obs, extreme as f64 / (1u64 << n) as f64)
}

/// Least squares with intercept via SVD.
pub fn ols(x: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, f64) {
    let n = x.len();
    let d = x[0].len();
    let a = DMatrix::from_fn(n, d + 1, |i, j| if j == d { 1.0 } else { x[i][j] });
    let b = DVector::from_column_slice(y);
    let sol = a.svd(true, true).solve(&b, 1e-14).unwrap();
    (sol.rows(0, d).iter().copied().collect(), sol[d])
}

/// Ridge on standardized features: `(Z'Z/n + alpha I) w = Z'(y - ȳ)/n`.
pub fn standardized_ridge(x: &[Vec<f64>], y: &[f64], alpha: f64) -> Vec<f64> {
    let (z, _, _) = standardize(x);
    let n = x.len() as f64;
    let d = x[0].len();
    let ybar = y.iter().sum::<f64>() / n;
    let zm = DMatrix::from_fn(x.len(), d, |i, j| z[i][j]);
    let yc = DVector::from_iterator(y.len(), y.iter().map(|v| v - ybar));
    let lhs = zm.transpose() * &zm / n + DMatrix::identity(d, d) * alpha;
    let rhs = zm.transpose() * yc / n;
    lhs.lu().solve(&rhs).unwrap().iter().copied().collect()
}

/// Column means and population standard deviations, with the standardized rows.
pub fn standardize(x: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>, Vec<f64>) {
    let n = x.len() as f64;
    let d = x[0].len();
    let means: Vec<f64> = (0..d).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n).collect();
    let sds: Vec<f64> = (0..d)
        .map(|j| (x.iter().map(|r| (r[j] - means[j]).powi(2)).sum::<f64>() / n).sqrt())
        .collect();
    let z = x.iter().map(|r| (0..d).map(|j| (r[j] - means[j]) / sds[j]).collect()).collect();
    (z, means, sds)
}

/// Largest KKT violation of the standardized elastic-net problem, given original-unit weights.
pub fn kkt_violation(x: &[Vec<f64>], y: &[f64], weights: &[f64], intercept: f64, alpha: f64, l1_ratio: f64) -> f64 {
    let (z, _, sds) = standardize(x);
    let n = x.len() as f64;
    let resid: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(row, t)| t - intercept - row.iter().zip(weights).map(|(a, b)| a * b).sum::<f64>())
        .collect();
    let mut worst: f64 = 0.0;
    for j in 0..weights.len() {
        let ws = weights[j] * sds[j];
        let grad = -z.iter().zip(&resid).map(|(r, e)| r[j] * e).sum::<f64>() / n;
        let v = if ws != 0.0 {
            (grad + alpha * (1.0 - l1_ratio) * ws + alpha * l1_ratio * ws.signum()).abs()
        } else {
            (grad.abs() - alpha * l1_ratio).max(0.0)
        };
        worst = worst.max(v);
    }
    worst
}

pub fn random_matrix(rng: &mut impl Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| rng.random_range(-3.0..3.0)).collect()).collect()
}

pub fn to_array(x: &[Vec<f64>]) -> ndarray::Array2<f64> {
    ndarray::Array2::from_shape_fn((x.len(), x[0].len()), |(i, j)| x[i][j])
}
