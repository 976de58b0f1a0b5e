//! Elastic-net linear regression by cyclic coordinate descent.
//!
//! Minimizes, over weights `w` and intercept `b`,
//!
//! ```text
//! (1/(2n)) ||y - Xw - b||² + alpha * l1_ratio * ||w||₁ + (alpha/2) * (1 - l1_ratio) * ||w||²
//! ```
//!
//! When `standardize` is set the penalty applies to weights of the centered,
//! unit-variance features; the fitted model is always reported in original units.

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ElasticNetSpec {
    pub alpha: f64,
    pub l1_ratio: f64,
    pub max_iter: usize,
    pub tol: f64,
    pub standardize: bool,
}

impl Default for ElasticNetSpec {
    fn default() -> Self {
        ElasticNetSpec { alpha: 1.0, l1_ratio: 0.5, max_iter: 1000, tol: 1e-4, standardize: true }
    }
}

impl ElasticNetSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be non-negative, got {}", self.alpha));
        }
        if !(0.0..=1.0).contains(&self.l1_ratio) {
            return bad(format!("l1_ratio must lie in [0, 1], got {}", self.l1_ratio));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be positive".into());
        }
        Ok(())
    }

    /// Penalized objective for residuals `r` and working-scale weights `w`.
    fn objective(&self, r: &[f64], w: &[f64]) -> f64 {
        let n = r.len() as f64;
        let loss = r.iter().map(|v| v * v).sum::<f64>() / (2.0 * n);
        let l1: f64 = w.iter().map(|v| v.abs()).sum();
        let l2: f64 = w.iter().map(|v| v * v).sum();
        loss + self.alpha * self.l1_ratio * l1 + 0.5 * self.alpha * (1.0 - self.l1_ratio) * l2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub feature_means: Vec<f64>,
    pub feature_scales: Vec<f64>,
    pub n_iter: usize,
    pub converged: bool,
}

#[inline]
pub fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

pub fn fit_elastic_net(x: ArrayView2<f64>, y: &[f64], spec: &ElasticNetSpec) -> Result<LinearModel> {
    fit_elastic_net_traced(x, y, spec).map(|(m, _)| m)
}

/// Fits and also returns the penalized objective (working scale) after every sweep.
pub fn fit_elastic_net_traced(
    x: ArrayView2<f64>,
    y: &[f64],
    spec: &ElasticNetSpec,
) -> Result<(LinearModel, Vec<f64>)> {
    spec.validate()?;
    let (n, d) = x.dim();
    if n != y.len() {
        return Err(Error::DimensionMismatch(format!("X has {n} rows, y has {}", y.len())));
    }
    if n == 0 || d == 0 {
        return Err(Error::DimensionMismatch(format!("need at least one row and one feature, got {n}×{d}")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let nf = n as f64;

    let mut means = vec![0.0; d];
    let mut scales = vec![1.0; d];
    let mut active = vec![false; d];
    // Column-major working copy: centered (and scaled) features.
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    let mut curvature = vec![0.0; d];
    for j in 0..d {
        let col = x.column(j);
        let first = col[0];
        let mean = col.sum() / nf;
        means[j] = mean;
        let constant = col.iter().all(|&v| v == first);
        let mut z: Vec<f64> = col.iter().map(|&v| v - mean).collect();
        if !constant {
            let var = z.iter().map(|v| v * v).sum::<f64>() / nf;
            if var > 0.0 {
                active[j] = true;
                if spec.standardize {
                    let s = var.sqrt();
                    scales[j] = s;
                    z.iter_mut().for_each(|v| *v /= s);
                }
                curvature[j] = z.iter().map(|v| v * v).sum::<f64>() / nf;
            }
        }
        cols.push(z);
    }

    let y_mean = y.iter().sum::<f64>() / nf;
    let mut resid: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
    let mut w = vec![0.0; d];
    let l1 = spec.alpha * spec.l1_ratio;
    let l2 = spec.alpha * (1.0 - spec.l1_ratio);

    let mut trace = Vec::new();
    let mut n_iter = 0;
    let mut converged = false;
    while n_iter < spec.max_iter {
        n_iter += 1;
        let mut max_delta: f64 = 0.0;
        for j in (0..d).filter(|&j| active[j]) {
            let xj = &cols[j];
            let rho = xj.iter().zip(&resid).map(|(a, b)| a * b).sum::<f64>() / nf + curvature[j] * w[j];
            let updated = soft_threshold(rho, l1) / (curvature[j] + l2);
            let delta = updated - w[j];
            if delta != 0.0 {
                resid.iter_mut().zip(xj).for_each(|(r, &v)| *r -= v * delta);
                w[j] = updated;
                max_delta = max_delta.max(delta.abs());
            }
        }
        trace.push(spec.objective(&resid, &w));
        if max_delta < spec.tol {
            converged = true;
            break;
        }
    }

    let weights: Vec<f64> = w.iter().zip(&scales).map(|(wj, s)| wj / s).collect();
    let intercept = y_mean - weights.iter().zip(&means).map(|(wj, mu)| wj * mu).sum::<f64>();
    Ok((
        LinearModel { weights, intercept, feature_means: means, feature_scales: scales, n_iter, converged },
        trace,
    ))
}

impl LinearModel {
    pub fn n_features(&self) -> usize {
        self.weights.len()
    }

    pub fn predict(&self, x: ArrayView2<f64>) -> Result<Vec<f64>> {
        if x.ncols() != self.weights.len() {
            return Err(Error::DimensionMismatch(format!(
                "model has {} features, X has {}",
                self.weights.len(),
                x.ncols()
            )));
        }
        Ok(x.rows()
            .into_iter()
            .map(|row| self.intercept + row.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>())
            .collect())
    }
}
