use crate::error::{Error, Result};

/// Linearly interpolated quantile between closest ranks.
///
/// With sorted values `v`, the position is `h = (n - 1) * p` and the result is
/// `v[floor(h)] + frac(h) * (v[floor(h) + 1] - v[floor(h)])`.
pub fn quantile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    check_probability(p)?;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(quantile_sorted(&sorted, p))
}

pub(crate) fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidProbability(p))
    }
}

/// `sorted` must be non-empty, finite and ascending; `p` in [0, 1].
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let h = (n - 1) as f64 * p;
    let lo = (h.floor() as usize).min(n - 1);
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    let (a, b) = (sorted[lo], sorted[hi]);
    if frac == 0.0 || a == b {
        return a;
    }
    (a + frac * (b - a)).clamp(a, b)
}

/// Arithmetic mean of an ascending, non-empty slice, clamped to its range.
pub(crate) fn mean_sorted(sorted: &[f64]) -> f64 {
    let sum: f64 = sorted.iter().sum();
    (sum / sorted.len() as f64).clamp(sorted[0], sorted[sorted.len() - 1])
}

/// Additive smoothing of a local statistic toward the global one:
/// `(local * n + global * m) / (n + m)`.
pub fn m_estimate_blend(local: f64, n: usize, global: f64, m: f64) -> Result<f64> {
    if !m.is_finite() || m < 0.0 {
        return Err(Error::InvalidParameter(format!("m must be finite and non-negative, got {m}")));
    }
    let n = n as f64;
    if n + m == 0.0 {
        return Err(Error::DegenerateBlend);
    }
    if m == 0.0 {
        return Ok(local);
    }
    if n == 0.0 {
        return Ok(global);
    }
    let value = (local * n + global * m) / (n + m);
    Ok(value.clamp(local.min(global), local.max(global)))
}
