use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};
use crate::rng;

/// Long-tailed regression data: two Cauchy features sharing a uniform location.
///
/// Per row, `c ~ U(center_low, center_high)`, `x1 ~ Cauchy(c, scale1)`,
/// `x2 ~ Cauchy(c, scale2)` and `y = x1 + x2 + N(0, noise_sigma)`.
/// Both features are emitted as categorical labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CauchyConfig {
    pub n_rows: usize,
    pub center_low: f64,
    pub center_high: f64,
    pub scale1: f64,
    pub scale2: f64,
    pub noise_sigma: f64,
    pub seed: u64,
    /// Round feature values to this many decimals before turning them into labels.
    pub rounding_decimals: Option<u32>,
}

impl Default for CauchyConfig {
    fn default() -> Self {
        CauchyConfig {
            n_rows: 1000,
            center_low: 0.0,
            center_high: 100.0,
            scale1: 1.0,
            scale2: 2.0,
            noise_sigma: 1.0,
            seed: 0,
            rounding_decimals: None,
        }
    }
}

impl CauchyConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.to_string()));
        if self.n_rows == 0 {
            return bad("n_rows must be positive");
        }
        if !(self.center_low.is_finite() && self.center_high.is_finite())
            || self.center_low >= self.center_high
        {
            return bad("center_low must be below center_high");
        }
        if !(self.scale1 > 0.0 && self.scale2 > 0.0 && self.scale1.is_finite() && self.scale2.is_finite()) {
            return bad("scales must be positive");
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad("noise_sigma must be non-negative");
        }
        Ok(())
    }
}

/// One generated row before labels are formed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchySample {
    pub center: f64,
    pub x1: f64,
    pub x2: f64,
    pub noise: f64,
    pub y: f64,
}

pub fn generate_cauchy_samples(cfg: &CauchyConfig) -> Result<Vec<CauchySample>> {
    cfg.validate()?;
    let mut rng = rng::stream(cfg.seed, 0);
    let cauchy = |t: f64, s: f64, u: f64| t + s * (PI * (u - 0.5)).tan();
    let width = cfg.center_high - cfg.center_low;
    let samples = (0..cfg.n_rows)
        .map(|_| {
            let center = cfg.center_low + width * rng::open_unit(&mut rng);
            let x1 = cauchy(center, cfg.scale1, rng::open_unit(&mut rng));
            let x2 = cauchy(center, cfg.scale2, rng::open_unit(&mut rng));
            let z: f64 = StandardNormal.sample(&mut rng);
            let noise = cfg.noise_sigma * z;
            CauchySample { center, x1, x2, noise, y: x1 + x2 + noise }
        })
        .collect();
    Ok(samples)
}

/// Generates the dataset with categorical columns `x1`, `x2` and target `y`.
pub fn generate_cauchy_dataset(cfg: &CauchyConfig) -> Result<Dataset> {
    let samples = generate_cauchy_samples(cfg)?;
    let label = |v: f64| format_label(v, cfg.rounding_decimals);
    Dataset::new("y", samples.iter().map(|s| s.y).collect())?
        .with_categorical("x1", samples.iter().map(|s| label(s.x1)))?
        .with_categorical("x2", samples.iter().map(|s| label(s.x2)))
}

/// Shortest round-trip decimal, or fixed decimals when rounding. Negative zero prints as zero.
fn format_label(v: f64, decimals: Option<u32>) -> String {
    let s = match decimals {
        None => v.to_string(),
        Some(d) => format!("{:.*}", d as usize, v),
    };
    match s.strip_prefix('-') {
        Some(rest) if rest.parse::<f64>().map(|x| x == 0.0).unwrap_or(false) => rest.to_string(),
        _ => s,
    }
}
