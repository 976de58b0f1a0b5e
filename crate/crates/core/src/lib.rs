//! Quantile-based target encoding for high-cardinality categorical features.
//!
//! The crate provides:
//!
//! - [`encoders`]: quantile, summary, mean / M-estimate and ordinal encoders with
//!   additive smoothing and a global fallback for unseen categories
//! - [`regression`]: elastic-net regression by cyclic coordinate descent
//! - [`evaluation`]: MAE / MSE, repeated k-fold splits and a grid-search harness
//! - [`stats`]: the paired Wilcoxon signed-rank test and a KDE outperformance probability
//! - [`data`]: column-oriented datasets, CSV I/O and a synthetic Cauchy generator
//! - [`cli`]: configuration and drivers behind the `qenc` binary
//!
//! ```
//! use quantile_encoder::data::Dataset;
//! use quantile_encoder::encoders::{fit_quantile_encoder, QuantileSpec};
//!
//! let train = Dataset::new("y", vec![1.0, 2.0, 9.0, 5.0])?
//!     .with_categorical("city", ["a", "a", "a", "b"])?;
//! let enc = fit_quantile_encoder(&train, &["city".to_string()], QuantileSpec::new(0.5, 0.0)?)?;
//! let encoded = enc.transform(&train)?;
//! assert_eq!(encoded.numeric("city").unwrap(), &[2.0, 2.0, 2.0, 5.0]);
//! # Ok::<(), quantile_encoder::Error>(())
//! ```

pub mod cli;
pub mod data;
pub mod encoders;
pub mod error;
pub mod evaluation;
pub mod regression;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
