//! Column-oriented datasets, CSV ingestion and the synthetic Cauchy generator.

mod csv_io;
mod synth;

pub use csv_io::{load_csv, read_csv, write_csv, Schema};
pub use synth::{generate_cauchy_dataset, generate_cauchy_samples, CauchyConfig, CauchySample};

use std::collections::HashSet;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Label used for empty categorical cells.
pub const MISSING: &str = "\u{2400}MISSING";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column<T> {
    pub name: String,
    pub values: Vec<T>,
}

/// A table of named categorical columns, named numeric columns and one numeric target.
///
/// All columns share the same length. Column order is preserved and names are unique
/// across the whole table (target included).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    categorical: Vec<Column<String>>,
    numeric: Vec<Column<f64>>,
    target: Column<f64>,
}

impl Dataset {
    pub fn new(target_name: impl Into<String>, target: Vec<f64>) -> Result<Self> {
        if target.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Dataset {
            categorical: Vec::new(),
            numeric: Vec::new(),
            target: Column { name: target_name.into(), values: target },
        })
    }

    /// Adds a categorical column. Empty strings become [`MISSING`].
    pub fn with_categorical<S: Into<String>>(
        mut self,
        name: impl Into<String>,
        values: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let name = name.into();
        let values: Vec<String> = values
            .into_iter()
            .map(|v| {
                let v = v.into();
                if v.is_empty() {
                    MISSING.to_string()
                } else {
                    v
                }
            })
            .collect();
        self.check_new_column(&name, values.len())?;
        self.categorical.push(Column { name, values });
        Ok(self)
    }

    pub fn with_numeric(mut self, name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        self.check_new_column(&name, values.len())?;
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        self.numeric.push(Column { name, values });
        Ok(self)
    }

    fn check_new_column(&self, name: &str, len: usize) -> Result<()> {
        if len != self.n_rows() {
            return Err(Error::DimensionMismatch(format!(
                "column {name} has {len} rows, dataset has {}",
                self.n_rows()
            )));
        }
        if self.has_column(name) {
            return Err(Error::InvalidConfig(format!("duplicate column {name}")));
        }
        Ok(())
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.target.name == name
            || self.categorical.iter().any(|c| c.name == name)
            || self.numeric.iter().any(|c| c.name == name)
    }

    pub fn n_rows(&self) -> usize {
        self.target.values.len()
    }

    pub fn target(&self) -> &[f64] {
        &self.target.values
    }

    pub fn target_name(&self) -> &str {
        &self.target.name
    }

    pub fn categorical(&self, name: &str) -> Option<&[String]> {
        self.categorical.iter().find(|c| c.name == name).map(|c| c.values.as_slice())
    }

    pub fn numeric(&self, name: &str) -> Option<&[f64]> {
        self.numeric.iter().find(|c| c.name == name).map(|c| c.values.as_slice())
    }

    pub fn categorical_columns(&self) -> &[Column<String>] {
        &self.categorical
    }

    pub fn numeric_columns(&self) -> &[Column<f64>] {
        &self.numeric
    }

    pub fn categorical_names(&self) -> Vec<String> {
        self.categorical.iter().map(|c| c.name.clone()).collect()
    }

    pub fn numeric_names(&self) -> Vec<String> {
        self.numeric.iter().map(|c| c.name.clone()).collect()
    }

    /// Number of distinct values in a categorical column (K_j).
    pub fn cardinality(&self, name: &str) -> Option<usize> {
        self.categorical(name)
            .map(|values| values.iter().collect::<HashSet<_>>().len())
    }

    /// Looks up a categorical column, distinguishing "absent" from "numeric".
    pub fn require_categorical(&self, name: &str) -> Result<&[String]> {
        match self.categorical(name) {
            Some(values) => Ok(values),
            None if self.has_column(name) => Err(Error::NotCategorical(name.to_string())),
            None => Err(Error::UnknownColumn(name.to_string())),
        }
    }

    /// Rows at `indices`, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        fn pick<T: Clone>(c: &Column<T>, idx: &[usize]) -> Column<T> {
            Column { name: c.name.clone(), values: idx.iter().map(|&i| c.values[i].clone()).collect() }
        }
        Dataset {
            categorical: self.categorical.iter().map(|c| pick(c, indices)).collect(),
            numeric: self.numeric.iter().map(|c| pick(c, indices)).collect(),
            target: pick(&self.target, indices),
        }
    }

    /// Same table with the target column replaced.
    pub fn with_target_values(&self, target: Vec<f64>) -> Result<Dataset> {
        if target.len() != self.n_rows() {
            return Err(Error::DimensionMismatch("target length".into()));
        }
        if target.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut out = self.clone();
        out.target.values = target;
        Ok(out)
    }

    /// Numeric columns as an `n × d` matrix, in column order.
    pub fn feature_matrix(&self) -> Array2<f64> {
        let n = self.n_rows();
        let d = self.numeric.len();
        Array2::from_shape_fn((n, d), |(i, j)| self.numeric[j].values[i])
    }

    pub(crate) fn from_parts(
        categorical: Vec<Column<String>>,
        numeric: Vec<Column<f64>>,
        target: Column<f64>,
    ) -> Dataset {
        Dataset { categorical, numeric, target }
    }
}
