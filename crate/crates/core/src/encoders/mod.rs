//! Target-statistic encoders for categorical columns.
//!
//! Every encoder follows the same shape: [`fit`] collects per-category statistics of the
//! regression target on a training table, and [`FittedEncoder::transform`] replaces the
//! categorical columns of any table with numeric columns derived from those statistics.
//!
//! * quantile: the `p`-quantile of the category's targets, smoothed toward the global
//!   `p`-quantile with weight `m` (see [`m_estimate_blend`]).
//! * summary: one quantile column per level in a list, sharing `m`.
//! * target mean / M-estimate mean: the same with the arithmetic mean.
//! * ordinal: an integer code per category.
//!
//! Categories absent from the training table map to the global statistic (or code `-1`).

mod stats;

pub use stats::{m_estimate_blend, quantile};

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::data::{Column, Dataset};
use crate::error::{Error, Result};
use crate::rng;
use stats::{check_probability, mean_sorted, quantile_sorted};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileSpec {
    pub p: f64,
    pub m: f64,
}

impl Default for QuantileSpec {
    fn default() -> Self {
        QuantileSpec { p: 0.5, m: 1.0 }
    }
}

impl QuantileSpec {
    pub fn new(p: f64, m: f64) -> Result<Self> {
        let spec = QuantileSpec { p, m };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        check_probability(self.p)?;
        check_m(self.m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummarySpec {
    pub quantiles: Vec<f64>,
    pub m: f64,
}

impl Default for SummarySpec {
    fn default() -> Self {
        SummarySpec { quantiles: vec![0.4, 0.5, 0.6], m: 100.0 }
    }
}

impl SummarySpec {
    pub fn new(quantiles: Vec<f64>, m: f64) -> Result<Self> {
        let spec = SummarySpec { quantiles, m };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.quantiles.is_empty() {
            return Err(Error::InvalidParameter("summary needs at least one quantile".into()));
        }
        for &p in &self.quantiles {
            check_probability(p)?;
        }
        for w in self.quantiles.windows(2) {
            if w[0] == w[1] {
                return Err(Error::InvalidParameter(format!("duplicate quantile level {}", w[0])));
            }
            if w[0] > w[1] {
                return Err(Error::InvalidParameter("quantile levels must be increasing".into()));
            }
        }
        check_m(self.m)
    }
}

fn check_m(m: f64) -> Result<()> {
    if m >= 0.0 && m.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("m must be finite and non-negative, got {m}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncoderKind {
    Quantile,
    Summary,
    TargetMean,
    MEstimateMean,
    Ordinal,
}

/// Hyperparameters of one concrete encoder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EncoderSpec {
    Quantile(QuantileSpec),
    Summary(SummarySpec),
    TargetMean { m: f64 },
    MEstimateMean { m: f64 },
    Ordinal { seed: Option<u64> },
}

impl EncoderSpec {
    pub fn kind(&self) -> EncoderKind {
        match self {
            EncoderSpec::Quantile(_) => EncoderKind::Quantile,
            EncoderSpec::Summary(_) => EncoderKind::Summary,
            EncoderSpec::TargetMean { .. } => EncoderKind::TargetMean,
            EncoderSpec::MEstimateMean { .. } => EncoderKind::MEstimateMean,
            EncoderSpec::Ordinal { .. } => EncoderKind::Ordinal,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            EncoderSpec::Quantile(q) => q.validate(),
            EncoderSpec::Summary(s) => s.validate(),
            EncoderSpec::TargetMean { m } | EncoderSpec::MEstimateMean { m } => check_m(*m),
            EncoderSpec::Ordinal { .. } => Ok(()),
        }
    }

    /// Short, stable label such as `m=10,p=0.25`.
    pub fn label(&self) -> String {
        match self {
            EncoderSpec::Quantile(q) => format!("m={},p={}", q.m, q.p),
            EncoderSpec::Summary(s) => {
                let ps: Vec<String> = s.quantiles.iter().map(|p| p.to_string()).collect();
                format!("m={},p=[{}]", s.m, ps.join(";"))
            }
            EncoderSpec::TargetMean { m } | EncoderSpec::MEstimateMean { m } => format!("m={m}"),
            EncoderSpec::Ordinal { seed: Some(s) } => format!("seed={s}"),
            EncoderSpec::Ordinal { seed: None } => "default".to_string(),
        }
    }

    fn smoothing(&self) -> f64 {
        match self {
            EncoderSpec::Quantile(q) => q.m,
            EncoderSpec::Summary(s) => s.m,
            EncoderSpec::TargetMean { m } | EncoderSpec::MEstimateMean { m } => *m,
            EncoderSpec::Ordinal { .. } => 0.0,
        }
    }
}

/// Support and unsmoothed statistics of one category.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryStats {
    pub count: usize,
    pub local: Vec<f64>,
}

/// Per-category statistics of one column, plus the global fallback.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryTable {
    pub entries: BTreeMap<String, CategoryStats>,
    pub global: Vec<f64>,
    pub total_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnState {
    Table(CategoryTable),
    Codes(BTreeMap<String, i64>),
}

/// Code assigned by the ordinal encoder to categories it has not seen.
pub const UNSEEN_CODE: i64 = -1;

/// A trained encoder. Immutable; `transform` reads only this state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedEncoder {
    pub kind: EncoderKind,
    pub spec: EncoderSpec,
    pub columns: Vec<String>,
    pub per_column: BTreeMap<String, ColumnState>,
    pub output_names: Vec<String>,
}

pub fn fit_quantile_encoder(train: &Dataset, columns: &[String], spec: QuantileSpec) -> Result<FittedEncoder> {
    fit(train, columns, &EncoderSpec::Quantile(spec))
}

pub fn fit_summary_encoder(train: &Dataset, columns: &[String], spec: SummarySpec) -> Result<FittedEncoder> {
    fit(train, columns, &EncoderSpec::Summary(spec))
}

/// Classical target encoder when `m == 0`, M-estimate encoder otherwise.
pub fn fit_target_mean_encoder(train: &Dataset, columns: &[String], m: f64) -> Result<FittedEncoder> {
    let spec = if m == 0.0 {
        EncoderSpec::TargetMean { m }
    } else {
        EncoderSpec::MEstimateMean { m }
    };
    fit(train, columns, &spec)
}

pub fn fit_ordinal_encoder(train: &Dataset, columns: &[String], seed: Option<u64>) -> Result<FittedEncoder> {
    fit(train, columns, &EncoderSpec::Ordinal { seed })
}

/// Fits any encoder kind on `columns` of `train`.
pub fn fit(train: &Dataset, columns: &[String], spec: &EncoderSpec) -> Result<FittedEncoder> {
    spec.validate()?;
    if train.n_rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    let mut per_column = BTreeMap::new();
    let mut output_names = Vec::new();
    for (index, name) in columns.iter().enumerate() {
        let values = train.require_categorical(name)?;
        if per_column.contains_key(name) {
            return Err(Error::InvalidConfig(format!("column {name} listed twice")));
        }
        let state = match spec {
            EncoderSpec::Ordinal { seed } => ColumnState::Codes(ordinal_codes(values, *seed, index as u64)),
            _ => ColumnState::Table(category_table(values, train.target(), spec)),
        };
        per_column.insert(name.clone(), state);
        match spec {
            EncoderSpec::Summary(s) => {
                output_names.extend(s.quantiles.iter().map(|p| format!("{name}__q{p}")));
            }
            _ => output_names.push(name.clone()),
        }
    }
    Ok(FittedEncoder {
        kind: spec.kind(),
        spec: spec.clone(),
        columns: columns.to_vec(),
        per_column,
        output_names,
    })
}

fn statistics(sorted: &[f64], spec: &EncoderSpec) -> Vec<f64> {
    match spec {
        EncoderSpec::Quantile(q) => vec![quantile_sorted(sorted, q.p)],
        EncoderSpec::Summary(s) => s.quantiles.iter().map(|&p| quantile_sorted(sorted, p)).collect(),
        EncoderSpec::TargetMean { .. } | EncoderSpec::MEstimateMean { .. } => vec![mean_sorted(sorted)],
        EncoderSpec::Ordinal { .. } => unreachable!("ordinal encoder has no target statistics"),
    }
}

fn category_table(labels: &[String], target: &[f64], spec: &EncoderSpec) -> CategoryTable {
    let mut groups: HashMap<&str, Vec<f64>> = HashMap::new();
    for (label, &y) in labels.iter().zip(target) {
        groups.entry(label.as_str()).or_default().push(y);
    }
    // Sorting each group makes every statistic independent of row order.
    let entries = groups
        .into_iter()
        .map(|(label, mut ys)| {
            ys.sort_by(f64::total_cmp);
            (label.to_string(), CategoryStats { count: ys.len(), local: statistics(&ys, spec) })
        })
        .collect();
    let mut all = target.to_vec();
    all.sort_by(f64::total_cmp);
    CategoryTable { entries, global: statistics(&all, spec), total_count: target.len() }
}

fn ordinal_codes(labels: &[String], seed: Option<u64>, column_index: u64) -> BTreeMap<String, i64> {
    let mut order: Vec<&str> = Vec::new();
    let mut seen = HashMap::new();
    for label in labels {
        seen.entry(label.as_str()).or_insert_with(|| {
            order.push(label.as_str());
        });
    }
    let mut codes: Vec<i64> = (0..order.len() as i64).collect();
    if let Some(seed) = seed {
        rng::shuffle(&mut rng::stream(seed, column_index), &mut codes);
    }
    order.into_iter().map(String::from).zip(codes).collect()
}

impl FittedEncoder {
    pub fn table(&self, column: &str) -> Option<&CategoryTable> {
        match self.per_column.get(column)? {
            ColumnState::Table(t) => Some(t),
            ColumnState::Codes(_) => None,
        }
    }

    pub fn codes(&self, column: &str) -> Option<&BTreeMap<String, i64>> {
        match self.per_column.get(column)? {
            ColumnState::Codes(c) => Some(c),
            ColumnState::Table(_) => None,
        }
    }

    /// Encoded output values for one label of one column, or `None` for an unknown column.
    ///
    /// Unseen labels yield the global statistics (or [`UNSEEN_CODE`]).
    pub fn encode(&self, column: &str, label: &str) -> Option<Vec<f64>> {
        Some(self.encode_inner(self.per_column.get(column)?, label).0)
    }

    fn encode_inner(&self, state: &ColumnState, label: &str) -> (Vec<f64>, bool) {
        match state {
            ColumnState::Codes(codes) => match codes.get(label) {
                Some(&c) => (vec![c as f64], true),
                None => (vec![UNSEEN_CODE as f64], false),
            },
            ColumnState::Table(table) => match table.entries.get(label) {
                Some(stats) => {
                    let m = self.spec.smoothing();
                    let values = stats
                        .local
                        .iter()
                        .zip(&table.global)
                        .map(|(&local, &global)| {
                            m_estimate_blend(local, stats.count, global, m)
                                .expect("fitted categories have positive support")
                        })
                        .collect();
                    (values, true)
                }
                None => (table.global.clone(), false),
            },
        }
    }

    pub fn transform(&self, data: &Dataset) -> Result<Dataset> {
        self.transform_counting(data).map(|(d, _)| d)
    }

    /// Like [`transform`](Self::transform), also returning how many cells held unseen labels.
    pub fn transform_counting(&self, data: &Dataset) -> Result<(Dataset, usize)> {
        let n = data.n_rows();
        let mut encoded: Vec<Column<f64>> = self
            .output_names
            .iter()
            .map(|name| Column { name: name.clone(), values: Vec::with_capacity(n) })
            .collect();
        let mut unseen = 0;
        let mut offset = 0;
        for name in &self.columns {
            let labels = data.require_categorical(name)?;
            let state = &self.per_column[name];
            let width = match state {
                ColumnState::Table(t) => t.global.len(),
                ColumnState::Codes(_) => 1,
            };
            let mut cache: HashMap<&str, (Vec<f64>, bool)> = HashMap::new();
            for label in labels {
                let (values, known) = cache
                    .entry(label.as_str())
                    .or_insert_with(|| self.encode_inner(state, label));
                if !*known {
                    unseen += 1;
                }
                for (k, &v) in values.iter().enumerate() {
                    encoded[offset + k].values.push(v);
                }
            }
            offset += width;
        }

        let categorical: Vec<Column<String>> = data
            .categorical_columns()
            .iter()
            .filter(|c| !self.columns.contains(&c.name))
            .cloned()
            .collect();
        for c in &encoded {
            if data.numeric(&c.name).is_some() || categorical.iter().any(|k| k.name == c.name) {
                return Err(Error::InvalidConfig(format!("encoded column {} collides with an existing column", c.name)));
            }
        }
        encoded.extend(data.numeric_columns().iter().cloned());
        let target = Column { name: data.target_name().to_string(), values: data.target().to_vec() };
        Ok((Dataset::from_parts(categorical, encoded, target), unseen))
    }

    /// Serializes with all object keys sorted.
    pub fn to_json(&self) -> Result<String> {
        let value = serde_json::to_value(self)?;
        Ok(serde_json::to_string_pretty(&value)?)
    }

    pub fn from_json(text: &str) -> Result<FittedEncoder> {
        Ok(serde_json::from_str(text)?)
    }
}
