//! Error metrics, repeated k-fold splitting and the encoder grid-search harness.
//!
//! Within every split the encoder is fitted on the training rows only, both sides
//! are transformed with it, an elastic net is trained on the encoded training side
//! and scored on the encoded test side.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::encoders::{self, EncoderKind, EncoderSpec, FittedEncoder, QuantileSpec, SummarySpec};
use crate::error::{Error, Result};
use crate::regression::{fit_elastic_net, ElasticNetSpec, LinearModel};
use crate::rng;
use crate::stats::PairedSample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Mae,
    Mse,
}

impl Metric {
    pub fn score(self, y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
        match self {
            Metric::Mae => mae(y_true, y_pred),
            Metric::Mse => mse(y_true, y_pred),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Mae => "mae",
            Metric::Mse => "mse",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mae" => Ok(Metric::Mae),
            "mse" => Ok(Metric::Mse),
            other => Err(Error::InvalidConfig(format!("unknown metric {other}"))),
        }
    }
}

fn check_pair(y_true: &[f64], y_pred: &[f64]) -> Result<()> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch(format!("{} targets vs {} predictions", y_true.len(), y_pred.len())));
    }
    if y_true.is_empty() {
        return Err(Error::EmptySample);
    }
    if y_true.iter().chain(y_pred).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    Ok(())
}

pub fn mae(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check_pair(y_true, y_pred)?;
    Ok(y_true.iter().zip(y_pred).map(|(t, p)| (t - p).abs()).sum::<f64>() / y_true.len() as f64)
}

pub fn mse(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    check_pair(y_true, y_pred)?;
    Ok(y_true.iter().zip(y_pred).map(|(t, p)| (t - p).powi(2)).sum::<f64>() / y_true.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvPlan {
    pub n_folds: usize,
    pub n_repeats: usize,
    pub seed: u64,
    pub metric: Metric,
}

impl Default for CvPlan {
    fn default() -> Self {
        CvPlan { n_folds: 4, n_repeats: 3, seed: 0, metric: Metric::Mae }
    }
}

impl CvPlan {
    pub fn validate(&self) -> Result<()> {
        if self.n_folds < 2 {
            return Err(Error::InvalidConfig("n_folds must be at least 2".into()));
        }
        if self.n_repeats < 1 {
            return Err(Error::InvalidConfig("n_repeats must be at least 1".into()));
        }
        Ok(())
    }
}

/// One train/test partition. Both index lists are ascending.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub repeat: usize,
    pub fold: usize,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Repeated k-fold splits. Each repeat shuffles `0..n` with its own seeded stream and
/// deals the first `n % k` folds one extra row.
pub fn make_folds(n: usize, plan: &CvPlan) -> Result<Vec<Split>> {
    plan.validate()?;
    if n < plan.n_folds {
        return Err(Error::InvalidConfig(format!("{n} rows cannot fill {} folds", plan.n_folds)));
    }
    let k = plan.n_folds;
    let mut splits = Vec::with_capacity(k * plan.n_repeats);
    for repeat in 0..plan.n_repeats {
        let mut order: Vec<usize> = (0..n).collect();
        rng::shuffle(&mut rng::stream(plan.seed, repeat as u64), &mut order);
        let (base, extra) = (n / k, n % k);
        let mut start = 0;
        for fold in 0..k {
            let len = base + usize::from(fold < extra);
            let mut test = order[start..start + len].to_vec();
            test.sort_unstable();
            let mut train: Vec<usize> = order[..start].iter().chain(&order[start + len..]).copied().collect();
            train.sort_unstable();
            splits.push(Split { repeat, fold, train, test });
            start += len;
        }
    }
    Ok(splits)
}

/// Hyperparameter grid of an encoder family. Which lists apply depends on the kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct GridSpec {
    pub m_values: Vec<f64>,
    pub p_values: Vec<f64>,
    /// Quantile lists for the summary encoder.
    pub quantile_sets: Vec<Vec<f64>>,
}

impl GridSpec {
    /// `m ∈ {0, 1, 10, 50}`, `p ∈ {0.25, 0.5, 0.75}` and the quartile summary.
    pub fn reference() -> Self {
        GridSpec {
            m_values: vec![0.0, 1.0, 10.0, 50.0],
            p_values: vec![0.25, 0.5, 0.75],
            quantile_sets: vec![vec![0.25, 0.5, 0.75]],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderFamily {
    pub name: String,
    pub kind: EncoderKind,
    #[serde(default)]
    pub grid: GridSpec,
    /// Only used by the ordinal encoder.
    #[serde(default)]
    pub seed: Option<u64>,
}

impl EncoderFamily {
    pub fn new(name: impl Into<String>, kind: EncoderKind, grid: GridSpec) -> Self {
        EncoderFamily { name: name.into(), kind, grid, seed: None }
    }

    /// Concrete encoder specs in grid order (m outermost).
    pub fn configs(&self) -> Result<Vec<EncoderSpec>> {
        let need = |list_empty: bool, what: &str| {
            if list_empty {
                Err(Error::InvalidConfig(format!("encoder {}: empty {what} grid", self.name)))
            } else {
                Ok(())
            }
        };
        let g = &self.grid;
        let specs: Vec<EncoderSpec> = match self.kind {
            EncoderKind::Quantile => {
                need(g.m_values.is_empty(), "m")?;
                need(g.p_values.is_empty(), "p")?;
                g.m_values
                    .iter()
                    .flat_map(|&m| g.p_values.iter().map(move |&p| EncoderSpec::Quantile(QuantileSpec { p, m })))
                    .collect()
            }
            EncoderKind::Summary => {
                need(g.m_values.is_empty(), "m")?;
                need(g.quantile_sets.is_empty(), "quantile set")?;
                g.m_values
                    .iter()
                    .flat_map(|&m| {
                        g.quantile_sets
                            .iter()
                            .map(move |q| EncoderSpec::Summary(SummarySpec { quantiles: q.clone(), m }))
                    })
                    .collect()
            }
            EncoderKind::TargetMean => vec![EncoderSpec::TargetMean { m: 0.0 }],
            EncoderKind::MEstimateMean => {
                need(g.m_values.is_empty(), "m")?;
                g.m_values.iter().map(|&m| EncoderSpec::MEstimateMean { m }).collect()
            }
            EncoderKind::Ordinal => vec![EncoderSpec::Ordinal { seed: self.seed }],
        };
        for s in &specs {
            s.validate()?;
        }
        Ok(specs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitScore {
    pub repeat: usize,
    pub fold: usize,
    pub score: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigReport {
    pub label: String,
    pub spec: EncoderSpec,
    pub alpha: f64,
    pub splits: Vec<SplitScore>,
    /// Over successful splits only.
    pub mean: Option<f64>,
    pub std: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderReport {
    pub name: String,
    pub kind: EncoderKind,
    pub configs: Vec<ConfigReport>,
    pub best_config: Option<String>,
    pub failures: usize,
}

impl EncoderReport {
    pub fn best(&self) -> Option<&ConfigReport> {
        let label = self.best_config.as_ref()?;
        self.configs.iter().find(|c| &c.label == label)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub dataset_id: String,
    pub n_rows: usize,
    pub plan: CvPlan,
    pub model: ElasticNetSpec,
    pub generator: String,
    pub encoders: Vec<EncoderReport>,
    pub failures: usize,
}

impl CvReport {
    pub fn encoder(&self, name: &str) -> Option<&EncoderReport> {
        self.encoders.iter().find(|e| e.name == name)
    }

    pub fn score_count(&self) -> usize {
        self.encoders.iter().flat_map(|e| &e.configs).map(|c| c.splits.len()).sum()
    }

    /// Best-config score differences `a - b` over splits where both succeeded.
    pub fn paired_diffs(&self, a: &str, b: &str) -> Result<PairedSample> {
        let best = |name: &str| {
            self.encoder(name)
                .and_then(EncoderReport::best)
                .ok_or_else(|| Error::InvalidConfig(format!("no successful config for encoder {name}")))
        };
        let (ca, cb) = (best(a)?, best(b)?);
        let diffs: Vec<f64> = ca
            .splits
            .iter()
            .zip(&cb.splits)
            .filter_map(|(x, y)| {
                debug_assert_eq!((x.repeat, x.fold), (y.repeat, y.fold));
                Some(x.score? - y.score?)
            })
            .collect();
        PairedSample::new(diffs)
    }

    /// Flat `encoder,config,repeat,fold,score` table; failed splits have an empty score.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["encoder", "config", "repeat", "fold", "score"])?;
        for e in &self.encoders {
            for c in &e.configs {
                for s in &c.splits {
                    let score = s.score.map(|v| v.to_string()).unwrap_or_default();
                    w.write_record([&e.name, &c.label, &s.repeat.to_string(), &s.fold.to_string(), &score])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&serde_json::to_value(self)?)?)
    }
}

/// Everything produced while evaluating one (config, split) pair.
#[derive(Debug, Clone)]
pub struct SplitOutcome {
    pub encoder: FittedEncoder,
    pub model: LinearModel,
    pub predictions: Vec<f64>,
    pub score: f64,
}

/// Fits `spec` on the training rows of `split`, trains the model and scores the test rows.
pub fn evaluate_split(
    data: &Dataset,
    columns: &[String],
    spec: &EncoderSpec,
    model_spec: &ElasticNetSpec,
    metric: Metric,
    split: &Split,
) -> Result<SplitOutcome> {
    let train = data.select_rows(&split.train);
    let test = data.select_rows(&split.test);
    let encoder = encoders::fit(&train, columns, spec)?;
    let train_x = encoder.transform(&train)?.feature_matrix();
    let test_x = encoder.transform(&test)?.feature_matrix();
    let model = fit_elastic_net(train_x.view(), train.target(), model_spec)?;
    let predictions = model.predict(test_x.view())?;
    let score = metric.score(test.target(), &predictions)?;
    Ok(SplitOutcome { encoder, model, predictions, score })
}

/// Cross-validates one encoder family with fixed model hyperparameters.
pub fn run_cv(data: &Dataset, family: &EncoderFamily, model: &ElasticNetSpec, plan: &CvPlan) -> Result<CvReport> {
    run_benchmark(data, "dataset", std::slice::from_ref(family), model, &[model.alpha], plan)
}

/// Cross-validates several encoder families, optionally also searching over `alphas`.
///
/// Work runs in parallel, but the report is assembled in a fixed order so identical
/// inputs give identical reports.
pub fn run_benchmark(
    data: &Dataset,
    dataset_id: &str,
    families: &[EncoderFamily],
    model: &ElasticNetSpec,
    alphas: &[f64],
    plan: &CvPlan,
) -> Result<CvReport> {
    model.validate()?;
    if families.is_empty() {
        return Err(Error::InvalidConfig("no encoders to evaluate".into()));
    }
    if alphas.is_empty() {
        return Err(Error::InvalidConfig("empty alpha grid".into()));
    }
    let model_specs: Vec<ElasticNetSpec> = alphas.iter().map(|&alpha| ElasticNetSpec { alpha, ..*model }).collect();
    for m in &model_specs {
        m.validate()?;
    }
    let splits = make_folds(data.n_rows(), plan)?;
    let columns = data.categorical_names();

    let mut encoders_out = Vec::with_capacity(families.len());
    for family in families {
        let configs: Vec<(EncoderSpec, ElasticNetSpec)> = family
            .configs()?
            .into_iter()
            .flat_map(|spec| model_specs.iter().map(move |m| (spec.clone(), *m)))
            .collect();
        let tasks: Vec<(usize, usize)> =
            (0..configs.len()).flat_map(|c| (0..splits.len()).map(move |s| (c, s))).collect();
        let results: Vec<SplitScore> = tasks
            .par_iter()
            .map(|&(c, s)| {
                let (spec, model_spec) = &configs[c];
                let split = &splits[s];
                let outcome = evaluate_split(data, &columns, spec, model_spec, plan.metric, split);
                let (score, error) = match outcome {
                    Ok(o) => (Some(o.score), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                SplitScore { repeat: split.repeat, fold: split.fold, score, error }
            })
            .collect();

        let mut configs_out = Vec::with_capacity(configs.len());
        let mut failures = 0;
        for (c, chunk) in results.chunks(splits.len()).enumerate() {
            let (spec, model_spec) = &configs[c];
            let ok: Vec<f64> = chunk.iter().filter_map(|s| s.score).collect();
            failures += chunk.len() - ok.len();
            let (mean, std) = mean_std(&ok);
            let mut label = spec.label();
            if alphas.len() > 1 {
                label.push_str(&format!(",alpha={}", model_spec.alpha));
            }
            configs_out.push(ConfigReport {
                label,
                spec: spec.clone(),
                alpha: model_spec.alpha,
                splits: chunk.to_vec(),
                mean,
                std,
            });
        }
        let best_config = configs_out
            .iter()
            .filter_map(|c| c.mean.map(|m| (m, &c.label)))
            .fold(None::<(f64, &String)>, |best, (m, l)| match best {
                Some((bm, _)) if bm <= m => best,
                _ => Some((m, l)),
            })
            .map(|(_, l)| l.clone());
        encoders_out.push(EncoderReport {
            name: family.name.clone(),
            kind: family.kind,
            configs: configs_out,
            best_config,
            failures,
        });
    }
    let failures = encoders_out.iter().map(|e| e.failures).sum();
    Ok(CvReport {
        dataset_id: dataset_id.to_string(),
        n_rows: data.n_rows(),
        plan: *plan,
        model: *model,
        generator: rng::GENERATOR.to_string(),
        encoders: encoders_out,
        failures,
    })
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.len() > 1)
        .then(|| (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
    (Some(mean), std)
}
