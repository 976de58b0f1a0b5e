//! Configuration and drivers behind the `qenc` binary.
//!
//! A benchmark run is described by one TOML document ([`RunConfig`]); command-line
//! flags override individual fields. Relative paths inside a config file resolve
//! against the file's directory, relative paths given as flags against the working
//! directory.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::data::{self, CauchyConfig, Dataset, Schema};
use crate::encoders::{self, EncoderKind, EncoderSpec, QuantileSpec, SummarySpec};
use crate::error::{Error, Result};
use crate::evaluation::{run_benchmark, CvPlan, CvReport, EncoderFamily, GridSpec, Metric};
use crate::regression::ElasticNetSpec;
use crate::stats::{outperformance_probability, wilcoxon_signed_rank, WilcoxonResult};

pub const TOOL: &str = "qenc";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "qenc", version, about = "Quantile target encoding and encoder benchmarks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate the synthetic Cauchy dataset as CSV.
    Synth(SynthArgs),
    /// Fit an encoder on one CSV and apply it to another.
    Encode(EncodeArgs),
    /// Cross-validate encoders and compare them against a reference encoder.
    Benchmark(BenchmarkArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// TOML file holding a Cauchy generator config.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Decimals kept in the category labels.
    #[arg(long)]
    pub round: Option<u32>,
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Clone)]
pub struct SchemaArgs {
    #[arg(long, value_delimiter = ',')]
    pub cat: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub num: Vec<String>,
    #[arg(long)]
    pub target: Option<String>,
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    #[arg(long)]
    pub train: PathBuf,
    /// Defaults to the training file.
    #[arg(long)]
    pub apply: Option<PathBuf>,
    #[command(flatten)]
    pub schema: SchemaArgs,
    /// quantile, summary, target, mestimate or ordinal.
    #[arg(long, default_value = "quantile")]
    pub encoder: String,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub m: Option<f64>,
    /// Quantile levels for the summary encoder.
    #[arg(long, value_delimiter = ',')]
    pub quantiles: Vec<f64>,
    /// Seed for the ordinal code permutation.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub dump_encoder: Option<PathBuf>,
}

#[derive(Debug, Args, Default)]
pub struct BenchmarkArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// CSV dataset (needs --target).
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub schema: OptionalSchemaArgs,
    /// Use the synthetic Cauchy dataset with this many rows.
    #[arg(long)]
    pub synthetic_rows: Option<usize>,
    #[arg(long)]
    pub round: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub metric: Vec<Metric>,
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long)]
    pub repeats: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub encoder: Vec<String>,
    #[arg(long)]
    pub reference: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub m_values: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub p_values: Vec<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub l1_ratio: Option<f64>,
    /// Search the model penalty over these values as well.
    #[arg(long, value_delimiter = ',')]
    pub alphas: Vec<f64>,
    /// JSON report path; the CSV table goes next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct OptionalSchemaArgs {
    #[arg(long, value_delimiter = ',')]
    pub cat: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub num: Vec<String>,
    #[arg(long)]
    pub target: Option<String>,
}

impl std::str::FromStr for EncoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "quantile" => Ok(EncoderKind::Quantile),
            "summary" => Ok(EncoderKind::Summary),
            "target" | "target_mean" | "mean" => Ok(EncoderKind::TargetMean),
            "mestimate" | "m_estimate" | "m_estimate_mean" => Ok(EncoderKind::MEstimateMean),
            "ordinal" => Ok(EncoderKind::Ordinal),
            other => Err(Error::InvalidConfig(format!("unknown encoder {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "lowercase", deny_unknown_fields)]
pub enum DatasetSource {
    Csv {
        path: PathBuf,
        #[serde(default)]
        categorical: Vec<String>,
        #[serde(default)]
        numeric: Vec<String>,
        target: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<String>,
    },
    Cauchy(CauchyConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EncoderEntry {
    pub name: String,
    /// Inferred from `name` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<EncoderKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantile_sets: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl EncoderEntry {
    pub fn named(name: &str) -> Self {
        EncoderEntry { name: name.to_string(), kind: None, m: None, p: None, quantile_sets: None, seed: None }
    }

    pub fn family(&self) -> Result<EncoderFamily> {
        let kind = match self.kind {
            Some(k) => k,
            None => self.name.parse()?,
        };
        let reference = GridSpec::reference();
        let grid = GridSpec {
            m_values: self.m.clone().unwrap_or(reference.m_values),
            p_values: self.p.clone().unwrap_or(reference.p_values),
            quantile_sets: self.quantile_sets.clone().unwrap_or(reference.quantile_sets),
        };
        Ok(EncoderFamily { name: self.name.clone(), kind, grid, seed: self.seed })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvSettings {
    pub folds: usize,
    pub repeats: usize,
}

impl Default for CvSettings {
    fn default() -> Self {
        CvSettings { folds: 4, repeats: 3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

fn default_metrics() -> Vec<Metric> {
    vec![Metric::Mae]
}

fn default_reference() -> String {
    "target".to_string()
}

fn default_encoders() -> Vec<EncoderEntry> {
    vec![EncoderEntry::named("quantile"), EncoderEntry::named("target")]
}

/// A complete benchmark description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dataset: DatasetSource,
    #[serde(default = "default_encoders")]
    pub encoders: Vec<EncoderEntry>,
    #[serde(default)]
    pub model: ElasticNetSpec,
    /// Optional search over the model penalty; empty means `model.alpha` only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alpha_grid: Vec<f64>,
    #[serde(default)]
    pub cv: CvSettings,
    #[serde(default = "default_metrics")]
    pub metrics: Vec<Metric>,
    #[serde(default = "default_reference")]
    pub reference: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputPaths,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(format!("config: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        if self.encoders.is_empty() {
            return Err(Error::InvalidConfig("at least one encoder is required".into()));
        }
        if self.metrics.is_empty() {
            return Err(Error::InvalidConfig("at least one metric is required".into()));
        }
        let mut names: Vec<&str> = self.encoders.iter().map(|e| e.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidConfig("encoder names must be unique".into()));
        }
        if !self.encoders.iter().any(|e| e.name == self.reference) {
            return Err(Error::InvalidConfig(format!("reference encoder {} is not in the encoder list", self.reference)));
        }
        for e in &self.encoders {
            e.family()?.configs()?;
        }
        self.model.validate()?;
        for &alpha in &self.alpha_grid {
            ElasticNetSpec { alpha, ..self.model }.validate()?;
        }
        self.plan(self.metrics[0]).validate()?;
        if let DatasetSource::Cauchy(c) = &self.dataset {
            c.validate()?;
        }
        Ok(())
    }

    pub fn plan(&self, metric: Metric) -> CvPlan {
        CvPlan { n_folds: self.cv.folds, n_repeats: self.cv.repeats, seed: self.seed, metric }
    }

    pub fn alphas(&self) -> Vec<f64> {
        if self.alpha_grid.is_empty() {
            vec![self.model.alpha]
        } else {
            self.alpha_grid.clone()
        }
    }

    pub fn dataset_id(&self) -> String {
        match &self.dataset {
            DatasetSource::Csv { id: Some(id), .. } => id.clone(),
            DatasetSource::Csv { path, .. } => path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into()),
            DatasetSource::Cauchy(_) => "cauchy".to_string(),
        }
    }

    pub fn load_dataset(&self, base_dir: &Path) -> Result<Dataset> {
        match &self.dataset {
            DatasetSource::Csv { path, categorical, numeric, target, .. } => {
                let schema = Schema { categorical: categorical.clone(), numeric: numeric.clone(), target: target.clone() };
                data::load_csv(base_dir.join(path), &schema)
            }
            DatasetSource::Cauchy(cfg) => data::generate_cauchy_dataset(cfg),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub id: String,
    pub n_rows: usize,
    pub cardinality: BTreeMap<String, usize>,
}

/// Paired test of one encoder against the reference, on best configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub encoder: String,
    pub reference: String,
    pub n_pairs: usize,
    pub wilcoxon: Option<WilcoxonResult>,
    /// Probability that `encoder` scores lower than `reference`.
    pub p_q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRun {
    pub metric: Metric,
    pub cv: CvReport,
    pub comparisons: Vec<Comparison>,
}

/// Self-describing output of a benchmark run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub tool: String,
    pub version: String,
    pub config: RunConfig,
    pub dataset: DatasetSummary,
    pub runs: Vec<MetricRun>,
    pub warnings: usize,
}

impl BenchmarkReport {
    /// Pretty JSON with sorted object keys.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(&serde_json::to_value(self)?)?;
        s.push('\n');
        Ok(s)
    }

    /// Plain-text table: mean ± std per encoder, then p-value and P_Q per comparison.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for run in &self.runs {
            let metric = run.metric.name().to_uppercase();
            let _ = writeln!(out, "{} ({} rows) metric {}", self.dataset.id, self.dataset.n_rows, metric);
            let width = run.cv.encoders.iter().filter_map(|e| e.best_config.as_ref()).map(|l| l.len()).max().unwrap_or(0).max(22);
            let _ = writeln!(out, "{:<14} {:<width$} {:>26} {:>8}", "encoder", "best config", format!("{metric} mean ± std"), "failed");
            for e in &run.cv.encoders {
                let best = e.best();
                let stat = match best {
                    Some(c) => format!("{} ± {}", fmt_num(c.mean), fmt_num(c.std)),
                    None => "-".to_string(),
                };
                let label = e.best_config.clone().unwrap_or_else(|| "-".into());
                let _ = writeln!(out, "{:<14} {:<width$} {:>26} {:>8}", e.name, label, stat, e.failures);
            }
            let _ = writeln!(out, "{:<14} {:<22} {:>10} {:>8}", "dataset", "vs reference", "p-value", "P_Q");
            for c in &run.comparisons {
                let p = c.wilcoxon.map(|w| format!("{:.4}", w.p_value)).unwrap_or_else(|| "-".into());
                let pq = c.p_q.map(|v| format!("{v:.3}")).unwrap_or_else(|| "-".into());
                let _ = writeln!(out, "{:<14} {:<22} {:>10} {:>8}", self.dataset.id, format!("{}/{}", c.encoder, c.reference), p, pq);
            }
            out.push('\n');
        }
        out
    }
}

fn fmt_num(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.4}")).unwrap_or_else(|| "-".into())
}

/// Runs every metric of `config` on its dataset.
pub fn execute_benchmark(config: &RunConfig, base_dir: &Path) -> Result<BenchmarkReport> {
    config.validate()?;
    let families: Vec<EncoderFamily> = config.encoders.iter().map(EncoderEntry::family).collect::<Result<_>>()?;
    let data = config.load_dataset(base_dir)?;
    let dataset = DatasetSummary {
        id: config.dataset_id(),
        n_rows: data.n_rows(),
        cardinality: data
            .categorical_names()
            .into_iter()
            .map(|c| {
                let k = data.cardinality(&c).unwrap_or(0);
                (c, k)
            })
            .collect(),
    };
    let mut runs = Vec::new();
    let mut warnings = 0;
    for &metric in &config.metrics {
        let cv = run_benchmark(&data, &dataset.id, &families, &config.model, &config.alphas(), &config.plan(metric))?;
        warnings += cv.failures;
        let comparisons: Vec<Comparison> = cv
            .encoders
            .iter()
            .filter(|e| e.name != config.reference)
            .map(|e| compare(&cv, &e.name, &config.reference))
            .collect();
        warnings += comparisons.iter().filter(|c| c.error.is_some()).count();
        runs.push(MetricRun { metric, cv, comparisons });
    }
    Ok(BenchmarkReport {
        tool: TOOL.to_string(),
        version: VERSION.to_string(),
        config: config.clone(),
        dataset,
        runs,
        warnings,
    })
}

fn compare(cv: &CvReport, encoder: &str, reference: &str) -> Comparison {
    match cv.paired_diffs(encoder, reference) {
        Ok(diffs) => Comparison {
            encoder: encoder.to_string(),
            reference: reference.to_string(),
            n_pairs: diffs.diffs().len(),
            wilcoxon: Some(wilcoxon_signed_rank(&diffs)),
            p_q: Some(outperformance_probability(&diffs)),
            error: None,
        },
        Err(e) => Comparison {
            encoder: encoder.to_string(),
            reference: reference.to_string(),
            n_pairs: 0,
            wilcoxon: None,
            p_q: None,
            error: Some(e.to_string()),
        },
    }
}

/// Builds the run config from an optional file plus flag overrides.
///
/// Returns the config and the directory its relative paths resolve against.
pub fn resolve_benchmark_config(args: &BenchmarkArgs) -> Result<(RunConfig, PathBuf)> {
    let (mut config, base_dir) = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            (Some(RunConfig::from_toml(&text)?), base)
        }
        None => (None, PathBuf::new()),
    };

    let flag_dataset = if let Some(path) = &args.data {
        let target = args
            .schema
            .target
            .clone()
            .ok_or_else(|| Error::InvalidConfig("--data needs --target".into()))?;
        Some(DatasetSource::Csv {
            path: absolute_from_cwd(path)?,
            categorical: args.schema.cat.clone(),
            numeric: args.schema.num.clone(),
            target,
            id: path.file_stem().map(|s| s.to_string_lossy().into_owned()),
        })
    } else {
        args.synthetic_rows.map(|n| {
            DatasetSource::Cauchy(CauchyConfig {
                n_rows: n,
                seed: args.seed.unwrap_or(0),
                rounding_decimals: args.round,
                ..Default::default()
            })
        })
    };
    if args.data.is_some() && args.synthetic_rows.is_some() {
        return Err(Error::InvalidConfig("choose either --data or --synthetic-rows".into()));
    }

    if config.is_none() {
        let dataset = flag_dataset
            .clone()
            .ok_or_else(|| Error::InvalidConfig("no dataset: pass --config, --data or --synthetic-rows".into()))?;
        config = Some(RunConfig {
            dataset,
            encoders: default_encoders(),
            model: ElasticNetSpec::default(),
            alpha_grid: Vec::new(),
            cv: CvSettings::default(),
            metrics: default_metrics(),
            reference: default_reference(),
            seed: 0,
            output: OutputPaths::default(),
        });
    }
    let mut config = config.expect("set above");
    if let Some(d) = flag_dataset {
        config.dataset = d;
    } else if let DatasetSource::Csv { categorical, numeric, target, .. } = &mut config.dataset {
        if !args.schema.cat.is_empty() {
            *categorical = args.schema.cat.clone();
        }
        if !args.schema.num.is_empty() {
            *numeric = args.schema.num.clone();
        }
        if let Some(t) = &args.schema.target {
            *target = t.clone();
        }
    } else if let DatasetSource::Cauchy(c) = &mut config.dataset {
        if let Some(r) = args.round {
            c.rounding_decimals = Some(r);
        }
    }

    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if !args.metric.is_empty() {
        config.metrics = args.metric.clone();
    }
    if let Some(f) = args.folds {
        config.cv.folds = f;
    }
    if let Some(r) = args.repeats {
        config.cv.repeats = r;
    }
    if !args.encoder.is_empty() {
        config.encoders = args
            .encoder
            .iter()
            .map(|name| {
                config
                    .encoders
                    .iter()
                    .find(|e| &e.name == name)
                    .cloned()
                    .unwrap_or_else(|| EncoderEntry::named(name))
            })
            .collect();
    }
    if !args.m_values.is_empty() || !args.p_values.is_empty() {
        for e in &mut config.encoders {
            if !args.m_values.is_empty() {
                e.m = Some(args.m_values.clone());
            }
            if !args.p_values.is_empty() {
                e.p = Some(args.p_values.clone());
            }
        }
    }
    if let Some(r) = &args.reference {
        config.reference = r.clone();
    }
    if let Some(a) = args.alpha {
        config.model.alpha = a;
    }
    if let Some(l) = args.l1_ratio {
        config.model.l1_ratio = l;
    }
    if !args.alphas.is_empty() {
        config.alpha_grid = args.alphas.clone();
    }
    if let Some(out) = &args.out {
        config.output.json = Some(absolute_from_cwd(out)?);
        config.output.csv = Some(absolute_from_cwd(&out.with_extension("csv"))?);
    }
    config.validate()?;
    Ok((config, base_dir))
}

fn absolute_from_cwd(path: &Path) -> Result<PathBuf> {
    if path.is_absolute() {
        Ok(path.to_path_buf())
    } else {
        Ok(std::env::current_dir()?.join(path))
    }
}

/// `benchmark` subcommand. Returns the printed summary.
pub fn cmd_benchmark(args: &BenchmarkArgs) -> Result<String> {
    let (config, base_dir) = resolve_benchmark_config(args)?;
    let report = execute_benchmark(&config, &base_dir)?;
    let json_path = config.output.json.as_ref().map(|p| base_dir.join(p)).unwrap_or_else(|| PathBuf::from("report.json"));
    let csv_path = config.output.csv.as_ref().map(|p| base_dir.join(p)).unwrap_or_else(|| json_path.with_extension("csv"));
    fs::write(&json_path, report.to_json()?)?;
    if report.runs.len() == 1 {
        report.runs[0].cv.write_csv(BufWriter::new(File::create(&csv_path)?))?;
    } else {
        for run in &report.runs {
            let stem = csv_path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let path = csv_path.with_file_name(format!("{stem}.{}.csv", run.metric.name()));
            run.cv.write_csv(BufWriter::new(File::create(path)?))?;
        }
    }
    let mut summary = report.summary();
    let _ = writeln!(summary, "warnings: {}", report.warnings);
    Ok(summary)
}

/// `synth` subcommand. Returns the printed summary.
pub fn cmd_synth(args: &SynthArgs) -> Result<String> {
    let mut cfg = match &args.config {
        Some(path) => toml::from_str::<CauchyConfig>(&fs::read_to_string(path)?)
            .map_err(|e| Error::InvalidConfig(format!("config: {e}")))?,
        None => CauchyConfig::default(),
    };
    if let Some(n) = args.n {
        cfg.n_rows = n;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(r) = args.round {
        cfg.rounding_decimals = Some(r);
    }
    if let Some(noise) = args.noise {
        cfg.noise_sigma = noise;
    }
    let dataset = data::generate_cauchy_dataset(&cfg)?;
    data::write_csv(&dataset, BufWriter::new(File::create(&args.out)?))?;
    let mut out = format!("rows: {}\n", dataset.n_rows());
    for name in dataset.categorical_names() {
        let _ = writeln!(out, "cardinality {name}: {}", dataset.cardinality(&name).unwrap_or(0));
    }
    Ok(out)
}

/// Result of the `encode` subcommand.
#[derive(Debug)]
pub struct EncodeOutcome {
    pub rows: usize,
    pub columns: Vec<String>,
    pub unseen: usize,
}

pub fn encoder_spec_from_flags(name: &str, p: Option<f64>, m: Option<f64>, quantiles: &[f64], seed: Option<u64>) -> Result<EncoderSpec> {
    let spec = match name.parse::<EncoderKind>()? {
        EncoderKind::Quantile => {
            let d = QuantileSpec::default();
            EncoderSpec::Quantile(QuantileSpec { p: p.unwrap_or(d.p), m: m.unwrap_or(d.m) })
        }
        EncoderKind::Summary => {
            let d = SummarySpec::default();
            let quantiles = if quantiles.is_empty() { d.quantiles } else { quantiles.to_vec() };
            EncoderSpec::Summary(SummarySpec { quantiles, m: m.unwrap_or(d.m) })
        }
        EncoderKind::TargetMean => EncoderSpec::TargetMean { m: m.unwrap_or(0.0) },
        EncoderKind::MEstimateMean => EncoderSpec::MEstimateMean { m: m.unwrap_or(1.0) },
        EncoderKind::Ordinal => EncoderSpec::Ordinal { seed },
    };
    spec.validate()?;
    Ok(spec)
}

pub fn cmd_encode(args: &EncodeArgs) -> Result<EncodeOutcome> {
    let target = args.schema.target.clone().ok_or_else(|| Error::InvalidConfig("--target is required".into()))?;
    let schema = Schema { categorical: args.schema.cat.clone(), numeric: args.schema.num.clone(), target };
    let spec = encoder_spec_from_flags(&args.encoder, args.p, args.m, &args.quantiles, args.seed)?;
    let train = data::load_csv(&args.train, &schema)?;
    let apply = match &args.apply {
        Some(path) => data::load_csv(path, &schema)?,
        None => train.clone(),
    };
    let encoder = encoders::fit(&train, &schema.categorical, &spec)?;
    let (encoded, unseen) = encoder.transform_counting(&apply)?;
    data::write_csv(&encoded, BufWriter::new(File::create(&args.out)?))?;
    if let Some(path) = &args.dump_encoder {
        fs::write(path, encoder.to_json()? + "\n")?;
    }
    Ok(EncodeOutcome { rows: encoded.n_rows(), columns: encoder.output_names.clone(), unseen })
}

/// Parses `argv` and runs a subcommand; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Synth(a) => cmd_synth(a).map(|s| print!("{s}")),
        Command::Encode(a) => cmd_encode(a).map(|o| {
            println!("rows: {}", o.rows);
            println!("encoded columns: {}", o.columns.join(","));
            if o.unseen > 0 {
                eprintln!("warning: {} unseen category value(s) encoded with the global statistic", o.unseen);
            }
        }),
        Command::Benchmark(a) => cmd_benchmark(a).map(|s| print!("{s}")),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOML: &str = r#"
        seed = 3
        reference = "target"
        metrics = ["mae", "mse"]

        [dataset]
        source = "cauchy"
        n_rows = 200
        rounding_decimals = 0

        [[encoders]]
        name = "quantile"
        m = [0, 1]
        p = [0.5]

        [[encoders]]
        name = "target"

        [model]
        alpha = 0.5

        [cv]
        folds = 3
        repeats = 2
    "#;

    #[test]
    fn parses_nested_config() {
        let cfg = RunConfig::from_toml(TOML).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.metrics, vec![Metric::Mae, Metric::Mse]);
        assert_eq!(cfg.model.alpha, 0.5);
        assert_eq!(cfg.model.l1_ratio, 0.5);
        assert_eq!(cfg.cv, CvSettings { folds: 3, repeats: 2 });
        match &cfg.dataset {
            DatasetSource::Cauchy(c) => {
                assert_eq!(c.n_rows, 200);
                assert_eq!(c.rounding_decimals, Some(0));
                assert_eq!(c.center_high, 100.0);
            }
            other => panic!("unexpected dataset {other:?}"),
        }
        assert_eq!(cfg.encoders[0].family().unwrap().configs().unwrap().len(), 2);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_reference() {
        assert!(RunConfig::from_toml(&format!("{TOML}\nbogus = 1\n")).is_err());
        let mut cfg = RunConfig::from_toml(TOML).unwrap();
        cfg.reference = "nope".into();
        assert!(cfg.validate().is_err());
        cfg.reference = "target".into();
        cfg.encoders.clear();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, TOML).unwrap();
        let args = BenchmarkArgs {
            config: Some(path),
            seed: Some(99),
            folds: Some(4),
            metric: vec![Metric::Mae],
            encoder: vec!["quantile".into(), "target".into(), "summary".into()],
            m_values: vec![10.0],
            ..Default::default()
        };
        let (cfg, base) = resolve_benchmark_config(&args).unwrap();
        assert_eq!(base, dir.path());
        assert_eq!(cfg.seed, 99);
        assert_eq!(cfg.cv.folds, 4);
        assert_eq!(cfg.cv.repeats, 2);
        assert_eq!(cfg.metrics, vec![Metric::Mae]);
        assert_eq!(cfg.encoders.len(), 3);
        assert_eq!(cfg.encoders[0].p, Some(vec![0.5]));
        assert!(cfg.encoders.iter().all(|e| e.m == Some(vec![10.0])));
    }

    #[test]
    fn encoder_names_resolve() {
        assert_eq!("target".parse::<EncoderKind>().unwrap(), EncoderKind::TargetMean);
        assert_eq!("m-estimate".parse::<EncoderKind>().unwrap(), EncoderKind::MEstimateMean);
        assert!("catboost".parse::<EncoderKind>().is_err());
        let s = encoder_spec_from_flags("summary", None, None, &[], None).unwrap();
        assert_eq!(s, EncoderSpec::Summary(SummarySpec::default()));
        assert!(encoder_spec_from_flags("quantile", Some(2.0), None, &[], None).is_err());
    }

    #[test]
    fn small_benchmark_runs_and_reports() {
        let cfg = RunConfig::from_toml(TOML).unwrap();
        let report = execute_benchmark(&cfg, Path::new(".")).unwrap();
        assert_eq!(report.runs.len(), 2);
        assert_eq!(report.version, VERSION);
        assert_eq!(report.config, cfg);
        let run = &report.runs[0];
        assert_eq!(run.cv.score_count(), (2 + 1) * 3 * 2);
        assert_eq!(run.comparisons.len(), 1);
        let c = &run.comparisons[0];
        assert_eq!(c.n_pairs, 6);
        let p = c.wilcoxon.unwrap().p_value;
        assert!((0.0..=1.0).contains(&p));
        assert!((0.0..=1.0).contains(&c.p_q.unwrap()));
        assert!(report.summary().contains("P_Q"));
    }
}
