//! The `nfgcd` command line.
//!
//! Exit codes: 0 on success, 1 for usage and validation errors, 2 when the
//! data cannot be read or processed.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::classifier::{NfClassifier, NfConfig, NumThreshold, TerminalRule, TraceStep, Verdict};
use crate::config::{RunConfig, DEFAULT_EPISODES};
use crate::episodes::{ablate, evaluate, AblationGrid, EpisodeSpec};
use crate::error::{Error, Result};
use crate::field::ClassKey;
use crate::io::{emit_ablation, emit_report, read_feature_file, FeatureSet, ReportFormat};
use crate::kernel::KernelParams;
use crate::preprocess::{
    prepare, FeatureMatrix, HeatScale, Metric, MetricKind, PreprocessConfig, Reduction,
    DEFAULT_RIDGE,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "nfgcd",
    version,
    about = "Neural-field classifier for generalized category discovery"
)]
struct Cli {
    /// Worker threads for episode-level parallelism.
    #[arg(long, env = "NFGCD_JOBS", global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Episodic evaluation with Old/New/All accuracy.
    Run(RunArgs),
    /// Fit on one feature file and stream the queries of another through it.
    Predict(PredictArgs),
    /// Evaluate a grid of thresholds, metrics, lambdas and escalation counts.
    Ablate(AblateArgs),
    /// Summarize a feature file.
    Inspect(InspectArgs),
}

#[derive(Args, Debug)]
struct ClassifierArgs {
    #[arg(long, default_value = "euc", value_parser = parse_metric)]
    metric: MetricKind,
    /// Interval shrink ratio in (0, 1).
    #[arg(long, default_value_t = 0.4, allow_negative_numbers = true)]
    lambda: f64,
    /// Maximum scale-adaptation steps.
    #[arg(long, default_value_t = 4)]
    iters: usize,
    #[arg(long, default_value = "half")]
    num_threshold: NumThreshold,
    /// Times the scale bound may grow before a query is declared novel.
    #[arg(long, default_value_t = 0)]
    sigma_escalations: usize,
    /// Excitatory amplitude of the kernel.
    #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
    kernel_a: f64,
    /// Inhibitory amplitude of the kernel.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    kernel_b: f64,
    /// Relative covariance ridge for the Mahalanobis metric.
    #[arg(long, default_value_t = DEFAULT_RIDGE, allow_negative_numbers = true)]
    ridge: f64,
}

impl ClassifierArgs {
    fn nf_config(&self) -> NfConfig {
        NfConfig {
            kernel: KernelParams {
                a: self.kernel_a,
                b: self.kernel_b,
                sigma: 1.0,
            },
            lambda: self.lambda,
            iterations: self.iters,
            num_threshold: self.num_threshold,
            sigma_escalations: self.sigma_escalations,
        }
    }
}

#[derive(Args, Debug)]
struct PrepArgs {
    /// Feature mapping: none, standardize, or le (Laplacian eigenmaps).
    #[arg(long, default_value = "le", value_parser = parse_reduction)]
    preprocess: Reduction,
    /// Neighbours per node in the eigenmap affinity graph.
    #[arg(long, default_value_t = 15)]
    le_k: usize,
    /// Embedding dimension (derived from the class count when omitted).
    #[arg(long)]
    le_dims: Option<usize>,
    /// Heat-kernel width: `auto` or a positive number.
    #[arg(long, default_value = "auto", value_parser = parse_heat_scale)]
    heat_scale: HeatScale,
    /// Refit preprocessing on every episode.
    #[arg(long)]
    per_episode: bool,
}

impl PrepArgs {
    fn config(&self) -> PreprocessConfig {
        PreprocessConfig {
            reduction: self.preprocess,
            k_neighbors: self.le_k,
            heat_scale: self.heat_scale,
            dims: self.le_dims,
            per_episode: self.per_episode,
        }
    }
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: ReportFormat,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Feature file (binary, or CSV by extension).
    #[arg(long)]
    features: PathBuf,
    #[arg(long, default_value_t = 5)]
    old: usize,
    #[arg(long, default_value_t = 5)]
    new: usize,
    #[arg(long, default_value_t = 10)]
    shots: usize,
    #[arg(long, default_value_t = DEFAULT_EPISODES)]
    episodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cap on queries drawn from any one class.
    #[arg(long)]
    query_cap: Option<usize>,
    #[command(flatten)]
    classifier: ClassifierArgs,
    #[command(flatten)]
    prep: PrepArgs,
    #[command(flatten)]
    output: OutputArgs,
}

impl RunArgs {
    fn run_config(&self) -> RunConfig {
        RunConfig {
            features: Some(self.features.display().to_string()),
            episode: EpisodeSpec {
                n_old: self.old,
                n_new: self.new,
                shots: self.shots,
                seed: self.seed,
                query_cap: self.query_cap,
            },
            episodes: self.episodes,
            classifier: self.classifier.nf_config(),
            metric: self.classifier.metric,
            ridge: self.classifier.ridge,
            preprocess: self.prep.config(),
        }
    }
}

#[derive(Args, Debug)]
struct AblateArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Thresholds to sweep (default: all three).
    #[arg(long, value_delimiter = ',')]
    grid_thresholds: Vec<NumThreshold>,
    /// Metrics to sweep (default: all three).
    #[arg(long, value_delimiter = ',', value_parser = parse_metric)]
    grid_metrics: Vec<MetricKind>,
    /// Lambdas to sweep (default: --lambda).
    #[arg(long, value_delimiter = ',')]
    grid_lambdas: Vec<f64>,
    /// Escalation counts to sweep (default: --sigma-escalations).
    #[arg(long, value_delimiter = ',')]
    grid_escalations: Vec<usize>,
}

#[derive(Args, Debug)]
struct PredictArgs {
    /// Labelled support samples.
    #[arg(long)]
    features: PathBuf,
    /// Query samples, streamed in file order; their labels are echoed only.
    #[arg(long)]
    queries: PathBuf,
    #[command(flatten)]
    classifier: ClassifierArgs,
    #[command(flatten)]
    prep: PrepArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct InspectArgs {
    /// Feature file to summarize.
    #[arg(long)]
    features: PathBuf,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_metric(s: &str) -> std::result::Result<MetricKind, String> {
    s.parse()
}

fn parse_reduction(s: &str) -> std::result::Result<Reduction, String> {
    match s {
        "none" => Ok(Reduction::None),
        "standardize" => Ok(Reduction::Standardize),
        "le" | "eigenmaps" => Ok(Reduction::Eigenmaps),
        other => Err(format!(
            "unknown preprocessing '{other}' (expected none, standardize or le)"
        )),
    }
}

fn parse_heat_scale(s: &str) -> std::result::Result<HeatScale, String> {
    if s == "auto" {
        return Ok(HeatScale::Auto);
    }
    s.parse::<f64>()
        .map(HeatScale::Fixed)
        .map_err(|_| format!("expected 'auto' or a number, got '{s}'"))
}

/// Parses `argv` (program name first), runs the command and returns the exit
/// code. Reports go to standard output unless `--out` is given.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run_cli`] with explicit output streams.
pub fn run_cli_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_data_error() {
                EXIT_DATA
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let pool = match cli.jobs {
        Some(0) => {
            return Err(Error::InvalidParameter("--jobs must be at least 1".into()));
        }
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    }
    .map_err(|e| Error::InvalidParameter(format!("--jobs: {e}")))?;

    match cli.command {
        Command::Run(args) => {
            let config = args.run_config();
            config.validate()?;
            let data = read_feature_file(&args.features)?;
            let report = pool.install(|| evaluate(&data, &config))?;
            deliver(
                &emit_report(&report, args.output.format)?,
                &args.output,
                out,
            )
        }
        Command::Ablate(args) => {
            let config = args.run.run_config();
            config.validate()?;
            let mut grid = AblationGrid::around(&config);
            if !args.grid_thresholds.is_empty() {
                grid.thresholds = args.grid_thresholds;
            }
            if !args.grid_metrics.is_empty() {
                grid.metrics = args.grid_metrics;
            }
            if !args.grid_lambdas.is_empty() {
                grid.lambdas = args.grid_lambdas;
            }
            if !args.grid_escalations.is_empty() {
                grid.escalations = args.grid_escalations;
            }
            let data = read_feature_file(&args.run.features)?;
            let report = pool.install(|| ablate(&data, &config, &grid))?;
            deliver(
                &emit_ablation(&report, args.run.output.format)?,
                &args.run.output,
                out,
            )
        }
        Command::Predict(args) => predict(&args, out),
        Command::Inspect(args) => {
            let data = read_feature_file(&args.features)?;
            let summary = inspect(&data);
            let bytes = match args.output.format {
                ReportFormat::Json => {
                    let mut b = serde_json::to_vec_pretty(&summary)?;
                    b.push(b'\n');
                    b
                }
                ReportFormat::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record(["class", "count"])?;
                    for c in &summary.classes {
                        w.write_record([c.name.clone(), c.count.to_string()])?;
                    }
                    w.into_inner().map_err(|e| e.into_error())?
                }
            };
            deliver(&bytes, &args.output, out)
        }
    }
}

fn deliver(bytes: &[u8], output: &OutputArgs, out: &mut dyn Write) -> Result<()> {
    match &output.out {
        Some(path) => write_file(path, bytes),
        None => {
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes)?;
    Ok(())
}

#[derive(Serialize)]
struct ClassCount {
    name: String,
    count: usize,
}

#[derive(Serialize)]
struct InspectSummary {
    samples: usize,
    dim: usize,
    classes: Vec<ClassCount>,
    min: Option<f32>,
    max: Option<f32>,
    /// Smallest per-class count, the limit on `--shots` for old classes.
    smallest_class: Option<usize>,
}

fn inspect(data: &FeatureSet) -> InspectSummary {
    let counts = data.class_counts();
    let values = data.records.iter().flat_map(|r| r.features.iter().copied());
    let (min, max) = values.fold((None, None), |(lo, hi): (Option<f32>, Option<f32>), x| {
        (
            Some(lo.map_or(x, |l| l.min(x))),
            Some(hi.map_or(x, |h| h.max(x))),
        )
    });
    InspectSummary {
        samples: data.len(),
        dim: data.dim,
        classes: data
            .class_names
            .iter()
            .zip(&counts)
            .map(|(name, &count)| ClassCount {
                name: name.clone(),
                count,
            })
            .collect(),
        min,
        max,
        smallest_class: counts.iter().copied().min(),
    }
}

#[derive(Serialize)]
struct QueryLine {
    index: usize,
    truth: String,
    assigned: String,
    minted: bool,
    terminal_rule: TerminalRule,
    trace: Vec<TraceStep>,
}

#[derive(Serialize)]
struct PredictReport {
    support: usize,
    known_classes: usize,
    minted: usize,
    queries: Vec<QueryLine>,
}

fn predict(args: &PredictArgs, out: &mut dyn Write) -> Result<()> {
    let nf = args.classifier.nf_config();
    // Same range checks as an evaluation run, with the same flag names.
    RunConfig {
        classifier: nf,
        metric: args.classifier.metric,
        ridge: args.classifier.ridge,
        preprocess: args.prep.config(),
        ..RunConfig::default()
    }
    .validate()?;
    let support = read_feature_file(&args.features)?;
    let queries = read_feature_file(&args.queries)?;
    if support.dim != queries.dim {
        return Err(Error::DimensionMismatch {
            expected: support.dim,
            found: queries.dim,
        });
    }
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(support.len() + queries.len());
    for r in support.records.iter().chain(&queries.records) {
        rows.push(r.features.iter().map(|&x| f64::from(x)).collect());
    }
    let combined = FeatureMatrix::from_rows(&rows)?;
    let mut names: Vec<&str> = support
        .class_names
        .iter()
        .chain(&queries.class_names)
        .map(String::as_str)
        .collect();
    names.sort_unstable();
    names.dedup();
    let fit_rows: Vec<usize> = (0..support.len()).collect();
    let prep = args.prep.config();
    let prepared = prepare(&combined, names.len(), &prep, Some(&fit_rows))?.features;
    let metric = Metric::fit(args.classifier.metric, &prepared, args.classifier.ridge)?;

    let support_rows: Vec<&[f64]> = (0..support.len()).map(|i| prepared.row(i)).collect();
    let mut clf = NfClassifier::fit_support(&support_rows, &support.labels(), metric, nf)?;
    let known = clf.num_classes();
    let mut lines = Vec::with_capacity(queries.len());
    for (i, record) in queries.records.iter().enumerate() {
        let x = prepared.row(support.len() + i);
        let outcome = clf.predict(x)?;
        let (class, minted) = match outcome.verdict {
            Verdict::Known(c) => (c, false),
            Verdict::Novel => (clf.incorporate_novel(x)?, true),
        };
        let assigned = match clf.class_key(class) {
            ClassKey::Label(l) => support.class_name(l).to_owned(),
            ClassKey::Pseudo(p) => format!("novel-{p}"),
        };
        lines.push(QueryLine {
            index: i,
            truth: queries.class_name(record.label).to_owned(),
            assigned,
            minted,
            terminal_rule: outcome.terminal_rule,
            trace: outcome.trace,
        });
    }
    let report = PredictReport {
        support: support.len(),
        known_classes: known,
        minted: clf.num_classes() - known,
        queries: lines,
    };
    let bytes = match args.output.format {
        ReportFormat::Json => {
            let mut b = serde_json::to_vec_pretty(&report)?;
            b.push(b'\n');
            b
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record([
                "index",
                "truth",
                "assigned",
                "minted",
                "terminal_rule",
                "final_sigma",
                "steps",
            ])?;
            for q in &report.queries {
                let last = q.trace.last().map_or(0.0, |s| s.sigma);
                w.write_record([
                    q.index.to_string(),
                    q.truth.clone(),
                    q.assigned.clone(),
                    q.minted.to_string(),
                    format!("{:?}", q.terminal_rule),
                    format!("{last:.6}"),
                    q.trace.len().to_string(),
                ])?;
            }
            w.into_inner().map_err(|e| e.into_error())?
        }
    };
    deliver(&bytes, &args.output, out)
}
