use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::episodes::{AblationReport, EvaluationReport, Summary};
use crate::error::Result;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Json => "json",
            ReportFormat::Csv => "csv",
        })
    }
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown format '{other}' (expected json or csv)")),
        }
    }
}

/// Fixed six-decimal rendering used for every float in CSV output.
fn num(x: f64) -> String {
    format!("{x:.6}")
}

/// `mean ± std`, both to six decimals.
pub fn format_mean_std(mean: f64, std: f64) -> String {
    format!("{} ± {}", num(mean), num(std))
}

fn summary_text(s: &Summary) -> String {
    format_mean_std(s.mean, s.std)
}

fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

/// Serializes an evaluation report.
///
/// JSON nests the full configuration and every episode. CSV has one row per
/// episode followed by aggregate rows for old, new and all.
pub fn emit_report(report: &EvaluationReport, format: ReportFormat) -> Result<Vec<u8>> {
    if format == ReportFormat::Json {
        return json_bytes(report);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "section",
        "episode",
        "old_acc",
        "new_acc",
        "all_acc",
        "old_queries",
        "new_queries",
        "minted",
        "population",
        "mean",
        "std",
        "summary",
    ])?;
    for (i, s) in report.per_episode.iter().enumerate() {
        w.write_record([
            "episode".to_owned(),
            i.to_string(),
            num(s.old_acc),
            num(s.new_acc),
            num(s.all_acc),
            s.old_queries.to_string(),
            s.new_queries.to_string(),
            s.minted.to_string(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
        ])?;
    }
    let agg = &report.aggregate;
    for (name, s) in [("old", &agg.old), ("new", &agg.new), ("all", &agg.all)] {
        let mut row = vec!["aggregate".to_owned()];
        row.extend(std::iter::repeat_n(String::new(), 7));
        row.extend([name.to_owned(), num(s.mean), num(s.std), summary_text(s)]);
        w.write_record(&row)?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

/// Serializes an ablation report, one CSV row per grid cell.
pub fn emit_ablation(report: &AblationReport, format: ReportFormat) -> Result<Vec<u8>> {
    if format == ReportFormat::Json {
        return json_bytes(report);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "num_threshold",
        "metric",
        "lambda",
        "sigma_escalations",
        "episodes",
        "old",
        "new",
        "all",
        "mean_minted",
    ])?;
    for r in &report.rows {
        let a = &r.aggregate;
        w.write_record([
            r.num_threshold.to_string(),
            r.metric.short_name().to_owned(),
            num(r.lambda),
            r.sigma_escalations.to_string(),
            a.episodes.to_string(),
            summary_text(&a.old),
            summary_text(&a.new),
            summary_text(&a.all),
            num(a.mean_minted),
        ])?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}
