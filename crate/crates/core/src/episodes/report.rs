use serde::{Deserialize, Serialize};

use super::EpisodeScore;
use crate::classifier::NumThreshold;
use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::preprocess::{MetricKind, PrepNotes};

/// Mean and sample standard deviation of one accuracy over episodes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    /// Uses the `n - 1` denominator; a single value has std 0.
    pub fn of(values: &[f64]) -> Summary {
        let n = values.len();
        if n == 0 {
            return Summary {
                mean: 0.0,
                std: 0.0,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        if n == 1 {
            return Summary { mean, std: 0.0 };
        }
        let ss: f64 = values.iter().map(|x| (x - mean) * (x - mean)).sum();
        Summary {
            mean,
            std: (ss / (n - 1) as f64).sqrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub episodes: usize,
    pub old: Summary,
    pub new: Summary,
    pub all: Summary,
    /// Only one episode, so every std is 0 by convention.
    pub single_episode: bool,
    /// Episodes without new-class queries, scored 1.0 for New.
    pub vacuous_new: usize,
    pub mean_minted: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub config: RunConfig,
    /// Diagnostics of the dataset-level preprocessing pass, when one ran.
    pub preprocessing: Option<PrepNotes>,
    pub per_episode: Vec<EpisodeScore>,
    pub aggregate: Aggregate,
}

/// Summarizes per-episode scores. The result does not depend on the order
/// of `scores` beyond floating-point summation order.
pub fn aggregate(scores: &[EpisodeScore]) -> Result<Aggregate> {
    if scores.is_empty() {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let pick = |f: fn(&EpisodeScore) -> f64| {
        // Sorting makes the sums independent of episode order.
        let mut v: Vec<f64> = scores.iter().map(f).collect();
        v.sort_by(f64::total_cmp);
        Summary::of(&v)
    };
    Ok(Aggregate {
        episodes: scores.len(),
        old: pick(|s| s.old_acc),
        new: pick(|s| s.new_acc),
        all: pick(|s| s.all_acc),
        single_episode: scores.len() == 1,
        vacuous_new: scores.iter().filter(|s| s.new_vacuous).count(),
        mean_minted: scores.iter().map(|s| s.minted as f64).sum::<f64>() / scores.len() as f64,
    })
}

/// One cell of an ablation grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    pub num_threshold: NumThreshold,
    pub metric: MetricKind,
    pub lambda: f64,
    pub sigma_escalations: usize,
    pub aggregate: Aggregate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    /// Settings shared by every row; the varied fields hold their base values.
    pub config: RunConfig,
    pub rows: Vec<AblationRow>,
}
