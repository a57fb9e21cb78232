use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{
    aggregate, run_episode, sample_episode, score_episode, AblationReport, AblationRow, Episode,
    EpisodeScore, EvaluationReport,
};
use crate::classifier::{NfConfig, NumThreshold};
use crate::config::RunConfig;
use crate::error::Result;
use crate::io::FeatureSet;
use crate::preprocess::{prepare, FeatureMatrix, Metric, MetricKind, PrepNotes, Prepared};

/// Shared state for evaluating many episodes of one dataset.
///
/// Episode `i` is drawn from a ChaCha8 generator seeded with the run seed on
/// stream `i`, so any episode can be regenerated on its own and results do not
/// depend on scheduling.
pub struct Evaluator {
    raw: FeatureMatrix,
    labels: Vec<u32>,
    /// Dataset-level preprocessing; absent in per-episode mode.
    shared: Option<Prepared>,
    config: RunConfig,
}

impl Evaluator {
    pub fn new(dataset: &FeatureSet, config: &RunConfig) -> Result<Self> {
        config.validate()?;
        dataset.validate()?;
        let raw = dataset.to_matrix()?;
        let shared = if config.preprocess.per_episode {
            None
        } else {
            Some(prepare(
                &raw,
                episode_classes(config),
                &config.preprocess,
                None,
            )?)
        };
        Ok(Evaluator {
            raw,
            labels: dataset.labels(),
            shared,
            config: config.clone(),
        })
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    pub fn notes(&self) -> Option<&PrepNotes> {
        self.shared.as_ref().map(|p| &p.notes)
    }

    pub fn episode(&self, index: usize) -> Result<Episode> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.episode.seed);
        rng.set_stream(index as u64);
        sample_episode(&self.labels, &self.config.episode, &mut rng)
    }

    /// Features for the rows of `episode`, with the episode renumbered to
    /// index into them.
    pub fn episode_features(&self, episode: &Episode) -> Result<(FeatureMatrix, Episode)> {
        let rows = episode.rows();
        let local = episode.localized();
        let features = match &self.shared {
            Some(p) => p.features.select_rows(&rows),
            None => {
                let sub = self.raw.select_rows(&rows);
                let support: Vec<usize> = (0..episode.support.len()).collect();
                prepare(
                    &sub,
                    episode_classes(&self.config),
                    &self.config.preprocess,
                    Some(&support),
                )?
                .features
            }
        };
        Ok((features, local))
    }

    pub fn score(&self, index: usize, nf: &NfConfig, metric: MetricKind) -> Result<EpisodeScore> {
        let episode = self.episode(index)?;
        let (features, local) = self.episode_features(&episode)?;
        let metric = Metric::fit(metric, &features, self.config.ridge)?;
        let run = run_episode(&features, &local, nf, &metric)?;
        Ok(score_episode(&run, &local))
    }

    /// Scores every episode in parallel, returned in episode order.
    pub fn run(&self, nf: &NfConfig, metric: MetricKind) -> Result<Vec<EpisodeScore>> {
        (0..self.config.episodes)
            .into_par_iter()
            .map(|i| self.score(i, nf, metric))
            .collect()
    }
}

fn episode_classes(config: &RunConfig) -> usize {
    config.episode.n_old + config.episode.n_new
}

/// Full episodic evaluation under one configuration.
pub fn evaluate(dataset: &FeatureSet, config: &RunConfig) -> Result<EvaluationReport> {
    let ev = Evaluator::new(dataset, config)?;
    let per_episode = ev.run(&config.classifier, config.metric)?;
    Ok(EvaluationReport {
        config: config.clone(),
        preprocessing: ev.notes().cloned(),
        aggregate: aggregate(&per_episode)?,
        per_episode,
    })
}

/// Values swept by [`ablate`]; rows are the Cartesian product in field order.
#[derive(Clone, Debug, PartialEq)]
pub struct AblationGrid {
    pub thresholds: Vec<NumThreshold>,
    pub metrics: Vec<MetricKind>,
    pub lambdas: Vec<f64>,
    pub escalations: Vec<usize>,
}

impl AblationGrid {
    /// Every threshold and metric at the base lambda and escalation count.
    pub fn around(config: &RunConfig) -> Self {
        AblationGrid {
            thresholds: NumThreshold::ALL.to_vec(),
            metrics: MetricKind::ALL.to_vec(),
            lambdas: vec![config.classifier.lambda],
            escalations: vec![config.classifier.sigma_escalations],
        }
    }

    pub fn len(&self) -> usize {
        self.thresholds.len() * self.metrics.len() * self.lambdas.len() * self.escalations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Evaluates every grid cell on the same episodes.
pub fn ablate(
    dataset: &FeatureSet,
    config: &RunConfig,
    grid: &AblationGrid,
) -> Result<AblationReport> {
    for &lambda in &grid.lambdas {
        let mut probe = config.clone();
        probe.classifier.lambda = lambda;
        probe.validate()?;
    }
    let ev = Evaluator::new(dataset, config)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &num_threshold in &grid.thresholds {
        for &metric in &grid.metrics {
            for &lambda in &grid.lambdas {
                for &sigma_escalations in &grid.escalations {
                    let nf = NfConfig {
                        num_threshold,
                        lambda,
                        sigma_escalations,
                        ..config.classifier
                    };
                    let scores = ev.run(&nf, metric)?;
                    rows.push(AblationRow {
                        num_threshold,
                        metric,
                        lambda,
                        sigma_escalations,
                        aggregate: aggregate(&scores)?,
                    });
                }
            }
        }
    }
    Ok(AblationReport {
        config: config.clone(),
        rows,
    })
}
