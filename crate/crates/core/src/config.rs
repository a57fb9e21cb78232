//! Fully resolved settings for an evaluation run.

use serde::{Deserialize, Serialize};

use crate::classifier::NfConfig;
use crate::episodes::EpisodeSpec;
use crate::error::{Error, Result};
use crate::preprocess::{HeatScale, MetricKind, PreprocessConfig, Reduction, DEFAULT_RIDGE};

pub const DEFAULT_EPISODES: usize = 600;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Dataset path as given by the caller; informational only.
    pub features: Option<String>,
    pub episode: EpisodeSpec,
    pub episodes: usize,
    pub classifier: NfConfig,
    pub metric: MetricKind,
    /// Relative ridge added to the covariance before inversion.
    pub ridge: f64,
    pub preprocess: PreprocessConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            features: None,
            episode: EpisodeSpec::default(),
            episodes: DEFAULT_EPISODES,
            classifier: NfConfig::default(),
            metric: MetricKind::Euclidean,
            ridge: DEFAULT_RIDGE,
            preprocess: PreprocessConfig::default(),
        }
    }
}

fn invalid(message: String) -> Error {
    Error::InvalidParameter(message)
}

impl RunConfig {
    /// Checks every numeric range, naming the command-line flag at fault.
    pub fn validate(&self) -> Result<()> {
        self.episode.validate()?;
        if self.episodes == 0 {
            return Err(invalid("--episodes must be at least 1".into()));
        }
        let c = &self.classifier;
        if !(c.lambda > 0.0 && c.lambda < 1.0) {
            return Err(invalid(format!(
                "--lambda must lie strictly between 0 and 1, got {}",
                c.lambda
            )));
        }
        if c.iterations == 0 {
            return Err(invalid("--iters must be at least 1".into()));
        }
        c.kernel.validate()?;
        if !(self.ridge.is_finite() && self.ridge > 0.0) {
            return Err(invalid(format!(
                "--ridge must be positive, got {}",
                self.ridge
            )));
        }
        let p = &self.preprocess;
        if p.reduction == Reduction::Eigenmaps {
            if p.k_neighbors == 0 {
                return Err(invalid("--le-k must be at least 1".into()));
            }
            if p.dims == Some(0) {
                return Err(invalid("--le-dims must be at least 1".into()));
            }
            if let HeatScale::Fixed(h) = p.heat_scale {
                if !(h.is_finite() && h > 0.0) {
                    return Err(invalid(format!("--heat-scale must be positive, got {h}")));
                }
            }
        }
        Ok(())
    }
}
