//! Distance metrics used inside the interaction kernel.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::FeatureMatrix;
use crate::error::{Error, Result};

/// Which metric to use, without any fitted state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Euclidean,
    Cosine,
    Mahalanobis,
}

impl MetricKind {
    pub const ALL: [MetricKind; 3] = [
        MetricKind::Euclidean,
        MetricKind::Cosine,
        MetricKind::Mahalanobis,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            MetricKind::Euclidean => "euc",
            MetricKind::Cosine => "cos",
            MetricKind::Mahalanobis => "mah",
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "euc" | "euclidean" => Ok(MetricKind::Euclidean),
            "cos" | "cosine" => Ok(MetricKind::Cosine),
            "mah" | "mahalanobis" => Ok(MetricKind::Mahalanobis),
            other => Err(format!(
                "unknown metric '{other}' (expected euc, cos or mah)"
            )),
        }
    }
}

/// A ready-to-use metric. The Mahalanobis variant owns its precision matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum Metric {
    Euclidean,
    Cosine,
    Mahalanobis { precision: DMatrix<f64> },
}

impl Metric {
    /// Wraps a precision matrix after checking it is symmetric positive definite.
    pub fn mahalanobis(precision: DMatrix<f64>) -> Result<Self> {
        if !precision.is_square() {
            return Err(Error::InvalidParameter(format!(
                "precision matrix must be square, got {}x{}",
                precision.nrows(),
                precision.ncols()
            )));
        }
        let scale = precision.amax().max(f64::MIN_POSITIVE);
        let asym = (&precision - precision.transpose()).amax();
        if asym > 1e-9 * scale {
            return Err(Error::InvalidParameter(format!(
                "precision matrix is not symmetric (max asymmetry {asym:e})"
            )));
        }
        if precision.clone().cholesky().is_none() {
            return Err(Error::InvalidParameter(
                "precision matrix is not positive definite".into(),
            ));
        }
        Ok(Metric::Mahalanobis { precision })
    }

    /// Builds the metric of the given kind, estimating a Mahalanobis precision
    /// from `features` when needed.
    pub fn fit(kind: MetricKind, features: &FeatureMatrix, ridge: f64) -> Result<Self> {
        match kind {
            MetricKind::Euclidean => Ok(Metric::Euclidean),
            MetricKind::Cosine => Ok(Metric::Cosine),
            MetricKind::Mahalanobis => {
                Metric::mahalanobis(super::mahalanobis_precision(features, ridge)?)
            }
        }
    }

    pub fn kind(&self) -> MetricKind {
        match self {
            Metric::Euclidean => MetricKind::Euclidean,
            Metric::Cosine => MetricKind::Cosine,
            Metric::Mahalanobis { .. } => MetricKind::Mahalanobis,
        }
    }

    /// Dimension the metric is tied to, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Metric::Mahalanobis { precision } => Some(precision.nrows()),
            _ => None,
        }
    }

    pub fn distance(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.len(),
                found: y.len(),
            });
        }
        match self {
            Metric::Euclidean => Ok(euclidean(x, y)),
            Metric::Cosine => {
                let (mut dot, mut nx, mut ny) = (0.0, 0.0, 0.0);
                for (a, b) in x.iter().zip(y) {
                    dot += a * b;
                    nx += a * a;
                    ny += b * b;
                }
                if nx == 0.0 || ny == 0.0 {
                    return Err(Error::ZeroVector);
                }
                let cos = (dot / (nx.sqrt() * ny.sqrt())).clamp(-1.0, 1.0);
                Ok((1.0 - cos).max(0.0))
            }
            Metric::Mahalanobis { precision } => {
                if precision.nrows() != x.len() {
                    return Err(Error::DimensionMismatch {
                        expected: precision.nrows(),
                        found: x.len(),
                    });
                }
                let n = x.len();
                let mut acc = 0.0;
                for i in 0..n {
                    let di = x[i] - y[i];
                    let mut row = 0.0;
                    for j in 0..n {
                        row += precision[(i, j)] * (x[j] - y[j]);
                    }
                    acc += di * row;
                }
                Ok(acc.max(0.0).sqrt())
            }
        }
    }
}

#[inline]
pub(crate) fn euclidean(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}
