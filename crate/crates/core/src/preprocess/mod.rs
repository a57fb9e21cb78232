//! Feature preprocessing: standardization, Laplacian-eigenmap reduction and
//! the distance metrics used by the classifier.

mod eigenmaps;
mod graph;
mod metric;
mod pipeline;

pub use eigenmaps::{
    generalized_spectrum, laplacian_eigenmaps, laplacian_eigenmaps_with, LeEmbedding, Solver,
    ZERO_EIGENVALUE_TOL,
};
pub use graph::{build_affinity_graph, AffinityGraph, HeatScale};
pub use metric::{Metric, MetricKind};
pub use pipeline::{prepare, PrepNotes, Prepared, PreprocessConfig, Reduction};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scale assigned to (near-)constant columns.
pub const SCALE_FLOOR: f64 = 1e-8;

/// Default Mahalanobis ridge, relative to the mean covariance diagonal.
pub const DEFAULT_RIDGE: f64 = 1e-3;

const MAX_RIDGE_DOUBLINGS: usize = 8;

/// Dense row-major real matrix with one identifier per row.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
    ids: Vec<usize>,
}

impl FeatureMatrix {
    /// Builds a matrix from row-major values; row ids default to `0..rows`.
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "{} values do not fill a {rows}x{cols} matrix",
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols.max(1),
                col: pos % cols.max(1),
            });
        }
        Ok(FeatureMatrix {
            rows,
            cols,
            values,
            ids: (0..rows).collect(),
        })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        FeatureMatrix::new(rows.len(), cols, values)
    }

    pub fn with_ids(mut self, ids: Vec<usize>) -> Result<Self> {
        if ids.len() != self.rows {
            return Err(Error::LengthMismatch {
                left: self.rows,
                right: ids.len(),
            });
        }
        self.ids = ids;
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.rows).map(move |i| self.row(i))
    }

    /// New matrix holding the given rows, keeping their ids.
    pub fn select_rows(&self, indices: &[usize]) -> FeatureMatrix {
        let mut values = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            rows: indices.len(),
            cols: self.cols,
            values,
            ids: indices.iter().map(|&i| self.ids[i]).collect(),
        }
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.values)
    }

    fn require_rows(&self, needed: usize) -> Result<()> {
        if self.rows < needed {
            return Err(Error::TooFewSamples {
                needed,
                got: self.rows,
            });
        }
        Ok(())
    }
}

/// Per-column location and scale learned by [`standardize`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StandardizationStats {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
    /// Columns whose spread fell below [`SCALE_FLOOR`].
    pub floored: Vec<bool>,
}

impl StandardizationStats {
    pub fn fit(features: &FeatureMatrix) -> Result<Self> {
        features.require_rows(2)?;
        let n = features.rows() as f64;
        let d = features.cols();
        let mut mean = vec![0.0; d];
        for row in features.iter_rows() {
            for (m, x) in mean.iter_mut().zip(row) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for row in features.iter_rows() {
            for ((v, x), m) in var.iter_mut().zip(row).zip(&mean) {
                *v += (x - m) * (x - m);
            }
        }
        let mut scale = Vec::with_capacity(d);
        let mut floored = Vec::with_capacity(d);
        for v in var {
            let sd = (v / (n - 1.0)).sqrt();
            floored.push(sd < SCALE_FLOOR);
            scale.push(sd.max(SCALE_FLOOR));
        }
        Ok(StandardizationStats {
            mean,
            scale,
            floored,
        })
    }

    pub fn apply(&self, features: &FeatureMatrix) -> Result<FeatureMatrix> {
        if features.cols() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                found: features.cols(),
            });
        }
        let d = features.cols();
        let values = features
            .values()
            .iter()
            .enumerate()
            .map(|(k, x)| {
                let j = k % d;
                (x - self.mean[j]) / self.scale[j]
            })
            .collect();
        Ok(FeatureMatrix {
            values,
            ..features.clone()
        })
    }

    pub fn any_floored(&self) -> bool {
        self.floored.iter().any(|&f| f)
    }
}

/// Centers every column and divides by its sample standard deviation.
pub fn standardize(features: &FeatureMatrix) -> Result<(FeatureMatrix, StandardizationStats)> {
    let stats = StandardizationStats::fit(features)?;
    Ok((stats.apply(features)?, stats))
}

/// Sample covariance (n - 1 denominator).
pub fn sample_covariance(features: &FeatureMatrix) -> Result<DMatrix<f64>> {
    features.require_rows(2)?;
    let x = features.to_dmatrix();
    let mean = x.row_mean();
    let mut centered = x;
    for mut row in centered.row_iter_mut() {
        row -= &mean;
    }
    Ok(centered.transpose() * &centered / (features.rows() as f64 - 1.0))
}

/// Inverse of `cov + ridge * mean(diag(cov)) * I`.
///
/// A covariance that is still numerically singular gets its ridge doubled, up
/// to eight times, before the estimate is rejected.
pub fn mahalanobis_precision(features: &FeatureMatrix, ridge: f64) -> Result<DMatrix<f64>> {
    if !(ridge >= 0.0 && ridge.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "ridge must be non-negative, got {ridge}"
        )));
    }
    let cov = sample_covariance(features)?;
    let d = cov.nrows();
    let mean_diag = if d == 0 { 0.0 } else { cov.trace() / d as f64 };
    let max_diag = (0..d).map(|i| cov[(i, i)]).fold(0.0f64, f64::max);
    let mut abs_ridge = ridge * mean_diag;
    for attempt in 0..=MAX_RIDGE_DOUBLINGS {
        let mut reg = cov.clone();
        for i in 0..d {
            reg[(i, i)] += abs_ridge;
        }
        let reg_max = max_diag + abs_ridge;
        if let Some(chol) = reg.cholesky() {
            let l = chol.l_dirty();
            let well_posed =
                reg_max > 0.0 && (0..d).all(|i| l[(i, i)] * l[(i, i)] > 1e-12 * reg_max);
            if well_posed {
                let inv = chol.inverse();
                // Symmetrize away round-off.
                return Ok((&inv + inv.transpose()) * 0.5);
            }
        }
        if attempt == MAX_RIDGE_DOUBLINGS {
            break;
        }
        abs_ridge *= 2.0;
    }
    Err(Error::SingularCovariance {
        attempts: MAX_RIDGE_DOUBLINGS,
        ridge: abs_ridge,
    })
}

/// Number of embedding dimensions to keep.
///
/// An explicit override wins. Ten classes map to 4 dimensions, the setting
/// used in the reference experiments, even though `2n + 1` separable unit
/// balls in a radius-3 ball only guarantees room for 9. Otherwise the smallest
/// `n` with `2n + 1 >= num_classes`.
pub fn select_dims(num_classes: usize, override_dims: Option<usize>) -> usize {
    if let Some(d) = override_dims {
        return d;
    }
    if num_classes == 10 {
        return 4;
    }
    num_classes.saturating_sub(1).div_ceil(2).max(1)
}
