//! Feature files and report serialization.

mod codec;
mod csv_features;
mod report;

pub use codec::{decode, encode, MAGIC, VERSION};
pub use csv_features::{read_feature_csv, write_feature_csv};
pub use report::{emit_ablation, emit_report, format_mean_std, ReportFormat};

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::preprocess::FeatureMatrix;

/// One labelled sample as stored on disk.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureRecord {
    /// Index into [`FeatureSet::class_names`].
    pub label: u32,
    pub features: Vec<f32>,
}

/// A labelled dataset of fixed-dimension feature vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureSet {
    pub dim: usize,
    pub class_names: Vec<String>,
    pub records: Vec<FeatureRecord>,
}

impl FeatureSet {
    pub fn new(dim: usize, class_names: Vec<String>) -> Self {
        FeatureSet {
            dim,
            class_names,
            records: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn push(&mut self, label: u32, features: Vec<f32>) -> Result<()> {
        if features.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: features.len(),
            });
        }
        if label as usize >= self.class_names.len() {
            return Err(Error::InvalidParameter(format!(
                "class index {label} out of range for {} classes",
                self.class_names.len()
            )));
        }
        self.records.push(FeatureRecord { label, features });
        Ok(())
    }

    pub fn labels(&self) -> Vec<u32> {
        self.records.iter().map(|r| r.label).collect()
    }

    /// Samples per class index.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_names.len()];
        for r in &self.records {
            counts[r.label as usize] += 1;
        }
        counts
    }

    pub fn class_name(&self, label: u32) -> &str {
        &self.class_names[label as usize]
    }

    /// Widens the stored 32-bit features to a 64-bit matrix.
    pub fn to_matrix(&self) -> Result<FeatureMatrix> {
        let values = self
            .records
            .iter()
            .flat_map(|r| r.features.iter().map(|&x| f64::from(x)))
            .collect();
        FeatureMatrix::new(self.records.len(), self.dim, values)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, r) in self.records.iter().enumerate() {
            if r.features.len() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: r.features.len(),
                });
            }
            if r.label as usize >= self.class_names.len() {
                return Err(Error::InvalidParameter(format!(
                    "record {i} has class index {} but only {} classes exist",
                    r.label,
                    self.class_names.len()
                )));
            }
            if r.features.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFiniteFeature { record: i });
            }
        }
        Ok(())
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Reads a binary feature file, or a CSV one when the extension is `.csv`.
pub fn read_feature_file(path: impl AsRef<Path>) -> Result<FeatureSet> {
    let path = path.as_ref();
    if is_csv(path) {
        return read_feature_csv(fs::File::open(path)?);
    }
    decode(&fs::read(path)?)
}

/// Writes a feature set in the binary format, or CSV for a `.csv` path.
pub fn write_feature_file(set: &FeatureSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if is_csv(path) {
        return write_feature_csv(set, fs::File::create(path)?);
    }
    fs::write(path, encode(set)?)?;
    Ok(())
}
