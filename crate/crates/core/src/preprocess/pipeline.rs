use serde::{Deserialize, Serialize};

use super::{
    build_affinity_graph, laplacian_eigenmaps, select_dims, FeatureMatrix, HeatScale,
    StandardizationStats,
};
use crate::error::Result;

/// How raw features are mapped into the classifier's space.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    /// Use features as they are.
    None,
    /// Standardize only.
    Standardize,
    /// Standardize, embed with Laplacian eigenmaps, standardize the embedding.
    #[default]
    Eigenmaps,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub reduction: Reduction,
    pub k_neighbors: usize,
    pub heat_scale: HeatScale,
    /// Embedding dimension; derived from the class count when absent.
    pub dims: Option<usize>,
    /// Refit on every episode instead of once on the whole dataset.
    pub per_episode: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            reduction: Reduction::Eigenmaps,
            k_neighbors: 15,
            heat_scale: HeatScale::Auto,
            dims: None,
            per_episode: false,
        }
    }
}

/// Diagnostics from one preprocessing pass.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PrepNotes {
    pub floored_columns: usize,
    pub bridge_edges: usize,
    pub eigenvalues: Vec<f64>,
    pub heat_scale: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Prepared {
    pub features: FeatureMatrix,
    pub notes: PrepNotes,
}

/// Applies the configured reduction. Standardization statistics are fit on
/// `fit_rows` (all rows when `None`) and applied to every row.
pub fn prepare(
    features: &FeatureMatrix,
    num_classes: usize,
    config: &PreprocessConfig,
    fit_rows: Option<&[usize]>,
) -> Result<Prepared> {
    let standardize = |m: &FeatureMatrix, notes: &mut PrepNotes| -> Result<FeatureMatrix> {
        let stats = match fit_rows {
            Some(rows) => StandardizationStats::fit(&m.select_rows(rows))?,
            None => StandardizationStats::fit(m)?,
        };
        notes.floored_columns += stats.floored.iter().filter(|&&f| f).count();
        stats.apply(m)
    };

    let mut notes = PrepNotes::default();
    let features = match config.reduction {
        Reduction::None => features.clone(),
        Reduction::Standardize => standardize(features, &mut notes)?,
        Reduction::Eigenmaps => {
            let z = standardize(features, &mut notes)?;
            let graph = build_affinity_graph(&z, config.k_neighbors, config.heat_scale)?;
            let dims = select_dims(num_classes, config.dims);
            let emb = laplacian_eigenmaps(&graph, dims)?;
            notes.bridge_edges = graph.bridges().len();
            notes.heat_scale = Some(graph.heat_scale());
            notes.eigenvalues = emb.eigenvalues;
            // The embedding's scale is arbitrary; the classifier's radius
            // geometry assumes unit-variance coordinates.
            let coords = emb.coords.with_ids(features.ids().to_vec())?;
            standardize(&coords, &mut notes)?
        }
    };
    Ok(Prepared { features, notes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn blobs() -> FeatureMatrix {
        let mut rows = Vec::new();
        for c in 0..3 {
            for k in 0..12 {
                let t = k as f64 * 0.05;
                rows.push(vec![c as f64 * 10.0 + t, (c * 7) as f64 - t, 1.0]);
            }
        }
        FeatureMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn eigenmaps_output_is_standardized() {
        let cfg = PreprocessConfig {
            k_neighbors: 5,
            dims: Some(2),
            ..Default::default()
        };
        let out = prepare(&blobs(), 3, &cfg, None).unwrap();
        assert_eq!(out.features.cols(), 2);
        assert_eq!(out.features.rows(), 36);
        assert_eq!(out.notes.floored_columns, 1);
        assert_eq!(out.notes.bridge_edges, 2);
        for c in 0..2 {
            let col: Vec<f64> = out.features.iter_rows().map(|r| r[c]).collect();
            let mean = col.iter().sum::<f64>() / 36.0;
            let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 35.0;
            assert!(mean.abs() < 1e-9 && (var - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn none_is_identity() {
        let m = blobs();
        let cfg = PreprocessConfig {
            reduction: Reduction::None,
            ..Default::default()
        };
        assert_eq!(prepare(&m, 3, &cfg, None).unwrap().features, m);
    }

    #[test]
    fn stats_fit_on_subset() {
        let m = FeatureMatrix::new(4, 1, vec![0.0, 2.0, 100.0, -50.0]).unwrap();
        let cfg = PreprocessConfig {
            reduction: Reduction::Standardize,
            ..Default::default()
        };
        let out = prepare(&m, 2, &cfg, Some(&[0, 1])).unwrap();
        let v: Vec<f64> = out.features.iter_rows().map(|r| r[0]).collect();
        let s = 2f64.sqrt();
        assert!((v[0] + 1.0 / s).abs() < 1e-12);
        assert!((v[2] - 99.0 / s).abs() < 1e-12);
    }
}
