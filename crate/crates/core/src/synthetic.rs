//! Synthetic clustered data with known geometry, for examples and tests.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::episodes::{Episode, Sample};
use crate::error::{Error, Result};
use crate::io::FeatureSet;
use crate::preprocess::FeatureMatrix;

/// `count` lattice points in `dim` dimensions, pairwise at least `spacing`
/// apart. Coordinates are the base-`b` digits of the point's index times
/// `spacing`, with the smallest `b` that fits every point.
pub fn lattice_centers(count: usize, dim: usize, spacing: f64) -> Vec<Vec<f64>> {
    assert!(dim > 0, "lattice needs at least one dimension");
    let mut base = 2usize;
    while base.checked_pow(dim as u32).is_some_and(|cap| cap < count) {
        base += 1;
    }
    (0..count)
        .map(|mut i| {
            (0..dim)
                .map(|_| {
                    let digit = i % base;
                    i /= base;
                    digit as f64 * spacing
                })
                .collect()
        })
        .collect()
}

/// A point drawn uniformly from the closed ball of `radius` around `center`.
pub fn sample_ball<R: Rng + ?Sized>(center: &[f64], radius: f64, rng: &mut R) -> Vec<f64> {
    let d = center.len();
    let dir: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
    let norm = dir
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
        .max(f64::MIN_POSITIVE);
    let r = radius * rng.random::<f64>().powf(1.0 / d as f64);
    center
        .iter()
        .zip(&dir)
        .map(|(c, x)| c + r * x / norm)
        .collect()
}

/// `per_class` samples around each center, drawn uniformly within `radius`.
/// Classes are named `c0`, `c1`, ... in center order.
pub fn clustered_dataset<R: Rng + ?Sized>(
    centers: &[Vec<f64>],
    radius: f64,
    per_class: usize,
    rng: &mut R,
) -> Result<FeatureSet> {
    let dim = centers.first().map_or(0, Vec::len);
    let names = (0..centers.len()).map(|i| format!("c{i}")).collect();
    let mut set = FeatureSet::new(dim, names);
    for (label, center) in centers.iter().enumerate() {
        for _ in 0..per_class {
            let x = sample_ball(center, radius, rng);
            set.push(label as u32, x.iter().map(|&v| v as f32).collect())?;
        }
    }
    Ok(set)
}

/// Isotropic Gaussian classes: centers drawn from `N(0, center_scale^2 I)`,
/// samples from `N(center, I)`.
pub fn gaussian_blobs<R: Rng + ?Sized>(
    classes: usize,
    dim: usize,
    center_scale: f64,
    per_class: usize,
    rng: &mut R,
) -> Result<FeatureSet> {
    let names = (0..classes).map(|i| format!("c{i}")).collect();
    let mut set = FeatureSet::new(dim, names);
    for label in 0..classes {
        let center: Vec<f64> = (0..dim)
            .map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                center_scale * z
            })
            .collect();
        for _ in 0..per_class {
            let x = center
                .iter()
                .map(|c| {
                    let e: f64 = StandardNormal.sample(rng);
                    (c + e) as f32
                })
                .collect();
            set.push(label as u32, x)?;
        }
    }
    Ok(set)
}

/// Layout for [`paired_novelty_episode`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairedNovelty {
    pub pairs: usize,
    pub dim: usize,
    /// Range of the distance between an old center and its novel partner.
    pub gap: (f64, f64),
    /// Radius of every cluster.
    pub spread: f64,
    /// Spacing between the pairs themselves.
    pub separation: f64,
    pub shots: usize,
    pub queries_per_class: usize,
}

impl Default for PairedNovelty {
    fn default() -> Self {
        PairedNovelty {
            pairs: 5,
            dim: 4,
            gap: (2.0, 3.0),
            spread: 0.15,
            separation: 12.0,
            shots: 10,
            queries_per_class: 10,
        }
    }
}

/// An episode where every new class sits next to an old one: old class `k`
/// has its center on a lattice and new class `pairs + k` is displaced from it
/// by a random distance within `gap` in a random direction.
///
/// Returns the features and an episode indexing into them.
pub fn paired_novelty_episode<R: Rng + ?Sized>(
    layout: &PairedNovelty,
    rng: &mut R,
) -> Result<(FeatureMatrix, Episode)> {
    let (lo, hi) = layout.gap;
    if !(lo > 0.0 && lo <= hi) {
        return Err(Error::InvalidParameter(format!(
            "gap range must satisfy 0 < lo <= hi, got ({lo}, {hi})"
        )));
    }
    let olds = lattice_centers(layout.pairs, layout.dim, layout.separation);
    let news: Vec<Vec<f64>> = olds
        .iter()
        .map(|c| {
            let gap = if hi > lo {
                rng.random_range(lo..=hi)
            } else {
                lo
            };
            let dir = sample_ball(&vec![0.0; layout.dim], 1.0, rng);
            let norm = dir.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
            c.iter()
                .zip(&dir)
                .map(|(a, b)| a + gap * b / norm)
                .collect()
        })
        .collect();

    let mut rows = Vec::new();
    let mut support = Vec::new();
    let mut queries = Vec::new();
    let mut push = |center: &[f64], label: u32, into_support: bool, rng: &mut R| {
        let sample = Sample {
            row: rows.len(),
            label,
        };
        rows.push(sample_ball(center, layout.spread, rng));
        if into_support {
            support.push(sample);
        } else {
            queries.push(sample);
        }
    };
    for (k, c) in olds.iter().enumerate() {
        for _ in 0..layout.shots {
            push(c, k as u32, true, rng);
        }
        for _ in 0..layout.queries_per_class {
            push(c, k as u32, false, rng);
        }
    }
    for (k, c) in news.iter().enumerate() {
        for _ in 0..layout.queries_per_class {
            push(c, (layout.pairs + k) as u32, false, rng);
        }
    }
    queries.shuffle(rng);
    let features = FeatureMatrix::from_rows(&rows)?;
    let episode = Episode {
        support,
        queries,
        old_classes: (0..layout.pairs as u32).collect(),
        new_classes: (layout.pairs as u32..2 * layout.pairs as u32).collect(),
    };
    Ok((features, episode))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn euclid(a: &[f64], b: &[f64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn lattice_spacing_holds() {
        for (count, dim) in [(10, 4), (5, 1), (30, 3)] {
            let c = lattice_centers(count, dim, 4.0);
            assert_eq!(c.len(), count);
            for i in 0..count {
                for j in 0..i {
                    assert!(euclid(&c[i], &c[j]) >= 4.0 - 1e-12);
                }
            }
        }
    }

    #[test]
    fn ball_samples_stay_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let center = [1.0, -2.0, 3.0];
        for _ in 0..2000 {
            assert!(euclid(&sample_ball(&center, 0.5, &mut rng), &center) <= 0.5 + 1e-12);
        }
    }

    #[test]
    fn blobs_have_requested_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let set = gaussian_blobs(4, 6, 3.0, 25, &mut rng).unwrap();
        assert_eq!((set.len(), set.dim, set.num_classes()), (100, 6, 4));
        assert_eq!(set.class_counts(), vec![25; 4]);
    }

    #[test]
    fn paired_gaps_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let layout = PairedNovelty::default();
        let (x, ep) = paired_novelty_episode(&layout, &mut rng).unwrap();
        assert_eq!(ep.support.len(), 50);
        assert_eq!(ep.queries.len(), 100);
        assert_eq!(x.rows(), 150);
        for q in ep.queries.iter().filter(|q| ep.is_new(q.label)) {
            let partner = q.label - 5;
            let nearest = ep
                .support
                .iter()
                .filter(|s| s.label == partner)
                .map(|s| euclid(x.row(s.row), x.row(q.row)))
                .fold(f64::INFINITY, f64::min);
            assert!(nearest >= 2.0 - 2.0 * layout.spread - 1e-9);
            assert!(nearest <= 3.0 + 2.0 * layout.spread + 1e-9);
        }
    }
}
