//! Independent reference implementations used as test oracles. Nothing here
//! calls into the crate's numerical code.
#![allow(dead_code)]

use nfgcd::classifier::{NfConfig, NumThreshold};
use nfgcd::config::RunConfig;
use nfgcd::episodes::EpisodeSpec;
use nfgcd::io::FeatureSet;
use nfgcd::preprocess::{PreprocessConfig, Reduction};
use nfgcd::synthetic::{clustered_dataset, lattice_centers};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn dog(d: f64, a: f64, b: f64, sigma: f64) -> f64 {
    let wide = 3.0 * sigma;
    a * (-(d * d) / (2.0 * sigma * sigma)).exp() - b * (-(d * d) / (2.0 * wide * wide)).exp()
}

/// Root of the kernel on `(0, 20 sigma)` by plain bisection.
pub fn bisection_radius(a: f64, b: f64, sigma: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 20.0 * sigma);
    assert!(dog(lo, a, b, sigma) > 0.0 && dog(hi, a, b, sigma) < 0.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if dog(mid, a, b, sigma) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, PartialEq)]
pub enum OracleVerdict {
    Known(usize),
    Novel,
}

/// A line-by-line transcription of the prediction pseudocode, Euclidean
/// distance, no escalation. Classes are indexed in ascending label order.
pub fn oracle_predict(
    support: &[Vec<f64>],
    labels: &[u32],
    query: &[f64],
    cfg: &NfConfig,
) -> (Vec<(f64, usize)>, OracleVerdict) {
    let mut classes: Vec<u32> = labels.to_vec();
    classes.sort();
    classes.dedup();
    let s = classes.len();
    let phi = |u: f64| if u > 0.0 { 1.0 - (-u).exp() } else { 0.0 };
    let v_of = |sigma: f64| -> Vec<f64> {
        let mut sums = vec![0.0; s];
        for (x, l) in support.iter().zip(labels) {
            let d = x
                .iter()
                .zip(query)
                .map(|(p, q)| (p - q) * (p - q))
                .sum::<f64>()
                .sqrt();
            let u = phi(dog(d, cfg.kernel.a, cfg.kernel.b, sigma) * phi(1.0));
            let j = classes.iter().position(|c| c == l).unwrap();
            sums[j] += u;
        }
        sums.into_iter().map(phi).collect()
    };
    let count = |v: &[f64]| v.iter().filter(|&&x| x > 0.0).count();

    let mut trace = Vec::new();
    let mut sigma_min = 0.0;
    let mut sigma_max = 1.0;
    let mut sigma = 1.0;
    let mut v = v_of(sigma);
    let mut num = count(&v);
    trace.push((sigma, num));
    if num == 0 {
        return (trace, OracleVerdict::Novel);
    }
    let mut t = 0;
    while t < cfg.iterations {
        if num > 1 {
            sigma_max = sigma;
            sigma = sigma_min + cfg.lambda * (sigma_max - sigma_min);
        } else if num == 0 {
            sigma_min = sigma;
            sigma = sigma_max - cfg.lambda * (sigma_max - sigma_min);
        }
        v = v_of(sigma);
        num = count(&v);
        trace.push((sigma, num));
        if num == 1 {
            break;
        }
        t += 1;
    }
    let limit = match cfg.num_threshold {
        NumThreshold::Half => s as f64 / 2.0,
        NumThreshold::TwoThirds => 2.0 * s as f64 / 3.0,
        NumThreshold::ThreeQuarters => 3.0 * s as f64 / 4.0,
    };
    if num == 0 || num as f64 > limit {
        return (trace, OracleVerdict::Novel);
    }
    let mut best = 0;
    for j in 1..s {
        if v[j] > v[best] {
            best = j;
        }
    }
    (trace, OracleVerdict::Known(best))
}

/// Maximum total profit over every assignment that matches
/// `min(rows, cols)` pairs, by enumeration.
pub fn brute_force_assignment(m: &[Vec<f64>]) -> f64 {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return 0.0;
    }
    let t: Vec<Vec<f64>> = if rows <= cols {
        m.to_vec()
    } else {
        (0..cols)
            .map(|c| (0..rows).map(|r| m[r][c]).collect())
            .collect()
    };
    fn go(m: &[Vec<f64>], r: usize, used: &mut [bool]) -> f64 {
        if r == m.len() {
            return 0.0;
        }
        let mut best = f64::NEG_INFINITY;
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                best = best.max(m[r][c] + go(m, r + 1, used));
                used[c] = false;
            }
        }
        best
    }
    let width = t[0].len();
    go(&t, 0, &mut vec![false; width])
}

/// Ten 4-D classes on a spacing-4 lattice, radius 0.75, so every same-class
/// pair is closer than the unit-scale excitatory radius and every
/// cross-class pair is at least 2.5 apart.
pub fn separable_dataset(per_class: usize, seed: u64) -> FeatureSet {
    let centers = lattice_centers(10, 4, 4.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    clustered_dataset(&centers, 0.75, per_class, &mut rng).unwrap()
}

pub fn raw_run_config(episodes: usize, seed: u64) -> RunConfig {
    RunConfig {
        episode: EpisodeSpec {
            seed,
            ..EpisodeSpec::default()
        },
        episodes,
        preprocess: PreprocessConfig {
            reduction: Reduction::None,
            ..PreprocessConfig::default()
        },
        ..RunConfig::default()
    }
}
