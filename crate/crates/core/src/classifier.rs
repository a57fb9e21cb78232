//! The neural-field classifier: fitting on a support set, adaptive-scale
//! prediction, and incremental incorporation of novel categories.
//!
//! A query at position `z_q` drives every elementary neuron `i` to
//!
//! ```text
//! u_i = phi( dog_sigma(dist(z_i, z_q)) * phi(1) )
//! ```
//!
//! and every high-level neuron `j` to `v_j = phi(sum of u_i over its links)`.
//! A class is active when `v_j > 0`, which happens exactly when the query lies
//! within the excitatory radius of one of the class's stored samples.
//!
//! [`NfClassifier::predict`] shrinks or grows `sigma` inside `(0, 1]` until a
//! single class is active, for at most `iterations` steps.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ClassKey, ElementaryField, HighLevelField, NeuronSource};
use crate::kernel::{dog_kernel, phi, KernelParams};
use crate::preprocess::Metric;

/// External input of a query sample.
const QUERY_INPUT: f64 = 1.0;

/// Upper bound of the interaction scale before any escalation.
pub const SIGMA_UPPER_BOUND: f64 = 1.0;

/// Fraction of `s` above which a still-ambiguous query is declared novel.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NumThreshold {
    #[default]
    Half,
    TwoThirds,
    ThreeQuarters,
}

impl NumThreshold {
    pub const ALL: [NumThreshold; 3] = [
        NumThreshold::Half,
        NumThreshold::TwoThirds,
        NumThreshold::ThreeQuarters,
    ];

    pub fn fraction(self) -> f64 {
        match self {
            NumThreshold::Half => 0.5,
            NumThreshold::TwoThirds => 2.0 / 3.0,
            NumThreshold::ThreeQuarters => 0.75,
        }
    }

    /// Real-valued limit `f * s`; no integer rounding.
    pub fn limit(self, num_classes: usize) -> f64 {
        self.fraction() * num_classes as f64
    }

    pub fn name(self) -> &'static str {
        match self {
            NumThreshold::Half => "half",
            NumThreshold::TwoThirds => "two-thirds",
            NumThreshold::ThreeQuarters => "three-quarters",
        }
    }
}

impl fmt::Display for NumThreshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for NumThreshold {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "half" | "1/2" => Ok(NumThreshold::Half),
            "two-thirds" | "2/3" => Ok(NumThreshold::TwoThirds),
            "three-quarters" | "3/4" => Ok(NumThreshold::ThreeQuarters),
            other => Err(format!(
                "unknown threshold '{other}' (expected half, two-thirds or three-quarters)"
            )),
        }
    }
}

/// Hyperparameters of the classifier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NfConfig {
    /// Kernel amplitudes; `sigma` here is ignored by prediction, which starts
    /// from [`SIGMA_UPPER_BOUND`].
    pub kernel: KernelParams,
    /// Interval shrink ratio, strictly between 0 and 1.
    pub lambda: f64,
    /// Maximum number of scale-adaptation steps.
    pub iterations: usize,
    pub num_threshold: NumThreshold,
    /// How many times the scale upper bound may grow by `1 / lambda` before a
    /// query that activates nothing is declared novel.
    pub sigma_escalations: usize,
}

impl Default for NfConfig {
    fn default() -> Self {
        NfConfig {
            kernel: KernelParams::default(),
            lambda: 0.4,
            iterations: 4,
            num_threshold: NumThreshold::Half,
            sigma_escalations: 0,
        }
    }
}

impl NfConfig {
    pub fn validate(&self) -> Result<()> {
        self.kernel.validate()?;
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda must lie in (0, 1), got {}",
                self.lambda
            )));
        }
        if self.iterations == 0 {
            return Err(Error::InvalidParameter(
                "iterations must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Prediction for one query.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// Index into the high-level class registry.
    Known(usize),
    /// The query belongs to a category the classifier has not seen.
    Novel,
}

/// Which exit of the prediction procedure produced the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TerminalRule {
    ZeroActive,
    UniqueActive,
    Argmax,
    MajorityNovel,
}

/// One evaluation of the high-level field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub sigma: f64,
    pub num: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionOutcome {
    pub verdict: Verdict,
    pub trace: Vec<TraceStep>,
    pub terminal_rule: TerminalRule,
}

/// Trained classifier state.
#[derive(Clone, Debug, PartialEq)]
pub struct NfClassifier {
    elementary: ElementaryField,
    high_level: HighLevelField,
    metric: Metric,
    config: NfConfig,
}

impl NfClassifier {
    /// A classifier with no memorized samples. Prediction fails until a class
    /// is incorporated.
    pub fn empty(dim: usize, metric: Metric, config: NfConfig) -> Result<Self> {
        config.validate()?;
        if let Some(mdim) = metric.dim() {
            if mdim != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: mdim,
                });
            }
        }
        Ok(NfClassifier {
            elementary: ElementaryField::new(dim),
            high_level: HighLevelField::new(),
            metric,
            config,
        })
    }

    /// Memorizes every support sample as an elementary neuron and links it to
    /// the high-level neuron of its label. Classes are registered in ascending
    /// label order.
    pub fn fit_support<R: AsRef<[f64]>>(
        features: &[R],
        labels: &[u32],
        metric: Metric,
        config: NfConfig,
    ) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::LengthMismatch {
                left: features.len(),
                right: labels.len(),
            });
        }
        let Some(first) = features.first() else {
            return Err(Error::EmptySupport);
        };
        let mut clf = NfClassifier::empty(first.as_ref().len(), metric, config)?;
        let mut distinct: Vec<u32> = labels.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        for &label in &distinct {
            clf.high_level.register(ClassKey::Label(label));
        }
        for (i, (row, &label)) in features.iter().zip(labels).enumerate() {
            let neuron = clf
                .elementary
                .push(row.as_ref(), NeuronSource::Support(i))?;
            let class = clf
                .high_level
                .index_of(ClassKey::Label(label))
                .expect("label registered above");
            clf.high_level.link(class, neuron);
        }
        Ok(clf)
    }

    pub fn dim(&self) -> usize {
        self.elementary.dim()
    }

    /// Number of high-level neurons, `s`.
    pub fn num_classes(&self) -> usize {
        self.high_level.len()
    }

    pub fn num_neurons(&self) -> usize {
        self.elementary.len()
    }

    pub fn elementary(&self) -> &ElementaryField {
        &self.elementary
    }

    pub fn high_level(&self) -> &HighLevelField {
        &self.high_level
    }

    pub fn class_key(&self, index: usize) -> ClassKey {
        self.high_level.class(index)
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    pub fn config(&self) -> &NfConfig {
        &self.config
    }

    fn check_query(&self, query: &[f64]) -> Result<()> {
        if query.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: query.len(),
            });
        }
        Ok(())
    }

    fn distances(&self, query: &[f64]) -> Result<Vec<f64>> {
        self.check_query(query)?;
        self.elementary
            .positions()
            .map(|z| self.metric.distance(z, query))
            .collect()
    }

    fn elementary_from_distances(&self, dists: &[f64], sigma: f64) -> Vec<f64> {
        let params = self.config.kernel.with_sigma(sigma);
        let input = phi(QUERY_INPUT);
        dists
            .iter()
            .map(|&d| phi(dog_kernel(d, &params) * input))
            .collect()
    }

    /// Summed input of every high-level neuron, before the outer activation.
    fn class_drive(&self, u: &[f64]) -> Vec<f64> {
        (0..self.num_classes())
            .map(|j| self.high_level.links(j).iter().map(|&i| u[i]).sum())
            .collect()
    }

    /// Activation of every elementary neuron for a query at scale `sigma`.
    pub fn elementary_activations(&self, query: &[f64], sigma: f64) -> Result<Vec<f64>> {
        if sigma.is_nan() || sigma <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {sigma}"
            )));
        }
        let dists = self.distances(query)?;
        Ok(self.elementary_from_distances(&dists, sigma))
    }

    /// High-level activations `v_j = phi(sum_i w_ji u_i)`.
    pub fn high_level_activations(&self, u: &[f64]) -> Result<Vec<f64>> {
        if u.len() != self.num_neurons() {
            return Err(Error::DimensionMismatch {
                expected: self.num_neurons(),
                found: u.len(),
            });
        }
        Ok(self.class_drive(u).into_iter().map(phi).collect())
    }

    /// Runs the adaptive-scale prediction procedure for one query.
    pub fn predict(&self, query: &[f64]) -> Result<PredictionOutcome> {
        if self.high_level.is_empty() {
            return Err(Error::Untrained);
        }
        let dists = self.distances(query)?;
        let s = self.num_classes();
        let lambda = self.config.lambda;

        let mut trace = Vec::with_capacity(self.config.iterations + 1);
        let mut evaluate = |sigma: f64| {
            let drive = self.class_drive(&self.elementary_from_distances(&dists, sigma));
            let num = count_active(&drive);
            trace.push(TraceStep { sigma, num });
            (drive, num)
        };

        let mut sigma_min = 0.0;
        let mut sigma_max = SIGMA_UPPER_BOUND;
        let mut sigma = SIGMA_UPPER_BOUND;
        let (mut drive, mut num) = evaluate(sigma);

        let mut escalations = 0;
        while num == 0 && escalations < self.config.sigma_escalations {
            // Everything below the old bound is known to activate nothing.
            sigma_min = sigma_max;
            sigma_max /= lambda;
            sigma = sigma_max;
            (drive, num) = evaluate(sigma);
            escalations += 1;
        }

        if num == 0 {
            return Ok(PredictionOutcome {
                verdict: Verdict::Novel,
                trace,
                terminal_rule: TerminalRule::ZeroActive,
            });
        }

        for _ in 0..self.config.iterations {
            if num > 1 {
                sigma_max = sigma;
                sigma = sigma_min + lambda * (sigma_max - sigma_min);
            } else if num == 0 {
                sigma_min = sigma;
                sigma = sigma_max - lambda * (sigma_max - sigma_min);
            }
            (drive, num) = evaluate(sigma);
            if num == 1 {
                break;
            }
        }

        let (verdict, terminal_rule) = if num == 0 {
            (Verdict::Novel, TerminalRule::ZeroActive)
        } else if (num as f64) <= self.config.num_threshold.limit(s) {
            let rule = if num == 1 {
                TerminalRule::UniqueActive
            } else {
                TerminalRule::Argmax
            };
            (Verdict::Known(argmax_lowest(&drive)), rule)
        } else {
            (Verdict::Novel, TerminalRule::MajorityNovel)
        };
        Ok(PredictionOutcome {
            verdict,
            trace,
            terminal_rule,
        })
    }

    /// Adds an elementary neuron at `query` and a fresh pseudo-labelled
    /// high-level neuron linked to it. Returns the new class index.
    ///
    /// Existing neurons and links are untouched, so every previously
    /// registered class responds to any probe exactly as before.
    pub fn incorporate_novel(&mut self, query: &[f64]) -> Result<usize> {
        self.check_query(query)?;
        let order = self.high_level.pseudo_count();
        let neuron = self.elementary.push(query, NeuronSource::Novel(order))?;
        let class = self.high_level.register(ClassKey::Pseudo(order as u32));
        self.high_level.link(class, neuron);
        Ok(class)
    }
}

/// Number of strictly positive entries.
pub fn count_active(v: &[f64]) -> usize {
    v.iter().filter(|&&x| x > 0.0).count()
}

/// Index of the largest entry; ties go to the lowest index.
///
/// Applied to pre-activation drives: `phi` is monotone, so this is the argmax
/// of the activations, but it stays discriminative where `phi` saturates to 1.0
/// in floating point.
fn argmax_lowest(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in values.iter().enumerate().skip(1) {
        if x > values[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::excitatory_radius;

    fn clf(points: &[[f64; 2]], labels: &[u32]) -> NfClassifier {
        NfClassifier::fit_support(points, labels, Metric::Euclidean, NfConfig::default()).unwrap()
    }

    #[test]
    fn count_active_is_strict() {
        assert_eq!(count_active(&[0.0; 5]), 0);
        assert_eq!(count_active(&[0.3, 0.0, 0.1, 0.0, 0.0]), 2);
        assert_eq!(count_active(&[-0.0, 0.0, f64::MIN_POSITIVE]), 1);
    }

    #[test]
    fn fit_builds_one_link_per_sample() {
        let mut pts = Vec::new();
        let mut labels = Vec::new();
        for c in 0..5u32 {
            for k in 0..10 {
                pts.push([c as f64 * 10.0, k as f64 * 0.01]);
                labels.push(c);
            }
        }
        let m = clf(&pts, &labels);
        assert_eq!(m.num_neurons(), 50);
        assert_eq!(m.num_classes(), 5);
        for j in 0..5 {
            assert_eq!(m.high_level().links(j).len(), 10);
        }
    }

    #[test]
    fn fit_minimal_and_duplicates() {
        let m = clf(&[[0.0, 0.0]], &[3]);
        assert_eq!((m.num_classes(), m.num_neurons()), (1, 1));
        let m = clf(&[[1.0, 1.0], [1.0, 1.0]], &[2, 2]);
        assert_eq!(m.num_neurons(), 2);
        assert_eq!(m.high_level().links(0), &[0, 1]);
    }

    #[test]
    fn fit_rejects_bad_input() {
        let empty: [[f64; 2]; 0] = [];
        assert!(matches!(
            NfClassifier::fit_support(&empty, &[], Metric::Euclidean, NfConfig::default()),
            Err(Error::EmptySupport)
        ));
        let ragged = vec![vec![0.0, 1.0], vec![0.0]];
        assert!(NfClassifier::fit_support(
            &ragged,
            &[0, 1],
            Metric::Euclidean,
            NfConfig::default()
        )
        .is_err());
        assert!(NfClassifier::fit_support(
            &[[0.0]],
            &[0, 1],
            Metric::Euclidean,
            NfConfig::default()
        )
        .is_err());
    }

    #[test]
    fn activation_at_stored_position() {
        let m = clf(&[[0.0, 0.0], [5.0, 5.0]], &[0, 1]);
        let u = m.elementary_activations(&[0.0, 0.0], 1.0).unwrap();
        let expected = 1.0 - (-(1.0 - (-1.0f64).exp())).exp();
        assert!((u[0] - expected).abs() < 1e-15);
        assert!((u[0] - 0.46854).abs() < 1e-5);
        assert_eq!(u[1], 0.0);
    }

    #[test]
    fn single_link_high_level_value() {
        let m = clf(&[[0.0, 0.0], [5.0, 5.0]], &[0, 1]);
        let u = m.elementary_activations(&[0.0, 0.0], 1.0).unwrap();
        let v = m.high_level_activations(&u).unwrap();
        assert!((v[0] - (1.0 - (-u[0]).exp())).abs() < 1e-15);
        assert!((v[0] - 0.37409).abs() < 1e-5);
        assert_eq!(v[1], 0.0);
        assert_eq!(m.high_level_activations(&[0.0; 2]).unwrap(), vec![0.0, 0.0]);
        assert!(m.high_level_activations(&[0.0; 3]).is_err());
    }

    #[test]
    fn far_query_is_zero_active_novel() {
        let m = clf(&[[0.0, 0.0], [0.5, 0.0]], &[0, 1]);
        let out = m.predict(&[3.0, 3.0]).unwrap();
        assert_eq!(out.verdict, Verdict::Novel);
        assert_eq!(out.terminal_rule, TerminalRule::ZeroActive);
        assert_eq!(out.trace.len(), 1);
    }

    #[test]
    fn unique_active_class_wins() {
        let m = clf(&[[0.0, 0.0], [4.0, 0.0], [0.0, 4.0]], &[0, 1, 2]);
        let out = m.predict(&[3.2, 0.3]).unwrap();
        assert_eq!(out.verdict, Verdict::Known(1));
        assert_eq!(out.terminal_rule, TerminalRule::UniqueActive);
    }

    #[test]
    fn overlapping_classes_shrink_sigma() {
        // Query sits 1.0 from class 0 and 1.4 from class 1: both active at
        // sigma = 1 but only class 0 survives at sigma = 0.76.
        let m = clf(&[[0.0, 0.0], [2.4, 0.0], [20.0, 0.0]], &[0, 1, 2]);
        let out = m.predict(&[1.0, 0.0]).unwrap();
        let sigmas: Vec<f64> = out.trace.iter().map(|t| t.sigma).collect();
        let nums: Vec<usize> = out.trace.iter().map(|t| t.num).collect();
        assert_eq!(nums[0], 2);
        assert_eq!(sigmas[0], 1.0);
        // sigma = 0.4: radius 0.63 < 1.0, nothing active.
        assert!((sigmas[1] - 0.4).abs() < 1e-15);
        assert_eq!(nums[1], 0);
        // sigma = 1 - 0.4 * 0.6 = 0.76: radius 1.19 covers class 0 only.
        assert!((sigmas[2] - 0.76).abs() < 1e-15);
        assert_eq!(nums[2], 1);
        assert_eq!(out.verdict, Verdict::Known(0));
        assert!(excitatory_radius(&KernelParams::default().with_sigma(0.76)) < 1.4);
    }

    #[test]
    fn single_class_model_sends_everything_novel() {
        // With s = 1 the limit s/2 = 0.5 is below any non-zero count.
        let m = clf(&[[0.0, 0.0]], &[0]);
        let out = m.predict(&[0.1, 0.0]).unwrap();
        assert_eq!(out.verdict, Verdict::Novel);
        assert_eq!(out.terminal_rule, TerminalRule::MajorityNovel);
    }

    #[test]
    fn argmax_ties_go_to_lowest_index() {
        assert_eq!(argmax_lowest(&[0.2, 0.5, 0.5]), 1);
        assert_eq!(argmax_lowest(&[0.7, 0.5, 0.7]), 0);
    }

    #[test]
    fn incorporate_then_predict_returns_new_class() {
        let mut m = clf(&[[0.0, 0.0], [4.0, 0.0]], &[0, 1]);
        let q = [0.0, 9.0];
        assert_eq!(m.predict(&q).unwrap().verdict, Verdict::Novel);
        let idx = m.incorporate_novel(&q).unwrap();
        assert_eq!(idx, 2);
        assert_eq!(m.num_classes(), 3);
        assert_eq!(m.num_neurons(), 3);
        assert_eq!(m.class_key(idx), ClassKey::Pseudo(0));
        assert_eq!(m.predict(&q).unwrap().verdict, Verdict::Known(idx));
    }

    #[test]
    fn escalation_widens_the_bound() {
        let cfg = NfConfig {
            sigma_escalations: 1,
            ..NfConfig::default()
        };
        let m = NfClassifier::fit_support(
            &[[0.0, 0.0], [40.0, 0.0], [0.0, 40.0]],
            &[0, 1, 2],
            Metric::Euclidean,
            cfg,
        )
        .unwrap();
        // 2.5 from class 0: dead at sigma 1, alive at sigma 2.5.
        let out = m.predict(&[2.5, 0.0]).unwrap();
        assert_eq!(out.trace[0].num, 0);
        assert!((out.trace[1].sigma - 2.5).abs() < 1e-12);
        assert_eq!(out.verdict, Verdict::Known(0));
    }

    #[test]
    fn untrained_and_mismatched_queries_fail() {
        let m = NfClassifier::empty(2, Metric::Euclidean, NfConfig::default()).unwrap();
        assert!(matches!(m.predict(&[0.0, 0.0]), Err(Error::Untrained)));
        let m = clf(&[[0.0, 0.0]], &[0]);
        assert!(m.predict(&[0.0]).is_err());
        assert!(m.elementary_activations(&[0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn config_validation() {
        let bad_lambda = NfConfig {
            lambda: 1.0,
            ..NfConfig::default()
        };
        assert!(bad_lambda.validate().is_err());
        let no_steps = NfConfig {
            iterations: 0,
            ..NfConfig::default()
        };
        assert!(no_steps.validate().is_err());
    }

    #[test]
    fn threshold_parsing() {
        assert_eq!(
            "2/3".parse::<NumThreshold>().unwrap(),
            NumThreshold::TwoThirds
        );
        assert_eq!(NumThreshold::ThreeQuarters.limit(4), 3.0);
        assert!("most".parse::<NumThreshold>().is_err());
    }
}
