//! Episodic evaluation: sample a task of old and new classes, stream its
//! queries through a classifier that absorbs novel categories as it goes, and
//! score Old/New/All accuracy.

mod evaluate;
mod hungarian;
mod report;

pub use evaluate::{ablate, evaluate, AblationGrid, Evaluator};
pub use hungarian::{hungarian_match, Assignment};
pub use report::{aggregate, AblationReport, AblationRow, Aggregate, EvaluationReport, Summary};

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::classifier::{NfClassifier, NfConfig, TerminalRule, TraceStep, Verdict};
use crate::error::{Error, Result};
use crate::field::ClassKey;
use crate::preprocess::{FeatureMatrix, Metric};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeSpec {
    pub n_old: usize,
    pub n_new: usize,
    /// Support samples per old class.
    pub shots: usize,
    pub seed: u64,
    /// Upper bound on queries drawn from any one class.
    pub query_cap: Option<usize>,
}

impl Default for EpisodeSpec {
    fn default() -> Self {
        EpisodeSpec {
            n_old: 5,
            n_new: 5,
            shots: 10,
            seed: 0,
            query_cap: None,
        }
    }
}

impl EpisodeSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_old == 0 {
            return Err(Error::InvalidParameter("--old must be at least 1".into()));
        }
        if self.shots == 0 {
            return Err(Error::InvalidParameter("--shots must be at least 1".into()));
        }
        if self.query_cap == Some(0) {
            return Err(Error::InvalidParameter(
                "--query-cap must be at least 1 when given".into(),
            ));
        }
        Ok(())
    }
}

/// A row of the dataset together with its true class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub row: usize,
    pub label: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Episode {
    /// `shots` rows of every old class, grouped by class.
    pub support: Vec<Sample>,
    /// Shuffled stream of the remaining old-class rows and all new-class rows.
    pub queries: Vec<Sample>,
    pub old_classes: Vec<u32>,
    pub new_classes: Vec<u32>,
}

impl Episode {
    pub fn is_new(&self, label: u32) -> bool {
        self.new_classes.contains(&label)
    }

    /// Support rows followed by query rows.
    pub fn rows(&self) -> Vec<usize> {
        self.support
            .iter()
            .chain(&self.queries)
            .map(|s| s.row)
            .collect()
    }

    /// The same episode with every row renumbered by its position in
    /// [`Episode::rows`].
    pub fn localized(&self) -> Episode {
        let mut next = 0;
        let mut renumber = |s: &Sample| {
            let out = Sample {
                row: next,
                label: s.label,
            };
            next += 1;
            out
        };
        Episode {
            support: self.support.iter().map(&mut renumber).collect(),
            queries: self.queries.iter().map(&mut renumber).collect(),
            old_classes: self.old_classes.clone(),
            new_classes: self.new_classes.clone(),
        }
    }
}

/// Draws one episode from a labelled dataset.
///
/// Classes are visited in a random order; the first `n_old` with more than
/// `shots` samples become old classes and the next `n_new` become new ones.
pub fn sample_episode<R: Rng + ?Sized>(
    labels: &[u32],
    spec: &EpisodeSpec,
    rng: &mut R,
) -> Result<Episode> {
    spec.validate()?;
    let mut by_class: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (row, &label) in labels.iter().enumerate() {
        by_class.entry(label).or_default().push(row);
    }
    let needed = spec.n_old + spec.n_new;
    if by_class.len() < needed {
        return Err(Error::InsufficientClasses {
            needed,
            available: by_class.len(),
        });
    }
    let eligible = by_class.values().filter(|r| r.len() > spec.shots).count();
    if eligible < spec.n_old {
        let (class, rows) = by_class
            .iter()
            .min_by_key(|(_, r)| r.len())
            .expect("at least one class");
        return Err(Error::InsufficientSamples {
            class: class.to_string(),
            needed: spec.shots + 1,
            available: rows.len(),
        });
    }

    let mut order: Vec<u32> = by_class.keys().copied().collect();
    order.shuffle(rng);
    let mut old_classes = Vec::with_capacity(spec.n_old);
    let mut rest = Vec::with_capacity(order.len());
    for class in order {
        if old_classes.len() < spec.n_old && by_class[&class].len() > spec.shots {
            old_classes.push(class);
        } else {
            rest.push(class);
        }
    }
    if rest.len() < spec.n_new {
        return Err(Error::InsufficientClasses {
            needed,
            available: old_classes.len() + rest.len(),
        });
    }
    let new_classes: Vec<u32> = rest.into_iter().take(spec.n_new).collect();

    let cap = spec.query_cap.unwrap_or(usize::MAX);
    let mut support = Vec::with_capacity(spec.n_old * spec.shots);
    let mut queries = Vec::new();
    for &class in &old_classes {
        let mut rows = by_class[&class].clone();
        rows.shuffle(rng);
        let (s, q) = rows.split_at(spec.shots);
        support.extend(s.iter().map(|&row| Sample { row, label: class }));
        queries.extend(q.iter().take(cap).map(|&row| Sample { row, label: class }));
    }
    for &class in &new_classes {
        let mut rows = by_class[&class].clone();
        rows.shuffle(rng);
        queries.extend(
            rows.iter()
                .take(cap)
                .map(|&row| Sample { row, label: class }),
        );
    }
    queries.shuffle(rng);
    Ok(Episode {
        support,
        queries,
        old_classes,
        new_classes,
    })
}

/// What one query was assigned, in terms of the episode's classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QueryResult {
    pub row: usize,
    pub label: u32,
    /// An old class label, or the pseudo-class the query joined or created.
    pub assigned: ClassKey,
    /// The classifier declared this query novel and minted a class for it.
    pub minted: bool,
    pub terminal_rule: TerminalRule,
    pub trace: Vec<TraceStep>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRun {
    pub queries: Vec<QueryResult>,
    /// Pseudo-classes created during the stream.
    pub minted: usize,
}

/// Fits a classifier on the support set and streams the queries through it in
/// order, incorporating each novel query before the next one is seen.
pub fn run_episode(
    features: &FeatureMatrix,
    episode: &Episode,
    config: &NfConfig,
    metric: &Metric,
) -> Result<EpisodeRun> {
    let support: Vec<&[f64]> = episode
        .support
        .iter()
        .map(|s| features.row(s.row))
        .collect();
    let labels: Vec<u32> = episode.support.iter().map(|s| s.label).collect();
    let mut clf = NfClassifier::fit_support(&support, &labels, metric.clone(), *config)?;

    let mut queries = Vec::with_capacity(episode.queries.len());
    let mut minted = 0;
    for q in &episode.queries {
        let x = features.row(q.row);
        let outcome = clf.predict(x)?;
        let (assigned, was_minted) = match outcome.verdict {
            Verdict::Known(class) => (clf.class_key(class), false),
            Verdict::Novel => {
                let class = clf.incorporate_novel(x)?;
                minted += 1;
                (clf.class_key(class), true)
            }
        };
        queries.push(QueryResult {
            row: q.row,
            label: q.label,
            assigned,
            minted: was_minted,
            terminal_rule: outcome.terminal_rule,
            trace: outcome.trace,
        });
    }
    Ok(EpisodeRun { queries, minted })
}

/// Accuracies of one episode plus the counts they were computed from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeScore {
    pub old_acc: f64,
    pub new_acc: f64,
    pub all_acc: f64,
    pub old_queries: usize,
    pub new_queries: usize,
    pub old_correct: usize,
    pub new_correct: usize,
    pub minted: usize,
    /// No new-class queries, so `new_acc` is reported as 1.0.
    pub new_vacuous: bool,
    /// No old-class queries, so `old_acc` is reported as 1.0.
    pub old_vacuous: bool,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        1.0
    } else {
        num as f64 / den as f64
    }
}

/// Scores a finished stream.
///
/// Old queries count only when assigned their own label. New queries are
/// credited through the best one-to-one matching between true new classes and
/// pseudo-classes; anything assigned to an old class is wrong.
pub fn score_episode(run: &EpisodeRun, episode: &Episode) -> EpisodeScore {
    let new_index: BTreeMap<u32, usize> = episode
        .new_classes
        .iter()
        .enumerate()
        .map(|(i, &c)| (c, i))
        .collect();
    let mut table = vec![vec![0.0; run.minted]; episode.new_classes.len()];
    let (mut old_queries, mut new_queries, mut old_correct) = (0, 0, 0);
    for q in &run.queries {
        match new_index.get(&q.label) {
            Some(&i) => {
                new_queries += 1;
                if let ClassKey::Pseudo(p) = q.assigned {
                    if let Some(cell) = table[i].get_mut(p as usize) {
                        *cell += 1.0;
                    }
                }
            }
            None => {
                old_queries += 1;
                if q.assigned == ClassKey::Label(q.label) {
                    old_correct += 1;
                }
            }
        }
    }
    let new_correct = hungarian_match(&table).profit.round() as usize;
    EpisodeScore {
        old_acc: ratio(old_correct, old_queries),
        new_acc: ratio(new_correct, new_queries),
        all_acc: ratio(old_correct + new_correct, old_queries + new_queries),
        old_queries,
        new_queries,
        old_correct,
        new_correct,
        minted: run.minted,
        new_vacuous: new_queries == 0,
        old_vacuous: old_queries == 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn labels(classes: u32, per_class: usize) -> Vec<u32> {
        (0..classes)
            .flat_map(|c| std::iter::repeat_n(c, per_class))
            .collect()
    }

    #[test]
    fn default_spec_on_ten_classes() {
        let labels = labels(10, 30);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ep = sample_episode(&labels, &EpisodeSpec::default(), &mut rng).unwrap();
        assert_eq!(ep.support.len(), 50);
        assert_eq!(ep.queries.len(), 5 * 20 + 5 * 30);
        for &c in &ep.old_classes {
            assert_eq!(ep.support.iter().filter(|s| s.label == c).count(), 10);
            assert!(!ep.new_classes.contains(&c));
        }
        let mut seen: Vec<usize> = ep.rows();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 300);
        for s in ep.support.iter().chain(&ep.queries) {
            assert_eq!(labels[s.row], s.label);
        }
    }

    #[test]
    fn closed_set_and_caps() {
        let labels = labels(6, 15);
        let spec = EpisodeSpec {
            n_old: 3,
            n_new: 0,
            shots: 5,
            query_cap: Some(4),
            ..Default::default()
        };
        let ep = sample_episode(&labels, &spec, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(ep.new_classes.is_empty());
        assert_eq!(ep.queries.len(), 12);
        assert!(ep.queries.iter().all(|q| ep.old_classes.contains(&q.label)));
    }

    #[test]
    fn same_seed_same_episode() {
        let labels = labels(12, 20);
        let spec = EpisodeSpec::default();
        let a = sample_episode(&labels, &spec, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = sample_episode(&labels, &spec, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(
            serde_json::to_vec(&a).unwrap(),
            serde_json::to_vec(&b).unwrap()
        );
    }

    #[test]
    fn insufficient_data_is_reported() {
        let spec = EpisodeSpec::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            sample_episode(&labels(7, 30), &spec, &mut rng),
            Err(Error::InsufficientClasses {
                needed: 10,
                available: 7
            })
        ));
        assert!(matches!(
            sample_episode(&labels(10, 10), &spec, &mut rng),
            Err(Error::InsufficientSamples {
                needed: 11,
                available: 10,
                ..
            })
        ));
    }

    fn query(label: u32, assigned: ClassKey) -> QueryResult {
        QueryResult {
            row: 0,
            label,
            assigned,
            minted: false,
            terminal_rule: TerminalRule::UniqueActive,
            trace: Vec::new(),
        }
    }

    fn episode(old: &[u32], new: &[u32]) -> Episode {
        Episode {
            support: Vec::new(),
            queries: Vec::new(),
            old_classes: old.to_vec(),
            new_classes: new.to_vec(),
        }
    }

    #[test]
    fn contingency_scoring() {
        // Rows are true new classes 10, 11, 12; columns pseudo-classes.
        let table = [[5, 0, 0], [0, 4, 1], [1, 0, 4]];
        let mut queries = Vec::new();
        for (i, row) in table.iter().enumerate() {
            for (p, &n) in row.iter().enumerate() {
                for _ in 0..n {
                    queries.push(query(10 + i as u32, ClassKey::Pseudo(p as u32)));
                }
            }
        }
        let run = EpisodeRun { queries, minted: 3 };
        let score = score_episode(&run, &episode(&[0], &[10, 11, 12]));
        assert_eq!(score.new_correct, 13);
        assert!((score.new_acc - 13.0 / 15.0).abs() < 1e-15);
        assert!(score.old_vacuous && score.old_acc == 1.0);
    }

    #[test]
    fn permuted_pseudo_labels_score_perfectly() {
        let mut queries = Vec::new();
        for (c, p) in [(7, 2), (8, 0), (9, 1)] {
            for _ in 0..3 {
                queries.push(query(c, ClassKey::Pseudo(p)));
            }
        }
        let run = EpisodeRun { queries, minted: 3 };
        assert_eq!(score_episode(&run, &episode(&[0], &[7, 8, 9])).new_acc, 1.0);
    }

    #[test]
    fn cross_population_errors() {
        let queries = vec![
            query(0, ClassKey::Label(0)),
            query(0, ClassKey::Pseudo(0)),
            query(1, ClassKey::Label(0)),
            query(5, ClassKey::Label(1)),
            query(5, ClassKey::Pseudo(0)),
        ];
        let run = EpisodeRun { queries, minted: 1 };
        let s = score_episode(&run, &episode(&[0, 1], &[5]));
        assert_eq!((s.old_correct, s.old_queries), (1, 3));
        assert_eq!((s.new_correct, s.new_queries), (1, 2));
        assert!((s.all_acc - 0.4).abs() < 1e-15);
    }

    #[test]
    fn no_new_queries_is_vacuous() {
        let run = EpisodeRun {
            queries: vec![query(0, ClassKey::Label(0)), query(1, ClassKey::Label(1))],
            minted: 0,
        };
        let s = score_episode(&run, &episode(&[0, 1], &[]));
        assert_eq!((s.old_acc, s.new_acc, s.all_acc), (1.0, 1.0, 1.0));
        assert!(s.new_vacuous);
    }

    #[test]
    fn far_first_query_mints_class_six() {
        let mut rows = Vec::new();
        let mut support = Vec::new();
        for c in 0..5u32 {
            rows.push(vec![c as f64 * 10.0, 0.0]);
            support.push(Sample {
                row: c as usize,
                label: c,
            });
        }
        rows.push(vec![0.0, 50.0]);
        rows.push(vec![0.2, 50.0]);
        let features = FeatureMatrix::from_rows(&rows).unwrap();
        let ep = Episode {
            support,
            queries: vec![Sample { row: 5, label: 9 }, Sample { row: 6, label: 9 }],
            old_classes: (0..5).collect(),
            new_classes: vec![9],
        };
        let run = run_episode(&features, &ep, &NfConfig::default(), &Metric::Euclidean).unwrap();
        assert_eq!(run.minted, 1);
        assert!(run.queries[0].minted);
        assert_eq!(run.queries[0].assigned, ClassKey::Pseudo(0));
        assert_eq!(run.queries[1].assigned, ClassKey::Pseudo(0));
        assert!(!run.queries[1].minted);
        assert_eq!(score_episode(&run, &ep).new_acc, 1.0);
    }
}
