//! Sweep thresholds, metrics and scale escalations over the same episodes.
//!
//! Run with `cargo run --release --example ablation_grid`.

use nfgcd::classifier::{NfConfig, NumThreshold};
use nfgcd::config::RunConfig;
use nfgcd::episodes::{ablate, run_episode, score_episode, AblationGrid};
use nfgcd::io::{emit_ablation, ReportFormat};
use nfgcd::preprocess::{Metric, MetricKind, Reduction};
use nfgcd::synthetic::{clustered_dataset, lattice_centers, paired_novelty_episode, PairedNovelty};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), nfgcd::error::Error> {
    let centers = lattice_centers(10, 4, 4.0);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let data = clustered_dataset(&centers, 0.9, 40, &mut rng)?;
    let mut config = RunConfig {
        episodes: 50,
        ..RunConfig::default()
    };
    config.preprocess.reduction = Reduction::None;
    let grid = AblationGrid {
        thresholds: NumThreshold::ALL.to_vec(),
        metrics: MetricKind::ALL.to_vec(),
        lambdas: vec![0.2, 0.4, 0.8],
        escalations: vec![0],
    };
    let report = ablate(&data, &config, &grid)?;
    print!(
        "{}",
        String::from_utf8_lossy(&emit_ablation(&report, ReportFormat::Csv)?)
    );

    // Raising the scale bound lets novel clusters near old ones be absorbed.
    println!("\nescalations  New accuracy");
    let layout = PairedNovelty::default();
    for escalations in [0, 1, 4, 9] {
        let cfg = NfConfig {
            sigma_escalations: escalations,
            ..NfConfig::default()
        };
        let mut total = 0.0;
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (x, ep) = paired_novelty_episode(&layout, &mut rng)?;
            total += score_episode(&run_episode(&x, &ep, &cfg, &Metric::Euclidean)?, &ep).new_acc;
        }
        println!("{escalations:<12} {:.4}", total / 20.0);
    }
    Ok(())
}
