//! Full episodic evaluation on synthetic clusters: 5 old and 5 new classes,
//! 10 shots, Laplacian eigenmaps preprocessing.
//!
//! Run with `cargo run --release --example episodic_evaluation`.

use nfgcd::config::RunConfig;
use nfgcd::episodes::evaluate;
use nfgcd::io::format_mean_std;
use nfgcd::synthetic::gaussian_blobs;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), nfgcd::error::Error> {
    // Ten Gaussian classes in 64 dimensions, 200 samples each.
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let data = gaussian_blobs(10, 64, 3.0, 200, &mut rng)?;

    for dims in [4, 6, 9] {
        let mut config = RunConfig {
            episodes: 200,
            ..RunConfig::default()
        };
        config.preprocess.dims = Some(dims);
        let report = evaluate(&data, &config)?;
        let a = &report.aggregate;
        println!(
            "{dims} dims: Old {}  New {}  All {}  (mean minted {:.2})",
            format_mean_std(a.old.mean, a.old.std),
            format_mean_std(a.new.mean, a.new.std),
            format_mean_std(a.all.mean, a.all.std),
            a.mean_minted
        );
        if let Some(notes) = &report.preprocessing {
            println!(
                "  eigenvalues {:?}, {} bridge edges",
                notes
                    .eigenvalues
                    .iter()
                    .map(|l| format!("{l:.4}"))
                    .collect::<Vec<_>>(),
                notes.bridge_edges
            );
        }
    }
    Ok(())
}
