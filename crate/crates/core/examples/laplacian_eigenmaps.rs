//! Build a kNN heat-kernel graph and embed it with Laplacian eigenmaps.
//!
//! Run with `cargo run --example laplacian_eigenmaps`.

use nfgcd::preprocess::{
    build_affinity_graph, generalized_spectrum, laplacian_eigenmaps, standardize, HeatScale,
};
use nfgcd::synthetic::gaussian_blobs;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), nfgcd::error::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let data = gaussian_blobs(3, 20, 2.0, 40, &mut rng)?;
    let (z, _) = standardize(&data.to_matrix()?)?;

    let graph = build_affinity_graph(&z, 10, HeatScale::Auto)?;
    println!(
        "{} nodes, {} edges, heat scale {:.4}, {} bridge edges",
        graph.len(),
        graph.edge_count(),
        graph.heat_scale(),
        graph.bridges().len()
    );

    let spectrum = generalized_spectrum(&graph)?;
    let head: Vec<String> = spectrum.iter().take(6).map(|l| format!("{l:.5}")).collect();
    println!("smallest generalized eigenvalues: {}", head.join(", "));

    // The raw coordinates are tiny, so standardize them as the pipeline does.
    let emb = laplacian_eigenmaps(&graph, 2)?;
    let (coords, _) = standardize(&emb.coords)?;
    println!("\nclass  mean embedding (standardized)");
    let labels = data.labels();
    for class in 0..3u32 {
        let rows: Vec<&[f64]> = coords
            .iter_rows()
            .zip(&labels)
            .filter(|(_, &l)| l == class)
            .map(|(r, _)| r)
            .collect();
        let mean: Vec<f64> = (0..2)
            .map(|k| rows.iter().map(|r| r[k]).sum::<f64>() / rows.len() as f64)
            .collect();
        println!("{class:<6} ({:+.4}, {:+.4})", mean[0], mean[1]);
    }
    Ok(())
}
