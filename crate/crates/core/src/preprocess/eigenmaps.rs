//! Laplacian eigenmaps: solve `L f = lambda D f` with `L = D - W` and keep
//! the eigenvectors of the smallest strictly positive eigenvalues.
//!
//! The generalized problem is reduced to the symmetric normalized operator
//! `S = D^{-1/2} W D^{-1/2}`: if `S g = mu g` then `f = D^{-1/2} g` solves the
//! original problem with `lambda = 1 - mu`. Small graphs use a dense
//! eigendecomposition. Larger ones run Lanczos with full reorthogonalization
//! on `S`, with the known top eigenvector `D^{1/2} 1` deflated up front.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AffinityGraph, FeatureMatrix};
use crate::error::{Error, Result};

/// Eigenvalues at or below this are treated as zero.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-9;

/// Largest graph solved with a dense eigendecomposition.
const DENSE_LIMIT: usize = 1200;

const LANCZOS_SEED: u64 = 0x005e_ed1e;
const RITZ_TOL: f64 = 1e-11;

#[derive(Clone, Debug, PartialEq)]
pub struct LeEmbedding {
    /// Retained generalized eigenvalues, ascending and strictly positive.
    pub eigenvalues: Vec<f64>,
    /// One row per vertex, one column per retained eigenvalue.
    pub coords: FeatureMatrix,
    pub k_neighbors: Option<usize>,
    pub heat_scale: f64,
}

/// Eigensolver selection for [`laplacian_eigenmaps_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Solver {
    /// Dense below a size limit, Lanczos above it.
    #[default]
    Auto,
    Dense,
    Lanczos,
}

/// Embeds every vertex of a connected graph in `dims` dimensions.
///
/// Coordinates are the raw generalized eigenvectors (`f^T D f = 1`), with the
/// sign of each fixed so that its largest-magnitude entry is positive.
pub fn laplacian_eigenmaps(graph: &AffinityGraph, dims: usize) -> Result<LeEmbedding> {
    laplacian_eigenmaps_with(graph, dims, Solver::Auto)
}

pub fn laplacian_eigenmaps_with(
    graph: &AffinityGraph,
    dims: usize,
    solver: Solver,
) -> Result<LeEmbedding> {
    let n = graph.len();
    if dims == 0 {
        return Err(Error::InvalidParameter("dims must be positive".into()));
    }
    if dims + 1 > n {
        return Err(Error::EmbeddingDims {
            requested: dims,
            available: n.saturating_sub(1),
        });
    }
    if let Some(i) = (0..n).find(|&i| graph.degree(i) <= 0.0) {
        return Err(Error::InvalidParameter(format!("vertex {i} has no edges")));
    }
    if graph.num_components() != 1 {
        return Err(Error::InvalidParameter(format!(
            "graph has {} connected components; bridge it first",
            graph.num_components()
        )));
    }
    let inv_sqrt_deg: Vec<f64> = (0..n).map(|i| graph.degree(i).sqrt().recip()).collect();

    let use_dense = match solver {
        Solver::Auto => n <= DENSE_LIMIT,
        Solver::Dense => true,
        Solver::Lanczos => false,
    };
    let (eigenvalues, vectors) = if use_dense {
        dense_smallest_positive(graph, &inv_sqrt_deg, dims)?
    } else {
        lanczos_smallest_positive(graph, &inv_sqrt_deg, dims)?
    };

    let mut values = vec![0.0; n * dims];
    for (c, g) in vectors.iter().enumerate() {
        let mut f: Vec<f64> = g.iter().zip(&inv_sqrt_deg).map(|(x, s)| x * s).collect();
        let pivot = f.iter().enumerate().fold(
            0,
            |best, (i, x)| if x.abs() > f[best].abs() { i } else { best },
        );
        if f[pivot] < 0.0 {
            f.iter_mut().for_each(|x| *x = -*x);
        }
        for (r, x) in f.into_iter().enumerate() {
            values[r * dims + c] = x;
        }
    }
    Ok(LeEmbedding {
        eigenvalues,
        coords: FeatureMatrix::new(n, dims, values)?,
        k_neighbors: graph.k_neighbors(),
        heat_scale: graph.heat_scale(),
    })
}

fn normalized_adjacency(graph: &AffinityGraph, inv_sqrt_deg: &[f64]) -> DMatrix<f64> {
    let n = graph.len();
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        for &(j, w) in graph.neighbors(i) {
            s[(i, j)] = inv_sqrt_deg[i] * w * inv_sqrt_deg[j];
        }
    }
    s
}

/// Every generalized eigenvalue of `(L, D)`, ascending. Requires positive degrees.
pub fn generalized_spectrum(graph: &AffinityGraph) -> Result<Vec<f64>> {
    let n = graph.len();
    if let Some(i) = (0..n).find(|&i| graph.degree(i) <= 0.0) {
        return Err(Error::InvalidParameter(format!("vertex {i} has no edges")));
    }
    let inv_sqrt_deg: Vec<f64> = (0..n).map(|i| graph.degree(i).sqrt().recip()).collect();
    let lsym = DMatrix::identity(n, n) - normalized_adjacency(graph, &inv_sqrt_deg);
    let mut ev: Vec<f64> = SymmetricEigen::new(lsym)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

fn dense_smallest_positive(
    graph: &AffinityGraph,
    inv_sqrt_deg: &[f64],
    dims: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = graph.len();
    let lsym = DMatrix::identity(n, n) - normalized_adjacency(graph, inv_sqrt_deg);
    let eig = SymmetricEigen::new(lsym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .total_cmp(&eig.eigenvalues[b])
            .then(a.cmp(&b))
    });
    let positive: Vec<usize> = order
        .into_iter()
        .filter(|&k| eig.eigenvalues[k] > ZERO_EIGENVALUE_TOL)
        .collect();
    if positive.len() < dims {
        return Err(Error::EmbeddingDims {
            requested: dims,
            available: positive.len(),
        });
    }
    let picked = &positive[..dims];
    Ok((
        picked.iter().map(|&k| eig.eigenvalues[k]).collect(),
        picked
            .iter()
            .map(|&k| eig.eigenvectors.column(k).iter().copied().collect())
            .collect(),
    ))
}

fn apply_normalized(graph: &AffinityGraph, inv_sqrt_deg: &[f64], x: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for &(j, w) in graph.neighbors(i) {
            acc += w * inv_sqrt_deg[j] * x[j];
        }
        *o = inv_sqrt_deg[i] * acc;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = dot(x, x).sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
    norm
}

/// Two passes of classical Gram-Schmidt against `basis`.
fn orthogonalize(x: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(x, q);
            axpy(-c, q, x);
        }
    }
}

fn lanczos_smallest_positive(
    graph: &AffinityGraph,
    inv_sqrt_deg: &[f64],
    dims: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = graph.len();
    // Top eigenvector of S for a connected graph: D^{1/2} 1, eigenvalue 1.
    let mut null = inv_sqrt_deg.iter().map(|s| s.recip()).collect::<Vec<f64>>();
    normalize(&mut null);
    let deflated = vec![null];

    let mut rng = ChaCha8Rng::seed_from_u64(LANCZOS_SEED);
    let max_steps = n - 1;
    let mut steps = (4 * dims + 40).min(max_steps);
    loop {
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(steps + 1);
        let mut alpha = Vec::with_capacity(steps);
        let mut beta: Vec<f64> = Vec::with_capacity(steps);
        let mut q = random_unit(&mut rng, n, &deflated, &basis);
        let mut w = vec![0.0; n];
        let mut last_beta = 0.0;
        for k in 0..steps {
            basis.push(q.clone());
            apply_normalized(graph, inv_sqrt_deg, &q, &mut w);
            let a = dot(&w, &q);
            alpha.push(a);
            orthogonalize(&mut w, &deflated);
            orthogonalize(&mut w, &basis);
            let b = normalize(&mut w);
            if k + 1 == steps {
                last_beta = b;
                break;
            }
            if b <= 1e-12 {
                // Invariant subspace: restart the chain with a fresh direction.
                beta.push(0.0);
                q = random_unit(&mut rng, n, &deflated, &basis);
            } else {
                beta.push(b);
                q = w.clone();
            }
        }

        let m = alpha.len();
        let mut t = DMatrix::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| {
            eig.eigenvalues[b]
                .total_cmp(&eig.eigenvalues[a])
                .then(a.cmp(&b))
        });

        let mut picked = Vec::with_capacity(dims);
        let mut converged = true;
        for &k in &order {
            let lambda = 1.0 - eig.eigenvalues[k];
            if lambda <= ZERO_EIGENVALUE_TOL {
                continue;
            }
            let residual = (last_beta * eig.eigenvectors[(m - 1, k)]).abs();
            if residual > RITZ_TOL && m < max_steps {
                converged = false;
                break;
            }
            picked.push(k);
            if picked.len() == dims {
                break;
            }
        }
        if converged && picked.len() == dims {
            let values = picked.iter().map(|&k| 1.0 - eig.eigenvalues[k]).collect();
            let vectors = picked
                .iter()
                .map(|&k| {
                    let s = eig.eigenvectors.column(k);
                    let mut g = vec![0.0; n];
                    for (coef, v) in s.iter().zip(&basis) {
                        axpy(*coef, v, &mut g);
                    }
                    normalize(&mut g);
                    g
                })
                .collect();
            return Ok((values, vectors));
        }
        if m >= max_steps {
            return Err(Error::EmbeddingDims {
                requested: dims,
                available: picked.len(),
            });
        }
        steps = (steps * 2).min(max_steps);
    }
}

fn random_unit(
    rng: &mut ChaCha8Rng,
    n: usize,
    deflated: &[Vec<f64>],
    basis: &[Vec<f64>],
) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        orthogonalize(&mut v, deflated);
        orthogonalize(&mut v, basis);
        if normalize(&mut v) > 1e-8 {
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::{build_affinity_graph, HeatScale};

    fn complete(n: usize) -> AffinityGraph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j, 1.0));
            }
        }
        AffinityGraph::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn complete_graph_has_flat_positive_spectrum() {
        let spec = generalized_spectrum(&complete(4)).unwrap();
        assert!(spec[0].abs() < 1e-12);
        for &ev in &spec[1..] {
            assert!((ev - 4.0 / 3.0).abs() < 1e-12);
        }
        let emb = laplacian_eigenmaps(&complete(4), 3).unwrap();
        assert!(emb
            .eigenvalues
            .iter()
            .all(|ev| (ev - 4.0 / 3.0).abs() < 1e-12));
    }

    #[test]
    fn path_fiedler_vector_is_monotone() {
        let g = AffinityGraph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let emb = laplacian_eigenmaps(&g, 1).unwrap();
        let f: Vec<f64> = emb.coords.iter_rows().map(|r| r[0]).collect();
        assert!((f[0] < f[1] && f[1] < f[2]) || (f[0] > f[1] && f[1] > f[2]));
        assert!((emb.eigenvalues[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generalized_normalization_holds() {
        let g = AffinityGraph::from_edges(4, &[(0, 1, 1.0), (1, 2, 2.0), (2, 3, 0.5), (3, 0, 1.5)])
            .unwrap();
        let emb = laplacian_eigenmaps(&g, 2).unwrap();
        for c in 0..2 {
            let fdf: f64 = (0..4)
                .map(|i| emb.coords.row(i)[c].powi(2) * g.degree(i))
                .sum();
            assert!((fdf - 1.0).abs() < 1e-10);
            // Orthogonal to the constant vector in the D inner product.
            let f1: f64 = (0..4).map(|i| emb.coords.row(i)[c] * g.degree(i)).sum();
            assert!(f1.abs() < 1e-10);
        }
    }

    #[test]
    fn too_many_dims_are_rejected() {
        assert!(matches!(
            laplacian_eigenmaps(&complete(4), 4),
            Err(Error::EmbeddingDims {
                requested: 4,
                available: 3
            })
        ));
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let g = AffinityGraph::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert!(laplacian_eigenmaps(&g, 1).is_err());
        let spec = generalized_spectrum(&g).unwrap();
        let zeros = spec
            .iter()
            .filter(|&&ev| ev.abs() <= ZERO_EIGENVALUE_TOL)
            .count();
        assert_eq!(zeros, 2);
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let n = 240;
        let values: Vec<f64> = (0..n * 3).map(|_| rng.random_range(-2.0..2.0)).collect();
        let features = FeatureMatrix::new(n, 3, values).unwrap();
        let g = build_affinity_graph(&features, 8, HeatScale::Auto).unwrap();
        let dense = laplacian_eigenmaps_with(&g, 4, Solver::Dense).unwrap();
        let lanczos = laplacian_eigenmaps_with(&g, 4, Solver::Lanczos).unwrap();
        for (a, b) in dense.eigenvalues.iter().zip(&lanczos.eigenvalues) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        // Compare eigenvectors in the D inner product, up to sign.
        for c in 0..4 {
            let inner: f64 = (0..n)
                .map(|i| dense.coords.row(i)[c] * lanczos.coords.row(i)[c] * g.degree(i))
                .sum();
            assert!((inner.abs() - 1.0).abs() < 1e-6, "column {c}: {inner}");
        }
    }
}
