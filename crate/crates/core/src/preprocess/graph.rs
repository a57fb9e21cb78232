//! Symmetric k-nearest-neighbour affinity graph with heat-kernel weights.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metric::euclidean;
use super::FeatureMatrix;
use crate::error::{Error, Result};

/// Lower bound on the weight of an edge added to join two components, so the
/// join survives exponential underflow when components are far apart.
pub const MIN_BRIDGE_WEIGHT: f64 = 1e-6;

/// Bandwidth of the heat kernel `exp(-dist^2 / h^2)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeatScale {
    /// Median distance over all selected nearest-neighbour pairs.
    #[default]
    Auto,
    Fixed(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AffinityGraph {
    adjacency: Vec<Vec<(usize, f64)>>,
    heat_scale: f64,
    k_neighbors: Option<usize>,
    bridges: Vec<(usize, usize)>,
}

impl AffinityGraph {
    /// Builds an undirected graph from weighted edges. Self-loops are dropped
    /// and repeated edges keep the larger weight.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j, w) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidParameter(format!(
                    "edge ({i}, {j}) out of range for {n} vertices"
                )));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "edge ({i}, {j}) has non-positive weight {w}"
                )));
            }
            if i != j {
                adjacency[i].push((j, w));
                adjacency[j].push((i, w));
            }
        }
        for list in &mut adjacency {
            normalize_list(list);
        }
        Ok(AffinityGraph {
            adjacency,
            heat_scale: f64::NAN,
            k_neighbors: None,
            bridges: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.adjacency[i]
            .binary_search_by_key(&j, |&(k, _)| k)
            .ok()
            .map(|pos| self.adjacency[i][pos].1)
    }

    pub fn degree(&self, i: usize) -> f64 {
        self.adjacency[i].iter().map(|&(_, w)| w).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Heat-kernel bandwidth used, NaN for graphs built from explicit edges.
    pub fn heat_scale(&self) -> f64 {
        self.heat_scale
    }

    pub fn k_neighbors(&self) -> Option<usize> {
        self.k_neighbors
    }

    /// Edges that were added to connect otherwise separate components.
    pub fn bridges(&self) -> &[(usize, usize)] {
        &self.bridges
    }

    pub fn was_bridged(&self) -> bool {
        !self.bridges.is_empty()
    }

    /// Component label of every vertex.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.len());
        for (i, list) in self.adjacency.iter().enumerate() {
            for &(j, _) in list {
                uf.union(i, j);
            }
        }
        (0..self.len()).map(|i| uf.find(i)).collect()
    }

    pub fn num_components(&self) -> usize {
        let mut labels = self.component_labels();
        labels.sort_unstable();
        labels.dedup();
        labels.len()
    }

    fn add_edge(&mut self, i: usize, j: usize, w: f64) {
        self.adjacency[i].push((j, w));
        self.adjacency[j].push((i, w));
        normalize_list(&mut self.adjacency[i]);
        normalize_list(&mut self.adjacency[j]);
    }
}

fn normalize_list(list: &mut Vec<(usize, f64)>) {
    list.sort_by(|a, b| a.0.cmp(&b.0).then(b.1.total_cmp(&a.1)));
    list.dedup_by_key(|e| e.0);
}

/// Symmetric kNN graph: an edge is kept when either endpoint selects the other.
///
/// Components left separate by the kNN step are joined by their closest pair
/// of points, one bridge per merge, and the graph records which edges these are.
pub fn build_affinity_graph(
    features: &FeatureMatrix,
    k_neighbors: usize,
    heat_scale: HeatScale,
) -> Result<AffinityGraph> {
    let n = features.rows();
    if k_neighbors == 0 || k_neighbors >= n {
        return Err(Error::InvalidParameter(format!(
            "k_neighbors must lie in [1, {}), got {k_neighbors}",
            n
        )));
    }
    let knn: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| nearest(features, i, k_neighbors))
        .collect();

    let h = match heat_scale {
        HeatScale::Fixed(h) if h > 0.0 && h.is_finite() => h,
        HeatScale::Fixed(h) => {
            return Err(Error::InvalidParameter(format!(
                "heat scale must be positive, got {h}"
            )))
        }
        HeatScale::Auto => auto_heat_scale(&knn),
    };
    let weight = |d: f64| (-(d * d) / (h * h)).exp();

    let mut adjacency = vec![Vec::new(); n];
    for (i, list) in knn.iter().enumerate() {
        for &(j, d) in list {
            let w = weight(d).max(f64::MIN_POSITIVE);
            adjacency[i].push((j, w));
            adjacency[j].push((i, w));
        }
    }
    for list in &mut adjacency {
        normalize_list(list);
    }
    let mut graph = AffinityGraph {
        adjacency,
        heat_scale: h,
        k_neighbors: Some(k_neighbors),
        bridges: Vec::new(),
    };

    loop {
        let labels = graph.component_labels();
        if labels.iter().all(|&l| l == labels[0]) {
            break;
        }
        // One Boruvka round: each component's closest outside point.
        let closest: Vec<Option<(f64, usize, usize)>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut best: Option<(f64, usize, usize)> = None;
                for j in 0..n {
                    if labels[j] == labels[i] {
                        continue;
                    }
                    let d = euclidean(features.row(i), features.row(j));
                    if best.is_none_or(|(bd, _, _)| d < bd) {
                        best = Some((d, i.min(j), i.max(j)));
                    }
                }
                best
            })
            .collect();
        let mut per_component: std::collections::BTreeMap<usize, (f64, usize, usize)> =
            Default::default();
        for (i, cand) in closest.into_iter().enumerate() {
            let Some(cand) = cand else { continue };
            per_component
                .entry(labels[i])
                .and_modify(|cur| {
                    if (cand.0, cand.1, cand.2) < *cur {
                        *cur = cand;
                    }
                })
                .or_insert(cand);
        }
        let mut uf = UnionFind::from_labels(&labels);
        for (_, (d, i, j)) in per_component {
            if uf.union(i, j) {
                graph.add_edge(i, j, weight(d).max(MIN_BRIDGE_WEIGHT));
                graph.bridges.push((i, j));
            }
        }
    }
    Ok(graph)
}

fn nearest(features: &FeatureMatrix, i: usize, k: usize) -> Vec<(usize, f64)> {
    let xi = features.row(i);
    let mut cands: Vec<(f64, usize)> = (0..features.rows())
        .filter(|&j| j != i)
        .map(|j| (euclidean(xi, features.row(j)), j))
        .collect();
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    cands.select_nth_unstable_by(k - 1, cmp);
    cands.truncate(k);
    cands.sort_by(cmp);
    cands.into_iter().map(|(d, j)| (j, d)).collect()
}

fn auto_heat_scale(knn: &[Vec<(usize, f64)>]) -> f64 {
    let mut dists: Vec<f64> = knn.iter().flatten().map(|&(_, d)| d).collect();
    if dists.is_empty() {
        return 1.0;
    }
    dists.sort_by(f64::total_cmp);
    let mid = dists.len() / 2;
    let median = if dists.len().is_multiple_of(2) {
        0.5 * (dists[mid - 1] + dists[mid])
    } else {
        dists[mid]
    };
    if median > 0.0 {
        return median;
    }
    // Mostly duplicated points: fall back to the mean positive distance.
    let positive: Vec<f64> = dists.into_iter().filter(|&d| d > 0.0).collect();
    if positive.is_empty() {
        1.0
    } else {
        positive.iter().sum::<f64>() / positive.len() as f64
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn from_labels(labels: &[usize]) -> Self {
        let mut uf = UnionFind::new(labels.len());
        for (i, &l) in labels.iter().enumerate() {
            uf.union(i, l);
        }
        uf
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}
