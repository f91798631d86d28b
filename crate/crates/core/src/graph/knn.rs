use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{Graph, PointCloud};
use crate::error::{Error, Result};

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Gaussian-kernel k-nearest-neighbor graph.
///
/// Each point links to its `k_neighbors` nearest points (Euclidean, ties by
/// index) with weight `exp(-dist^2 / bandwidth^2)`. An edge exists if either
/// endpoint selects the other.
pub fn build_knn_kernel_graph(
    cloud: &PointCloud,
    k_neighbors: usize,
    bandwidth: f64,
) -> Result<Graph> {
    let n = cloud.n();
    if k_neighbors == 0 || k_neighbors >= n {
        return Err(Error::param(
            "k_neighbors",
            format!("need 1 <= k < n = {n}, got {k_neighbors}"),
        ));
    }
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::param("bandwidth", "must be positive"));
    }
    let h2 = bandwidth * bandwidth;

    let selections: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let p = cloud.point(i);
            let mut dists: Vec<(f64, usize)> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (squared_distance(p, cloud.point(j)), j))
                .collect();
            let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
            dists.select_nth_unstable_by(k_neighbors - 1, cmp);
            dists.truncate(k_neighbors);
            dists.into_iter().map(|(d2, j)| (j, d2)).collect()
        })
        .collect();

    let mut edges: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (i, sel) in selections.into_iter().enumerate() {
        for (j, d2) in sel {
            edges.insert((i.min(j), i.max(j)), (-d2 / h2).exp());
        }
    }
    // kernel may underflow for far outliers; weights must stay positive
    let edges = edges
        .into_iter()
        .map(|((u, v), w)| (u, v, w.max(f64::MIN_POSITIVE)));
    Graph::from_edges(n, edges)
}
