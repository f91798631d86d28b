//! Reference selection schemes: uniform random sampling, k-means and spectral
//! clustering representatives, and top betweenness-centrality vertices.

mod betweenness;
mod kmeans;

pub use betweenness::betweenness_centrality;
pub use kmeans::{kmeans, KMeans};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{sample_distinct, CostVector, Graph, PointCloud};
use crate::spectral::{lazy_walk_matrix, leading_spectrum, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineMethod {
    Random,
    Kmeans,
    Spectral,
    Betweenness,
}

impl BaselineMethod {
    pub fn name(self) -> &'static str {
        match self {
            BaselineMethod::Random => "random",
            BaselineMethod::Kmeans => "kmeans",
            BaselineMethod::Spectral => "spectral",
            BaselineMethod::Betweenness => "betweenness",
        }
    }
}

impl std::str::FromStr for BaselineMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(BaselineMethod::Random),
            "kmeans" => Ok(BaselineMethod::Kmeans),
            "spectral" => Ok(BaselineMethod::Spectral),
            "betweenness" => Ok(BaselineMethod::Betweenness),
            other => Err(Error::param("method", format!("unknown baseline `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaselineCoreset {
    pub method: BaselineMethod,
    pub indices: Vec<usize>,
    pub weights: Vec<f64>,
    /// Cluster of every vertex, for the clustering methods.
    pub assignment: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct BaselineDocument {
    method: BaselineMethod,
    indices: Vec<usize>,
    weights: Vec<f64>,
    beta: f64,
    total_cost: f64,
    trajectory: Vec<serde_json::Value>,
}

impl BaselineCoreset {
    /// JSON in the coreset shape, with `beta = 1` and the selection cost
    /// under `costs` (0 without costs).
    pub fn to_json(&self, costs: Option<&CostVector>) -> Result<String> {
        let doc = BaselineDocument {
            method: self.method,
            indices: self.indices.clone(),
            weights: self.weights.clone(),
            beta: 1.0,
            total_cost: costs.map_or(0.0, |c| c.cost_of(&self.indices)),
            trajectory: Vec::new(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: BaselineDocument = serde_json::from_str(text)?;
        Ok(BaselineCoreset {
            method: d.method,
            indices: d.indices,
            weights: d.weights,
            assignment: None,
        })
    }
}

fn check_budget(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return Err(Error::param("k", format!("need 1 <= k <= n = {n}, got {k}")));
    }
    Ok(())
}

/// `k` distinct uniform vertices, weight `1/k` each.
pub fn random_sampling(n: usize, k: usize, seed: u64) -> Result<BaselineCoreset> {
    check_budget(k, n)?;
    Ok(BaselineCoreset {
        method: BaselineMethod::Random,
        indices: sample_distinct(n, k, seed),
        weights: vec![1.0 / k as f64; k],
        assignment: None,
    })
}

/// Representatives of k-means clusters over row-major `points`: the member
/// nearest each centroid, weighted by the cluster's share of the data.
fn cluster_representatives(
    points: &[f64],
    dim: usize,
    k: usize,
    seed: u64,
    method: BaselineMethod,
) -> Result<BaselineCoreset> {
    let n = points.len() / dim;
    check_budget(k, n)?;
    let fit = kmeans(points, dim, k, seed)?;
    let mut best: Vec<Option<(f64, usize)>> = vec![None; k];
    let mut sizes = vec![0usize; k];
    for i in 0..n {
        let c = fit.assignment[i];
        sizes[c] += 1;
        let d = kmeans::squared_distance(&points[i * dim..(i + 1) * dim], fit.centroid(c));
        if best[c].is_none_or(|(bd, _)| d < bd) {
            best[c] = Some((d, i));
        }
    }
    let mut indices = Vec::with_capacity(k);
    let mut weights = Vec::with_capacity(k);
    for c in 0..k {
        if let Some((_, i)) = best[c] {
            indices.push(i);
            weights.push(sizes[c] as f64 / n as f64);
        }
    }
    Ok(BaselineCoreset {
        method,
        indices,
        weights,
        assignment: Some(fit.assignment),
    })
}

/// k-means (k-means++ seeding, Lloyd iterations) on a point cloud.
pub fn kmeans_coreset(cloud: &PointCloud, k: usize, seed: u64) -> Result<BaselineCoreset> {
    cluster_representatives(cloud.coords(), cloud.dim(), k, seed, BaselineMethod::Kmeans)
}

/// k-means in the embedding given by the top-`k` eigenvectors of the lazy walk.
pub fn spectral_clustering_coreset(graph: &Graph, k: usize, seed: u64) -> Result<BaselineCoreset> {
    check_budget(k, graph.n())?;
    let spectrum = leading_spectrum(&lazy_walk_matrix(graph)?, k, seed)?;
    spectral_clustering_from_spectrum(&spectrum, k, seed)
}

/// As [`spectral_clustering_coreset`], reusing a precomputed spectrum holding
/// at least `k` leading eigenpairs.
pub fn spectral_clustering_from_spectrum(
    spectrum: &Spectrum,
    k: usize,
    seed: u64,
) -> Result<BaselineCoreset> {
    let n = spectrum.n();
    check_budget(k, n)?;
    if k > spectrum.len() {
        return Err(Error::param(
            "k",
            format!("spectrum holds only {} eigenpairs", spectrum.len()),
        ));
    }
    let mut embedding = Vec::with_capacity(n * k);
    for i in 0..n {
        for c in 0..k {
            embedding.push(spectrum.vectors[(i, c)]);
        }
    }
    cluster_representatives(&embedding, k, k, seed, BaselineMethod::Spectral)
}

/// Top-`k` vertices by betweenness (ties to the lower index), weight `1/k`.
pub fn betweenness_coreset(graph: &Graph, k: usize) -> Result<BaselineCoreset> {
    check_budget(k, graph.n())?;
    let scores = betweenness_centrality(graph);
    Ok(top_by_score(&scores, k))
}

pub(crate) fn top_by_score(scores: &[f64], k: usize) -> BaselineCoreset {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.truncate(k);
    BaselineCoreset {
        method: BaselineMethod::Betweenness,
        indices: order,
        weights: vec![1.0 / k as f64; k],
        assignment: None,
    }
}
