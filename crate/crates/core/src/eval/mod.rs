//! Mean estimators, error metrics, bound verification and shortest-path
//! averages.

pub mod experiment;

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::baselines::BaselineCoreset;
use crate::error::{Error, Result};
use crate::graph::{format_real, CostVector, Graph};
use crate::scgiga::{distance_to_uniform, Coreset};
use crate::spectral::{plambda_norm, GraphFunction, NormalizedColumns};

/// Anything that supplies estimator weights at selected vertices.
pub trait VertexWeights {
    fn vertices(&self) -> &[usize];
    fn weights(&self) -> &[f64];
}

impl VertexWeights for Coreset {
    fn vertices(&self) -> &[usize] {
        &self.indices
    }
    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl VertexWeights for BaselineCoreset {
    fn vertices(&self) -> &[usize] {
        &self.indices
    }
    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Plain `(vertices, weights)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedVertices {
    pub vertices: Vec<usize>,
    pub weights: Vec<f64>,
}

impl WeightedVertices {
    /// Every vertex with weight `1/n`.
    pub fn uniform(n: usize) -> Self {
        WeightedVertices {
            vertices: (0..n).collect(),
            weights: vec![1.0 / n as f64; n],
        }
    }
}

impl VertexWeights for WeightedVertices {
    fn vertices(&self) -> &[usize] {
        &self.vertices
    }
    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// `sum_w a_w f(w)`.
pub fn estimate_mean<C: VertexWeights + ?Sized>(f: &[f64], coreset: &C) -> f64 {
    coreset
        .vertices()
        .iter()
        .zip(coreset.weights())
        .map(|(&v, &a)| a * f[v])
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMetric {
    pub estimate: f64,
    pub truth: f64,
    pub abs_err: f64,
    /// `abs_err^2`.
    pub err: f64,
}

pub fn error_metric<C: VertexWeights + ?Sized>(f: &GraphFunction, coreset: &C) -> ErrorMetric {
    let estimate = estimate_mean(&f.values, coreset);
    let truth = f.mean();
    let abs_err = (estimate - truth).abs();
    ErrorMetric {
        estimate,
        truth,
        abs_err,
        err: abs_err * abs_err,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `|mean(f) - estimate| <= ||f||_{P_lambda} / lambda^ell * ||P^ell a - (1/n) 1||`
/// with `a` the coreset's estimator weights.
pub fn bound_check<C: VertexWeights + ?Sized>(
    f: &GraphFunction,
    lambda_threshold: f64,
    ell: usize,
    coreset: &C,
    columns: &NormalizedColumns,
) -> Result<BoundCheck> {
    if columns.ell() != ell {
        return Err(Error::param(
            "ell",
            format!("columns built with ell = {}, bound asked at {ell}", columns.ell()),
        ));
    }
    if !(lambda_threshold > 0.0 && lambda_threshold <= 1.0) {
        return Err(Error::param("lambda", "threshold must lie in (0, 1]"));
    }
    let f_norm = plambda_norm(f)?;
    let lhs = error_metric(f, coreset).abs_err;
    // P^ell e_i = ||P^ell e_i|| u_i
    let scaled: Vec<f64> = coreset
        .vertices()
        .iter()
        .zip(coreset.weights())
        .map(|(&v, &a)| a * columns.norm(v))
        .collect();
    let pushed = columns.combine(coreset.vertices(), &scaled);
    let rhs = f_norm / lambda_threshold.powi(ell as i32) * distance_to_uniform(&pushed);
    Ok(BoundCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9,
    })
}

/// `sqrt(1 - kappa^2 max_i <u_i, 1/sqrt(n)>^2)`.
pub fn eta_diagnostic(columns: &NormalizedColumns, kappa: f64) -> f64 {
    let best = (0..columns.n())
        .map(|i| columns.target_alignment(i))
        .fold(f64::NEG_INFINITY, f64::max);
    (1.0 - kappa * kappa * best * best).max(0.0).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostReport {
    /// Cost of the cost-aware (`kappa < 1`) selection.
    pub c_cso: f64,
    /// Cost of the cost-oblivious (`kappa = 1`) selection.
    pub c_cos: f64,
}

pub fn cost_report(coreset_costed: &Coreset, coreset_free: &Coreset, costs: &CostVector) -> CostReport {
    CostReport {
        c_cso: costs.cost_of(&coreset_costed.indices),
        c_cos: costs.cost_of(&coreset_free.indices),
    }
}

/// Totally ordered non-negative path length for heap use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Distance(pub f64);

impl Eq for Distance {}

impl PartialOrd for Distance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Distance {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Single-source shortest path lengths (infinite when unreachable).
pub fn dijkstra(graph: &Graph, source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; graph.n()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse((Distance(0.0), source)));
    while let Some(Reverse((Distance(d), v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for (u, w) in graph.neighbors(v) {
            let alt = d + w;
            if alt < dist[u] {
                dist[u] = alt;
                heap.push(Reverse((Distance(alt), u)));
            }
        }
    }
    dist
}

/// `(1/n) sum_u dist(source, u)`.
pub fn average_distance_from(graph: &Graph, source: usize) -> Result<f64> {
    let dist = dijkstra(graph, source);
    if let Some(u) = dist.iter().position(|d| d.is_infinite()) {
        return Err(Error::Disconnected(source, u));
    }
    Ok(dist.iter().sum::<f64>() / graph.n() as f64)
}

/// A path-length average and the number of single-source runs it took.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathAverage {
    pub value: f64,
    pub dijkstra_runs: usize,
}

/// Average distance from every vertex; one Dijkstra run per vertex.
pub fn average_distance_function(graph: &Graph) -> Result<GraphFunction> {
    let values: Vec<f64> = (0..graph.n())
        .into_par_iter()
        .map(|v| average_distance_from(graph, v))
        .collect::<Result<_>>()?;
    Ok(GraphFunction::from_values(values))
}

/// `(1/n) sum_v (1/n) sum_u dist(v, u)` from `n` Dijkstra runs.
pub fn avg_shortest_path_true(graph: &Graph) -> Result<PathAverage> {
    avg_shortest_path_estimate(graph, &WeightedVertices::uniform(graph.n()))
}

/// `sum_w a_w (1/n) sum_u dist(w, u)` from one Dijkstra run per selected vertex.
pub fn avg_shortest_path_estimate<C: VertexWeights + ?Sized>(
    graph: &Graph,
    coreset: &C,
) -> Result<PathAverage> {
    if coreset.vertices().is_empty() {
        return Err(Error::param("coreset", "empty coreset"));
    }
    let per_vertex: Vec<f64> = coreset
        .vertices()
        .par_iter()
        .map(|&v| average_distance_from(graph, v))
        .collect::<Result<_>>()?;
    Ok(PathAverage {
        value: per_vertex.iter().zip(coreset.weights()).map(|(d, a)| d * a).sum(),
        dijkstra_runs: per_vertex.len(),
    })
}

/// One `(method, K)` point of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub method: String,
    pub k: usize,
    pub err: f64,
    pub abs_err: f64,
    pub coreset_cost: f64,
    pub bound_rhs: Option<f64>,
    pub runtime_ms: f64,
}

pub const RESULTS_HEADER: &str = "method,K,err,abs_err,cost,bound_rhs,runtime_ms";

pub fn results_to_csv(rows: &[ExperimentResult]) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.method,
            r.k,
            format_real(r.err),
            format_real(r.abs_err),
            format_real(r.coreset_cost),
            r.bound_rhs.map(format_real).unwrap_or_default(),
            format_real(r.runtime_ms)
        );
    }
    out
}
