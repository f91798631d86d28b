//! Undirected weighted graphs, point clouds and per-vertex placement costs.

mod generators;
mod io;
mod knn;

pub(crate) use generators::{rng_from_seed as generators_rng, sample_distinct};
pub use generators::{
    generate_gaussian_mixture, generate_powerlaw_tree, generate_random_graph, generate_sbm,
    sample_costs_uniform,
};
pub use io::{load_edge_list, write_edge_list, LoadedEdgeList};
pub use knn::build_knn_kernel_graph;

use std::collections::VecDeque;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Undirected graph with strictly positive symmetric edge weights.
///
/// Edges are stored once with `u < v`, sorted; a CSR adjacency holds both
/// directions for neighbor traversal.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    labels: Option<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from undirected edges given in either orientation.
    ///
    /// Rejects self-loops, out-of-range endpoints, non-positive weights and
    /// repeated pairs. A graph on two or more vertices needs at least one edge.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        let mut canon = Vec::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) out of range for {n} vertices"
                )));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {u}")));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u}, {v}) has non-positive weight {w}"
                )));
            }
            canon.push((u.min(v), u.max(v), w));
        }
        canon.sort_by_key(|a| (a.0, a.1));
        if let Some(pair) = canon.windows(2).find(|p| (p[0].0, p[0].1) == (p[1].0, p[1].1)) {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                pair[0].0, pair[0].1
            )));
        }
        if n >= 2 && canon.is_empty() {
            return Err(Error::InvalidGraph(format!("no edges among {n} vertices")));
        }

        let mut counts = vec![0usize; n + 1];
        for &(u, v, _) in &canon {
            counts[u + 1] += 1;
            counts[v + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let offsets = counts;
        let mut fill = offsets.clone();
        let mut targets = vec![0usize; 2 * canon.len()];
        let mut weights = vec![0.0; 2 * canon.len()];
        for &(u, v, w) in &canon {
            targets[fill[u]] = v;
            weights[fill[u]] = w;
            fill[u] += 1;
        }
        for &(u, v, w) in &canon {
            targets[fill[v]] = u;
            weights[fill[v]] = w;
            fill[v] += 1;
        }
        for v in 0..n {
            let (s, e) = (offsets[v], offsets[v + 1]);
            let mut row: Vec<(usize, f64)> = targets[s..e]
                .iter()
                .copied()
                .zip(weights[s..e].iter().copied())
                .collect();
            row.sort_by_key(|&(t, _)| t);
            for (k, (t, w)) in row.into_iter().enumerate() {
                targets[s + k] = t;
                weights[s + k] = w;
            }
        }

        Ok(Graph {
            n,
            edges: canon,
            offsets,
            targets,
            weights,
            labels: None,
        })
    }

    /// Attaches per-vertex integer labels (e.g. planted block membership).
    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::param(
                "labels",
                format!("expected {} labels, got {}", self.n, labels.len()),
            ));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edges `(u, v, w)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// Neighbors of `v` with edge weights, sorted by neighbor index.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (s, e) = (self.offsets[v], self.offsets[v + 1]);
        self.targets[s..e]
            .iter()
            .copied()
            .zip(self.weights[s..e].iter().copied())
    }

    /// Number of incident edges.
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Sum of incident edge weights.
    pub fn weighted_degree(&self, v: usize) -> f64 {
        self.weights[self.offsets[v]..self.offsets[v + 1]].iter().sum()
    }

    /// Weight of edge `(u, v)`, if present.
    pub fn edge_weight(&self, u: usize, v: usize) -> Option<f64> {
        let (s, e) = (self.offsets[u], self.offsets[u + 1]);
        self.targets[s..e]
            .binary_search(&v)
            .ok()
            .map(|k| self.weights[s + k])
    }

    /// Connected component id per vertex, numbered by smallest member.
    pub fn components(&self) -> Vec<usize> {
        let mut comp = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut queue = VecDeque::new();
        for start in 0..self.n {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = next;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for (u, _) in self.neighbors(v) {
                    if comp[u] == usize::MAX {
                        comp[u] = next;
                        queue.push_back(u);
                    }
                }
            }
            next += 1;
        }
        comp
    }

    pub fn is_connected(&self) -> bool {
        self.components().iter().all(|&c| c == 0)
    }

    /// Subgraph induced on `vertices`, relabelled to `0..vertices.len()` in the given order.
    /// Labels carry over.
    pub fn induced_subgraph(&self, vertices: &[usize]) -> Result<Graph> {
        let mut index = vec![usize::MAX; self.n];
        for (new, &old) in vertices.iter().enumerate() {
            index[old] = new;
        }
        let edges = self.edges.iter().filter(|&&(u, v, _w)| index[u] != usize::MAX && index[v] != usize::MAX).map(|&(u, v, w)| (index[u], index[v], w));
        let sub = Graph::from_edges(vertices.len(), edges)?;
        match &self.labels {
            Some(l) => sub.with_labels(vertices.iter().map(|&v| l[v]).collect()),
            None => Ok(sub),
        }
    }

    /// Largest connected component (ties go to the component holding the
    /// smaller vertex) and the original index of each of its vertices.
    pub fn largest_component(&self) -> Result<(Graph, Vec<usize>)> {
        let comp = self.components();
        let count = comp.iter().max().map_or(0, |&c| c + 1);
        let mut sizes = vec![0usize; count];
        for &c in &comp {
            sizes[c] += 1;
        }
        let mut best = 0;
        for (c, &s) in sizes.iter().enumerate() {
            if s > sizes[best] {
                best = c;
            }
        }
        let vertices: Vec<usize> = (0..self.n).filter(|&v| comp[v] == best).collect();
        let sub = self.induced_subgraph(&vertices)?;
        Ok((sub, vertices))
    }

    pub fn to_document(&self) -> GraphDocument {
        GraphDocument {
            n: self.n,
            edges: self.edges.clone(),
            labels: self.labels.clone(),
        }
    }

    pub fn from_document(doc: GraphDocument) -> Result<Self> {
        let g = Graph::from_edges(doc.n, doc.edges)?;
        match doc.labels {
            Some(l) => g.with_labels(l),
            None => Ok(g),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_document())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Graph::from_document(serde_json::from_str(text)?)
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Graph::from_json(&text)
    }
}

/// On-disk JSON shape of a [`Graph`]: `{n, edges: [[u, v, w], ...], labels?}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraphDocument {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<usize>>,
}

/// Points in `R^dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    labels: Option<Vec<usize>>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>, labels: Option<Vec<usize>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("dim", "must be positive"));
        }
        if coords.is_empty() || !coords.len().is_multiple_of(dim) {
            return Err(Error::param(
                "coordinates",
                format!("{} values do not form rows of dimension {dim}", coords.len()),
            ));
        }
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(Error::param("coordinates", "non-finite coordinate"));
        }
        let n = coords.len() / dim;
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(Error::param(
                    "labels",
                    format!("expected {n} labels, got {}", l.len()),
                ));
            }
        }
        Ok(PointCloud {
            dim,
            coords,
            labels,
        })
    }

    pub fn n(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// CSV with header `x0,..,x{dim-1}[,label]`, one row per point.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = (0..self.dim).map(|d| format!("x{d}")).collect();
        out.push_str(&header.join(","));
        if self.labels.is_some() {
            out.push_str(",label");
        }
        out.push('\n');
        for i in 0..self.n() {
            let row: Vec<String> = self.point(i).iter().map(|&x| format_real(x)).collect();
            out.push_str(&row.join(","));
            if let Some(l) = &self.labels {
                out.push_str(&format!(",{}", l[i]));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str, path: &Path) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::Parse {
            path: path.into(),
            line: 1,
            reason: "empty point cloud file".into(),
        })?;
        let columns: Vec<&str> = header.split(',').map(str::trim).collect();
        let has_label = columns.last() == Some(&"label");
        let dim = columns.len() - usize::from(has_label);
        let mut coords = Vec::new();
        let mut labels = Vec::new();
        for (idx, line) in lines {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let bad = |reason: String| Error::Parse {
                path: path.into(),
                line: idx + 1,
                reason,
            };
            if fields.len() != columns.len() {
                return Err(bad(format!(
                    "expected {} fields, found {}",
                    columns.len(),
                    fields.len()
                )));
            }
            for f in &fields[..dim] {
                coords.push(f.parse::<f64>().map_err(|e| bad(format!("`{f}`: {e}")))?);
            }
            if has_label {
                let f = fields[dim];
                labels.push(f.parse::<usize>().map_err(|e| bad(format!("`{f}`: {e}")))?);
            }
        }
        PointCloud::new(dim, coords, has_label.then_some(labels))
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        PointCloud::from_csv(&text, path)
    }
}

/// Non-negative placement cost per vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CostVector(Vec<f64>);

impl CostVector {
    pub fn new(costs: Vec<f64>) -> Result<Self> {
        if let Some((i, c)) = costs
            .iter()
            .enumerate()
            .find(|(_, c)| !(c.is_finite() && **c >= 0.0))
        {
            return Err(Error::param(
                "costs",
                format!("cost of vertex {i} is {c}; costs must be finite and non-negative"),
            ));
        }
        Ok(CostVector(costs))
    }

    pub fn zeros(n: usize) -> Self {
        CostVector(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn total(&self) -> f64 {
        self.0.iter().sum()
    }

    /// Total cost of a vertex set; each vertex counted once.
    pub fn cost_of(&self, vertices: &[usize]) -> f64 {
        let mut seen: Vec<usize> = vertices.to_vec();
        seen.sort_unstable();
        seen.dedup();
        seen.iter().map(|&v| self.0[v]).sum()
    }

    /// Scales every cost by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        CostVector::new(self.0.iter().map(|c| c * factor).collect())
    }

    /// Reads whitespace-separated costs, one vertex after another.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut costs = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            for tok in line.split_whitespace() {
                costs.push(tok.parse::<f64>().map_err(|e| Error::Parse {
                    path: path.into(),
                    line: idx + 1,
                    reason: format!("`{tok}`: {e}"),
                })?);
            }
        }
        CostVector::new(costs)
    }

    pub fn to_text(&self) -> String {
        self.0.iter().map(|&c| format_real(c) + "\n").collect()
    }
}

impl std::ops::Index<usize> for CostVector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// Locale-free real formatting with 17 significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}
