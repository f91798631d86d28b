//! Greedy geodesic coreset selection on graphs.
//!
//! Selects a small weighted set of vertices whose weighted function samples
//! approximate the vertex mean of any function that is smooth with respect to
//! the lazy random walk of the graph. Each vertex may carry a placement cost;
//! a slack parameter `kappa` lets the optimizer trade a bounded fraction of the
//! greedy alignment for cheaper vertices.
//!
//! Layout:
//! - [`graph`]: graphs, point clouds, costs, generators and edge-list I/O.
//! - [`spectral`]: lazy walk matrix, column geometry of its powers, eigenbasis.
//! - [`scgiga`]: the cost-aware greedy selector.
//! - [`baselines`]: random, k-means, spectral clustering and betweenness selections.
//! - [`eval`]: estimators, error metrics, bound checks and experiment harnesses.

pub mod baselines;
pub mod error;
pub mod eval;
pub mod graph;
pub mod scgiga;
pub mod spectral;

pub use error::{Error, Result};
pub use graph::{CostVector, Graph, PointCloud};
pub use scgiga::{select_coreset, Coreset, SelectionConfig};
pub use spectral::{lazy_walk_matrix, normalized_columns, NormalizedColumns, TransitionMatrix};
