//! Seeded synthetic generators. Every generator is a pure function of its
//! parameters and seed.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{CostVector, Graph, PointCloud};
use crate::error::{Error, Result};

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Isotropic Gaussian mixture with covariance `covariance_scale * I`.
///
/// Component `c` receives `floor(fraction_c * n)` points except the last,
/// which takes the remainder. Labels record the component of each point.
pub fn generate_gaussian_mixture(
    component_means: &[Vec<f64>],
    component_fractions: &[f64],
    covariance_scale: f64,
    n: usize,
    seed: u64,
) -> Result<PointCloud> {
    if component_means.is_empty() {
        return Err(Error::param("means", "at least one component required"));
    }
    if component_means.len() != component_fractions.len() {
        return Err(Error::param(
            "fractions",
            format!(
                "{} fractions for {} means",
                component_fractions.len(),
                component_means.len()
            ),
        ));
    }
    let dim = component_means[0].len();
    if dim == 0 || component_means.iter().any(|m| m.len() != dim) {
        return Err(Error::param("means", "means must share a positive dimension"));
    }
    if component_fractions.iter().any(|&f| !(f > 0.0)) {
        return Err(Error::param("fractions", "fractions must be positive"));
    }
    let total: f64 = component_fractions.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::param("fractions", format!("fractions sum to {total}, not 1")));
    }
    if !(covariance_scale > 0.0 && covariance_scale.is_finite()) {
        return Err(Error::param("covariance_scale", "must be positive"));
    }

    let last = component_fractions.len() - 1;
    let mut sizes: Vec<usize> = component_fractions[..last]
        .iter()
        .map(|&f| (f * n as f64 + 1e-9).floor() as usize)
        .collect();
    let assigned: usize = sizes.iter().sum();
    if assigned > n {
        return Err(Error::param("n", "too few points for the requested fractions"));
    }
    sizes.push(n - assigned);
    if let Some(c) = sizes.iter().position(|&s| s == 0) {
        return Err(Error::param(
            "n",
            format!("component {c} is empty after rounding with n = {n}"),
        ));
    }

    let mut rng = rng_from_seed(seed);
    let sd = covariance_scale.sqrt();
    let mut coords = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    for (c, (&size, mean)) in sizes.iter().zip(component_means).enumerate() {
        for _ in 0..size {
            for &m in mean {
                let z: f64 = StandardNormal.sample(&mut rng);
                coords.push(m + sd * z);
            }
            labels.push(c);
        }
    }
    PointCloud::new(dim, coords, Some(labels))
}

/// Stochastic block model with unit weights; vertices carry their block label.
pub fn generate_sbm(block_sizes: &[usize], p_in: f64, p_out: f64, seed: u64) -> Result<Graph> {
    if block_sizes.is_empty() || block_sizes.contains(&0) {
        return Err(Error::param("sizes", "block sizes must be positive"));
    }
    if !(0.0..=1.0).contains(&p_in) || !(0.0..=1.0).contains(&p_out) || p_out > p_in {
        return Err(Error::param(
            "p_in/p_out",
            format!("need 0 <= p_out <= p_in <= 1, got p_in = {p_in}, p_out = {p_out}"),
        ));
    }
    let labels: Vec<usize> = block_sizes
        .iter()
        .enumerate()
        .flat_map(|(b, &s)| std::iter::repeat_n(b, s))
        .collect();
    let n = labels.len();
    let mut rng = rng_from_seed(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let p = if labels[u] == labels[v] { p_in } else { p_out };
            if rng.random::<f64>() < p {
                edges.push((u, v, 1.0));
            }
        }
    }
    Graph::from_edges(n, edges)?.with_labels(labels)
}

/// Random tree grown by shifted-linear preferential attachment.
///
/// Each new vertex attaches to one existing vertex with probability
/// proportional to `degree + exponent - 3`, the shift for which the limiting
/// degree distribution decays as `degree^-exponent`. For `exponent <= 2` the
/// shifted weight is floored at a small positive value.
pub fn generate_powerlaw_tree(n: usize, exponent: f64, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::param("n", "a tree needs at least 2 vertices"));
    }
    if !(exponent > 0.0 && exponent.is_finite()) {
        return Err(Error::param("exponent", "must be positive"));
    }
    const FLOOR: f64 = 1e-3;
    let shift = exponent - 3.0;
    let attach = |d: usize| (d as f64 + shift).max(FLOOR);

    let mut rng = rng_from_seed(seed);
    let mut degree = vec![0usize; n];
    let mut edges = Vec::with_capacity(n - 1);
    edges.push((0, 1, 1.0));
    degree[0] = 1;
    degree[1] = 1;
    for v in 2..n {
        let total: f64 = degree[..v].iter().map(|&d| attach(d)).sum();
        let mut r = rng.random::<f64>() * total;
        let mut target = v - 1;
        for (u, &d) in degree[..v].iter().enumerate() {
            r -= attach(d);
            if r < 0.0 {
                target = u;
                break;
            }
        }
        edges.push((target, v, 1.0));
        degree[target] += 1;
        degree[v] = 1;
    }
    Graph::from_edges(n, edges)
}

/// Erdős–Rényi `G(n, p)` restricted to its largest connected component.
///
/// When the largest component is a single vertex the draw is repeated with a
/// fresh stream, up to `max_attempts` draws in total, then fails.
pub fn generate_random_graph(
    n: usize,
    edge_probability: f64,
    seed: u64,
    max_attempts: usize,
) -> Result<Graph> {
    if n < 2 {
        return Err(Error::param("n", "need at least 2 vertices"));
    }
    if !(0.0..=1.0).contains(&edge_probability) {
        return Err(Error::param("p", "edge probability must lie in [0, 1]"));
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..max_attempts.max(1) {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.random::<f64>() < edge_probability {
                    edges.push((u, v, 1.0));
                }
            }
        }
        if edges.is_empty() {
            continue;
        }
        let (lcc, _) = Graph::from_edges(n, edges)?.largest_component()?;
        return Ok(lcc);
    }
    Err(Error::InvalidGraph(format!(
        "G({n}, {edge_probability}) produced no edges in {} attempt(s); largest component is a single vertex",
        max_attempts.max(1)
    )))
}

/// I.i.d. uniform `[0, 1)` placement costs.
pub fn sample_costs_uniform(n: usize, seed: u64) -> CostVector {
    let mut rng = rng_from_seed(seed);
    CostVector((0..n).map(|_| rng.random::<f64>()).collect())
}

/// `k` distinct vertices out of `n`, in sampling order.
pub(crate) fn sample_distinct(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = rng_from_seed(seed);
    sample(&mut rng, n, k).into_vec()
}
