//! Cost-aware greedy geodesic ascent.
//!
//! The selector keeps a unit-norm iterate `x = sum_i w_i u_i` over the
//! normalized columns `u_i` of `P^ell` and walks it along great circles toward
//! the target direction `t = 1/sqrt(n)`. Each iteration scores every vertex by
//! the alignment between the geodesic direction to the target and the
//! geodesic direction to its column, then picks the cheapest vertex whose
//! score is within a factor `kappa` of the best one.
//!
//! With `zeta1 = <t, x>`, `zeta0 = <t, u_v>` and `zeta2 = <u_v, x>` the
//! alignment of vertex `v` is
//! `(zeta0 - zeta1 zeta2) / (sqrt(1 - zeta1^2) sqrt(1 - zeta2^2))` and the
//! optimal step toward `u_v` is
//! `(zeta0 - zeta1 zeta2) / ((zeta0 - zeta1 zeta2) + (zeta1 - zeta0 zeta2))`.
//! The residual `J = 1 - zeta1^2` then obeys `J' = J (1 - alignment^2)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::CostVector;
use crate::spectral::NormalizedColumns;

/// Below this the step-size denominator is treated as zero.
const STEP_DENOMINATOR_EPS: f64 = 1e-14;
/// Alignments closer than this count as tied and go to the lower index.
const ALIGNMENT_TIE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    /// Maximum number of distinct selected vertices (K).
    pub budget: usize,
    /// Slack in `(0, 1]`; `1` ignores costs.
    pub kappa: f64,
    /// Walk power the columns were built with.
    pub ell: usize,
    /// Stop once `J` drops to this level.
    pub residual_tolerance: f64,
    /// Greedy iterations to run; defaults to `budget`. Once the support holds
    /// `budget` vertices further iterations only reweight it.
    pub max_iterations: Option<usize>,
}

impl SelectionConfig {
    pub fn new(budget: usize, kappa: f64, ell: usize) -> Self {
        SelectionConfig {
            budget,
            kappa,
            ell,
            residual_tolerance: 1e-12,
            max_iterations: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget == 0 {
            return Err(Error::param("k", "budget must be at least 1"));
        }
        if !(self.kappa > 0.0 && self.kappa <= 1.0) {
            return Err(Error::param(
                "kappa",
                format!("must lie in (0, 1], got {}", self.kappa),
            ));
        }
        if self.ell == 0 {
            return Err(Error::param("ell", "walk power must be at least 1"));
        }
        if !(self.residual_tolerance >= 0.0) {
            return Err(Error::param("tol", "residual tolerance must be non-negative"));
        }
        if self.max_iterations == Some(0) {
            return Err(Error::param("max_iterations", "must be at least 1"));
        }
        Ok(())
    }

    fn iterations(&self) -> usize {
        self.max_iterations.unwrap_or(self.budget)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionStatus {
    /// All requested iterations ran.
    BudgetReached,
    /// `J` reached the tolerance or the step became degenerate.
    Converged,
    /// No vertex offered a positive alignment; the coreset so far is returned.
    NoAscent,
}

/// One greedy iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    /// Vertex actually chosen (cheapest inside the slack set).
    pub vertex: usize,
    /// Its geodesic alignment.
    pub alignment: f64,
    /// Best-aligned vertex and its alignment.
    pub best_vertex: usize,
    pub best_alignment: f64,
    pub delta: f64,
    /// Residual after the update.
    #[serde(rename = "J")]
    pub j: f64,
    pub slack_set_size: usize,
}

/// A weighted vertex selection.
#[derive(Debug, Clone, PartialEq)]
pub struct Coreset {
    pub n: usize,
    pub ell: usize,
    pub kappa: f64,
    /// Selected vertices in order of first selection.
    pub indices: Vec<usize>,
    /// Unit-sphere coefficients aligned with `indices`.
    pub coefficients: Vec<f64>,
    pub beta: f64,
    /// Estimator weights `beta * w_i / ||P^ell e_i||` aligned with `indices`.
    pub weights: Vec<f64>,
    pub total_cost: f64,
    pub trajectory: Vec<IterationRecord>,
    pub status: SelectionStatus,
    /// Final residual `J`.
    pub residual: f64,
}

#[derive(Serialize, Deserialize)]
struct CoresetDocument {
    indices: Vec<usize>,
    weights: Vec<f64>,
    beta: f64,
    total_cost: f64,
    trajectory: Vec<IterationRecord>,
    coefficients: Vec<f64>,
    n: usize,
    ell: usize,
    kappa: f64,
    status: SelectionStatus,
    residual: f64,
}

impl Coreset {
    pub fn to_json(&self) -> Result<String> {
        let doc = CoresetDocument {
            indices: self.indices.clone(),
            weights: self.weights.clone(),
            beta: self.beta,
            total_cost: self.total_cost,
            trajectory: self.trajectory.clone(),
            coefficients: self.coefficients.clone(),
            n: self.n,
            ell: self.ell,
            kappa: self.kappa,
            status: self.status,
            residual: self.residual,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let d: CoresetDocument = serde_json::from_str(text)?;
        if d.indices.len() != d.weights.len() || d.indices.len() != d.coefficients.len() {
            return Err(Error::param("coreset", "indices, weights and coefficients differ in length"));
        }
        Ok(Coreset {
            n: d.n,
            ell: d.ell,
            kappa: d.kappa,
            indices: d.indices,
            coefficients: d.coefficients,
            beta: d.beta,
            weights: d.weights,
            total_cost: d.total_cost,
            trajectory: d.trajectory,
            status: d.status,
            residual: d.residual,
        })
    }

    /// `sum_w a_w`; equals `1 - J` for the returned scale.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Scale minimizing `||beta P(w) - P*||`, with `||P*|| = 1/sqrt(n)`.
pub fn beta_star(p_w_norm: f64, alignment: f64, n: usize) -> f64 {
    debug_assert!(p_w_norm > 0.0);
    (1.0 / (n as f64).sqrt()) / p_w_norm * alignment.max(0.0)
}

/// `J = 1 - <P(w), 1/sqrt(n)>^2` for a unit-norm combination of columns.
pub fn residual_j(indices: &[usize], coefficients: &[f64], columns: &NormalizedColumns) -> Result<f64> {
    let pw = columns.combine(indices, coefficients);
    let norm = pw.iter().map(|x| x * x).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::Numerical(format!("iterate has norm {norm}, expected 1")));
    }
    let align = pw.iter().sum::<f64>() / (columns.n() as f64).sqrt();
    Ok(1.0 - align * align)
}

/// `||v - (1/n) 1||`.
pub fn distance_to_uniform(v: &[f64]) -> f64 {
    let c = 1.0 / v.len() as f64;
    v.iter().map(|x| (x - c) * (x - c)).sum::<f64>().sqrt()
}

/// Penalty weight on cost that keeps the optimum within `kappa` of the
/// cost-free alignment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostTradeoff {
    pub lambda: f64,
    /// Sum of the `k` largest costs.
    pub top_k_cost: f64,
    /// False when every cost is zero and any penalty is admissible.
    pub bounded: bool,
}

pub fn cost_tradeoff_lambda(
    costs: &CostVector,
    k: usize,
    kappa: f64,
    min_column_norm: f64,
    n: usize,
) -> Result<CostTradeoff> {
    if k == 0 || k > costs.len() {
        return Err(Error::param("k", format!("need 1 <= k <= {}, got {k}", costs.len())));
    }
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::param("kappa", "must lie in (0, 1]"));
    }
    if !(min_column_norm > 0.0) {
        return Err(Error::param("min_column_norm", "must be positive"));
    }
    let mut sorted = costs.as_slice().to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let top_k_cost: f64 = sorted[..k].iter().sum();
    if kappa == 1.0 {
        return Ok(CostTradeoff {
            lambda: 0.0,
            top_k_cost,
            bounded: true,
        });
    }
    if top_k_cost == 0.0 {
        return Ok(CostTradeoff {
            lambda: f64::INFINITY,
            top_k_cost,
            bounded: false,
        });
    }
    Ok(CostTradeoff {
        lambda: (1.0 - kappa) / (top_k_cost * min_column_norm * (n as f64).sqrt()),
        top_k_cost,
        bounded: true,
    })
}

/// Step-by-step driver; [`select_coreset`] runs it to completion.
pub struct GreedySelector<'a> {
    columns: &'a NormalizedColumns,
    costs: &'a CostVector,
    config: SelectionConfig,
    iterate: Vec<f64>,
    coefficients: Vec<f64>,
    support: Vec<usize>,
    alignment: f64,
    residual: f64,
    k: usize,
    status: Option<SelectionStatus>,
    trajectory: Vec<IterationRecord>,
}

struct Candidate {
    alignment: f64,
    overlap: f64,
}

impl<'a> GreedySelector<'a> {
    pub fn new(
        columns: &'a NormalizedColumns,
        costs: &'a CostVector,
        config: SelectionConfig,
    ) -> Result<Self> {
        config.validate()?;
        let n = columns.n();
        if n == 0 {
            return Err(Error::param("n", "no vertices"));
        }
        if costs.len() != n {
            return Err(Error::param(
                "costs",
                format!("{} costs for {n} vertices", costs.len()),
            ));
        }
        if config.ell != columns.ell() {
            return Err(Error::param(
                "ell",
                format!("config ell {} but columns built with {}", config.ell, columns.ell()),
            ));
        }
        Ok(GreedySelector {
            columns,
            costs,
            config,
            iterate: vec![0.0; n],
            coefficients: vec![0.0; n],
            support: Vec::new(),
            alignment: 0.0,
            residual: 1.0,
            k: 0,
            status: None,
            trajectory: Vec::new(),
        })
    }

    pub fn iteration(&self) -> usize {
        self.k
    }

    /// Current residual `J` (1 before the first step).
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Current unit iterate `P(w)`.
    pub fn iterate(&self) -> &[f64] {
        &self.iterate
    }

    /// Current support and its unit-sphere coefficients.
    pub fn support(&self) -> (Vec<usize>, Vec<f64>) {
        let c = self.support.iter().map(|&v| self.coefficients[v]).collect();
        (self.support.clone(), c)
    }

    pub fn status(&self) -> Option<SelectionStatus> {
        self.status
    }

    fn score(&self, v: usize) -> Candidate {
        let zeta0 = self.columns.target_alignment(v);
        let zeta1 = self.alignment;
        let zeta2 = if self.k == 0 {
            0.0
        } else {
            self.columns.dot(v, &self.iterate)
        };
        let d_target = (1.0 - zeta1 * zeta1).max(0.0).sqrt();
        let d_vertex = (1.0 - zeta2 * zeta2).max(0.0).sqrt();
        let denom = d_target * d_vertex;
        let alignment = if denom > 0.0 {
            (zeta0 - zeta1 * zeta2) / denom
        } else {
            // column parallel to the iterate: no geodesic direction
            f64::NEG_INFINITY
        };
        Candidate {
            alignment,
            overlap: zeta2,
        }
    }

    /// Runs one iteration. Returns `None` once selection has stopped.
    pub fn step(&mut self) -> Option<&IterationRecord> {
        if self.status.is_some() {
            return None;
        }
        if self.k >= self.config.iterations() {
            self.status = Some(SelectionStatus::BudgetReached);
            return None;
        }
        if self.k > 0 && self.residual <= self.config.residual_tolerance {
            self.status = Some(SelectionStatus::Converged);
            return None;
        }

        let n = self.columns.n();
        let full = self.support.len() >= self.config.budget;
        let candidates: Vec<usize> = if full {
            let mut s = self.support.clone();
            s.sort_unstable();
            s
        } else {
            (0..n).collect()
        };
        let scores: Vec<Candidate> = candidates.par_iter().map(|&v| self.score(v)).collect();

        let mut best = 0;
        for (pos, c) in scores.iter().enumerate() {
            if c.alignment > scores[best].alignment + ALIGNMENT_TIE {
                best = pos;
            }
        }
        let best_alignment = scores[best].alignment;
        if !(best_alignment > 0.0) {
            self.status = Some(SelectionStatus::NoAscent);
            return None;
        }

        let threshold = self.config.kappa * best_alignment;
        let slack: Vec<usize> = (0..scores.len())
            .filter(|&pos| scores[pos].alignment >= threshold)
            .collect();
        let chosen = if self.config.kappa >= 1.0 {
            best
        } else {
            let mut pick = best;
            for &pos in &slack {
                let (c, cp) = (self.costs[candidates[pos]], self.costs[candidates[pick]]);
                if c < cp || (c == cp && candidates[pos] < candidates[pick]) {
                    pick = pos;
                }
            }
            pick
        };
        let vertex = candidates[chosen];
        debug_assert!(scores[chosen].alignment >= threshold);

        let zeta0 = self.columns.target_alignment(vertex);
        let zeta1 = self.alignment;
        let zeta2 = scores[chosen].overlap;
        let numer = zeta0 - zeta1 * zeta2;
        let denom = numer + (zeta1 - zeta0 * zeta2);
        if denom.abs() < STEP_DENOMINATOR_EPS {
            self.status = Some(SelectionStatus::Converged);
            return None;
        }
        let delta = (numer / denom.abs()).clamp(0.0, 1.0);

        for x in self.iterate.iter_mut() {
            *x *= 1.0 - delta;
        }
        self.columns.add_scaled(vertex, delta, &mut self.iterate);
        let norm = self.iterate.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            self.status = Some(SelectionStatus::Converged);
            return None;
        }
        for x in self.iterate.iter_mut() {
            *x /= norm;
        }
        for &v in &self.support {
            self.coefficients[v] *= (1.0 - delta) / norm;
        }
        if !self.support.contains(&vertex) {
            self.support.push(vertex);
        }
        self.coefficients[vertex] += delta / norm;
        let coefficients = &self.coefficients;
        self.support.retain(|&v| coefficients[v] > 0.0);

        self.alignment = self.iterate.iter().sum::<f64>() / (n as f64).sqrt();
        self.residual = (1.0 - self.alignment * self.alignment).max(0.0);
        self.trajectory.push(IterationRecord {
            k: self.k,
            vertex,
            alignment: scores[chosen].alignment,
            best_vertex: candidates[best],
            best_alignment,
            delta,
            j: self.residual,
            slack_set_size: slack.len(),
        });
        self.k += 1;
        self.trajectory.last()
    }

    /// The coreset defined by the current iterate, scaled by `beta*`.
    pub fn snapshot(&self) -> Coreset {
        let n = self.columns.n();
        let (indices, coefficients) = self.support();
        let (beta, weights) = if indices.is_empty() {
            (0.0, Vec::new())
        } else {
            let norm = self.iterate.iter().map(|x| x * x).sum::<f64>().sqrt();
            let beta = beta_star(norm, self.alignment / norm, n);
            let weights = indices
                .iter()
                .zip(&coefficients)
                .map(|(&v, &c)| beta * c / self.columns.norm(v))
                .collect();
            (beta, weights)
        };
        Coreset {
            n,
            ell: self.columns.ell(),
            kappa: self.config.kappa,
            total_cost: self.costs.cost_of(&indices),
            indices,
            coefficients,
            beta,
            weights,
            trajectory: self.trajectory.clone(),
            status: self.status.unwrap_or(SelectionStatus::BudgetReached),
            residual: self.residual,
        }
    }

    pub fn finish(mut self) -> Coreset {
        while self.step().is_some() {}
        self.snapshot()
    }
}

/// Runs the cost-aware greedy selection to completion.
pub fn select_coreset(
    columns: &NormalizedColumns,
    costs: &CostVector,
    config: &SelectionConfig,
) -> Result<Coreset> {
    Ok(GreedySelector::new(columns, costs, config.clone())?.finish())
}
