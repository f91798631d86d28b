//! Experiment harnesses: indicator means on clustered data, shortest-path
//! averages on synthetic and real graphs, and walk-power sweeps.
//!
//! Every harness is a pure function of its configuration. Wall-clock runtimes
//! are recorded only when asked for, so default outputs are reproducible.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::{
    avg_shortest_path_estimate, average_distance_function, error_metric, ExperimentResult,
    VertexWeights,
};
use crate::baselines::{
    betweenness_centrality, kmeans_coreset, random_sampling, spectral_clustering_from_spectrum,
    BaselineCoreset,
};
use crate::error::{Error, Result};
use crate::graph::{
    build_knn_kernel_graph, format_real, generate_gaussian_mixture, generate_powerlaw_tree,
    generate_random_graph, generate_sbm, load_edge_list, sample_costs_uniform, CostVector, Graph,
};
use crate::scgiga::{beta_star, distance_to_uniform, Coreset, GreedySelector, SelectionConfig};
use crate::spectral::{
    lazy_walk_matrix, leading_spectrum, normalized_columns, GraphFunction, NormalizedColumns,
};

/// Independent seed for stream `stream` of trial `trial`.
pub fn derive_seed(base: u64, trial: u64, stream: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = base
        .wrapping_add(trial.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const GRAPH_STREAM: u64 = 1;
const COST_STREAM: u64 = 2;
const BASELINE_STREAM: u64 = 3;

/// Per-iteration invariant measurements of a selection run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantReport {
    pub iterations: usize,
    /// Largest `J_{k+1} - J_k`; non-positive when the residual never grows.
    pub max_residual_increase: f64,
    /// Largest `|J/n - ||beta* P(w) - P*||^2|`, with `P(w)` rebuilt from the coefficients.
    pub max_identity_gap: f64,
    /// Largest `| ||P(w)|| - 1 |`.
    pub max_sphere_error: f64,
    /// Iterations whose chosen vertex fell outside the slack set.
    pub slack_violations: usize,
    pub max_support: usize,
}

impl Default for InvariantReport {
    fn default() -> Self {
        InvariantReport {
            iterations: 0,
            max_residual_increase: f64::NEG_INFINITY,
            max_identity_gap: 0.0,
            max_sphere_error: 0.0,
            slack_violations: 0,
            max_support: 0,
        }
    }
}

impl InvariantReport {
    pub fn merge(&mut self, other: &InvariantReport) {
        self.iterations += other.iterations;
        self.max_residual_increase = self.max_residual_increase.max(other.max_residual_increase);
        self.max_identity_gap = self.max_identity_gap.max(other.max_identity_gap);
        self.max_sphere_error = self.max_sphere_error.max(other.max_sphere_error);
        self.slack_violations += other.slack_violations;
        self.max_support = self.max_support.max(other.max_support);
    }
}

/// A selection run with snapshots after selected iteration counts.
#[derive(Debug, Clone)]
pub struct SelectionRun {
    /// `(iterations, coreset)` for each requested checkpoint.
    pub snapshots: Vec<(usize, Coreset)>,
    pub invariants: InvariantReport,
}

/// Runs the selector up to the largest checkpoint, recording a coreset at each
/// checkpoint and checking the residual invariants after every iteration.
///
/// Because support can only reach the budget on the last iteration, the
/// snapshot after `k` iterations equals a standalone run with budget `k`.
pub fn run_selection(
    columns: &NormalizedColumns,
    costs: &CostVector,
    kappa: f64,
    checkpoints: &[usize],
) -> Result<SelectionRun> {
    let mut checkpoints = checkpoints.to_vec();
    checkpoints.sort_unstable();
    checkpoints.dedup();
    let last = *checkpoints
        .last()
        .ok_or_else(|| Error::param("k_grid", "no budgets given"))?;
    let config = SelectionConfig::new(last, kappa, columns.ell());
    let mut selector = GreedySelector::new(columns, costs, config)?;
    let n = columns.n();
    let sqrt_n = (n as f64).sqrt();
    let mut report = InvariantReport::default();
    let mut snapshots = Vec::with_capacity(checkpoints.len());
    let mut next = 0;
    let mut previous_j = selector.residual();
    while next < checkpoints.len() {
        let Some(record) = selector.step() else {
            break;
        };
        let (j, alignment, threshold) = (
            record.j,
            record.alignment,
            kappa * record.best_alignment,
        );
        report.iterations += 1;
        report.max_residual_increase = report.max_residual_increase.max(j - previous_j);
        previous_j = j;
        if alignment < threshold {
            report.slack_violations += 1;
        }

        let (indices, coefficients) = selector.support();
        report.max_support = report.max_support.max(indices.len());
        let pw = columns.combine(&indices, &coefficients);
        let norm = pw.iter().map(|x| x * x).sum::<f64>().sqrt();
        report.max_sphere_error = report.max_sphere_error.max((norm - 1.0).abs());
        let align = pw.iter().sum::<f64>() / sqrt_n / norm;
        let beta = beta_star(norm, align, n);
        let scaled: Vec<f64> = pw.iter().map(|x| beta * x).collect();
        let residual_sq = distance_to_uniform(&scaled).powi(2);
        report.max_identity_gap = report.max_identity_gap.max((j / n as f64 - residual_sq).abs());

        while next < checkpoints.len() && checkpoints[next] == selector.iteration() {
            snapshots.push((checkpoints[next], selector.snapshot()));
            next += 1;
        }
    }
    // early stop: remaining budgets share the final coreset
    let final_coreset = selector.finish();
    while next < checkpoints.len() {
        snapshots.push((checkpoints[next], final_coreset.clone()));
        next += 1;
    }
    Ok(SelectionRun {
        snapshots,
        invariants: report,
    })
}

/// One `(method, K, seed)` evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Trial {
    pub method: String,
    pub k: usize,
    pub seed: u64,
    pub estimate: f64,
    pub truth: f64,
    pub abs_err: f64,
    pub cost: f64,
    pub runtime_ms: f64,
    /// Single-source shortest path runs behind the estimate, where relevant.
    pub dijkstra_runs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostReportRow {
    pub k: usize,
    pub seed: u64,
    pub c_cos: f64,
    pub c_cso: f64,
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub name: String,
    pub trials: Vec<Trial>,
    pub summary: Vec<ExperimentResult>,
    pub cost_reports: Vec<CostReportRow>,
    pub invariants: InvariantReport,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let m = values.len();
    if m == 0 {
        return f64::NAN;
    }
    if m % 2 == 1 {
        values[m / 2]
    } else {
        0.5 * (values[m / 2 - 1] + values[m / 2])
    }
}

/// Median over seeds per `(method, K)`, methods in first-seen order.
pub fn summarize(trials: &[Trial]) -> Vec<ExperimentResult> {
    let mut methods: Vec<&str> = Vec::new();
    let mut groups: BTreeMap<(usize, usize), Vec<&Trial>> = BTreeMap::new();
    for t in trials {
        let m = match methods.iter().position(|&x| x == t.method) {
            Some(m) => m,
            None => {
                methods.push(&t.method);
                methods.len() - 1
            }
        };
        groups.entry((m, t.k)).or_default().push(t);
    }
    groups
        .into_iter()
        .map(|((m, k), ts)| {
            let abs_err = median(&mut ts.iter().map(|t| t.abs_err).collect::<Vec<_>>());
            ExperimentResult {
                method: methods[m].to_string(),
                k,
                err: abs_err * abs_err,
                abs_err,
                coreset_cost: median(&mut ts.iter().map(|t| t.cost).collect::<Vec<_>>()),
                bound_rhs: None,
                runtime_ms: median(&mut ts.iter().map(|t| t.runtime_ms).collect::<Vec<_>>()),
            }
        })
        .collect()
}

impl ExperimentReport {
    fn new(name: &str, trials: Vec<Trial>, cost_reports: Vec<CostReportRow>, invariants: InvariantReport) -> Self {
        ExperimentReport {
            name: name.to_string(),
            summary: summarize(&trials),
            trials,
            cost_reports,
            invariants,
        }
    }

    /// Median result for `(method, K)`.
    pub fn result(&self, method: &str, k: usize) -> Option<&ExperimentResult> {
        self.summary.iter().find(|r| r.method == method && r.k == k)
    }

    pub fn methods(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for r in &self.summary {
            if !out.contains(&r.method) {
                out.push(r.method.clone());
            }
        }
        out
    }

    pub fn trials_csv(&self) -> String {
        let mut out = String::from("method,K,seed,estimate,truth,abs_err,cost,runtime_ms,dijkstra_runs\n");
        for t in &self.trials {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                t.method,
                t.k,
                t.seed,
                format_real(t.estimate),
                format_real(t.truth),
                format_real(t.abs_err),
                format_real(t.cost),
                format_real(t.runtime_ms),
                t.dijkstra_runs.map(|d| d.to_string()).unwrap_or_default()
            );
        }
        out
    }

    pub fn cost_report_csv(&self) -> String {
        let mut out = String::from("K,seed,C_COS,C_CSO\n");
        for r in &self.cost_reports {
            let _ = writeln!(out, "{},{},{},{}", r.k, r.seed, format_real(r.c_cos), format_real(r.c_cso));
        }
        out
    }
}

struct Clock {
    enabled: bool,
    start: Instant,
}

impl Clock {
    fn start(enabled: bool) -> Self {
        Clock {
            enabled,
            start: Instant::now(),
        }
    }

    fn ms(&self) -> f64 {
        if self.enabled {
            self.start.elapsed().as_secs_f64() * 1e3
        } else {
            0.0
        }
    }
}

fn indicator(labels: &[usize], label: usize) -> GraphFunction {
    GraphFunction::from_values(labels.iter().map(|&l| f64::from(u8::from(l == label))).collect())
}

fn mean_trial<C: VertexWeights>(
    method: &str,
    k: usize,
    seed: u64,
    f: &GraphFunction,
    coreset: &C,
    costs: &CostVector,
    runtime_ms: f64,
) -> Trial {
    let m = error_metric(f, coreset);
    Trial {
        method: method.to_string(),
        k,
        seed,
        estimate: m.estimate,
        truth: m.truth,
        abs_err: m.abs_err,
        cost: costs.cost_of(coreset.vertices()),
        runtime_ms,
        dijkstra_runs: None,
    }
}

/// SCGIGA trials (cost-oblivious and, when `kappa < 1`, cost-aware) over a K grid.
#[allow(clippy::too_many_arguments)]
fn scgiga_trials(
    columns: &NormalizedColumns,
    costs: &CostVector,
    kappa: f64,
    k_grid: &[usize],
    seed: u64,
    timing: bool,
    method_prefix: &str,
    mut evaluate: impl FnMut(&str, usize, &Coreset, f64) -> Result<Trial>,
    trials: &mut Vec<Trial>,
    cost_reports: &mut Vec<CostReportRow>,
    invariants: &mut InvariantReport,
) -> Result<()> {
    let mut kappas = vec![(method_prefix.to_string(), 1.0)];
    if kappa < 1.0 {
        kappas.push((format!("{method_prefix}-cost"), kappa));
    }
    let mut runs = Vec::new();
    for (name, kap) in &kappas {
        let clock = Clock::start(timing);
        let run = run_selection(columns, costs, *kap, k_grid)?;
        let ms = clock.ms();
        invariants.merge(&run.invariants);
        for (k, cs) in &run.snapshots {
            trials.push(evaluate(name, *k, cs, ms)?);
        }
        runs.push(run);
    }
    if runs.len() == 2 {
        for ((k, free), (_, costed)) in runs[0].snapshots.iter().zip(&runs[1].snapshots) {
            cost_reports.push(CostReportRow {
                k: *k,
                seed,
                c_cos: costs.cost_of(&free.indices),
                c_cso: costs.cost_of(&costed.indices),
            });
        }
    }
    Ok(())
}

fn default_k_grid_cluster() -> Vec<usize> {
    vec![2, 4, 6, 8, 10, 12, 14]
}

/// Indicator of the smallest Gaussian component, estimated on a kNN kernel graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterIndicatorConfig {
    pub n: usize,
    pub means: Vec<Vec<f64>>,
    pub fractions: Vec<f64>,
    pub covariance_scale: f64,
    pub knn: usize,
    pub bandwidth: f64,
    pub k_grid: Vec<usize>,
    pub kappa: f64,
    pub ell: usize,
    pub seeds: u64,
    pub base_seed: u64,
    pub indicator_label: usize,
    /// Include the k-means and spectral clustering baselines.
    pub clustering_baselines: bool,
}

impl Default for ClusterIndicatorConfig {
    fn default() -> Self {
        ClusterIndicatorConfig {
            n: 10_000,
            means: vec![vec![1.0, -3.0], vec![-3.0, 2.0], vec![3.0, 0.0]],
            fractions: vec![0.2, 0.3, 0.5],
            covariance_scale: 1.0,
            knn: 10,
            bandwidth: 1.0,
            k_grid: default_k_grid_cluster(),
            kappa: 0.8,
            ell: 16,
            seeds: 10,
            base_seed: 0,
            indicator_label: 0,
            clustering_baselines: true,
        }
    }
}

pub fn run_cluster_indicator(cfg: &ClusterIndicatorConfig, timing: bool) -> Result<ExperimentReport> {
    let mut trials = Vec::new();
    let mut cost_reports = Vec::new();
    let mut invariants = InvariantReport::default();
    for s in 0..cfg.seeds {
        let seed = derive_seed(cfg.base_seed, s, GRAPH_STREAM);
        let cloud = generate_gaussian_mixture(&cfg.means, &cfg.fractions, cfg.covariance_scale, cfg.n, seed)?;
        let labels = cloud.labels().expect("mixture is labelled").to_vec();
        let f = indicator(&labels, cfg.indicator_label);
        let graph = build_knn_kernel_graph(&cloud, cfg.knn, cfg.bandwidth)?;
        let costs = sample_costs_uniform(cfg.n, derive_seed(cfg.base_seed, s, COST_STREAM));
        let p = lazy_walk_matrix(&graph)?;
        let columns = normalized_columns(&p, cfg.ell)?;
        scgiga_trials(
            &columns,
            &costs,
            cfg.kappa,
            &cfg.k_grid,
            s,
            timing,
            "scgiga",
            |name, k, cs, ms| Ok(mean_trial(name, k, s, &f, cs, &costs, ms)),
            &mut trials,
            &mut cost_reports,
            &mut invariants,
        )?;
        let bseed = derive_seed(cfg.base_seed, s, BASELINE_STREAM);
        for &k in &cfg.k_grid {
            let clock = Clock::start(timing);
            let cs = random_sampling(cfg.n, k, bseed.wrapping_add(k as u64))?;
            trials.push(mean_trial("random", k, s, &f, &cs, &costs, clock.ms()));
        }
        if cfg.clustering_baselines {
            for &k in &cfg.k_grid {
                let clock = Clock::start(timing);
                let cs = kmeans_coreset(&cloud, k, bseed)?;
                trials.push(mean_trial("kmeans", k, s, &f, &cs, &costs, clock.ms()));
            }
            spectral_trials(&p, &cfg.k_grid, bseed, s, &f, &costs, timing, &mut trials)?;
        }
    }
    Ok(ExperimentReport::new("cluster-indicator", trials, cost_reports, invariants))
}

#[allow(clippy::too_many_arguments)]
fn spectral_trials(
    p: &crate::spectral::TransitionMatrix,
    k_grid: &[usize],
    bseed: u64,
    s: u64,
    f: &GraphFunction,
    costs: &CostVector,
    timing: bool,
    trials: &mut Vec<Trial>,
) -> Result<()> {
    let kmax = k_grid.iter().copied().max().unwrap_or(1);
    let clock = Clock::start(timing);
    let spectrum = leading_spectrum(p, kmax, bseed)?;
    let decomposition_ms = clock.ms();
    for &k in k_grid {
        let clock = Clock::start(timing);
        let cs = spectral_clustering_from_spectrum(&spectrum, k, bseed)?;
        trials.push(mean_trial("spectral", k, s, f, &cs, costs, decomposition_ms + clock.ms()));
    }
    Ok(())
}

/// Indicator of the smallest planted block of a stochastic block model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SbmIndicatorConfig {
    pub n: usize,
    /// Block shares of `n`; the last block takes the rounding remainder.
    pub block_fractions: Vec<f64>,
    pub p_in: f64,
    pub p_out: f64,
    pub k_grid: Vec<usize>,
    pub kappa: f64,
    pub ell: usize,
    pub seeds: u64,
    pub base_seed: u64,
    pub indicator_label: usize,
    pub spectral_baseline: bool,
}

impl Default for SbmIndicatorConfig {
    fn default() -> Self {
        SbmIndicatorConfig {
            n: 1000,
            block_fractions: vec![0.1, 0.5, 0.4],
            p_in: 0.1,
            p_out: 0.01,
            k_grid: vec![4, 8, 12, 16, 20, 24, 28],
            kappa: 0.8,
            ell: 16,
            seeds: 10,
            base_seed: 0,
            indicator_label: 0,
            spectral_baseline: true,
        }
    }
}

/// Block sizes from shares: floor for all but the last block.
pub fn block_sizes(n: usize, fractions: &[f64]) -> Result<Vec<usize>> {
    if fractions.is_empty() {
        return Err(Error::param("block_fractions", "no blocks"));
    }
    let last = fractions.len() - 1;
    let mut sizes: Vec<usize> = fractions[..last]
        .iter()
        .map(|&f| (f * n as f64 + 1e-9).floor() as usize)
        .collect();
    let assigned: usize = sizes.iter().sum();
    if assigned >= n {
        return Err(Error::param("block_fractions", "shares leave the last block empty"));
    }
    sizes.push(n - assigned);
    Ok(sizes)
}

pub fn run_sbm_indicator(cfg: &SbmIndicatorConfig, timing: bool) -> Result<ExperimentReport> {
    sbm_indicator(cfg, &[cfg.ell], timing, "sbm-indicator")
}

fn sbm_indicator(cfg: &SbmIndicatorConfig, ells: &[usize], timing: bool, name: &str) -> Result<ExperimentReport> {
    let sizes = block_sizes(cfg.n, &cfg.block_fractions)?;
    let sweep = name == "ell-sweep";
    let mut trials = Vec::new();
    let mut cost_reports = Vec::new();
    let mut invariants = InvariantReport::default();
    for s in 0..cfg.seeds {
        let graph = generate_sbm(&sizes, cfg.p_in, cfg.p_out, derive_seed(cfg.base_seed, s, GRAPH_STREAM))?;
        let labels = graph.labels().expect("sbm is labelled").to_vec();
        let f = indicator(&labels, cfg.indicator_label);
        let costs = sample_costs_uniform(cfg.n, derive_seed(cfg.base_seed, s, COST_STREAM));
        let p = lazy_walk_matrix(&graph)?;
        for &ell in ells {
            let columns = normalized_columns(&p, ell)?;
            let prefix = if sweep { format!("scgiga-ell{ell}") } else { "scgiga".to_string() };
            let kappa = if sweep { 1.0 } else { cfg.kappa };
            scgiga_trials(
                &columns,
                &costs,
                kappa,
                &cfg.k_grid,
                s,
                timing,
                &prefix,
                |name, k, cs, ms| Ok(mean_trial(name, k, s, &f, cs, &costs, ms)),
                &mut trials,
                &mut cost_reports,
                &mut invariants,
            )?;
        }
        let bseed = derive_seed(cfg.base_seed, s, BASELINE_STREAM);
        for &k in &cfg.k_grid {
            let clock = Clock::start(timing);
            let cs = random_sampling(cfg.n, k, bseed.wrapping_add(k as u64))?;
            trials.push(mean_trial("random", k, s, &f, &cs, &costs, clock.ms()));
        }
        if cfg.spectral_baseline && !sweep {
            spectral_trials(&p, &cfg.k_grid, bseed, s, &f, &costs, timing, &mut trials)?;
        }
    }
    Ok(ExperimentReport::new(name, trials, cost_reports, invariants))
}

/// Error of each walk power over the SBM indicator experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EllSweepConfig {
    pub sbm: SbmIndicatorConfig,
    pub ells: Vec<usize>,
}

impl Default for EllSweepConfig {
    fn default() -> Self {
        EllSweepConfig {
            sbm: SbmIndicatorConfig::default(),
            ells: vec![1, 2, 3, 4],
        }
    }
}

pub fn run_ell_sweep(cfg: &EllSweepConfig, timing: bool) -> Result<ExperimentReport> {
    if cfg.ells.is_empty() || cfg.ells.contains(&0) {
        return Err(Error::param("ells", "walk powers must be positive"));
    }
    sbm_indicator(&cfg.sbm, &cfg.ells, timing, "ell-sweep")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PathGraphModel {
    PowerlawTree,
    Random,
}

/// Average shortest-path length estimated from reference vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ShortestPathConfig {
    pub model: PathGraphModel,
    pub n: usize,
    pub exponent: f64,
    pub edge_probability: f64,
    pub k_grid: Vec<usize>,
    pub kappa: f64,
    pub ell: usize,
    pub seeds: u64,
    pub base_seed: u64,
}

impl Default for ShortestPathConfig {
    fn default() -> Self {
        ShortestPathConfig {
            model: PathGraphModel::PowerlawTree,
            n: 200,
            exponent: 3.0,
            edge_probability: 0.02,
            k_grid: vec![5, 10, 20],
            kappa: 0.8,
            ell: 16,
            seeds: 10,
            base_seed: 0,
        }
    }
}

/// Trials of every path method on one graph.
#[allow(clippy::too_many_arguments)]
fn shortest_path_trials(
    graph: &Graph,
    costs: &CostVector,
    k_grid: &[usize],
    kappa: f64,
    ell: usize,
    s: u64,
    bseed: u64,
    timing: bool,
    trials: &mut Vec<Trial>,
    cost_reports: &mut Vec<CostReportRow>,
    invariants: &mut InvariantReport,
) -> Result<()> {
    let n = graph.n();
    let truth = average_distance_function(graph)?.mean();
    let path_trial = |method: &str, k: usize, cs: &dyn VertexWeights, ms: f64| -> Result<Trial> {
        let clock = Clock::start(timing);
        let est = avg_shortest_path_estimate(graph, cs)?;
        Ok(Trial {
            method: method.to_string(),
            k,
            seed: s,
            estimate: est.value,
            truth,
            abs_err: (est.value - truth).abs(),
            cost: costs.cost_of(cs.vertices()),
            runtime_ms: ms + clock.ms(),
            dijkstra_runs: Some(est.dijkstra_runs),
        })
    };

    let columns = normalized_columns(&lazy_walk_matrix(graph)?, ell)?;
    scgiga_trials(
        &columns,
        costs,
        kappa,
        k_grid,
        s,
        timing,
        "scgiga",
        |name, k, cs, ms| path_trial(name, k, cs, ms),
        trials,
        cost_reports,
        invariants,
    )?;

    let clock = Clock::start(timing);
    let scores = betweenness_centrality(graph);
    let bc_ms = clock.ms();
    for &k in k_grid {
        let cs: BaselineCoreset = crate::baselines::top_by_score(&scores, k.min(n));
        trials.push(path_trial("betweenness", k, &cs, bc_ms)?);
    }
    for &k in k_grid {
        let cs = random_sampling(n, k.min(n), bseed.wrapping_add(k as u64))?;
        trials.push(path_trial("random", k, &cs, 0.0)?);
    }
    Ok(())
}

pub fn run_shortest_path(cfg: &ShortestPathConfig, timing: bool) -> Result<ExperimentReport> {
    let mut trials = Vec::new();
    let mut cost_reports = Vec::new();
    let mut invariants = InvariantReport::default();
    for s in 0..cfg.seeds {
        let gseed = derive_seed(cfg.base_seed, s, GRAPH_STREAM);
        let graph = match cfg.model {
            PathGraphModel::PowerlawTree => generate_powerlaw_tree(cfg.n, cfg.exponent, gseed)?,
            PathGraphModel::Random => generate_random_graph(cfg.n, cfg.edge_probability, gseed, 10)?,
        };
        let costs = sample_costs_uniform(graph.n(), derive_seed(cfg.base_seed, s, COST_STREAM));
        shortest_path_trials(
            &graph,
            &costs,
            &cfg.k_grid,
            cfg.kappa,
            cfg.ell,
            s,
            derive_seed(cfg.base_seed, s, BASELINE_STREAM),
            timing,
            &mut trials,
            &mut cost_reports,
            &mut invariants,
        )?;
    }
    Ok(ExperimentReport::new("shortest-path", trials, cost_reports, invariants))
}

/// Shortest-path averaging on a user-supplied edge list (e.g. an ego network).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EgoCentralityConfig {
    pub edge_list: PathBuf,
    pub weighted: bool,
    pub k_grid: Vec<usize>,
    pub kappa: f64,
    pub ell: usize,
    pub seeds: u64,
    pub base_seed: u64,
}

impl Default for EgoCentralityConfig {
    fn default() -> Self {
        EgoCentralityConfig {
            edge_list: PathBuf::from("facebook_combined.txt"),
            weighted: false,
            k_grid: vec![5, 10, 15, 20, 25, 30],
            kappa: 0.8,
            ell: 4,
            seeds: 1,
            base_seed: 0,
        }
    }
}

pub fn run_ego_centrality(cfg: &EgoCentralityConfig, timing: bool) -> Result<ExperimentReport> {
    if !cfg.edge_list.exists() {
        return Err(Error::io(
            &cfg.edge_list,
            std::io::Error::new(std::io::ErrorKind::NotFound, "edge list not found"),
        ));
    }
    let loaded = load_edge_list(&cfg.edge_list, cfg.weighted)?;
    let graph = if loaded.graph.is_connected() {
        loaded.graph
    } else {
        log::warn!("edge list is disconnected; using its largest component");
        loaded.graph.largest_component()?.0
    };
    let mut trials = Vec::new();
    let mut cost_reports = Vec::new();
    let mut invariants = InvariantReport::default();
    for s in 0..cfg.seeds {
        let costs = sample_costs_uniform(graph.n(), derive_seed(cfg.base_seed, s, COST_STREAM));
        shortest_path_trials(
            &graph,
            &costs,
            &cfg.k_grid,
            cfg.kappa,
            cfg.ell,
            s,
            derive_seed(cfg.base_seed, s, BASELINE_STREAM),
            timing,
            &mut trials,
            &mut cost_reports,
            &mut invariants,
        )?;
    }
    Ok(ExperimentReport::new("ego-centrality", trials, cost_reports, invariants))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn block_sizes_floor_rule() {
        assert_eq!(block_sizes(1000, &[0.1, 0.5, 0.4]).unwrap(), vec![100, 500, 400]);
        assert_eq!(block_sizes(10, &[0.33, 0.33, 0.34]).unwrap(), vec![3, 3, 4]);
        assert!(block_sizes(2, &[0.5, 0.5, 0.0]).is_err());
    }

    #[test]
    fn seeds_are_distinct_across_streams() {
        let a = derive_seed(0, 1, GRAPH_STREAM);
        let b = derive_seed(0, 1, COST_STREAM);
        let c = derive_seed(0, 2, GRAPH_STREAM);
        assert!(a != b && a != c && b != c);
    }

    #[test]
    fn checkpoints_match_standalone_runs() {
        let g = generate_sbm(&[15, 25], 0.4, 0.05, 4).unwrap();
        let cols = normalized_columns(&lazy_walk_matrix(&g).unwrap(), 2).unwrap();
        let costs = sample_costs_uniform(40, 1);
        let run = run_selection(&cols, &costs, 0.6, &[3, 6]).unwrap();
        for (k, cs) in &run.snapshots {
            let alone = crate::scgiga::select_coreset(&cols, &costs, &SelectionConfig::new(*k, 0.6, 2)).unwrap();
            assert_eq!(&alone.indices, &cs.indices);
            assert_eq!(&alone.weights, &cs.weights);
        }
        assert!(run.invariants.max_residual_increase <= 1e-12);
        assert!(run.invariants.max_identity_gap <= 1e-10);
        assert_eq!(run.invariants.slack_violations, 0);
    }
}
