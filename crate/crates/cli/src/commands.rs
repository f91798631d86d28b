use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use graphcoreset::baselines::{
    betweenness_coreset, kmeans_coreset, random_sampling, spectral_clustering_coreset, BaselineCoreset,
};
use graphcoreset::eval::experiment::{
    run_cluster_indicator, run_ego_centrality, run_ell_sweep, run_sbm_indicator, run_shortest_path,
    ClusterIndicatorConfig, EgoCentralityConfig, EllSweepConfig, ExperimentReport, SbmIndicatorConfig,
    ShortestPathConfig,
};
use graphcoreset::eval::{
    avg_shortest_path_estimate, avg_shortest_path_true, bound_check, error_metric, eta_diagnostic,
    results_to_csv, ExperimentResult, WeightedVertices,
};
use graphcoreset::graph::{
    build_knn_kernel_graph, generate_gaussian_mixture, generate_powerlaw_tree, generate_random_graph,
    generate_sbm, load_edge_list, sample_costs_uniform,
};
use graphcoreset::spectral::{eigendecomposition, synthesize_in_plambda, GraphFunction};
use graphcoreset::{
    lazy_walk_matrix, normalized_columns, select_coreset, CostVector, Error, Graph, PointCloud, SelectionConfig,
};
use serde::Serialize;

use crate::config::{load_section, resolve};
use crate::manifest::{self, manifest_path_for, Recorder};
use crate::{BaselineArgs, CliError, EvalArgs, ExperimentArgs, ExperimentName, GenerateArgs, Method, Model, ReplayArgs, SelectArgs};

fn parameters<T: Serialize>(args: &T) -> Result<serde_json::Value, CliError> {
    Ok(serde_json::to_value(args).map_err(Error::from)?)
}

fn missing(flag: &str, model: &str) -> CliError {
    CliError::Usage(format!("--{flag} is required for model {model}"))
}

fn parse_means(text: &str) -> Result<Vec<Vec<f64>>, CliError> {
    text.split(';')
        .map(|component| {
            component
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::Usage(format!("--means: `{}` is not a number", x.trim())))
                })
                .collect()
        })
        .collect()
}

fn load_graph(path: &Path, weighted: bool, rec: &mut Recorder) -> Result<Graph, CliError> {
    rec.input(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        Ok(Graph::load_json(path)?)
    } else {
        Ok(load_edge_list(path, weighted)?.graph)
    }
}

fn load_cloud(path: &Path, rec: &mut Recorder) -> Result<PointCloud, CliError> {
    rec.input(path)?;
    Ok(PointCloud::load_csv(path)?)
}

fn load_costs(
    file: Option<&Path>,
    uniform: Option<u64>,
    n: usize,
    rec: &mut Recorder,
) -> Result<Option<CostVector>, CliError> {
    let costs = match (file, uniform) {
        (Some(path), _) => {
            rec.input(path)?;
            CostVector::load(path)?
        }
        (None, Some(seed)) => sample_costs_uniform(n, seed),
        (None, None) => return Ok(None),
    };
    if costs.len() != n {
        return Err(CliError::Usage(format!("--costs: {} values for {n} vertices", costs.len())));
    }
    Ok(Some(costs))
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

pub fn generate(a: &GenerateArgs, args: Vec<String>) -> Result<(), CliError> {
    let mut rec = Recorder::new("generate", args);
    let text = match a.model {
        Model::Sbm => {
            let sizes = a.sizes.as_ref().ok_or_else(|| missing("sizes", "sbm"))?;
            let p_in = a.p_in.ok_or_else(|| missing("p-in", "sbm"))?;
            let p_out = a.p_out.ok_or_else(|| missing("p-out", "sbm"))?;
            generate_sbm(sizes, p_in, p_out, a.seed)?.to_json()?
        }
        Model::PowerlawTree => {
            let n = a.n.ok_or_else(|| missing("n", "powerlaw-tree"))?;
            generate_powerlaw_tree(n, a.exponent, a.seed)?.to_json()?
        }
        Model::Random => {
            let n = a.n.ok_or_else(|| missing("n", "random"))?;
            let p = a.p.ok_or_else(|| missing("p", "random"))?;
            generate_random_graph(n, p, a.seed, a.max_attempts)?.to_json()?
        }
        Model::GaussianMixture => {
            let means = parse_means(a.means.as_deref().ok_or_else(|| missing("means", "gaussian-mixture"))?)?;
            let fractions = a.fractions.as_ref().ok_or_else(|| missing("fractions", "gaussian-mixture"))?;
            let n = a.n.ok_or_else(|| missing("n", "gaussian-mixture"))?;
            generate_gaussian_mixture(&means, fractions, a.scale, n, a.seed)?.to_csv()
        }
        Model::KnnKernel => {
            let cloud = load_cloud(a.cloud.as_deref().ok_or_else(|| missing("cloud", "knn-kernel"))?, &mut rec)?;
            build_knn_kernel_graph(&cloud, a.knn, a.bandwidth)?.to_json()?
        }
    };
    rec.write(&a.output, &with_newline(text))?;
    rec.finish(&manifest_path_for(&a.output), parameters(a)?, a.seed)?;
    Ok(())
}

pub fn select(a: &SelectArgs, args: Vec<String>) -> Result<(), CliError> {
    let mut rec = Recorder::new("select", args);
    let mut config = SelectionConfig::new(a.k, a.kappa, a.ell);
    config.residual_tolerance = a.tol;
    config.max_iterations = a.max_iterations;
    config.validate()?;
    let graph = load_graph(&a.input.graph, a.input.weighted, &mut rec)?;
    let costs = load_costs(a.cost.costs.as_deref(), a.cost.uniform_costs, graph.n(), &mut rec)?
        .unwrap_or_else(|| CostVector::zeros(graph.n()));
    let columns = normalized_columns(&lazy_walk_matrix(&graph)?, a.ell)?;
    let coreset = select_coreset(&columns, &costs, &config)?;
    rec.write(&a.output, &with_newline(coreset.to_json()?))?;
    if let Some(path) = &a.norms_csv {
        rec.write(path, &columns.norms_csv())?;
    }
    rec.finish(&manifest_path_for(&a.output), parameters(a)?, a.cost.uniform_costs.unwrap_or(0))?;
    println!("selected    {} vertices ({:?})", coreset.indices.len(), coreset.status);
    println!("J           {:.6e}", coreset.residual);
    println!("total cost  {:.6}", coreset.total_cost);
    println!("eta         {:.6}", eta_diagnostic(&columns, a.kappa));
    Ok(())
}

pub fn baseline(a: &BaselineArgs, args: Vec<String>) -> Result<(), CliError> {
    let mut rec = Recorder::new("baseline", args);
    let graph = a.graph.as_deref().map(|p| load_graph(p, a.weighted, &mut rec)).transpose()?;
    let cloud = a.cloud.as_deref().map(|p| load_cloud(p, &mut rec)).transpose()?;
    let need_graph = |m: &str| {
        graph
            .as_ref()
            .ok_or_else(|| CliError::Usage(format!("--graph is required for method {m}")))
    };
    let coreset: BaselineCoreset = match a.method {
        Method::Random => {
            let n = match (&graph, &cloud) {
                (Some(g), _) => g.n(),
                (None, Some(c)) => c.n(),
                (None, None) => return Err(CliError::Usage("--graph or --cloud is required".into())),
            };
            random_sampling(n, a.k, a.seed)?
        }
        Method::Kmeans => {
            let cloud = cloud
                .as_ref()
                .ok_or_else(|| CliError::Usage("--cloud is required for method kmeans".into()))?;
            kmeans_coreset(cloud, a.k, a.seed)?
        }
        Method::Spectral => spectral_clustering_coreset(need_graph("spectral")?, a.k, a.seed)?,
        Method::Betweenness => betweenness_coreset(need_graph("betweenness")?, a.k)?,
    };
    let n = graph.as_ref().map(Graph::n).or(cloud.as_ref().map(PointCloud::n)).unwrap_or(0);
    let costs = load_costs(a.cost.costs.as_deref(), a.cost.uniform_costs, n, &mut rec)?;
    rec.write(&a.output, &with_newline(coreset.to_json(costs.as_ref())?))?;
    rec.finish(&manifest_path_for(&a.output), parameters(a)?, a.seed)?;
    println!("selected {} vertices by {}", coreset.indices.len(), coreset.method.name());
    Ok(())
}

fn run_named(a: &ExperimentArgs, rec: &mut Recorder) -> Result<(ExperimentReport, serde_json::Value, u64), CliError> {
    let name = a.name.key();
    let section = match &a.config {
        Some(path) => {
            rec.input(path)?;
            load_section(path, name)?
        }
        None => serde_json::Value::Object(Default::default()),
    };
    let o = &a.overrides;
    Ok(match a.name {
        ExperimentName::ClusterIndicator => {
            let c: ClusterIndicatorConfig = resolve(section, o, None)?;
            (run_cluster_indicator(&c, a.timing)?, parameters(&c)?, c.base_seed)
        }
        ExperimentName::SbmIndicator => {
            let c: SbmIndicatorConfig = resolve(section, o, None)?;
            (run_sbm_indicator(&c, a.timing)?, parameters(&c)?, c.base_seed)
        }
        ExperimentName::ShortestPath => {
            let c: ShortestPathConfig = resolve(section, o, None)?;
            (run_shortest_path(&c, a.timing)?, parameters(&c)?, c.base_seed)
        }
        ExperimentName::EgoCentrality => {
            let c: EgoCentralityConfig = resolve(section, o, None)?;
            rec.input(&c.edge_list)?;
            (run_ego_centrality(&c, a.timing)?, parameters(&c)?, c.base_seed)
        }
        ExperimentName::EllSweep => {
            let c: EllSweepConfig = resolve(section, o, Some("sbm"))?;
            (run_ell_sweep(&c, a.timing)?, parameters(&c)?, c.sbm.base_seed)
        }
    })
}

fn invariants_json(report: &ExperimentReport) -> String {
    let inv = &report.invariants;
    let doc = serde_json::json!({
        "iterations": inv.iterations,
        "max_residual_increase": inv.max_residual_increase,
        "max_identity_gap": inv.max_identity_gap,
        "max_sphere_error": inv.max_sphere_error,
        "slack_violations": inv.slack_violations,
        "max_support": inv.max_support,
    });
    with_newline(serde_json::to_string_pretty(&doc).unwrap_or_default())
}

pub fn experiment(a: &ExperimentArgs, args: Vec<String>) -> Result<(), CliError> {
    let mut rec = Recorder::new("experiment", args);
    let (report, config, seed) = run_named(a, &mut rec)?;
    let dir = &a.output_dir;
    for method in report.methods() {
        let rows: Vec<ExperimentResult> = report.summary.iter().filter(|r| r.method == method).cloned().collect();
        rec.write(&dir.join(format!("{method}.csv")), &results_to_csv(&rows))?;
    }
    rec.write(&dir.join("comparison.csv"), &results_to_csv(&report.summary))?;
    rec.write(&dir.join("trials.csv"), &report.trials_csv())?;
    if !report.cost_reports.is_empty() {
        rec.write(&dir.join("cost_report.csv"), &report.cost_report_csv())?;
    }
    rec.write(&dir.join("invariants.json"), &invariants_json(&report))?;
    let params = serde_json::json!({ "name": a.name.key(), "timing": a.timing, "config": config });
    rec.finish(&dir.join("manifest.json"), params, seed)?;

    let mut table = String::new();
    let _ = writeln!(table, "{:<14} {:>4} {:>12} {:>10}", "method", "K", "err", "cost");
    for r in &report.summary {
        let _ = writeln!(table, "{:<14} {:>4} {:>12.4e} {:>10.4}", r.method, r.k, r.err, r.coreset_cost);
    }
    print!("{table}");
    Ok(())
}

/// Vertices, weights, method and cost read from either coreset JSON shape.
struct CoresetFile {
    method: String,
    weights: WeightedVertices,
    total_cost: f64,
    ell: Option<usize>,
}

fn read_coreset(path: &Path) -> Result<CoresetFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(Error::from)?;
    let bad = |what: &str| CliError::Usage(format!("{}: {what}", path.display()));
    let vertices: Vec<usize> = serde_json::from_value(v["indices"].clone()).map_err(|_| bad("missing `indices`"))?;
    let weights: Vec<f64> = serde_json::from_value(v["weights"].clone()).map_err(|_| bad("missing `weights`"))?;
    if vertices.len() != weights.len() {
        return Err(bad("`indices` and `weights` differ in length"));
    }
    Ok(CoresetFile {
        method: v["method"].as_str().unwrap_or("scgiga").to_string(),
        weights: WeightedVertices { vertices, weights },
        total_cost: v["total_cost"].as_f64().unwrap_or(0.0),
        ell: v["ell"].as_u64().map(|e| e as usize),
    })
}

fn read_values(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.split_whitespace()
        .enumerate()
        .map(|(i, t)| {
            t.parse::<f64>().map_err(|_| {
                CliError::Core(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    reason: format!("`{t}` is not a number"),
                })
            })
        })
        .collect()
}

pub fn eval(a: &EvalArgs, args: Vec<String>) -> Result<(), CliError> {
    let mut rec = Recorder::new("eval", args);
    rec.input(&a.coreset)?;
    let cs = read_coreset(&a.coreset)?;
    let graph = load_graph(&a.input.graph, a.input.weighted, &mut rec)?;
    let n = graph.n();
    if let Some(&v) = cs.weights.vertices.iter().find(|&&v| v >= n) {
        return Err(CliError::Usage(format!("coreset vertex {v} outside a graph of {n} vertices")));
    }
    let mut seed = 0;
    let mut bound_rhs = None;
    let (estimate, truth) = match a.function.split(':').collect::<Vec<_>>().as_slice() {
        ["avg-distance"] => {
            let est = avg_shortest_path_estimate(&graph, &cs.weights)?;
            let truth = avg_shortest_path_true(&graph)?;
            println!("dijkstra runs: {} for the estimate, {} for the truth", est.dijkstra_runs, truth.dijkstra_runs);
            (est.value, truth.value)
        }
        ["indicator", label] => {
            let label: usize = label
                .parse()
                .map_err(|_| CliError::Usage(format!("--function: bad label `{label}`")))?;
            let cloud = a.cloud.as_deref().map(|p| load_cloud(p, &mut rec)).transpose()?;
            let labels = match &cloud {
                Some(c) => c.labels(),
                None => graph.labels(),
            }
            .ok_or_else(|| CliError::Usage("indicator needs labels on the graph or --cloud".into()))?;
            if labels.len() != n {
                return Err(CliError::Usage("label count differs from vertex count".into()));
            }
            let f = GraphFunction::from_values(labels.iter().map(|&l| f64::from(u8::from(l == label))).collect());
            let m = error_metric(&f, &cs.weights);
            (m.estimate, m.truth)
        }
        ["values", path] => {
            let path = PathBuf::from(path);
            rec.input(&path)?;
            let values = read_values(&path)?;
            if values.len() != n {
                return Err(CliError::Usage(format!("{} values for {n} vertices", values.len())));
            }
            let m = error_metric(&GraphFunction::from_values(values), &cs.weights);
            (m.estimate, m.truth)
        }
        ["plambda", lambda, s] => {
            let lambda: f64 = lambda
                .parse()
                .map_err(|_| CliError::Usage(format!("--function: bad lambda `{lambda}`")))?;
            seed = s
                .parse()
                .map_err(|_| CliError::Usage(format!("--function: bad seed `{s}`")))?;
            let p = lazy_walk_matrix(&graph)?;
            let f = synthesize_in_plambda(&eigendecomposition(&p)?, lambda, None, seed)?;
            let m = error_metric(&f, &cs.weights);
            if let Some(ell) = cs.ell {
                let b = bound_check(&f, lambda, ell, &cs.weights, &normalized_columns(&p, ell)?)?;
                println!("bound: {:.6e} <= {:.6e} ({})", b.lhs, b.rhs, if b.holds { "holds" } else { "VIOLATED" });
                bound_rhs = Some(b.rhs);
            }
            (m.estimate, m.truth)
        }
        _ => return Err(CliError::Usage(format!("--function: unrecognised `{}`", a.function))),
    };
    let abs_err = (estimate - truth).abs();
    let row = ExperimentResult {
        method: cs.method,
        k: cs.weights.vertices.len(),
        err: abs_err * abs_err,
        abs_err,
        coreset_cost: cs.total_cost,
        bound_rhs,
        runtime_ms: 0.0,
    };
    rec.write(&a.output, &results_to_csv(std::slice::from_ref(&row)))?;
    rec.finish(&manifest_path_for(&a.output), parameters(a)?, seed)?;
    println!("estimate {estimate:.10}  truth {truth:.10}  err {:.6e}", row.err);
    Ok(())
}

pub fn replay(a: &ReplayArgs) -> Result<(), CliError> {
    let m = manifest::load(&a.manifest)?;
    if m.args.first().map(String::as_str) == Some("replay") {
        return Err(CliError::Usage("cannot replay a replay".into()));
    }
    std::env::set_current_dir(&m.working_dir).map_err(|e| Error::io(&m.working_dir, e))?;
    for (path, digest) in &m.input_hashes {
        if &manifest::sha256_file(Path::new(path))? != digest {
            return Err(CliError::Mismatch(format!("input {path} changed since the recorded run")));
        }
    }
    let before: Vec<Option<Vec<u8>>> = m.output_paths.iter().map(|p| std::fs::read(p).ok()).collect();
    crate::dispatch(m.args.clone())?;
    let mut differing = Vec::new();
    for (path, old) in m.output_paths.iter().zip(before) {
        let new = std::fs::read(path).ok();
        if old.is_none() || new != old {
            differing.push(path.display().to_string());
        }
    }
    if differing.is_empty() {
        println!("replayed {}: {} outputs identical", m.command, m.output_paths.len());
        Ok(())
    } else {
        Err(CliError::Mismatch(differing.join(", ")))
    }
}
