//! Lazy random walk `P = (W - D) / d_max + I`, the unit-normalized columns of
//! `P^ell` that the selector works with, and the eigenbasis used to build
//! smooth test functions.
//!
//! `P` is symmetric and row-stochastic, hence bistochastic, so every power
//! `P^ell` maps the constant vector to itself and the normalized target
//! direction is always `1/sqrt(n)`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::generators_rng;
use crate::graph::Graph;

/// Largest `n` for which dense powers are formed.
pub const DENSE_LIMIT: usize = 2000;

/// Sparse symmetric lazy walk matrix: explicit diagonal plus off-diagonal CSR.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    n: usize,
    d_max: f64,
    diag: Vec<f64>,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    values: Vec<f64>,
}

/// Builds the lazy walk matrix of `graph`.
pub fn lazy_walk_matrix(graph: &Graph) -> Result<TransitionMatrix> {
    let n = graph.n();
    if graph.num_edges() == 0 {
        return Err(Error::InvalidGraph(
            "lazy walk needs at least one edge (d_max = 0)".into(),
        ));
    }
    let degrees: Vec<f64> = (0..n).map(|v| graph.weighted_degree(v)).collect();
    let d_max = degrees.iter().copied().fold(0.0, f64::max);
    let diag = degrees.iter().map(|d| (1.0 - d / d_max).max(0.0)).collect();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut targets = Vec::new();
    let mut values = Vec::new();
    offsets.push(0);
    for v in 0..n {
        for (u, w) in graph.neighbors(v) {
            targets.push(u);
            values.push(w / d_max);
        }
        offsets.push(targets.len());
    }
    Ok(TransitionMatrix {
        n,
        d_max,
        diag,
        offsets,
        targets,
        values,
    })
}

impl TransitionMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d_max(&self) -> f64 {
        self.d_max
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Off-diagonal entries of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (s, e) = (self.offsets[i], self.offsets[i + 1]);
        self.targets[s..e]
            .iter()
            .copied()
            .zip(self.values[s..e].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        let (s, e) = (self.offsets[i], self.offsets[i + 1]);
        match self.targets[s..e].binary_search(&j) {
            Ok(k) => self.values[s + k],
            Err(_) => 0.0,
        }
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.diag[i] + self.row(i).map(|(_, w)| w).sum::<f64>())
            .collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.diag[i] * x[i] + self.row(i).map(|(j, w)| w * x[j]).sum::<f64>())
            .collect()
    }

    /// Applies `P` `ell` times.
    pub fn apply_power(&self, x: &[f64], ell: usize) -> Vec<f64> {
        let mut v = x.to_vec();
        for _ in 0..ell {
            v = self.mul_vec(&v);
        }
        v
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            m[(i, i)] = self.diag[i];
            for (j, w) in self.row(i) {
                m[(i, j)] = w;
            }
        }
        m
    }

    /// Dense `P^ell` for diagnostics; refused above [`DENSE_LIMIT`] vertices.
    pub fn dense_power(&self, ell: usize) -> Result<DMatrix<f64>> {
        if self.n > DENSE_LIMIT {
            return Err(Error::param(
                "n",
                format!("dense powers limited to n <= {DENSE_LIMIT}, got {}", self.n),
            ));
        }
        let p = self.to_dense();
        let mut acc = DMatrix::identity(self.n, self.n);
        for _ in 0..ell {
            acc = &p * acc;
        }
        Ok(acc)
    }

    /// `P^ell e_i` as sorted sparse entries.
    fn column_power(&self, i: usize, ell: usize, acc: &mut [f64], mark: &mut [bool]) -> (Vec<usize>, Vec<f64>) {
        let mut idx = vec![i];
        let mut val = vec![1.0];
        for _ in 0..ell {
            let mut touched = Vec::with_capacity(idx.len() * 4);
            let mut add = |t: usize, x: f64| {
                if !mark[t] {
                    mark[t] = true;
                    touched.push(t);
                }
                acc[t] += x;
            };
            for (&j, &x) in idx.iter().zip(&val) {
                add(j, self.diag[j] * x);
                let (s, e) = (self.offsets[j], self.offsets[j + 1]);
                for k in s..e {
                    add(self.targets[k], self.values[k] * x);
                }
            }
            touched.sort_unstable();
            idx.clear();
            val.clear();
            for t in touched {
                if acc[t] != 0.0 {
                    idx.push(t);
                    val.push(acc[t]);
                }
                acc[t] = 0.0;
                mark[t] = false;
            }
        }
        (idx, val)
    }
}

/// Unit-normalized columns `u_i = P^ell e_i / ||P^ell e_i||` in compressed
/// sparse column form, with the norms needed to map unit-sphere coefficients
/// back to estimator weights.
#[derive(Debug, Clone)]
pub struct NormalizedColumns {
    n: usize,
    ell: usize,
    offsets: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
    norms: Vec<f64>,
    target_alignment: Vec<f64>,
}

/// Columns of `P^ell`, each normalized to unit Euclidean norm.
pub fn normalized_columns(p: &TransitionMatrix, ell: usize) -> Result<NormalizedColumns> {
    if ell == 0 {
        return Err(Error::param("ell", "walk power must be at least 1"));
    }
    let n = p.n;
    let cols: Vec<(Vec<usize>, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map_init(
            || (vec![0.0; n], vec![false; n]),
            |(acc, mark), i| p.column_power(i, ell, acc, mark),
        )
        .collect();

    let sqrt_n = (n as f64).sqrt();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut indices = Vec::new();
    let mut values = Vec::new();
    let mut norms = Vec::with_capacity(n);
    let mut target_alignment = Vec::with_capacity(n);
    offsets.push(0);
    for (i, (idx, val)) in cols.into_iter().enumerate() {
        let norm = val.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::Numerical(format!("column {i} of P^{ell} vanishes")));
        }
        let mut sum = 0.0;
        for x in &val {
            let u = x / norm;
            sum += u;
            values.push(u);
        }
        indices.extend(idx);
        offsets.push(indices.len());
        norms.push(norm);
        target_alignment.push(sum / sqrt_n);
    }
    Ok(NormalizedColumns {
        n,
        ell,
        offsets,
        indices,
        values,
        norms,
        target_alignment,
    })
}

impl NormalizedColumns {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Sparse entries `(rows, values)` of unit column `i`.
    pub fn column(&self, i: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.offsets[i], self.offsets[i + 1]);
        (&self.indices[s..e], &self.values[s..e])
    }

    pub fn dense_column(&self, i: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        let (rows, vals) = self.column(i);
        for (&r, &x) in rows.iter().zip(vals) {
            out[r] = x;
        }
        out
    }

    /// `||P^ell e_i||`.
    pub fn norm(&self, i: usize) -> f64 {
        self.norms[i]
    }

    pub fn norms(&self) -> &[f64] {
        &self.norms
    }

    pub fn min_norm(&self) -> f64 {
        self.norms.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `<u_i, 1/sqrt(n)>`.
    pub fn target_alignment(&self, i: usize) -> f64 {
        self.target_alignment[i]
    }

    /// The unit target direction `1/sqrt(n)`.
    pub fn target(&self) -> Vec<f64> {
        vec![1.0 / (self.n as f64).sqrt(); self.n]
    }

    /// `<u_i, x>` for dense `x`.
    pub fn dot(&self, i: usize, x: &[f64]) -> f64 {
        let (rows, vals) = self.column(i);
        rows.iter().zip(vals).map(|(&r, &v)| v * x[r]).sum()
    }

    /// `out += scale * u_i`.
    pub fn add_scaled(&self, i: usize, scale: f64, out: &mut [f64]) {
        let (rows, vals) = self.column(i);
        for (&r, &v) in rows.iter().zip(vals) {
            out[r] += scale * v;
        }
    }

    /// `sum_i coefficients[k] * u_{indices[k]}`.
    pub fn combine(&self, indices: &[usize], coefficients: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (&i, &c) in indices.iter().zip(coefficients) {
            self.add_scaled(i, c, &mut out);
        }
        out
    }

    /// Column norms as `vertex,norm,target_alignment` CSV.
    pub fn norms_csv(&self) -> String {
        let mut out = String::from("vertex,norm,target_alignment\n");
        for i in 0..self.n {
            out.push_str(&format!(
                "{i},{},{}\n",
                crate::graph::format_real(self.norms[i]),
                crate::graph::format_real(self.target_alignment[i])
            ));
        }
        out
    }
}

/// Eigenvalues in descending order with matching orthonormal eigenvectors (columns).
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl Spectrum {
    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.vectors.nrows()
    }

    /// Number of eigenpairs held (may be fewer than `n` for a partial spectrum).
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k).iter().copied().collect()
    }
}

/// Full symmetric eigendecomposition of `P`. Dense; intended for test-function
/// synthesis, bound checks and spectral embeddings, not for selection.
pub fn eigendecomposition(p: &TransitionMatrix) -> Result<Spectrum> {
    let eig = SymmetricEigen::new(p.to_dense());
    let mut order: Vec<usize> = (0..p.n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite eigenvalue".into()));
    }
    let mut vectors = DMatrix::zeros(p.n, p.n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        // fix the sign so the largest-magnitude entry is positive
        let pivot = col.iter().copied().fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
        if pivot < 0.0 {
            col.neg_mut();
        }
        vectors.set_column(dst, &col);
    }
    Ok(Spectrum { values, vectors })
}

/// Leading `k` eigenpairs of `P` (largest eigenvalues first) by block subspace
/// iteration on `(P + I) / 2` followed by a Rayleigh-Ritz rotation.
///
/// Only sparse products with `P` are formed, so this scales to graphs where
/// the dense decomposition does not.
pub fn top_eigenvectors(p: &TransitionMatrix, k: usize, seed: u64) -> Result<Spectrum> {
    const MAX_SWEEPS: usize = 2000;
    const RITZ_TOLERANCE: f64 = 1e-10;
    let n = p.n;
    if k == 0 || k > n {
        return Err(Error::param("k", format!("need 1 <= k <= n = {n}, got {k}")));
    }
    let shifted = |q: &DMatrix<f64>| {
        let mut out = DMatrix::zeros(n, q.ncols());
        for c in 0..q.ncols() {
            let col: Vec<f64> = q.column(c).iter().copied().collect();
            let pc = p.mul_vec(&col);
            for r in 0..n {
                out[(r, c)] = 0.5 * (pc[r] + col[r]);
            }
        }
        out
    };
    let mut rng = generators_rng(seed);
    let start = DMatrix::from_fn(n, k, |_, _| StandardNormal.sample(&mut rng));
    let mut q = start.qr().q();
    let mut previous: Vec<f64> = vec![f64::INFINITY; k];
    let mut ritz = Vec::new();
    for sweep in 0..MAX_SWEEPS {
        let z = shifted(&q);
        q = z.qr().q();
        if sweep % 10 == 9 || sweep + 1 == MAX_SWEEPS {
            let h = q.transpose() * shifted(&q);
            let mut values: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
            values.sort_by(|a, b| b.total_cmp(a));
            let change = values
                .iter()
                .zip(&previous)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            previous = values;
            if change < RITZ_TOLERANCE {
                break;
            }
        }
    }
    let h = q.transpose() * shifted(&q);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let mut vectors = DMatrix::zeros(n, k);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = &q * eig.eigenvectors.column(src);
        let pivot = col.iter().copied().fold(0.0f64, |a, x| if x.abs() > a.abs() { x } else { a });
        if pivot < 0.0 {
            col.neg_mut();
        }
        vectors.set_column(dst, &col);
        ritz.push(2.0 * eig.eigenvalues[src] - 1.0);
    }
    Ok(Spectrum {
        values: ritz,
        vectors,
    })
}

/// Leading `k` eigenpairs: dense decomposition up to [`DENSE_LIMIT`]
/// vertices, subspace iteration beyond.
pub fn leading_spectrum(p: &TransitionMatrix, k: usize, seed: u64) -> Result<Spectrum> {
    if p.n <= DENSE_LIMIT {
        let full = eigendecomposition(p)?;
        Ok(Spectrum {
            values: full.values[..k].to_vec(),
            vectors: full.vectors.columns(0, k).into_owned(),
        })
    } else {
        top_eigenvectors(p, k, seed)
    }
}

/// Coefficients of a function over selected eigenvectors of `P`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCoefficients {
    /// Positions in the descending [`Spectrum`].
    pub eigen_indices: Vec<usize>,
    pub values: Vec<f64>,
}

/// A real function on the vertices, optionally with its spectral expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFunction {
    pub values: Vec<f64>,
    pub coefficients: Option<SpectralCoefficients>,
}

impl GraphFunction {
    pub fn from_values(values: Vec<f64>) -> Self {
        GraphFunction {
            values,
            coefficients: None,
        }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Builds `f = sum a_i V_i` over eigenvectors with `|lambda_i| > lambda_threshold`.
///
/// Coefficients are taken from `coefficients` when given (one per retained
/// eigenvector, in descending eigenvalue order) and drawn i.i.d. standard
/// normal from `seed` otherwise.
pub fn synthesize_in_plambda(
    spectrum: &Spectrum,
    lambda_threshold: f64,
    coefficients: Option<&[f64]>,
    seed: u64,
) -> Result<GraphFunction> {
    if !(lambda_threshold > 0.0 && lambda_threshold <= 1.0) {
        return Err(Error::param("lambda", "threshold must lie in (0, 1]"));
    }
    let eigen_indices: Vec<usize> = (0..spectrum.len())
        .filter(|&k| spectrum.values[k].abs() > lambda_threshold)
        .collect();
    if eigen_indices.is_empty() {
        return Err(Error::param(
            "lambda",
            format!("no eigenvalue exceeds {lambda_threshold} in magnitude"),
        ));
    }
    let values: Vec<f64> = match coefficients {
        Some(c) if c.len() != eigen_indices.len() => {
            return Err(Error::param(
                "coefficients",
                format!("{} given for {} eigenvectors", c.len(), eigen_indices.len()),
            ))
        }
        Some(c) => c.to_vec(),
        None => {
            let mut rng = generators_rng(seed);
            eigen_indices
                .iter()
                .map(|_| StandardNormal.sample(&mut rng))
                .collect()
        }
    };
    let n = spectrum.n();
    let mut f = vec![0.0; n];
    for (&k, &a) in eigen_indices.iter().zip(&values) {
        for (r, x) in spectrum.vectors.column(k).iter().enumerate() {
            f[r] += a * x;
        }
    }
    Ok(GraphFunction {
        values: f,
        coefficients: Some(SpectralCoefficients {
            eigen_indices,
            values,
        }),
    })
}

/// Euclidean norm of the spectral coefficient vector.
pub fn plambda_norm(f: &GraphFunction) -> Result<f64> {
    let c = f
        .coefficients
        .as_ref()
        .ok_or_else(|| Error::param("f", "function carries no spectral coefficients"))?;
    Ok(c.values.iter().map(|a| a * a).sum::<f64>().sqrt())
}
