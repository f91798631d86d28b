use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::generators_rng;

const MAX_ITERATIONS: usize = 300;
const SHIFT_TOLERANCE: f64 = 1e-6;
const RESTARTS: usize = 10;

pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

#[derive(Debug, Clone)]
pub struct KMeans {
    pub dim: usize,
    /// Row-major `k x dim`.
    pub centroids: Vec<f64>,
    pub assignment: Vec<usize>,
    pub iterations: usize,
    /// Sum of squared distances to the assigned centroids.
    pub inertia: f64,
}

impl KMeans {
    pub fn centroid(&self, c: usize) -> &[f64] {
        &self.centroids[c * self.dim..(c + 1) * self.dim]
    }
}

fn nearest(point: &[f64], centroids: &[f64], dim: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.chunks_exact(dim).enumerate() {
        let d = squared_distance(point, centroid);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

/// Lloyd's algorithm with k-means++ seeding, best of 10 restarts by inertia.
/// Each run stops when no centroid moves more than `1e-6` or after 300
/// iterations. A cluster that empties is re-seeded at the point farthest from
/// its current centroid.
pub fn kmeans(points: &[f64], dim: usize, k: usize, seed: u64) -> Result<KMeans> {
    if dim == 0 || !points.len().is_multiple_of(dim) {
        return Err(Error::param("points", "not a whole number of rows"));
    }
    let n = points.len() / dim;
    if k == 0 || k > n {
        return Err(Error::param("k", format!("need 1 <= k <= n = {n}, got {k}")));
    }
    let mut rng = generators_rng(seed);
    let mut best = lloyd(points, dim, k, &mut rng);
    for _ in 1..RESTARTS {
        let run = lloyd(points, dim, k, &mut rng);
        if run.inertia < best.inertia {
            best = run;
        }
    }
    Ok(best)
}

fn lloyd(points: &[f64], dim: usize, k: usize, rng: &mut impl Rng) -> KMeans {
    let n = points.len() / dim;
    let row = |i: usize| &points[i * dim..(i + 1) * dim];

    let mut centroids = Vec::with_capacity(k * dim);
    centroids.extend_from_slice(row(rng.random_range(0..n)));
    let mut d2: Vec<f64> = (0..n).map(|i| squared_distance(row(i), &centroids[..dim])).collect();
    for _ in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, &d) in d2.iter().enumerate() {
                r -= d;
                if r < 0.0 {
                    pick = i;
                    break;
                }
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        let start = centroids.len();
        centroids.extend_from_slice(row(pick));
        let new = centroids[start..].to_vec();
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(squared_distance(row(i), &new));
        }
    }

    let mut assignment = vec![0usize; n];
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let nearest_all: Vec<(usize, f64)> = (0..n)
            .into_par_iter()
            .map(|i| nearest(row(i), &centroids, dim))
            .collect();
        for (a, &(c, _)) in assignment.iter_mut().zip(&nearest_all) {
            *a = c;
        }

        let mut sums = vec![0.0; k * dim];
        let mut counts = vec![0usize; k];
        for i in 0..n {
            let c = assignment[i];
            counts[c] += 1;
            for (s, x) in sums[c * dim..(c + 1) * dim].iter_mut().zip(row(i)) {
                *s += x;
            }
        }
        let mut reseeded = false;
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            // farthest point from its own centroid, ties to lower index
            let mut far = 0;
            for i in 1..n {
                if nearest_all[i].1 > nearest_all[far].1 {
                    far = i;
                }
            }
            let old = assignment[far];
            counts[old] -= 1;
            for (s, x) in sums[old * dim..(old + 1) * dim].iter_mut().zip(row(far)) {
                *s -= x;
            }
            assignment[far] = c;
            counts[c] = 1;
            sums[c * dim..(c + 1) * dim].copy_from_slice(row(far));
            reseeded = true;
        }

        let mut shift: f64 = 0.0;
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            for d in 0..dim {
                let updated = sums[c * dim + d] / counts[c] as f64;
                shift = shift.max((updated - centroids[c * dim + d]).abs());
                centroids[c * dim + d] = updated;
            }
        }
        if shift < SHIFT_TOLERANCE && !reseeded {
            break;
        }
    }

    let mut inertia = 0.0;
    for (i, a) in assignment.iter_mut().enumerate() {
        let (c, d) = nearest(row(i), &centroids, dim);
        *a = c;
        inertia += d;
    }
    KMeans {
        dim,
        centroids,
        assignment,
        iterations,
        inertia,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separates_two_blobs() {
        let points = [0.0, 0.1, 0.2, 10.0, 10.1, 10.2];
        let fit = kmeans(&points, 1, 2, 4).unwrap();
        assert_eq!(fit.assignment[0], fit.assignment[1]);
        assert_eq!(fit.assignment[3], fit.assignment[5]);
        assert_ne!(fit.assignment[0], fit.assignment[3]);
    }

    #[test]
    fn identical_points() {
        let fit = kmeans(&[1.0; 4], 1, 3, 0).unwrap();
        assert_eq!(fit.assignment.len(), 4);
    }
}
