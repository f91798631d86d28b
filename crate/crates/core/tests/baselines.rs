use graphcoreset::baselines::*;
use graphcoreset::eval::estimate_mean;
use graphcoreset::graph::{generate_gaussian_mixture, generate_random_graph, generate_sbm};
use graphcoreset::*;

/// All-pairs distances and shortest-path counts for unit weights.
fn path_counts(g: &Graph) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = g.n();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for v in 0..n {
        d[v][v] = 0.0;
    }
    for &(u, v, w) in g.edges() {
        d[u][v] = w;
        d[v][u] = w;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let mut sigma = vec![vec![0.0; n]; n];
    for s in 0..n {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| d[s][a].total_cmp(&d[s][b]));
        sigma[s][s] = 1.0;
        for &t in &order[1..] {
            sigma[s][t] = g
                .neighbors(t)
                .filter(|&(u, w)| d[s][u] + w == d[s][t])
                .map(|(u, _)| sigma[s][u])
                .sum();
        }
    }
    (d, sigma)
}

#[test]
fn betweenness_matches_path_counting() {
    for seed in 0..3 {
        let g = generate_random_graph(30, 0.15, seed, 10).unwrap();
        let n = g.n();
        let (d, sigma) = path_counts(&g);
        let scores = betweenness_centrality(&g);
        for v in 0..n {
            let mut expect = 0.0;
            for s in 0..n {
                for t in s + 1..n {
                    if s != v && t != v && d[s][v] + d[v][t] == d[s][t] {
                        expect += sigma[s][v] * sigma[v][t] / sigma[s][t];
                    }
                }
            }
            assert!((scores[v] - expect).abs() < 1e-9, "vertex {v}: {} vs {expect}", scores[v]);
        }
    }
}

#[test]
fn betweenness_picks_transit_vertices() {
    let path = Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
    assert_eq!(betweenness_coreset(&path, 1).unwrap().indices, vec![1]);
    let star = Graph::from_edges(6, (1..6).map(|i| (0, i, 1.0))).unwrap();
    assert_eq!(betweenness_coreset(&star, 1).unwrap().indices, vec![0]);
}

fn label_accuracy(labels: &[usize], assignment: &[usize]) -> f64 {
    let agree = labels.iter().zip(assignment).filter(|(l, a)| l == a).count();
    let n = labels.len();
    agree.max(n - agree) as f64 / n as f64
}

#[test]
fn spectral_clustering_recovers_blocks() {
    for seed in 0..20 {
        let g = generate_sbm(&[50, 50], 0.5, 0.01, seed).unwrap();
        let cs = spectral_clustering_coreset(&g, 2, seed).unwrap();
        let acc = label_accuracy(g.labels().unwrap(), cs.assignment.as_ref().unwrap());
        assert!(acc >= 0.95, "seed {seed}: accuracy {acc}");
    }
}

#[test]
fn spectral_clustering_splits_weakly_joined_triangles() {
    let g = Graph::from_edges(
        6,
        [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0), (2, 3, 1e-6)],
    )
    .unwrap();
    let cs = spectral_clustering_coreset(&g, 2, 0).unwrap();
    let a = cs.assignment.unwrap();
    assert_eq!(label_accuracy(&[0, 0, 0, 1, 1, 1], &a), 1.0);
    assert_eq!(cs.weights, vec![0.5, 0.5]);
    let one = spectral_clustering_coreset(&g, 1, 0).unwrap();
    assert_eq!(one.weights, vec![1.0]);
}

#[test]
fn kmeans_finds_mixture_components() {
    let means = vec![vec![1.0, -3.0], vec![-3.0, 2.0], vec![3.0, 0.0]];
    for seed in 0..20 {
        let cloud = generate_gaussian_mixture(&means, &[0.2, 0.3, 0.5], 1.0, 2000, seed).unwrap();
        let labels = cloud.labels().unwrap();
        let cs = kmeans_coreset(&cloud, 3, seed).unwrap();
        let assignment = cs.assignment.as_ref().unwrap();
        let mut by_label = [0.0; 3];
        for (&rep, &w) in cs.indices.iter().zip(&cs.weights) {
            let c = assignment[rep];
            let mut votes = [0usize; 3];
            for (i, &a) in assignment.iter().enumerate() {
                if a == c {
                    votes[labels[i]] += 1;
                }
            }
            let majority = (0..3).max_by_key(|&l| votes[l]).unwrap();
            assert_eq!(labels[rep], majority, "seed {seed}");
            by_label[majority] += w;
        }
        for (got, want) in by_label.iter().zip([0.2, 0.3, 0.5]) {
            assert!((got - want).abs() < 0.05, "seed {seed}: {by_label:?}");
        }
    }
}

#[test]
fn kmeans_ignores_duplicated_points() {
    let cloud = generate_gaussian_mixture(&[vec![0.0, 0.0], vec![6.0, 6.0]], &[0.5, 0.5], 1.0, 60, 1).unwrap();
    let twice: Vec<f64> = cloud.coords().iter().chain(cloud.coords()).copied().collect();
    let doubled = PointCloud::new(2, twice, None).unwrap();
    let a = kmeans_coreset(&cloud, 2, 5).unwrap();
    let b = kmeans_coreset(&doubled, 2, 5).unwrap();
    let pts = |c: &BaselineCoreset, pc: &PointCloud| {
        let mut v: Vec<Vec<f64>> = c.indices.iter().map(|&i| pc.point(i).to_vec()).collect();
        v.sort_by(|x, y| x[0].total_cmp(&y[0]));
        v
    };
    assert_eq!(pts(&a, &cloud), pts(&b, &doubled));
    let mut wa = a.weights.clone();
    let mut wb = b.weights.clone();
    wa.sort_by(f64::total_cmp);
    wb.sort_by(f64::total_cmp);
    assert_eq!(wa, wb);
}

#[test]
fn cluster_weights_are_exact_shares() {
    let cloud = generate_gaussian_mixture(&[vec![0.0], vec![5.0]], &[0.3, 0.7], 1.0, 101, 2).unwrap();
    let cs = kmeans_coreset(&cloud, 4, 3).unwrap();
    let a = cs.assignment.as_ref().unwrap();
    for (&rep, &w) in cs.indices.iter().zip(&cs.weights) {
        let size = a.iter().filter(|&&c| c == a[rep]).count();
        assert_eq!(w, size as f64 / 101.0);
    }
    assert!((cs.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn random_sampling_is_unbiased() {
    let n = 1000;
    let f: Vec<f64> = (0..n).map(|i| ((i * 37) % 101) as f64 / 10.0).collect();
    let mean = f.iter().sum::<f64>() / n as f64;
    let estimates: Vec<f64> = (0..200)
        .map(|s| estimate_mean(&f, &random_sampling(n, 30, s).unwrap()))
        .collect();
    let m = estimates.iter().sum::<f64>() / 200.0;
    let sd = (estimates.iter().map(|e| (e - m).powi(2)).sum::<f64>() / 199.0).sqrt();
    assert!((m - mean).abs() <= 3.0 * sd / 200f64.sqrt());
}

#[test]
fn baselines_are_deterministic() {
    let g = generate_sbm(&[20, 30], 0.4, 0.05, 3).unwrap();
    assert_eq!(spectral_clustering_coreset(&g, 3, 1).unwrap(), spectral_clustering_coreset(&g, 3, 1).unwrap());
    assert_eq!(betweenness_coreset(&g, 4).unwrap(), betweenness_coreset(&g, 4).unwrap());
}
