use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::eval::Distance;
use crate::graph::Graph;

const SOURCES_PER_CHUNK: usize = 32;

fn ties(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

/// Single-source dependency accumulation (Brandes) with Dijkstra ordering.
fn accumulate(graph: &Graph, s: usize, scores: &mut [f64]) {
    let n = graph.n();
    let mut dist = vec![f64::INFINITY; n];
    let mut sigma = vec![0.0f64; n];
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut order = Vec::with_capacity(n);
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    sigma[s] = 1.0;
    heap.push(Reverse((Distance(0.0), s)));
    while let Some(Reverse((Distance(d), v))) = heap.pop() {
        if settled[v] || d > dist[v] {
            continue;
        }
        settled[v] = true;
        order.push(v);
        for (u, w) in graph.neighbors(v) {
            if settled[u] {
                continue;
            }
            let alt = d + w;
            if dist[u].is_finite() && ties(alt, dist[u]) {
                sigma[u] += sigma[v];
                preds[u].push(v);
            } else if alt < dist[u] {
                dist[u] = alt;
                sigma[u] = sigma[v];
                preds[u].clear();
                preds[u].push(v);
                heap.push(Reverse((Distance(alt), u)));
            }
        }
    }
    let mut delta = vec![0.0f64; n];
    for &w in order.iter().rev() {
        for &v in &preds[w] {
            delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        }
        if w != s {
            scores[w] += delta[w];
        }
    }
}

/// Exact weighted betweenness centrality of an undirected graph, counting
/// each unordered pair once (no normalization).
///
/// Sources are processed in fixed chunks and the chunk sums added in order,
/// so the result does not depend on the thread count.
pub fn betweenness_centrality(graph: &Graph) -> Vec<f64> {
    let n = graph.n();
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(SOURCES_PER_CHUNK)
        .map(|chunk| {
            let mut scores = vec![0.0; n];
            for &s in chunk {
                accumulate(graph, s, &mut scores);
            }
            scores
        })
        .collect();
    let mut total = vec![0.0; n];
    for p in partials {
        for (t, x) in total.iter_mut().zip(p) {
            *t += x;
        }
    }
    for t in total.iter_mut() {
        *t /= 2.0;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_scores() {
        let g = Graph::from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(betweenness_centrality(&g), vec![0.0, 2.0, 2.0, 0.0]);
    }

    #[test]
    fn square_splits_paths() {
        let g = Graph::from_edges(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (0, 3, 1.0)]).unwrap();
        assert_eq!(betweenness_centrality(&g), vec![0.5; 4]);
    }

    #[test]
    fn weights_reroute() {
        // heavy direct edge 0-2 loses to the path through 1
        let g = Graph::from_edges(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 5.0)]).unwrap();
        assert_eq!(betweenness_centrality(&g), vec![0.0, 1.0, 0.0]);
    }
}
