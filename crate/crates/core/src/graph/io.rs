//! Plain whitespace-separated edge lists (`u v` or `u v w` per line).

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use super::Graph;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LoadedEdgeList {
    pub graph: Graph,
    /// Raw id of each compacted vertex.
    pub original_ids: Vec<u64>,
    pub dropped_self_loops: usize,
}

/// Loads an edge list.
///
/// Lines starting with `#` or `%` and blank lines are skipped. Ids are
/// compacted to `0..n` in order of first appearance, unless the raw ids already
/// are exactly `0..n`, in which case they are kept. In weighted mode the third
/// column (default 1) is read and repeated pairs sum their weights; otherwise
/// repeated pairs collapse to one unit edge. Self-loops are dropped.
pub fn load_edge_list(path: impl AsRef<Path>, weighted: bool) -> Result<LoadedEdgeList> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, path, weighted)
}

pub(crate) fn parse_edge_list(text: &str, path: &Path, weighted: bool) -> Result<LoadedEdgeList> {
    let mut raw_edges: Vec<(u64, u64, f64)> = Vec::new();
    let mut order: Vec<u64> = Vec::new();
    let mut seen: HashSet<u64> = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('%') {
            continue;
        }
        let bad = |reason: String| Error::Parse {
            path: path.into(),
            line: idx + 1,
            reason,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() < 2 || fields.len() > 3 {
            return Err(bad(format!("expected `u v [w]`, found {} fields", fields.len())));
        }
        let id = |s: &str| {
            s.parse::<u64>()
                .map_err(|e| bad(format!("vertex id `{s}`: {e}")))
        };
        let (u, v) = (id(fields[0])?, id(fields[1])?);
        let w = match (weighted, fields.get(2)) {
            (true, Some(s)) => {
                let w = s.parse::<f64>().map_err(|e| bad(format!("weight `{s}`: {e}")))?;
                if !(w.is_finite() && w > 0.0) {
                    return Err(bad(format!("weight {w} must be positive")));
                }
                w
            }
            _ => 1.0,
        };
        for x in [u, v] {
            if seen.insert(x) {
                order.push(x);
            }
        }
        raw_edges.push((u, v, w));
    }
    if order.is_empty() {
        return Err(Error::Parse {
            path: path.into(),
            line: 0,
            reason: "edge list contains no edges".into(),
        });
    }

    let n = order.len();
    let already_compact = order.iter().all(|&x| (x as usize) < n);
    let original_ids: Vec<u64> = if already_compact {
        (0..n as u64).collect()
    } else {
        order
    };
    let index: HashMap<u64, usize> = original_ids
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, i))
        .collect();

    let mut merged: HashMap<(usize, usize), f64> = HashMap::new();
    let mut dropped_self_loops = 0;
    for (u, v, w) in raw_edges {
        let (a, b) = (index[&u], index[&v]);
        if a == b {
            dropped_self_loops += 1;
            continue;
        }
        let key = (a.min(b), a.max(b));
        let entry = merged.entry(key).or_insert(0.0);
        *entry = if weighted { *entry + w } else { 1.0 };
    }
    if dropped_self_loops > 0 {
        log::warn!(
            "{}: dropped {dropped_self_loops} self-loop line(s)",
            path.display()
        );
    }
    let graph = Graph::from_edges(n, merged.into_iter().map(|((a, b), w)| (a, b, w)))?;
    Ok(LoadedEdgeList {
        graph,
        original_ids,
        dropped_self_loops,
    })
}

/// Writes `u v w` lines with exact (round-trip) weights.
pub fn write_edge_list(graph: &Graph) -> String {
    let mut out = String::new();
    for &(u, v, w) in graph.edges() {
        let _ = writeln!(out, "{u} {v} {w}");
    }
    out
}
