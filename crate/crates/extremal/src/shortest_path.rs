//! Dijkstra with overflow-checked accumulation.
//!
//! Every relaxation sum is tested for finiteness before use: a path length
//! past the largest finite double yields `Overflow`, never a silently
//! saturated distance. Negative weights are rejected before search and
//! missing weights follow the input's weight policy.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::payload::{Cell, GraphForm, GraphInput, WeightPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PathStatus {
    #[serde(rename = "ok")]
    Ok,
    #[serde(rename = "overflow")]
    Overflow,
    #[serde(rename = "negative-weight")]
    NegativeWeight,
    #[serde(rename = "missing-weight")]
    MissingWeight,
    #[serde(rename = "unreachable")]
    Unreachable,
}

impl PathStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            PathStatus::Ok => "ok",
            PathStatus::Overflow => "overflow",
            PathStatus::NegativeWeight => "negative-weight",
            PathStatus::MissingWeight => "missing-weight",
            PathStatus::Unreachable => "unreachable",
        }
    }
}

/// Search outcome; `distance` is present iff `status` is `Ok`, and is then
/// finite and non-negative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathResult {
    pub status: PathStatus,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub distance: Option<f64>,
}

impl PathResult {
    fn status_only(status: PathStatus) -> Self {
        PathResult {
            status,
            distance: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum GraphShapeError {
    #[error("graph shape: {0}")]
    Shape(String),
}

struct QueueEntry {
    node: usize,
    dist: f64,
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.dist == other.dist && self.node == other.node
    }
}
impl Eq for QueueEntry {}
impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on distance; ties by node for determinism.
        other
            .dist
            .partial_cmp(&self.dist)
            .unwrap_or(Ordering::Equal)
            .then(other.node.cmp(&self.node))
    }
}
impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Builds the adjacency list, applying the weight policy. Returns an early
/// status for negative or missing weights.
fn build_adjacency(input: &GraphInput, n: usize) -> Result<Vec<Vec<(usize, f64)>>, PathStatus> {
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    match &input.form {
        GraphForm::Matrix(m) => {
            for (i, row) in m.iter().enumerate() {
                for (j, cell) in row.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    if let Cell::Weight(w) = cell {
                        if w.is_nan() {
                            return Err(PathStatus::MissingWeight);
                        }
                        if *w < 0.0 {
                            return Err(PathStatus::NegativeWeight);
                        }
                        adj[i].push((j, *w));
                    }
                }
            }
        }
        GraphForm::Edges(edges) => {
            for e in edges {
                let w = match e.weight {
                    Some(w) if w.is_nan() => return Err(PathStatus::MissingWeight),
                    Some(w) if w < 0.0 => return Err(PathStatus::NegativeWeight),
                    Some(w) => w,
                    None => match input.weight_policy {
                        WeightPolicy::Strict => return Err(PathStatus::MissingWeight),
                        WeightPolicy::Default1 => 1.0,
                    },
                };
                // Edge lists are undirected.
                adj[e.from - 1].push((e.to - 1, w));
                adj[e.to - 1].push((e.from - 1, w));
            }
        }
    }
    for neighbors in &mut adj {
        neighbors.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal)));
    }
    Ok(adj)
}

/// Shortest path from `source` to `target` (1-based node ids).
pub fn shortest_path_checked(
    graph: &GraphInput,
    source: usize,
    target: usize,
) -> Result<PathResult, GraphShapeError> {
    let n = crate::validate::graph_node_count(graph).map_err(|e| GraphShapeError::Shape(e.to_string()))?;
    if source == 0 || source > n || target == 0 || target > n {
        return Err(GraphShapeError::Shape(format!(
            "node ids must be in 1..={n}"
        )));
    }
    let adj = match build_adjacency(graph, n) {
        Ok(adj) => adj,
        Err(status) => return Ok(PathResult::status_only(status)),
    };

    let (src, dst) = (source - 1, target - 1);
    let mut dist = vec![f64::INFINITY; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(QueueEntry { node: src, dist: 0.0 });

    while let Some(QueueEntry { node, dist: d }) = heap.pop() {
        if settled[node] {
            continue;
        }
        settled[node] = true;
        if node == dst {
            return Ok(PathResult {
                status: PathStatus::Ok,
                distance: Some(d),
            });
        }
        for &(next, weight) in &adj[node] {
            if settled[next] {
                continue;
            }
            let candidate = d + weight;
            if !candidate.is_finite() {
                // A relaxation past the largest finite double: report it,
                // never saturate.
                return Ok(PathResult::status_only(PathStatus::Overflow));
            }
            if candidate < dist[next] {
                dist[next] = candidate;
                heap.push(QueueEntry {
                    node: next,
                    dist: candidate,
                });
            }
        }
    }
    Ok(PathResult::status_only(PathStatus::Unreachable))
}

/// Convenience entry using the payload's own source/target fields.
pub fn run(graph: &GraphInput) -> Result<PathResult, GraphShapeError> {
    shortest_path_checked(graph, graph.source, graph.target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::payload::Edge;

    fn matrix(cells: Vec<Vec<f64>>, source: usize, target: usize) -> GraphInput {
        let m = cells
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|w| {
                        if w.is_infinite() {
                            Cell::Absent
                        } else {
                            Cell::Weight(w)
                        }
                    })
                    .collect()
            })
            .collect();
        GraphInput {
            form: GraphForm::Matrix(m),
            source,
            target,
            weight_policy: WeightPolicy::Strict,
        }
    }

    const INF: f64 = f64::INFINITY;

    #[test]
    fn triangle_direct_edge() {
        let g = matrix(
            vec![
                vec![0.0, 1.0, 1.0],
                vec![1.0, 0.0, 1.0],
                vec![1.0, 1.0, 0.0],
            ],
            1,
            3,
        );
        let r = run(&g).unwrap();
        assert_eq!(r.status, PathStatus::Ok);
        assert_eq!(r.distance, Some(1.0));
    }

    #[test]
    fn overflow_never_saturates() {
        let g = matrix(
            vec![
                vec![0.0, 1e308, INF],
                vec![1e308, 0.0, 1e308],
                vec![INF, 1e308, 0.0],
            ],
            1,
            3,
        );
        let r = run(&g).unwrap();
        assert_eq!(r.status, PathStatus::Overflow);
        assert_eq!(r.distance, None, "no max-finite-float distance");
    }

    #[test]
    fn negative_weight_rejected_before_search() {
        let g = matrix(
            vec![
                vec![0.0, -1.0, 1.0],
                vec![-1.0, 0.0, 1.0],
                vec![1.0, 1.0, 0.0],
            ],
            1,
            3,
        );
        assert_eq!(run(&g).unwrap().status, PathStatus::NegativeWeight);
    }

    #[test]
    fn missing_weight_policies() {
        let edges = vec![
            Edge { from: 1, to: 2, weight: None },
            Edge { from: 2, to: 3, weight: Some(5.0) },
        ];
        let strict = GraphInput {
            form: GraphForm::Edges(edges.clone()),
            source: 1,
            target: 3,
            weight_policy: WeightPolicy::Strict,
        };
        assert_eq!(run(&strict).unwrap().status, PathStatus::MissingWeight);

        let default1 = GraphInput {
            form: GraphForm::Edges(edges),
            source: 1,
            target: 3,
            weight_policy: WeightPolicy::Default1,
        };
        let r = run(&default1).unwrap();
        assert_eq!(r.status, PathStatus::Ok);
        assert_eq!(r.distance, Some(6.0));
    }

    #[test]
    fn unreachable_target() {
        let g = matrix(
            vec![
                vec![0.0, 1.0, INF],
                vec![1.0, 0.0, INF],
                vec![INF, INF, 0.0],
            ],
            1,
            3,
        );
        assert_eq!(run(&g).unwrap().status, PathStatus::Unreachable);
    }

    #[test]
    fn finite_detour_beats_overflow_edge() {
        // The overflowing relaxation is never reached because the short
        // path settles the target first.
        let g = matrix(
            vec![
                vec![0.0, 1e308, 5.0],
                vec![1e308, 0.0, 1e308],
                vec![5.0, 1e308, 0.0],
            ],
            1,
            3,
        );
        let r = run(&g).unwrap();
        assert_eq!(r.status, PathStatus::Ok);
        assert_eq!(r.distance, Some(5.0));
    }

    #[test]
    fn out_of_range_ids_are_shape_errors() {
        let g = matrix(vec![vec![0.0, 1.0], vec![1.0, 0.0]], 1, 2);
        assert!(shortest_path_checked(&g, 0, 2).is_err());
        assert!(shortest_path_checked(&g, 1, 3).is_err());
    }
}
