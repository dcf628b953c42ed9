//! Graph input checks for the shortest-path domain.
//!
//! Matrix `Absent` cells mean "no edge" and are never weight violations.
//! The finite-weight rule also owns the accumulation corner: two edge
//! weights whose sum is not finite would overflow any path containing both,
//! so such graphs are rejected up front.

use crate::catalog::{ConstraintCatalog, ConstraintKind, Protocol};
use crate::payload::{Cell, GraphForm, GraphInput, WeightPolicy};

use super::{Sink, ValidateError};

/// Named edge weight with an input location, shared by the weight rules.
struct SeenWeight {
    weight: f64,
    location: String,
}

/// Checks matrix squareness and node-id ranges; the weight rules assume a
/// well-formed shape.
pub(crate) fn check_shape(input: &GraphInput) -> Result<usize, ValidateError> {
    let shape_err = |detail: String| ValidateError::Shape {
        protocol: Protocol::Graph,
        detail,
    };
    let node_count = match &input.form {
        GraphForm::Matrix(m) => {
            let n = m.len();
            if n == 0 {
                return Err(shape_err("matrix has no rows".into()));
            }
            for (i, row) in m.iter().enumerate() {
                if row.len() != n {
                    return Err(shape_err(format!(
                        "matrix is not square: row {} has {} cells, expected {n}",
                        i + 1,
                        row.len()
                    )));
                }
            }
            n
        }
        GraphForm::Edges(edges) => {
            let mut max = 0;
            for (i, e) in edges.iter().enumerate() {
                if e.from == 0 || e.to == 0 {
                    return Err(shape_err(format!("edge {} uses node id 0 (ids are 1-based)", i + 1)));
                }
                max = max.max(e.from).max(e.to);
            }
            max.max(input.source).max(input.target)
        }
    };
    if input.source == 0 || input.source > node_count {
        return Err(shape_err(format!(
            "source {} out of range 1..={node_count}",
            input.source
        )));
    }
    if input.target == 0 || input.target > node_count {
        return Err(shape_err(format!(
            "target {} out of range 1..={node_count}",
            input.target
        )));
    }
    Ok(node_count)
}

/// Every explicitly-given weight, one entry per matrix cell or edge.
fn explicit_weights(input: &GraphInput) -> Vec<SeenWeight> {
    let mut out = Vec::new();
    match &input.form {
        GraphForm::Matrix(m) => {
            for (i, row) in m.iter().enumerate() {
                for (j, cell) in row.iter().enumerate() {
                    if i == j {
                        continue;
                    }
                    if let Cell::Weight(w) = cell {
                        out.push(SeenWeight {
                            weight: *w,
                            location: format!("matrix[{}][{}]", i + 1, j + 1),
                        });
                    }
                }
            }
        }
        GraphForm::Edges(edges) => {
            for (i, e) in edges.iter().enumerate() {
                if let Some(w) = e.weight {
                    out.push(SeenWeight {
                        weight: w,
                        location: format!("edges[{i}]"),
                    });
                }
            }
        }
    }
    out
}

/// One weight per distinct edge, for the two-edge overflow check: matrix
/// cells collapse to unordered pairs (a symmetric matrix models each
/// undirected edge once), taking the larger direction.
fn pair_weights(input: &GraphInput) -> Vec<f64> {
    match &input.form {
        GraphForm::Matrix(m) => {
            let cell_weight = |i: usize, j: usize| match m[i].get(j) {
                Some(Cell::Weight(w)) if w.is_finite() => Some(*w),
                _ => None,
            };
            let mut out = Vec::new();
            for i in 0..m.len() {
                for j in (i + 1)..m.len() {
                    match (cell_weight(i, j), cell_weight(j, i)) {
                        (Some(a), Some(b)) => out.push(a.max(b)),
                        (Some(a), None) => out.push(a),
                        (None, Some(b)) => out.push(b),
                        (None, None) => {}
                    }
                }
            }
            out
        }
        GraphForm::Edges(edges) => edges
            .iter()
            .filter_map(|e| e.weight)
            .filter(|w| w.is_finite())
            .collect(),
    }
}

pub(crate) fn check(
    input: &GraphInput,
    catalog: &ConstraintCatalog,
    sink: &mut Sink<'_>,
) -> Result<(), ValidateError> {
    check_shape(input)?;
    let weights = explicit_weights(input);

    for constraint in &catalog.constraints {
        match constraint.kind {
            ConstraintKind::NumericRange if constraint.param_str("field") == Some("weight") => {
                let min = constraint.param_f64("min").unwrap_or(f64::NEG_INFINITY);
                for seen in &weights {
                    if seen.weight.is_finite() && seen.weight < min {
                        sink.report(
                            constraint,
                            format!("negative edge weight {}", seen.weight),
                            seen.location.clone(),
                        );
                    }
                }
            }
            ConstraintKind::Structural => match constraint.param_str("rule") {
                Some("graph-finite-weight") => {
                    for seen in &weights {
                        if !seen.weight.is_finite() {
                            sink.report(
                                constraint,
                                format!("non-finite edge weight {}", seen.weight),
                                seen.location.clone(),
                            );
                        }
                    }
                    let mut finite = pair_weights(input);
                    finite.sort_by(|a, b| b.partial_cmp(a).unwrap());
                    if finite.len() >= 2 && !(finite[0] + finite[1]).is_finite() {
                        sink.report(
                            constraint,
                            format!(
                                "weights {} and {} sum past the largest finite float",
                                finite[0], finite[1]
                            ),
                            "graph",
                        );
                    }
                }
                Some("graph-weight-defined") => {
                    if input.weight_policy != WeightPolicy::Strict {
                        continue;
                    }
                    if let GraphForm::Edges(edges) = &input.form {
                        for (i, e) in edges.iter().enumerate() {
                            if e.weight.is_none() {
                                sink.report(
                                    constraint,
                                    "edge has no weight under the strict policy",
                                    format!("edges[{i}]"),
                                );
                            }
                        }
                    }
                }
                _ => {}
            },
            _ => {}
        }
    }
    Ok(())
}
