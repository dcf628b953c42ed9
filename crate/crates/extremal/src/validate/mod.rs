//! Reference validity oracles and compiled prefilters.
//!
//! `validate` checks a payload against every constraint in a catalog and
//! reports which constraints the input violates. Strict mode checks every
//! must/should constraint; lenient mode skips constraints tagged
//! `lenient_skip` (modeling permissive zone loaders). Limit-probe
//! constraints never produce violations: there is no bound to violate.

mod bgp;
mod dns;
mod graph;
mod uri;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{Constraint, ConstraintCatalog, Protocol, Severity};
use crate::payload::Payload;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "strict")]
    Strict,
    #[serde(rename = "lenient")]
    Lenient,
}

/// One reported violation: which constraint, what was wrong, and where.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint_id: String,
    pub detail: String,
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationResult {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidationResult {
    fn from_violations(violations: Vec<Violation>) -> Self {
        ValidationResult {
            valid: violations.is_empty(),
            violations,
        }
    }

    /// Sorted, de-duplicated set of violated constraint ids.
    pub fn violated_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self
            .violations
            .iter()
            .map(|v| v.constraint_id.clone())
            .collect();
        ids.sort();
        ids.dedup();
        ids
    }
}

#[derive(Debug, Error)]
pub enum ValidateError {
    #[error("payload protocol {payload} does not match catalog protocol {catalog}")]
    ProtocolMismatch { payload: Protocol, catalog: Protocol },
    #[error("malformed {protocol} payload: {detail}")]
    Shape { protocol: Protocol, detail: String },
}

/// Collects violations during a single validation pass, filtering by mode
/// and severity so the per-protocol checkers stay declarative.
pub(crate) struct Sink<'a> {
    mode: Mode,
    violations: Vec<Violation>,
    _catalog: &'a ConstraintCatalog,
}

impl<'a> Sink<'a> {
    fn new(catalog: &'a ConstraintCatalog, mode: Mode) -> Self {
        Sink {
            mode,
            violations: Vec::new(),
            _catalog: catalog,
        }
    }

    /// True when `constraint` participates in this validation pass.
    pub(crate) fn active(&self, constraint: &Constraint) -> bool {
        if constraint.severity == Severity::LimitProbe {
            return false;
        }
        match self.mode {
            Mode::Strict => true,
            Mode::Lenient => !constraint.lenient_skip(),
        }
    }

    pub(crate) fn report(
        &mut self,
        constraint: &Constraint,
        detail: impl Into<String>,
        location: impl Into<String>,
    ) {
        if self.active(constraint) {
            self.violations.push(Violation {
                constraint_id: constraint.id.clone(),
                detail: detail.into(),
                location: location.into(),
            });
        }
    }
}

/// Shape-checks a graph payload (square matrix, 1-based ids in range) and
/// returns its node count.
pub fn graph_node_count(input: &crate::payload::GraphInput) -> Result<usize, ValidateError> {
    graph::check_shape(input)
}

/// Validates `payload` against `catalog` under `mode`.
pub fn validate(
    payload: &Payload,
    catalog: &ConstraintCatalog,
    mode: Mode,
) -> Result<ValidationResult, ValidateError> {
    if payload.protocol() != catalog.protocol {
        return Err(ValidateError::ProtocolMismatch {
            payload: payload.protocol(),
            catalog: catalog.protocol,
        });
    }
    let mut sink = Sink::new(catalog, mode);
    match payload {
        Payload::DnsName(name) => dns::check(name, catalog, &mut sink),
        Payload::Uri(parts) => uri::check(parts, catalog, &mut sink),
        Payload::BgpFilter(input) => bgp::check(input, catalog, &mut sink),
        Payload::Graph(input) => graph::check(input, catalog, &mut sink)?,
    }
    Ok(ValidationResult::from_violations(sink.violations))
}

/// A validator compiled from a catalog, usable as an input gate.
///
/// Behaviorally identical to [`validate`] under the same catalog and mode
/// (the prefilter is the conjunction of the catalog's constraints).
/// Immutable and shareable across threads.
#[derive(Debug, Clone)]
pub struct Prefilter {
    catalog: ConstraintCatalog,
    mode: Mode,
}

impl Prefilter {
    pub fn catalog_id(&self) -> (Protocol, u32) {
        (self.catalog.protocol, self.catalog.version)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Classifies an input: accept (valid) or reject with the violated ids.
    pub fn classify(&self, payload: &Payload) -> Result<ValidationResult, ValidateError> {
        validate(payload, &self.catalog, self.mode)
    }
}

pub fn compile_prefilter(catalog: &ConstraintCatalog, mode: Mode) -> Prefilter {
    Prefilter {
        catalog: catalog.clone(),
        mode,
    }
}
