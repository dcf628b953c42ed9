//! Differential testing harness.
//!
//! Runs a suite against a set of systems-under-test, normalizes raw
//! outcomes into a small comparable class set, and reports discrepancies.
//! Built-in SUTs wrap the reference validators in-process; external SUTs
//! receive emitted artifacts over HTTP or through a command template.

mod emit;
mod external;

pub use emit::{emit_bgp_config, emit_graph_input, emit_http_request, emit_zone_file};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{builtin_catalog, Params, Protocol, Severity};
use crate::payload::{Expectation, Payload, TestCase};
use crate::routemap::{evaluate_route_map, RouteMapVerdict};
use crate::shortest_path::PathStatus;
use crate::validate::{validate, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SutKind {
    #[serde(rename = "builtin-strict")]
    BuiltinStrict,
    #[serde(rename = "builtin-lenient")]
    BuiltinLenient,
    #[serde(rename = "builtin-routemap")]
    BuiltinRoutemap,
    #[serde(rename = "builtin-shortest-path")]
    BuiltinShortestPath,
    #[serde(rename = "external-http")]
    ExternalHttp,
    #[serde(rename = "external-command")]
    ExternalCommand,
}

/// One system under test: a built-in reference or an external adapter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SutDescriptor {
    pub name: String,
    pub kind: SutKind,
    pub protocol: Protocol,
    #[serde(default)]
    pub params: Params,
}

impl SutDescriptor {
    pub fn builtin(name: &str, kind: SutKind, protocol: Protocol) -> Self {
        SutDescriptor {
            name: name.to_string(),
            kind,
            protocol,
            params: Params::new(),
        }
    }

    /// Kind/protocol compatibility per the descriptor contract.
    pub fn check(&self) -> Result<(), HarnessError> {
        let ok = match self.kind {
            SutKind::BuiltinStrict | SutKind::BuiltinLenient | SutKind::ExternalCommand => true,
            SutKind::BuiltinRoutemap => self.protocol == Protocol::BgpFilter,
            SutKind::BuiltinShortestPath => self.protocol == Protocol::Graph,
            SutKind::ExternalHttp => self.protocol == Protocol::Uri,
        };
        if ok {
            Ok(())
        } else {
            Err(HarnessError::IncompatibleSut {
                sut: self.name.clone(),
                kind: self.kind,
                protocol: self.protocol,
            })
        }
    }

    /// External commands run serially unless declared concurrent.
    fn serial(&self) -> bool {
        match self.kind {
            SutKind::ExternalCommand => !self
                .params
                .get("concurrent")
                .and_then(|v| v.as_bool())
                .unwrap_or(false),
            _ => false,
        }
    }
}

/// SUT set file: `{"suts": [...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SutSetFile {
    pub suts: Vec<SutDescriptor>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawValue {
    Int(i64),
    Token(String),
}

impl fmt::Display for RawValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RawValue::Int(n) => write!(f, "{n}"),
            RawValue::Token(t) => f.write_str(t),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictChannel {
    #[serde(rename = "status-code")]
    StatusCode,
    #[serde(rename = "exit-code")]
    ExitCode,
    #[serde(rename = "load-result")]
    LoadResult,
    #[serde(rename = "eval-result")]
    EvalResult,
    #[serde(rename = "exception")]
    Exception,
}

/// An implementation's raw outcome before normalization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawVerdict {
    pub channel: VerdictChannel,
    pub value: RawValue,
    #[serde(default)]
    pub detail: String,
}

impl RawVerdict {
    pub fn token(channel: VerdictChannel, token: &str, detail: impl Into<String>) -> Self {
        RawVerdict {
            channel,
            value: RawValue::Token(token.to_string()),
            detail: detail.into(),
        }
    }

    pub fn code(channel: VerdictChannel, code: i64, detail: impl Into<String>) -> Self {
        RawVerdict {
            channel,
            value: RawValue::Int(code),
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VerdictClass {
    #[serde(rename = "accept")]
    Accept,
    #[serde(rename = "reject")]
    Reject,
    #[serde(rename = "redirect")]
    Redirect,
    #[serde(rename = "not-found-class")]
    NotFoundClass,
    #[serde(rename = "server-error")]
    ServerError,
    #[serde(rename = "crash-suspect")]
    CrashSuspect,
    #[serde(rename = "timeout")]
    Timeout,
    #[serde(rename = "agreement-datum")]
    AgreementDatum,
}

impl VerdictClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            VerdictClass::Accept => "accept",
            VerdictClass::Reject => "reject",
            VerdictClass::Redirect => "redirect",
            VerdictClass::NotFoundClass => "not-found-class",
            VerdictClass::ServerError => "server-error",
            VerdictClass::CrashSuspect => "crash-suspect",
            VerdictClass::Timeout => "timeout",
            VerdictClass::AgreementDatum => "agreement-datum",
        }
    }
}

impl fmt::Display for VerdictClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizedVerdict {
    pub class: VerdictClass,
    pub raw: RawVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiscrepancyKind {
    #[serde(rename = "class-divergence")]
    ClassDivergence,
    #[serde(rename = "expected-violation")]
    ExpectedViolation,
    #[serde(rename = "crash-suspect")]
    CrashSuspect,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub test_id: String,
    pub kind: DiscrepancyKind,
    pub details: String,
}

/// Test × SUT verdict matrix plus the discrepancy list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferentialReport {
    pub suite: String,
    pub matrix: BTreeMap<String, BTreeMap<String, NormalizedVerdict>>,
    pub discrepancies: Vec<Discrepancy>,
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("SUT \"{sut}\": kind {kind:?} is not compatible with protocol {protocol}")]
    IncompatibleSut {
        sut: String,
        kind: SutKind,
        protocol: Protocol,
    },
    #[error("test \"{test}\" protocol {test_protocol} does not match SUT \"{sut}\" protocol {sut_protocol}")]
    ProtocolMismatch {
        test: String,
        test_protocol: Protocol,
        sut: String,
        sut_protocol: Protocol,
    },
    #[error("raw verdict channel {channel:?} is not compatible with SUT kind {kind:?}")]
    ChannelMismatch {
        channel: VerdictChannel,
        kind: SutKind,
    },
    #[error("test \"{test}\" is {got}, expected {wanted}")]
    WrongProtocol {
        test: String,
        wanted: Protocol,
        got: Protocol,
    },
    #[error("parallelism must be >= 1")]
    BadParallelism,
    #[error("duplicate test id \"{id}\" in the suite")]
    DuplicateTestId { id: String },
    #[error("duplicate SUT name \"{name}\"")]
    DuplicateSutName { name: String },
    #[error("artifact I/O: {0}")]
    Io(String),
}

// ── Normalization ────────────────────────────────────────────────────────

fn channel_compatible(channel: VerdictChannel, kind: SutKind) -> bool {
    use SutKind::*;
    use VerdictChannel::*;
    if channel == Exception {
        return true;
    }
    match kind {
        BuiltinStrict | BuiltinLenient | BuiltinRoutemap | BuiltinShortestPath => {
            channel == EvalResult
        }
        ExternalHttp => channel == StatusCode,
        ExternalCommand => channel == ExitCode || channel == LoadResult,
    }
}

/// Maps a raw outcome to its verdict class by the published mapping only;
/// no SUT names appear here, and every reachable raw verdict maps to
/// exactly one class.
pub fn normalize_verdict(
    raw: &RawVerdict,
    sut_kind: SutKind,
) -> Result<NormalizedVerdict, HarnessError> {
    if !channel_compatible(raw.channel, sut_kind) {
        return Err(HarnessError::ChannelMismatch {
            channel: raw.channel,
            kind: sut_kind,
        });
    }
    let class = match (raw.channel, &raw.value) {
        (VerdictChannel::StatusCode, RawValue::Int(code)) => match code {
            200..=299 => VerdictClass::Accept,
            300..=399 => VerdictClass::Redirect,
            403 | 404 => VerdictClass::NotFoundClass,
            400..=499 => VerdictClass::Reject,
            500..=599 => VerdictClass::ServerError,
            _ => VerdictClass::CrashSuspect,
        },
        (VerdictChannel::StatusCode, RawValue::Token(_)) => VerdictClass::CrashSuspect,
        (VerdictChannel::ExitCode, RawValue::Int(0)) => VerdictClass::Accept,
        (VerdictChannel::ExitCode, RawValue::Int(_)) => VerdictClass::Reject,
        (VerdictChannel::ExitCode, RawValue::Token(_)) => VerdictClass::CrashSuspect,
        (VerdictChannel::LoadResult, RawValue::Token(token)) => match token.as_str() {
            "load-ok" => VerdictClass::Accept,
            "load-reject" => VerdictClass::Reject,
            "load-servfail" => VerdictClass::ServerError,
            _ => VerdictClass::CrashSuspect,
        },
        (VerdictChannel::LoadResult, RawValue::Int(_)) => VerdictClass::CrashSuspect,
        (VerdictChannel::EvalResult, RawValue::Token(token)) => match token.as_str() {
            "valid" | "permit" | "ok" => VerdictClass::Accept,
            "invalid" | "deny" | "config-error" | "payload-error" | "overflow"
            | "negative-weight" | "missing-weight" | "unreachable" | "shape-error" => {
                VerdictClass::Reject
            }
            t if t.starts_with("datum") => VerdictClass::AgreementDatum,
            _ => VerdictClass::CrashSuspect,
        },
        (VerdictChannel::EvalResult, RawValue::Int(_)) => VerdictClass::CrashSuspect,
        (VerdictChannel::Exception, RawValue::Token(token)) if token == "timeout" => {
            VerdictClass::Timeout
        }
        (VerdictChannel::Exception, _) => VerdictClass::CrashSuspect,
    };
    Ok(NormalizedVerdict {
        class,
        raw: raw.clone(),
    })
}

// ── Execution ────────────────────────────────────────────────────────────

fn execute_builtin(test: &TestCase, sut: &SutDescriptor) -> RawVerdict {
    use VerdictChannel::EvalResult;
    match sut.kind {
        SutKind::BuiltinStrict | SutKind::BuiltinLenient => {
            let mode = if sut.kind == SutKind::BuiltinStrict {
                Mode::Strict
            } else {
                Mode::Lenient
            };
            let catalog = builtin_catalog(test.protocol);
            match validate(&test.input, &catalog, mode) {
                Ok(result) if result.valid => RawVerdict::token(EvalResult, "valid", ""),
                Ok(result) => {
                    RawVerdict::token(EvalResult, "invalid", result.violated_ids().join(", "))
                }
                Err(e) => RawVerdict::token(EvalResult, "payload-error", e.to_string()),
            }
        }
        SutKind::BuiltinRoutemap => {
            let Payload::BgpFilter(input) = &test.input else {
                return RawVerdict::token(EvalResult, "payload-error", "not a bgp payload");
            };
            match evaluate_route_map(&input.route, &input.rmap) {
                Ok(outcome) => match outcome.verdict {
                    RouteMapVerdict::Permit => RawVerdict::token(EvalResult, "permit", ""),
                    RouteMapVerdict::Deny => RawVerdict::token(
                        EvalResult,
                        "deny",
                        format!("{:?}", outcome.reason),
                    ),
                },
                Err(e) => RawVerdict::token(EvalResult, "config-error", e.to_string()),
            }
        }
        SutKind::BuiltinShortestPath => {
            let Payload::Graph(graph) = &test.input else {
                return RawVerdict::token(EvalResult, "payload-error", "not a graph payload");
            };
            match crate::shortest_path::run(graph) {
                Ok(result) => {
                    let detail = match (result.status, result.distance) {
                        (PathStatus::Ok, Some(d)) => format!("distance {d}"),
                        _ => String::new(),
                    };
                    RawVerdict::token(EvalResult, result.status.as_str(), detail)
                }
                Err(e) => RawVerdict::token(EvalResult, "shape-error", e.to_string()),
            }
        }
        SutKind::ExternalHttp | SutKind::ExternalCommand => {
            unreachable!("external kinds handled by the external module")
        }
    }
}

fn execute_one(test: &TestCase, sut: &SutDescriptor) -> RawVerdict {
    match sut.kind {
        SutKind::ExternalHttp => external::run_http(test, sut),
        SutKind::ExternalCommand => external::run_command(test, sut),
        _ => execute_builtin(test, sut),
    }
}

/// Runs every test against every SUT. The matrix is always complete: SUT
/// failures become timeout/crash-suspect verdicts, never aborted runs, and
/// the report is ordering-normalized so parallelism does not affect content.
pub fn run_matrix(
    tests: &[TestCase],
    suts: &[SutDescriptor],
    parallelism: usize,
) -> Result<DifferentialReport, HarnessError> {
    if parallelism < 1 {
        return Err(HarnessError::BadParallelism);
    }
    let mut ids = BTreeSet::new();
    for test in tests {
        if !ids.insert(test.id.as_str()) {
            return Err(HarnessError::DuplicateTestId {
                id: test.id.clone(),
            });
        }
    }
    let mut names = BTreeSet::new();
    for sut in suts {
        if !names.insert(sut.name.as_str()) {
            return Err(HarnessError::DuplicateSutName {
                name: sut.name.clone(),
            });
        }
    }
    for sut in suts {
        sut.check()?;
        for test in tests {
            if test.protocol != sut.protocol {
                return Err(HarnessError::ProtocolMismatch {
                    test: test.id.clone(),
                    test_protocol: test.protocol,
                    sut: sut.name.clone(),
                    sut_protocol: sut.protocol,
                });
            }
        }
    }

    let jobs: Vec<(usize, usize)> = (0..tests.len())
        .flat_map(|t| (0..suts.len()).map(move |s| (t, s)))
        .collect();
    let next = Mutex::new(0usize);
    let results: Mutex<Vec<(String, String, NormalizedVerdict)>> = Mutex::new(Vec::new());
    let serial_locks: Vec<Mutex<()>> = suts.iter().map(|_| Mutex::new(())).collect();

    std::thread::scope(|scope| {
        for _ in 0..parallelism.min(jobs.len().max(1)) {
            scope.spawn(|| loop {
                let job = {
                    let mut guard = next.lock().expect("job counter poisoned");
                    let index = *guard;
                    if index >= jobs.len() {
                        return;
                    }
                    *guard += 1;
                    jobs[index]
                };
                let (t, s) = job;
                let (test, sut) = (&tests[t], &suts[s]);
                let raw = if sut.serial() {
                    let _guard = serial_locks[s].lock().expect("serial lock poisoned");
                    execute_one(test, sut)
                } else {
                    execute_one(test, sut)
                };
                let normalized = normalize_verdict(&raw, sut.kind)
                    .expect("execute_one only emits kind-compatible channels");
                results
                    .lock()
                    .expect("results poisoned")
                    .push((test.id.clone(), sut.name.clone(), normalized));
            });
        }
    });

    let mut matrix: BTreeMap<String, BTreeMap<String, NormalizedVerdict>> = BTreeMap::new();
    for (test_id, sut_name, verdict) in results.into_inner().expect("results poisoned") {
        matrix.entry(test_id).or_default().insert(sut_name, verdict);
    }
    let mut report = DifferentialReport {
        suite: tests
            .first()
            .map(|t| t.protocol.to_string())
            .unwrap_or_else(|| "empty".to_string()),
        matrix,
        discrepancies: Vec::new(),
    };
    report.discrepancies = find_discrepancies(&report, tests);
    Ok(report)
}

/// Severity lookup for expected-violation detection; ids missing from the
/// builtin catalog are treated as must (conservative).
fn has_must_violation(test: &TestCase) -> bool {
    let catalog = builtin_catalog(test.protocol);
    test.violates.iter().any(|id| {
        catalog
            .get(id)
            .map(|c| c.severity == Severity::Must)
            .unwrap_or(true)
    })
}

/// Scans a complete report for the three discrepancy kinds.
pub fn find_discrepancies(report: &DifferentialReport, suite: &[TestCase]) -> Vec<Discrepancy> {
    let by_id: BTreeMap<&str, &TestCase> = suite.iter().map(|t| (t.id.as_str(), t)).collect();
    let mut out = Vec::new();

    for (test_id, row) in &report.matrix {
        let test = by_id.get(test_id.as_str());
        let agreement_only = test
            .map(|t| t.expected == Expectation::AgreementOnly)
            .unwrap_or(false);

        let classes: BTreeSet<VerdictClass> = row.values().map(|v| v.class).collect();
        if classes.len() > 1 {
            let cells: Vec<String> = row
                .iter()
                .map(|(sut, v)| format!("{sut}={}", v.class))
                .collect();
            out.push(Discrepancy {
                test_id: test_id.clone(),
                kind: DiscrepancyKind::ClassDivergence,
                details: cells.join(", "),
            });
        }
        // For agreement-only probes divergence is the only expectation
        // signal; the crash-suspect passthrough below still applies.
        if let Some(test) = test.filter(|_| !agreement_only) {
            if test.expected == Expectation::Reject && has_must_violation(test) {
                let accepting: Vec<&str> = row
                    .iter()
                    .filter(|(_, v)| v.class == VerdictClass::Accept)
                    .map(|(sut, _)| sut.as_str())
                    .collect();
                if !accepting.is_empty() {
                    out.push(Discrepancy {
                        test_id: test_id.clone(),
                        kind: DiscrepancyKind::ExpectedViolation,
                        details: format!(
                            "must-severity case accepted by: {}",
                            accepting.join(", ")
                        ),
                    });
                }
            }
        }

        for (sut, verdict) in row {
            if matches!(
                verdict.class,
                VerdictClass::ServerError | VerdictClass::CrashSuspect
            ) {
                out.push(Discrepancy {
                    test_id: test_id.clone(),
                    kind: DiscrepancyKind::CrashSuspect,
                    details: format!("{sut} returned {} ({})", verdict.class, verdict.raw.value),
                });
            }
        }
    }
    out
}

/// Fixed-width text rendering of the verdict matrix (rows = tests,
/// columns = SUTs), used verbatim in feedback prompts.
pub fn render_report_table(report: &DifferentialReport) -> String {
    let sut_names: BTreeSet<&str> = report
        .matrix
        .values()
        .flat_map(|row| row.keys().map(|s| s.as_str()))
        .collect();
    let sut_names: Vec<&str> = sut_names.into_iter().collect();

    let mut test_width = "test".len();
    for id in report.matrix.keys() {
        test_width = test_width.max(id.len());
    }
    let mut col_widths: Vec<usize> = sut_names.iter().map(|s| s.len()).collect();
    for row in report.matrix.values() {
        for (i, sut) in sut_names.iter().enumerate() {
            if let Some(v) = row.get(*sut) {
                col_widths[i] = col_widths[i].max(v.class.as_str().len());
            }
        }
    }

    let mut out = String::new();
    out.push_str(&format!("{:<test_width$}", "test"));
    for (i, sut) in sut_names.iter().enumerate() {
        out.push_str(&format!(" | {:<width$}", sut, width = col_widths[i]));
    }
    out.push('\n');
    out.push_str(&"-".repeat(test_width));
    for width in &col_widths {
        out.push_str("-+-");
        out.push_str(&"-".repeat(*width));
    }
    out.push('\n');
    for (id, row) in &report.matrix {
        out.push_str(&format!("{id:<test_width$}"));
        for (i, sut) in sut_names.iter().enumerate() {
            let cell = row.get(*sut).map(|v| v.class.as_str()).unwrap_or("-");
            out.push_str(&format!(" | {:<width$}", cell, width = col_widths[i]));
        }
        out.push('\n');
    }
    out
}
