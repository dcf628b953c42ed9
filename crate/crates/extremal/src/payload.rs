//! Protocol input payloads and the test case model.
//!
//! The suite file format is a UTF-8 JSON array of test case objects. The
//! payload shape under `input` depends on `protocol`: a bare name string for
//! DNS, a component map for URIs, a route/route-map pair for BGP filtering
//! (Fig-style keys: "prefix", "local-pref", "med", "as-path", "origin",
//! "community", "prefix-list", "community-list", "as-path-list",
//! "rmap-action"), and a matrix-or-edge-list object for graphs.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

use crate::catalog::Protocol;

#[derive(Debug, Error)]
pub enum PayloadError {
    #[error("payload does not match the {protocol} shape: {detail}")]
    Shape { protocol: Protocol, detail: String },
}

fn shape(protocol: Protocol, detail: impl Into<String>) -> PayloadError {
    PayloadError::Shape {
        protocol,
        detail: detail.into(),
    }
}

// ── URI ──────────────────────────────────────────────────────────────────

/// URI split into RFC 3986 components. Absent components are `None`;
/// the empty string is a present-but-empty component.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct UriParts {
    pub scheme: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub userinfo: Option<String>,
    pub host: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub port: Option<String>,
    pub path: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub query: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fragment: Option<String>,
}

impl UriParts {
    /// Recomposes the full URI string (RFC 3986 §5.3 composition).
    pub fn to_uri_string(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.scheme);
        out.push_str("://");
        if let Some(ui) = &self.userinfo {
            out.push_str(ui);
            out.push('@');
        }
        out.push_str(&self.host);
        if let Some(port) = &self.port {
            out.push(':');
            out.push_str(port);
        }
        out.push_str(&self.path);
        if let Some(q) = &self.query {
            out.push('?');
            out.push_str(q);
        }
        if let Some(f) = &self.fragment {
            out.push('#');
            out.push_str(f);
        }
        out
    }

    pub fn component(&self, name: &str) -> Option<&str> {
        match name {
            "scheme" => Some(self.scheme.as_str()),
            "host" => Some(self.host.as_str()),
            "path" => Some(self.path.as_str()),
            "userinfo" => self.userinfo.as_deref(),
            "port" => self.port.as_deref(),
            "query" => self.query.as_deref(),
            "fragment" => self.fragment.as_deref(),
            _ => None,
        }
    }

    pub fn set_component(&mut self, name: &str, value: Option<String>) {
        match name {
            "scheme" => self.scheme = value.unwrap_or_default(),
            "host" => self.host = value.unwrap_or_default(),
            "path" => self.path = value.unwrap_or_default(),
            "userinfo" => self.userinfo = value,
            "port" => self.port = value,
            "query" => self.query = value,
            "fragment" => self.fragment = value,
            _ => {}
        }
    }
}

pub const URI_COMPONENTS: [&str; 7] = [
    "scheme", "userinfo", "host", "port", "path", "query", "fragment",
];

// ── BGP ──────────────────────────────────────────────────────────────────

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct BgpRoute {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub prefix: Option<String>,
    #[serde(rename = "local-pref", skip_serializing_if = "Option::is_none", default)]
    pub local_pref: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub med: Option<i64>,
    #[serde(rename = "as-path", skip_serializing_if = "Option::is_none", default)]
    pub as_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub origin: Option<String>,
    #[serde(default)]
    pub community: Vec<String>,
}

/// One `{match, action}` entry in a route-map match list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchEntry {
    #[serde(rename = "match")]
    pub pattern: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub action: Option<String>,
}

impl MatchEntry {
    pub fn new(pattern: &str, action: &str) -> Self {
        MatchEntry {
            pattern: pattern.to_string(),
            action: Some(action.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct RouteMap {
    #[serde(rename = "local-pref", skip_serializing_if = "Option::is_none", default)]
    pub local_pref: Option<i64>,
    #[serde(rename = "prefix-list", default)]
    pub prefix_list: Vec<MatchEntry>,
    #[serde(rename = "community-list", default)]
    pub community_list: Vec<MatchEntry>,
    #[serde(rename = "as-path-list", default)]
    pub as_path_list: Vec<MatchEntry>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub med: Option<i64>,
    #[serde(rename = "rmap-action", skip_serializing_if = "Option::is_none", default)]
    pub rmap_action: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct BgpInput {
    pub route: BgpRoute,
    pub rmap: RouteMap,
}

// ── Graph ────────────────────────────────────────────────────────────────

/// A matrix cell: a weight, or no edge. The JSON forms are a number,
/// the strings "INF"/"NaN", or null (no edge).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Weight(f64),
    Absent,
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        match self {
            Cell::Absent => ser.serialize_str("INF"),
            Cell::Weight(w) if w.is_nan() => ser.serialize_str("NaN"),
            Cell::Weight(w) if w.is_infinite() => ser.serialize_str("INF"),
            Cell::Weight(w) => ser.serialize_f64(*w),
        }
    }
}

impl<'de> Deserialize<'de> for Cell {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(de)?;
        cell_from_value(&v).map_err(serde::de::Error::custom)
    }
}

fn cell_from_value(v: &Value) -> Result<Cell, String> {
    match v {
        Value::Null => Ok(Cell::Absent),
        Value::Number(n) => n
            .as_f64()
            .map(Cell::Weight)
            .ok_or_else(|| "non-float matrix cell".to_string()),
        Value::String(s) => match s.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "+inf" => Ok(Cell::Absent),
            "nan" => Ok(Cell::Weight(f64::NAN)),
            "-inf" | "-infinity" => Ok(Cell::Weight(f64::NEG_INFINITY)),
            other => Err(format!("unrecognized matrix cell \"{other}\"")),
        },
        other => Err(format!("unrecognized matrix cell {other}")),
    }
}

/// Edge-list entry; node ids are 1-based. `weight: None` means the weight
/// was left undefined (meaningful under the weight policy).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    #[serde(
        skip_serializing_if = "Option::is_none",
        default,
        serialize_with = "ser_weight",
        deserialize_with = "de_weight"
    )]
    pub weight: Option<f64>,
}

fn ser_weight<S: Serializer>(w: &Option<f64>, ser: S) -> Result<S::Ok, S::Error> {
    match w {
        Some(w) if w.is_nan() => ser.serialize_str("NaN"),
        Some(w) if *w == f64::INFINITY => ser.serialize_str("INF"),
        Some(w) if *w == f64::NEG_INFINITY => ser.serialize_str("-INF"),
        Some(w) => ser.serialize_f64(*w),
        None => ser.serialize_none(),
    }
}

fn de_weight<'de, D: serde::Deserializer<'de>>(de: D) -> Result<Option<f64>, D::Error> {
    let v = Value::deserialize(de)?;
    match &v {
        Value::Null => Ok(None),
        Value::Number(n) => Ok(n.as_f64()),
        Value::String(s) => match s.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "+inf" => Ok(Some(f64::INFINITY)),
            "-inf" | "-infinity" => Ok(Some(f64::NEG_INFINITY)),
            "nan" => Ok(Some(f64::NAN)),
            other => Err(serde::de::Error::custom(format!(
                "unrecognized edge weight \"{other}\""
            ))),
        },
        other => Err(serde::de::Error::custom(format!(
            "unrecognized edge weight {other}"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GraphForm {
    /// Adjacency matrix, row-major; `Absent` cells mean "no edge".
    /// Matrix edges are directed as given.
    Matrix(Vec<Vec<Cell>>),
    /// Undirected edge list with 1-based node ids.
    Edges(Vec<Edge>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum WeightPolicy {
    #[serde(rename = "strict")]
    #[default]
    Strict,
    #[serde(rename = "default-1")]
    Default1,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphInput {
    pub form: GraphForm,
    /// 1-based source node id.
    pub source: usize,
    /// 1-based target node id.
    pub target: usize,
    pub weight_policy: WeightPolicy,
}

impl Serialize for GraphInput {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("GraphInput", 4)?;
        match &self.form {
            GraphForm::Matrix(m) => st.serialize_field("matrix", m)?,
            GraphForm::Edges(e) => st.serialize_field("edges", e)?,
        }
        st.serialize_field("source", &self.source)?;
        st.serialize_field("target", &self.target)?;
        st.serialize_field("weight-policy", &self.weight_policy)?;
        st.end()
    }
}

#[derive(Deserialize)]
struct GraphInputFile {
    #[serde(default)]
    matrix: Option<Vec<Vec<Cell>>>,
    #[serde(default)]
    edges: Option<Vec<Edge>>,
    source: usize,
    target: usize,
    #[serde(rename = "weight-policy", default)]
    weight_policy: WeightPolicy,
}

impl<'de> Deserialize<'de> for GraphInput {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let file = GraphInputFile::deserialize(de)?;
        let form = match (file.matrix, file.edges) {
            (Some(m), None) => GraphForm::Matrix(m),
            (None, Some(e)) => GraphForm::Edges(e),
            (Some(_), Some(_)) => {
                return Err(serde::de::Error::custom(
                    "graph input must have either \"matrix\" or \"edges\", not both",
                ))
            }
            (None, None) => {
                return Err(serde::de::Error::custom(
                    "graph input needs a \"matrix\" or an \"edges\" list",
                ))
            }
        };
        Ok(GraphInput {
            form,
            source: file.source,
            target: file.target,
            weight_policy: file.weight_policy,
        })
    }
}

// ── Payload ──────────────────────────────────────────────────────────────

/// Protocol-specific test input.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    DnsName(String),
    Uri(UriParts),
    BgpFilter(BgpInput),
    Graph(GraphInput),
}

impl Payload {
    pub fn protocol(&self) -> Protocol {
        match self {
            Payload::DnsName(_) => Protocol::DnsName,
            Payload::Uri(_) => Protocol::Uri,
            Payload::BgpFilter(_) => Protocol::BgpFilter,
            Payload::Graph(_) => Protocol::Graph,
        }
    }

    pub fn to_value(&self) -> Value {
        match self {
            Payload::DnsName(name) => Value::String(name.clone()),
            Payload::Uri(parts) => serde_json::to_value(parts).expect("uri payload serializes"),
            Payload::BgpFilter(input) => {
                serde_json::to_value(input).expect("bgp payload serializes")
            }
            Payload::Graph(input) => serde_json::to_value(input).expect("graph payload serializes"),
        }
    }

    /// Parses a payload value under the given protocol's shape.
    pub fn from_value(protocol: Protocol, value: &Value) -> Result<Payload, PayloadError> {
        match protocol {
            Protocol::DnsName => match value {
                Value::String(s) => Ok(Payload::DnsName(s.clone())),
                Value::Object(obj) => obj
                    .get("name")
                    .and_then(Value::as_str)
                    .map(|s| Payload::DnsName(s.to_string()))
                    .ok_or_else(|| shape(protocol, "expected a name string")),
                _ => Err(shape(protocol, "expected a name string")),
            },
            Protocol::Uri => serde_json::from_value(value.clone())
                .map(Payload::Uri)
                .map_err(|e| shape(protocol, e.to_string())),
            Protocol::BgpFilter => serde_json::from_value(value.clone())
                .map(Payload::BgpFilter)
                .map_err(|e| shape(protocol, e.to_string())),
            Protocol::Graph => serde_json::from_value(value.clone())
                .map(Payload::Graph)
                .map_err(|e| shape(protocol, e.to_string())),
        }
    }

    pub fn as_dns(&self) -> Option<&str> {
        match self {
            Payload::DnsName(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_uri(&self) -> Option<&UriParts> {
        match self {
            Payload::Uri(u) => Some(u),
            _ => None,
        }
    }

    pub fn as_bgp(&self) -> Option<&BgpInput> {
        match self {
            Payload::BgpFilter(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_graph(&self) -> Option<&GraphInput> {
        match self {
            Payload::Graph(g) => Some(g),
            _ => None,
        }
    }
}

// ── TestCase ─────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expectation {
    #[serde(rename = "reject")]
    Reject,
    #[serde(rename = "agreement-only")]
    AgreementOnly,
    #[serde(rename = "accept")]
    Accept,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "builtin")]
    Builtin,
    #[serde(rename = "llm")]
    Llm,
    #[serde(rename = "manual")]
    Manual,
}

/// One protocol input with its violation contract.
#[derive(Debug, Clone, PartialEq)]
pub struct TestCase {
    pub id: String,
    pub protocol: Protocol,
    pub input: Payload,
    pub violates: Vec<String>,
    pub expected: Expectation,
    pub provenance: Provenance,
    pub notes: String,
}

impl Serialize for TestCase {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let mut st = ser.serialize_struct("TestCase", 7)?;
        st.serialize_field("id", &self.id)?;
        st.serialize_field("protocol", &self.protocol)?;
        st.serialize_field("input", &self.input.to_value())?;
        st.serialize_field("violates", &self.violates)?;
        st.serialize_field("expected", &self.expected)?;
        st.serialize_field("provenance", &self.provenance)?;
        st.serialize_field("notes", &self.notes)?;
        st.end()
    }
}

#[derive(Deserialize)]
struct TestCaseFile {
    id: String,
    protocol: Protocol,
    input: Value,
    #[serde(default)]
    violates: Vec<String>,
    expected: Expectation,
    provenance: Provenance,
    #[serde(default)]
    notes: String,
}

impl<'de> Deserialize<'de> for TestCase {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let file = TestCaseFile::deserialize(de)?;
        let input = Payload::from_value(file.protocol, &file.input)
            .map_err(serde::de::Error::custom)?;
        Ok(TestCase {
            id: file.id,
            protocol: file.protocol,
            input,
            violates: file.violates,
            expected: file.expected,
            provenance: file.provenance,
            notes: file.notes,
        })
    }
}

impl TestCase {
    /// Checks the test case invariants. LLM-provenance cases are exempt from
    /// the expected/violates coupling (their contract is recomputed and any
    /// disagreement is carried in notes), so only shape is enforced there.
    pub fn check_shape(&self) -> Result<(), String> {
        if self.input.protocol() != self.protocol {
            return Err(format!(
                "case {}: payload protocol {} does not match declared {}",
                self.id,
                self.input.protocol(),
                self.protocol
            ));
        }
        if self.provenance == Provenance::Llm {
            return Ok(());
        }
        match self.expected {
            Expectation::Accept if !self.violates.is_empty() => Err(format!(
                "case {}: expected=accept requires empty violates",
                self.id
            )),
            Expectation::Reject if self.violates.is_empty() => Err(format!(
                "case {}: expected=reject requires a violated constraint",
                self.id
            )),
            Expectation::Reject | Expectation::AgreementOnly
                if self.provenance == Provenance::Builtin && self.violates.len() != 1 =>
            {
                Err(format!(
                    "case {}: builtin cases violate exactly one constraint",
                    self.id
                ))
            }
            _ => Ok(()),
        }
    }
}

/// Parses a suite file (JSON array of test cases).
pub fn load_suite(document: &[u8]) -> Result<Vec<TestCase>, serde_json::Error> {
    serde_json::from_slice(document)
}

/// Serializes a suite to the suite file format.
pub fn suite_to_json(cases: &[TestCase]) -> String {
    serde_json::to_string_pretty(cases).expect("suite serialization cannot fail")
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Expectation::Reject => "reject",
            Expectation::AgreementOnly => "agreement-only",
            Expectation::Accept => "accept",
        };
        f.write_str(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uri_round_trip() {
        let parts = UriParts {
            scheme: "http".into(),
            userinfo: None,
            host: "example.com".into(),
            port: None,
            path: "/this/is/valid".into(),
            query: Some("q=test".into()),
            fragment: Some("section-1".into()),
        };
        let json = serde_json::to_string(&parts).unwrap();
        assert!(!json.contains("userinfo"));
        let back: UriParts = serde_json::from_str(&json).unwrap();
        assert_eq!(parts, back);
        assert_eq!(
            parts.to_uri_string(),
            "http://example.com/this/is/valid?q=test#section-1"
        );
    }

    #[test]
    fn bgp_keys_match_wire_schema() {
        let input = BgpInput {
            route: BgpRoute {
                prefix: Some("10.0.0.0/24".into()),
                local_pref: Some(100),
                med: Some(50),
                as_path: Some("65001 65002".into()),
                origin: Some("igp".into()),
                community: vec!["65000:1".into()],
            },
            rmap: RouteMap {
                rmap_action: Some("permit".into()),
                ..RouteMap::default()
            },
        };
        let v = serde_json::to_value(&input).unwrap();
        let route = &v["route"];
        for key in ["prefix", "local-pref", "med", "as-path", "origin", "community"] {
            assert!(route.get(key).is_some(), "route key {key} missing");
        }
        let rmap = &v["rmap"];
        for key in ["prefix-list", "community-list", "as-path-list", "rmap-action"] {
            assert!(rmap.get(key).is_some(), "rmap key {key} missing");
        }
    }

    #[test]
    fn graph_matrix_cells_parse_inf_and_nan() {
        let json = r#"{"matrix": [[0, 1e308, "INF"], [1e308, 0, 1e308], ["INF", 1e308, 0]],
                       "source": 1, "target": 3, "weight-policy": "strict"}"#;
        let g: GraphInput = serde_json::from_str(json).unwrap();
        match &g.form {
            GraphForm::Matrix(m) => {
                assert_eq!(m[0][2], Cell::Absent);
                assert_eq!(m[0][1], Cell::Weight(1e308));
            }
            _ => panic!("expected matrix"),
        }
        let back = serde_json::to_string(&g).unwrap();
        let g2: GraphInput = serde_json::from_str(&back).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn test_case_round_trip() {
        let case = TestCase {
            id: "dns-name:builtin:dns.name.no-empty-label:0".into(),
            protocol: Protocol::DnsName,
            input: Payload::DnsName("example..com".into()),
            violates: vec!["dns.name.no-empty-label".into()],
            expected: Expectation::Reject,
            provenance: Provenance::Builtin,
            notes: String::new(),
        };
        let json = suite_to_json(std::slice::from_ref(&case));
        let back = load_suite(json.as_bytes()).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0], case);
        back[0].check_shape().unwrap();
    }

    #[test]
    fn shape_check_rejects_accept_with_violations() {
        let case = TestCase {
            id: "x".into(),
            protocol: Protocol::DnsName,
            input: Payload::DnsName("example.com".into()),
            violates: vec!["dns.name.no-empty-label".into()],
            expected: Expectation::Accept,
            provenance: Provenance::Manual,
            notes: String::new(),
        };
        assert!(case.check_shape().is_err());
    }
}
