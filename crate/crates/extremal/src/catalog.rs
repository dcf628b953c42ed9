//! Constraint catalogs: machine-readable validity rules per protocol.
//!
//! A [`ConstraintCatalog`] is an ordered list of [`Constraint`]s sharing one
//! protocol. The four built-in catalogs transcribe the RFC-derived rules the
//! rest of the crate generates against and validates with. Catalogs are
//! immutable after construction and safe to share across threads.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The four input domains the framework understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Protocol {
    #[serde(rename = "dns-name")]
    DnsName,
    #[serde(rename = "uri")]
    Uri,
    #[serde(rename = "bgp-filter")]
    BgpFilter,
    #[serde(rename = "graph")]
    Graph,
}

impl Protocol {
    pub const ALL: [Protocol; 4] = [
        Protocol::DnsName,
        Protocol::Uri,
        Protocol::BgpFilter,
        Protocol::Graph,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Protocol::DnsName => "dns-name",
            Protocol::Uri => "uri",
            Protocol::BgpFilter => "bgp-filter",
            Protocol::Graph => "graph",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Protocol {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dns-name" => Ok(Protocol::DnsName),
            "uri" => Ok(Protocol::Uri),
            "bgp-filter" => Ok(Protocol::BgpFilter),
            "graph" => Ok(Protocol::Graph),
            other => Err(CatalogError::UnsupportedProtocol(other.to_string())),
        }
    }
}

/// How strongly a constraint binds implementations.
///
/// `must` violations are expected rejections; `should` violations are
/// expected rejections whose acceptance is scored as divergence rather than
/// failure; `limit-probe` marks dimensions with no formal bound where only
/// cross-implementation agreement is checkable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Severity {
    #[serde(rename = "must")]
    Must,
    #[serde(rename = "should")]
    Should,
    #[serde(rename = "limit-probe")]
    LimitProbe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConstraintKind {
    #[serde(rename = "length-range")]
    LengthRange,
    #[serde(rename = "charset")]
    Charset,
    #[serde(rename = "structural")]
    Structural,
    #[serde(rename = "numeric-range")]
    NumericRange,
    #[serde(rename = "enum-membership")]
    EnumMembership,
    #[serde(rename = "regex-wellformed")]
    RegexWellformed,
    #[serde(rename = "limit-probe")]
    LimitProbe,
}

/// Scalar parameter value in a constraint's params map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Float(f64),
    Str(String),
}

impl ParamValue {
    pub fn as_i64(&self) -> Option<i64> {
        match self {
            ParamValue::Int(n) => Some(*n),
            ParamValue::Float(f) if f.fract() == 0.0 => Some(*f as i64),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            ParamValue::Int(n) => Some(*n as f64),
            ParamValue::Float(f) => Some(*f),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            ParamValue::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            ParamValue::Bool(b) => Some(*b),
            _ => None,
        }
    }
}

impl From<i64> for ParamValue {
    fn from(n: i64) -> Self {
        ParamValue::Int(n)
    }
}

impl From<&str> for ParamValue {
    fn from(s: &str) -> Self {
        ParamValue::Str(s.to_string())
    }
}

impl From<bool> for ParamValue {
    fn from(b: bool) -> Self {
        ParamValue::Bool(b)
    }
}

pub type Params = BTreeMap<String, ParamValue>;

/// One validity rule: what it checks, how hard it binds, and where it
/// comes from.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub id: String,
    pub protocol: Protocol,
    pub description: String,
    pub kind: ConstraintKind,
    pub params: Params,
    pub severity: Severity,
    pub spec_ref: String,
}

impl Constraint {
    pub fn param_str(&self, key: &str) -> Option<&str> {
        self.params.get(key).and_then(ParamValue::as_str)
    }

    pub fn param_i64(&self, key: &str) -> Option<i64> {
        self.params.get(key).and_then(ParamValue::as_i64)
    }

    pub fn param_f64(&self, key: &str) -> Option<f64> {
        self.params.get(key).and_then(ParamValue::as_f64)
    }

    pub fn param_bool(&self, key: &str) -> Option<bool> {
        self.params.get(key).and_then(ParamValue::as_bool)
    }

    /// True when lenient-mode validation skips this constraint.
    pub fn lenient_skip(&self) -> bool {
        self.param_bool("lenient_skip").unwrap_or(false)
    }

    /// Component a charset constraint applies to ("label", "path", ...).
    pub fn component(&self) -> Option<&str> {
        self.param_str("component")
    }
}

// The catalog file format omits the per-constraint protocol field (it is
// implied by the catalog header), so (de)serialization goes through a
// shadow struct and the protocol is restored on load.
#[derive(Serialize, Deserialize)]
struct ConstraintFile {
    id: String,
    description: String,
    kind: ConstraintKind,
    params: Params,
    severity: Severity,
    spec_ref: String,
}

#[derive(Serialize, Deserialize)]
struct CatalogFile {
    protocol: Protocol,
    version: u32,
    constraints: Vec<ConstraintFile>,
}

/// Ordered, protocol-homogeneous set of constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintCatalog {
    pub protocol: Protocol,
    pub version: u32,
    pub constraints: Vec<Constraint>,
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unsupported protocol \"{0}\"")]
    UnsupportedProtocol(String),
    #[error("malformed catalog document: {0}")]
    Malformed(String),
    #[error("duplicate constraint id \"{id}\"")]
    DuplicateId { id: String },
    #[error("constraint \"{id}\": kind {kind} requires param(s) {needed}")]
    MissingParams {
        id: String,
        kind: String,
        needed: String,
    },
    #[error("constraint \"{id}\": severity limit-probe and kind limit-probe must pair up")]
    SeverityKindMismatch { id: String },
    #[error("catalog has no constraints")]
    Empty,
    #[error("catalog version must be >= 1")]
    BadVersion,
}

/// Lint finding on a structurally-valid catalog. Warnings, not errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LintIssue {
    pub constraint_id: String,
    pub message: String,
}

impl ConstraintCatalog {
    /// Verifies all catalog invariants, returning the first failure.
    pub fn verify(&self) -> Result<(), CatalogError> {
        if self.constraints.is_empty() {
            return Err(CatalogError::Empty);
        }
        if self.version < 1 {
            return Err(CatalogError::BadVersion);
        }
        let mut seen = BTreeSet::new();
        for c in &self.constraints {
            if !seen.insert(c.id.as_str()) {
                return Err(CatalogError::DuplicateId { id: c.id.clone() });
            }
            let missing = |needed: &str| CatalogError::MissingParams {
                id: c.id.clone(),
                kind: format!("{:?}", c.kind),
                needed: needed.to_string(),
            };
            match c.kind {
                ConstraintKind::LengthRange | ConstraintKind::NumericRange => {
                    if c.param_f64("min").is_none() && c.param_f64("max").is_none() {
                        return Err(missing("min and/or max"));
                    }
                }
                ConstraintKind::Charset => {
                    if c.param_str("allowed").is_none()
                        && c.param_str("forbidden").is_none()
                        && c.param_str("forbidden_class").is_none()
                    {
                        return Err(missing("allowed, forbidden, or forbidden_class"));
                    }
                }
                ConstraintKind::EnumMembership => {
                    if c.param_str("values").is_none() {
                        return Err(missing("values"));
                    }
                }
                ConstraintKind::Structural => {
                    if c.param_str("rule").is_none() {
                        return Err(missing("rule"));
                    }
                }
                ConstraintKind::RegexWellformed | ConstraintKind::LimitProbe => {}
            }
            let probe_pair_ok = (c.severity == Severity::LimitProbe)
                == (c.kind == ConstraintKind::LimitProbe);
            if !probe_pair_ok {
                return Err(CatalogError::SeverityKindMismatch { id: c.id.clone() });
            }
        }
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&Constraint> {
        self.constraints.iter().find(|c| c.id == id)
    }

    /// Charset constraints scoped to `component`.
    pub fn charsets_for(&self, component: &str) -> Vec<&Constraint> {
        self.constraints
            .iter()
            .filter(|c| c.kind == ConstraintKind::Charset && c.component() == Some(component))
            .collect()
    }

    /// The constraint owning character `ch` within `component`, if any.
    ///
    /// Ownership is a deterministic partition: explicit `forbidden` sets win,
    /// then `forbidden_class` matches, then `allowed`-based constraints claim
    /// everything else except their `structural` separator chars. Exactly one
    /// constraint reports any given forbidden character, which is what makes
    /// single-violation test construction possible.
    pub fn charset_owner(&self, component: &str, ch: char) -> Option<&Constraint> {
        for c in self.charsets_for(component) {
            if let Some(forbidden) = c.param_str("forbidden") {
                if forbidden.contains(ch) {
                    return Some(c);
                }
            }
        }
        for c in self.charsets_for(component) {
            if c.param_str("forbidden_class") == Some("non-ascii") && !ch.is_ascii() {
                return Some(c);
            }
        }
        for c in self.charsets_for(component) {
            if let Some(allowed) = c.param_str("allowed") {
                let structural = c.param_str("structural").unwrap_or("");
                if !allowed.contains(ch) && !structural.contains(ch) {
                    return Some(c);
                }
            }
        }
        None
    }

    /// Characters in the ASCII range owned by `constraint`, in code point
    /// order. For `forbidden_class` constraints this is empty (the class is
    /// not enumerable over ASCII).
    pub fn owned_ascii_chars(&self, constraint: &Constraint) -> Vec<char> {
        let Some(component) = constraint.component() else {
            return Vec::new();
        };
        (0u32..=0x7f)
            .filter_map(char::from_u32)
            .filter(|ch| {
                self.charset_owner(component, *ch)
                    .map(|c| c.id == constraint.id)
                    .unwrap_or(false)
            })
            .collect()
    }
}

/// Serializes a catalog to the JSON catalog file format.
pub fn catalog_to_json(catalog: &ConstraintCatalog) -> String {
    let file = CatalogFile {
        protocol: catalog.protocol,
        version: catalog.version,
        constraints: catalog
            .constraints
            .iter()
            .map(|c| ConstraintFile {
                id: c.id.clone(),
                description: c.description.clone(),
                kind: c.kind,
                params: c.params.clone(),
                severity: c.severity,
                spec_ref: c.spec_ref.clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("catalog serialization cannot fail")
}

/// Parses and verifies a catalog document.
pub fn load_catalog(document: &[u8]) -> Result<ConstraintCatalog, CatalogError> {
    let file: CatalogFile = serde_json::from_slice(document)
        .map_err(|e| CatalogError::Malformed(e.to_string()))?;
    let catalog = ConstraintCatalog {
        protocol: file.protocol,
        version: file.version,
        constraints: file
            .constraints
            .into_iter()
            .map(|c| Constraint {
                id: c.id,
                protocol: file.protocol,
                description: c.description,
                kind: c.kind,
                params: c.params,
                severity: c.severity,
                spec_ref: c.spec_ref,
            })
            .collect(),
    };
    catalog.verify()?;
    Ok(catalog)
}

/// Warns about overlapping charset constraints (identical owned sets) and
/// limit-probes without a probe size param. Empty result means clean.
pub fn lint_catalog(catalog: &ConstraintCatalog) -> Vec<LintIssue> {
    let mut issues = Vec::new();
    let charsets: Vec<&Constraint> = catalog
        .constraints
        .iter()
        .filter(|c| c.kind == ConstraintKind::Charset)
        .collect();
    for (i, a) in charsets.iter().enumerate() {
        for b in charsets.iter().skip(i + 1) {
            if a.component() != b.component() {
                continue;
            }
            let class_dup = a.param_str("forbidden_class").is_some()
                && a.param_str("forbidden_class") == b.param_str("forbidden_class");
            let owned_a = explicit_forbidden_set(a);
            let owned_b = explicit_forbidden_set(b);
            let set_dup = !owned_a.is_empty() && owned_a == owned_b;
            if class_dup || set_dup {
                issues.push(LintIssue {
                    constraint_id: b.id.clone(),
                    message: format!(
                        "violation set is identical to \"{}\" (overlapping charset rules)",
                        a.id
                    ),
                });
            }
        }
    }
    for c in &catalog.constraints {
        if c.kind == ConstraintKind::LimitProbe
            && !c.params.keys().any(|k| k.starts_with("probe"))
        {
            issues.push(LintIssue {
                constraint_id: c.id.clone(),
                message: "limit-probe has no probe size param (expected probe_length or probe_nodes)"
                    .to_string(),
            });
        }
    }
    issues
}

fn explicit_forbidden_set(c: &Constraint) -> BTreeSet<char> {
    c.param_str("forbidden")
        .map(|s| s.chars().collect())
        .unwrap_or_default()
}

// ── Built-in catalogs ────────────────────────────────────────────────────

pub const ALPHA: &str = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";
pub const DIGIT: &str = "0123456789";

fn concat(parts: &[&str]) -> String {
    parts.concat()
}

/// Returns the hardcoded catalog for `protocol`.
///
/// Deterministic and pure: repeated calls return structurally equal catalogs.
pub fn builtin_catalog(protocol: Protocol) -> ConstraintCatalog {
    match protocol {
        Protocol::DnsName => dns_catalog(),
        Protocol::Uri => uri_catalog(),
        Protocol::BgpFilter => bgp_catalog(),
        Protocol::Graph => graph_catalog(),
    }
}

fn mk(
    protocol: Protocol,
    id: &str,
    description: &str,
    kind: ConstraintKind,
    params: Vec<(&str, ParamValue)>,
    severity: Severity,
    spec_ref: &str,
) -> Constraint {
    Constraint {
        id: id.to_string(),
        protocol,
        description: description.to_string(),
        kind,
        params: params
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
        severity,
        spec_ref: spec_ref.to_string(),
    }
}

fn dns_catalog() -> ConstraintCatalog {
    use ConstraintKind::*;
    use Severity::*;
    let p = Protocol::DnsName;
    let label_allowed = concat(&[ALPHA, DIGIT, "-"]);
    ConstraintCatalog {
        protocol: p,
        version: 1,
        constraints: vec![
            mk(
                p,
                "dns.label.max-length",
                "Each label must be between 1 and 63 characters long",
                LengthRange,
                vec![("max", 63.into()), ("applies", "label".into())],
                Must,
                "RFC 1035 §2.3.1",
            ),
            mk(
                p,
                "dns.name.max-total-length",
                "The full domain name must not exceed 253 presentation characters (excluding one optional trailing root dot)",
                LengthRange,
                vec![
                    ("max", 253.into()),
                    ("applies", "name".into()),
                    ("exclude_trailing_root_dot", true.into()),
                ],
                Must,
                "RFC 1035 §2.3.4; RFC 1123 §2.1",
            ),
            mk(
                p,
                "dns.label.charset",
                "Labels may only use letters, digits, and hyphen; spaces and other symbols are never allowed",
                Charset,
                vec![
                    ("allowed", ParamValue::Str(label_allowed)),
                    ("component", "label".into()),
                    ("structural", ".".into()),
                ],
                Must,
                "RFC 1035 §2.3.1",
            ),
            mk(
                p,
                "dns.label.hostname-charset",
                "Host name labels must not contain '!' or '_' (some zone loaders accept them in apparent violation of the grammar)",
                Charset,
                vec![
                    ("forbidden", "!_".into()),
                    ("component", "label".into()),
                    ("lenient_skip", true.into()),
                ],
                Must,
                "RFC 952; RFC 1123 §2.1",
            ),
            mk(
                p,
                "dns.label.no-hyphen-edge",
                "Labels must not start or end with a hyphen",
                Structural,
                vec![("rule", "dns-no-hyphen-edge".into())],
                Must,
                "RFC 1035 §2.3.1",
            ),
            mk(
                p,
                "dns.name.no-empty-label",
                "Empty labels (two dots in a row) are not allowed",
                Structural,
                vec![("rule", "dns-no-empty-label".into())],
                Must,
                "RFC 1035 §2.3.1",
            ),
            mk(
                p,
                "dns.name.no-leading-dot",
                "A leading dot (empty first label) is not allowed",
                Structural,
                vec![("rule", "dns-no-leading-dot".into())],
                Must,
                "RFC 1035 §2.3.1",
            ),
            mk(
                p,
                "dns.name.single-trailing-dot",
                "Only a single trailing root dot is valid",
                Structural,
                vec![("rule", "dns-single-trailing-dot".into())],
                Must,
                "RFC 1035 §5.1",
            ),
            mk(
                p,
                "dns.name.ascii-only",
                "Names must be ASCII; internationalized names must be punycode-encoded first",
                Charset,
                vec![
                    ("forbidden_class", "non-ascii".into()),
                    ("component", "label".into()),
                ],
                Must,
                "RFC 3492; RFC 5890",
            ),
        ],
    }
}

const UNRESERVED_EXTRA: &str = "-._~";
const SUB_DELIMS: &str = "!$&'()*+,;=";

fn uri_catalog() -> ConstraintCatalog {
    use ConstraintKind::*;
    use Severity::*;
    let p = Protocol::Uri;
    let unreserved = concat(&[ALPHA, DIGIT, UNRESERVED_EXTRA]);
    let scheme_allowed = concat(&[ALPHA, DIGIT, "+-."]);
    let userinfo_allowed = concat(&[&unreserved, SUB_DELIMS, ":"]);
    let host_allowed = concat(&[&unreserved, SUB_DELIMS]);
    let pchar = concat(&[&unreserved, SUB_DELIMS, ":@"]);
    let query_allowed = concat(&[&pchar, "/?"]);
    ConstraintCatalog {
        protocol: p,
        version: 1,
        constraints: vec![
            mk(
                p,
                "uri.scheme.charset",
                "Scheme characters are letters, digits, '+', '-', and '.'",
                Charset,
                vec![
                    ("allowed", ParamValue::Str(scheme_allowed)),
                    ("component", "scheme".into()),
                ],
                Must,
                "RFC 3986 §3.1",
            ),
            mk(
                p,
                "uri.scheme.leading-alpha",
                "Scheme must be non-empty and begin with a letter",
                Structural,
                vec![("rule", "uri-scheme-leading-alpha".into())],
                Must,
                "RFC 3986 §3.1",
            ),
            mk(
                p,
                "uri.userinfo.charset",
                "Userinfo characters are unreserved, sub-delims, ':' (plus percent-encoded triplets)",
                Charset,
                vec![
                    ("allowed", ParamValue::Str(userinfo_allowed)),
                    ("component", "userinfo".into()),
                    ("structural", "%".into()),
                ],
                Must,
                "RFC 3986 §3.2.1",
            ),
            mk(
                p,
                "uri.host.charset",
                "Registered-name host characters are unreserved and sub-delims (plus percent-encoded triplets)",
                Charset,
                vec![
                    ("allowed", ParamValue::Str(host_allowed)),
                    ("component", "host".into()),
                    ("structural", "%".into()),
                ],
                Must,
                "RFC 3986 §3.2.2",
            ),
            mk(
                p,
                "uri.port.charset",
                "Port is a sequence of digits",
                Charset,
                vec![
                    ("allowed", DIGIT.into()),
                    ("component", "port".into()),
                ],
                Must,
                "RFC 3986 §3.2.3",
            ),
            mk(
                p,
                "uri.port.range",
                "Port values above 65535 are grammatically legal but rejected by implementations",
                NumericRange,
                vec![("max", 65535.into()), ("field", "port".into())],
                Should,
                "RFC 3986 §3.2.3 (*DIGIT); TCP port space",
            ),
            mk(
                p,
                "uri.path.charset",
                "Path segment characters are pchar; '/' separates segments (plus percent-encoded triplets)",
                Charset,
                vec![
                    ("allowed", ParamValue::Str(pchar.clone())),
                    ("component", "path".into()),
                    ("structural", "/%".into()),
                ],
                Must,
                "RFC 3986 §3.3",
            ),
            mk(
                p,
                "uri.query.charset",
                "Query characters are pchar, '/', and '?' (plus percent-encoded triplets)",
                Charset,
                vec![
                    ("allowed", ParamValue::Str(query_allowed.clone())),
                    ("component", "query".into()),
                    ("structural", "%".into()),
                ],
                Must,
                "RFC 3986 §3.4",
            ),
            mk(
                p,
                "uri.fragment.charset",
                "Fragment characters are pchar, '/', and '?' (plus percent-encoded triplets)",
                Charset,
                vec![
                    ("allowed", ParamValue::Str(query_allowed)),
                    ("component", "fragment".into()),
                    ("structural", "%".into()),
                ],
                Must,
                "RFC 3986 §3.5",
            ),
            mk(
                p,
                "uri.pct.well-formed",
                "A '%' must introduce exactly two hexadecimal digits",
                Structural,
                vec![("rule", "uri-pct-well-formed".into())],
                Must,
                "RFC 3986 §2.1",
            ),
            mk(
                p,
                "uri.pct.nul-byte",
                "The %00 (NUL) percent-encoding should be rejected unless raw data is expected in a component",
                Structural,
                vec![("rule", "uri-pct-nul-byte".into())],
                Should,
                "RFC 3986 §7.3",
            ),
            mk(
                p,
                "uri.path.length",
                "No formal upper limit exists on request-target length; implementations differ (414 expected above their own limits)",
                ConstraintKind::LimitProbe,
                vec![("probe_length", 1008.into())],
                Severity::LimitProbe,
                "RFC 7230 §3.1.1",
            ),
        ],
    }
}

fn bgp_catalog() -> ConstraintCatalog {
    use ConstraintKind::*;
    use Severity::*;
    let p = Protocol::BgpFilter;
    const U32_MAX: i64 = 4_294_967_295;
    ConstraintCatalog {
        protocol: p,
        version: 1,
        constraints: vec![
            mk(
                p,
                "bgp.route.prefix-format",
                "Route prefix must be dotted-quad/mask with octets 0-255 and mask 0-32",
                Structural,
                vec![("rule", "bgp-route-prefix".into())],
                Must,
                "RFC 4271 §4.3; CIDR notation",
            ),
            mk(
                p,
                "bgp.route.local-pref-range",
                "LOCAL_PREF is a four-octet unsigned integer",
                NumericRange,
                vec![
                    ("min", 0.into()),
                    ("max", U32_MAX.into()),
                    ("field", "local-pref".into()),
                ],
                Must,
                "RFC 4271 §5.1.5",
            ),
            mk(
                p,
                "bgp.route.med-range",
                "MULTI_EXIT_DISC is a four-octet unsigned integer",
                NumericRange,
                vec![
                    ("min", 0.into()),
                    ("max", U32_MAX.into()),
                    ("field", "med".into()),
                ],
                Must,
                "RFC 4271 §5.1.4",
            ),
            mk(
                p,
                "bgp.route.origin",
                "ORIGIN must be one of igp, egp, incomplete",
                EnumMembership,
                vec![
                    ("values", "igp,egp,incomplete".into()),
                    ("field", "origin".into()),
                ],
                Must,
                "RFC 4271 §5.1.1",
            ),
            mk(
                p,
                "bgp.community.format",
                "Communities are \"A:B\" with A and B numeric in 0-65535",
                Structural,
                vec![("rule", "bgp-community-format".into())],
                Must,
                "RFC 1997",
            ),
            mk(
                p,
                "bgp.aspath.as-number-range",
                "AS-path entries must be numeric AS numbers in the four-octet range",
                NumericRange,
                vec![
                    ("min", 0.into()),
                    ("max", U32_MAX.into()),
                    ("field", "as-path".into()),
                ],
                Must,
                "RFC 4271 §5.1.2; RFC 6793",
            ),
            mk(
                p,
                "bgp.rmap.prefix-list-format",
                "Prefix-list match entries must be dotted-quad/mask prefixes (mask required)",
                Structural,
                vec![("rule", "bgp-prefix-list-format".into())],
                Must,
                "CIDR notation in prefix-list match entries",
            ),
            mk(
                p,
                "bgp.rmap.as-path-regex",
                "AS-path-list match patterns must be compilable regular expressions",
                RegexWellformed,
                vec![("field", "as-path-list.match".into())],
                Must,
                "POSIX regular expressions over space-joined AS paths",
            ),
            mk(
                p,
                "bgp.list.action",
                "List entry actions must be permit or deny",
                EnumMembership,
                vec![
                    ("values", "permit,deny".into()),
                    ("field", "list.action".into()),
                ],
                Must,
                "route-map match list entry actions",
            ),
            mk(
                p,
                "bgp.rmap.action-required",
                "A route-map clause must carry an rmap-action of permit or deny",
                Structural,
                vec![("rule", "bgp-rmap-action".into())],
                Must,
                "route-map clause action",
            ),
        ],
    }
}

fn graph_catalog() -> ConstraintCatalog {
    use ConstraintKind::*;
    use Severity::*;
    let p = Protocol::Graph;
    ConstraintCatalog {
        protocol: p,
        version: 1,
        constraints: vec![
            mk(
                p,
                "graph.edge.nonnegative-weight",
                "Edge weights must be non-negative",
                NumericRange,
                vec![("min", ParamValue::Float(0.0)), ("field", "weight".into())],
                Must,
                "Dijkstra precondition: non-negative edge weights",
            ),
            mk(
                p,
                "graph.edge.finite-weight",
                "Edge weights must be finite and must not overflow when summed (any two weights must have a finite sum)",
                Structural,
                vec![("rule", "graph-finite-weight".into())],
                Must,
                "IEEE 754 binary64 range",
            ),
            mk(
                p,
                "graph.edge.weight-defined",
                "Under the strict weight policy every edge must define a weight",
                Structural,
                vec![("rule", "graph-weight-defined".into())],
                Must,
                "explicit weights required unless the default-1 policy is selected",
            ),
            mk(
                p,
                "graph.size.node-count",
                "No formal bound exists on graph size; very dense graphs probe memory limits",
                ConstraintKind::LimitProbe,
                vec![("probe_nodes", 2000.into())],
                Severity::LimitProbe,
                "implementation-defined memory limits",
            ),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_catalogs_verify_and_are_deterministic() {
        for p in Protocol::ALL {
            let a = builtin_catalog(p);
            let b = builtin_catalog(p);
            a.verify().unwrap();
            assert_eq!(a, b, "{p} catalog not deterministic");
            assert_eq!(a.protocol, p);
        }
    }

    #[test]
    fn builtin_catalogs_round_trip() {
        for p in Protocol::ALL {
            let a = builtin_catalog(p);
            let json = catalog_to_json(&a);
            let b = load_catalog(json.as_bytes()).unwrap();
            assert_eq!(a, b, "{p} catalog does not round-trip");
        }
    }

    #[test]
    fn builtin_catalogs_lint_clean() {
        for p in Protocol::ALL {
            assert!(lint_catalog(&builtin_catalog(p)).is_empty(), "{p} catalog has lint issues");
        }
    }

    #[test]
    fn dns_catalog_contents() {
        let cat = builtin_catalog(Protocol::DnsName);
        let total = cat.get("dns.name.max-total-length").unwrap();
        assert_eq!(total.param_i64("max"), Some(253));
        assert_eq!(cat.get("dns.label.max-length").unwrap().param_i64("max"), Some(63));
        assert!(cat.get("dns.label.hostname-charset").unwrap().lenient_skip());
    }

    #[test]
    fn graph_catalog_has_nonnegative_weight() {
        let cat = builtin_catalog(Protocol::Graph);
        assert!(cat.get("graph.edge.nonnegative-weight").is_some());
    }

    #[test]
    fn unsupported_protocol_errors() {
        assert!(matches!(
            "smtp".parse::<Protocol>(),
            Err(CatalogError::UnsupportedProtocol(_))
        ));
    }

    #[test]
    fn duplicate_id_rejected() {
        let mut cat = builtin_catalog(Protocol::DnsName);
        let dup = cat.constraints[0].clone();
        cat.constraints.push(dup);
        let json = catalog_to_json(&cat);
        assert!(matches!(
            load_catalog(json.as_bytes()),
            Err(CatalogError::DuplicateId { .. })
        ));
    }

    #[test]
    fn length_range_requires_min_or_max() {
        let mut cat = builtin_catalog(Protocol::DnsName);
        cat.constraints[0].params.remove("max");
        let json = catalog_to_json(&cat);
        assert!(matches!(
            load_catalog(json.as_bytes()),
            Err(CatalogError::MissingParams { .. })
        ));
    }

    #[test]
    fn lint_flags_duplicate_forbidden_sets() {
        let mut cat = builtin_catalog(Protocol::DnsName);
        let mut dup = cat.get("dns.label.hostname-charset").unwrap().clone();
        dup.id = "dns.label.hostname-charset-again".to_string();
        cat.constraints.push(dup);
        let issues = lint_catalog(&cat);
        assert_eq!(issues.len(), 1);
        assert!(issues[0].message.contains("identical"));
    }

    #[test]
    fn lint_flags_probe_without_size_param() {
        let mut cat = builtin_catalog(Protocol::Uri);
        let probe = cat
            .constraints
            .iter_mut()
            .find(|c| c.kind == ConstraintKind::LimitProbe)
            .unwrap();
        probe.params.remove("probe_length");
        let issues = lint_catalog(&cat);
        assert_eq!(issues.len(), 1);
    }

    #[test]
    fn dns_charset_ownership_partition() {
        let cat = builtin_catalog(Protocol::DnsName);
        let own = |ch| cat.charset_owner("label", ch).map(|c| c.id.as_str());
        assert_eq!(own('!'), Some("dns.label.hostname-charset"));
        assert_eq!(own('_'), Some("dns.label.hostname-charset"));
        assert_eq!(own(' '), Some("dns.label.charset"));
        assert_eq!(own('ü'), Some("dns.name.ascii-only"));
        assert_eq!(own('a'), None);
        assert_eq!(own('-'), None);
        assert_eq!(own('.'), None, "dot is structural, never charset-owned");
    }
}
