//! Deterministic extremal test generation.
//!
//! Every generated case starts from a valid seed and mutates exactly one
//! component to violate exactly one constraint, so the strict validator is
//! an oracle: it must report precisely the targeted violation, and
//! restoring the mutated component must restore validity.

use thiserror::Error;

use crate::catalog::{
    Constraint, ConstraintCatalog, ConstraintKind, Protocol, Severity,
};
use crate::payload::{
    BgpInput, BgpRoute, Cell, Edge, Expectation, GraphForm, GraphInput, MatchEntry, Payload,
    Provenance, RouteMap, TestCase, UriParts, WeightPolicy, URI_COMPONENTS,
};

#[derive(Debug, Clone, PartialEq)]
pub struct GenerationOptions {
    pub exhaustive_charset: bool,
    pub per_constraint_count: usize,
    pub limit_probe_length: usize,
    pub max_graph_nodes: usize,
    pub seed_label: String,
}

impl Default for GenerationOptions {
    fn default() -> Self {
        GenerationOptions {
            exhaustive_charset: false,
            per_constraint_count: 1,
            limit_probe_length: 1008,
            max_graph_nodes: 2000,
            seed_label: "example".to_string(),
        }
    }
}

#[derive(Debug, Error)]
pub enum GenerateError {
    #[error("variant index {index} out of range for constraint \"{constraint}\"")]
    VariantOutOfRange { constraint: String, index: usize },
    #[error("seed case must have expected=accept")]
    NotASeed,
    #[error("constraint protocol {constraint} does not match seed protocol {seed}")]
    ProtocolMismatch { constraint: Protocol, seed: Protocol },
    #[error("catalog has no charset constraints to enumerate")]
    NoCharsetConstraints,
    #[error("limit_probe_length must be >= 1")]
    BadProbeLength,
}

// ── Seeds ────────────────────────────────────────────────────────────────

fn seed_payload(protocol: Protocol, opts: &GenerationOptions) -> Payload {
    let label = opts.seed_label.as_str();
    match protocol {
        Protocol::DnsName => Payload::DnsName(format!("{label}.com")),
        Protocol::Uri => Payload::Uri(UriParts {
            scheme: "http".into(),
            userinfo: None,
            host: format!("{label}.com"),
            port: None,
            path: "/this/is/valid".into(),
            query: Some("q=test".into()),
            fragment: Some("section-1".into()),
        }),
        Protocol::BgpFilter => Payload::BgpFilter(BgpInput {
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
        }),
        Protocol::Graph => Payload::Graph(GraphInput {
            form: GraphForm::Matrix(triangle(1.0, 1.0, 1.0)),
            source: 1,
            target: 3,
            weight_policy: WeightPolicy::Strict,
        }),
    }
}

fn triangle(a: f64, b: f64, c: f64) -> Vec<Vec<Cell>> {
    // Symmetric 3-node matrix; a = 1<->2, b = 2<->3, c = 1<->3.
    let w = Cell::Weight;
    vec![
        vec![w(0.0), w(a), w(c)],
        vec![w(a), w(0.0), w(b)],
        vec![w(c), w(b), w(0.0)],
    ]
}

/// A valid seed input for `protocol`, accepted by the strict validator.
pub fn base_valid_input(protocol: Protocol) -> TestCase {
    let opts = GenerationOptions::default();
    TestCase {
        id: format!("{protocol}:seed:0"),
        protocol,
        input: seed_payload(protocol, &opts),
        violates: Vec::new(),
        expected: Expectation::Accept,
        provenance: Provenance::Builtin,
        notes: "valid seed input".into(),
    }
}

// ── Variant construction ─────────────────────────────────────────────────

struct Variant {
    payload: Payload,
    expected: Expectation,
    note: String,
}

impl Variant {
    fn reject(payload: Payload, note: impl Into<String>) -> Self {
        Variant {
            payload,
            expected: Expectation::Reject,
            note: note.into(),
        }
    }
}

fn insert_char(text: &str, char_pos: usize, ch: char) -> String {
    let mut out = String::with_capacity(text.len() + ch.len_utf8());
    for (i, c) in text.chars().enumerate() {
        if i == char_pos {
            out.push(ch);
        }
        out.push(c);
    }
    if char_pos >= text.chars().count() {
        out.push(ch);
    }
    out
}

/// DNS charset insertion: into the first label at offset 4 (or the label
/// midpoint for short labels), matching the shapes of the classic tests.
/// A handful of characters have fixed canonical spellings when generating
/// from the stock seed.
fn dns_charset_case(seed_name: &str, ch: char) -> String {
    if seed_name == "example.com" {
        match ch {
            '_' => return "test_domain.com".to_string(),
            'ü' => return "münich.com".to_string(),
            _ => {}
        }
    }
    let (first, rest) = seed_name.split_once('.').unwrap_or((seed_name, ""));
    let pos = 4.min(first.chars().count() / 2 + 1);
    let mutated = insert_char(first, pos, ch);
    if rest.is_empty() {
        mutated
    } else {
        format!("{mutated}.{rest}")
    }
}

fn uri_component_seed<'a>(parts: &'a UriParts, component: &str) -> (&'a str, bool) {
    // Returns the component text and whether it had to be introduced.
    match parts.component(component) {
        Some(text) => (text, false),
        None => match component {
            "userinfo" => ("user", true),
            "port" => ("8080", true),
            _ => ("", true),
        },
    }
}

fn uri_charset_case(parts: &UriParts, component: &str, ch: char) -> UriParts {
    let (text, _) = uri_component_seed(parts, component);
    let pos = text.chars().count() / 2;
    let mutated = insert_char(text, pos.max(1).min(text.chars().count()), ch);
    let mut out = parts.clone();
    out.set_component(component, Some(mutated));
    out
}

/// Representative characters for the non-ascii forbidden class.
const NON_ASCII_REPS: [char; 3] = ['ü', 'é', '中'];

/// Owned characters of a charset constraint in generation order: for the
/// builtin representative (index 0) prefer the smallest visible character,
/// then ascend by code point.
fn charset_generation_order(catalog: &ConstraintCatalog, constraint: &Constraint) -> Vec<char> {
    if constraint.param_str("forbidden_class") == Some("non-ascii") {
        return NON_ASCII_REPS.to_vec();
    }
    let owned = catalog.owned_ascii_chars(constraint);
    let Some(first_visible) = owned.iter().copied().find(|c| *c >= ' ') else {
        return owned;
    };
    let mut out = vec![first_visible];
    out.extend(owned.into_iter().filter(|c| *c != first_visible));
    out
}

fn charset_variant(
    catalog: &ConstraintCatalog,
    constraint: &Constraint,
    seed: &Payload,
    index: usize,
) -> Option<Variant> {
    let chars = charset_generation_order(catalog, constraint);
    let ch = *chars.get(index)?;
    charset_case_for_char(catalog, constraint, seed, ch)
}

fn charset_case_for_char(
    _catalog: &ConstraintCatalog,
    constraint: &Constraint,
    seed: &Payload,
    ch: char,
) -> Option<Variant> {
    match seed {
        Payload::DnsName(name) => {
            let mutated = dns_charset_case(name, ch);
            let mut note = format!("forbidden character {ch:?} (U+{:04X}) in a label", ch as u32);
            if mutated == "münich.com" {
                note.push_str("; punycode form: xn--mnich-kva.com");
            }
            Some(Variant::reject(Payload::DnsName(mutated), note))
        }
        Payload::Uri(parts) => {
            let component = constraint.component()?;
            let mutated = uri_charset_case(parts, component, ch);
            Some(Variant::reject(
                Payload::Uri(mutated),
                format!(
                    "forbidden character {ch:?} (U+{:04X}) in the {component} component",
                    ch as u32
                ),
            ))
        }
        _ => None,
    }
}

/// Number of variants generate_builtin emits for a constraint by default.
fn builtin_count(catalog: &ConstraintCatalog, constraint: &Constraint) -> usize {
    match constraint.kind {
        // Explicit forbidden sets are small and every member is a designed
        // corner (the '!' and '_' hostname tests), so ship them all.
        ConstraintKind::Charset if constraint.param_str("forbidden").is_some() => {
            catalog.owned_ascii_chars(constraint).len().max(1)
        }
        ConstraintKind::Structural
            if constraint.param_str("rule") == Some("dns-no-hyphen-edge") =>
        {
            2
        }
        _ => 1,
    }
}

fn variant(
    catalog: &ConstraintCatalog,
    constraint: &Constraint,
    seed: &Payload,
    opts: &GenerationOptions,
    index: usize,
) -> Option<Variant> {
    match (seed, constraint.kind) {
        (_, ConstraintKind::Charset) => charset_variant(catalog, constraint, seed, index),
        (Payload::DnsName(name), ConstraintKind::LengthRange) => {
            dns_length_variant(name, constraint, index)
        }
        (Payload::DnsName(name), ConstraintKind::Structural) => {
            dns_structural_variant(name, constraint, index)
        }
        (Payload::Uri(parts), ConstraintKind::Structural) => {
            uri_structural_variant(parts, constraint, index)
        }
        (Payload::Uri(parts), ConstraintKind::NumericRange) => {
            uri_numeric_variant(parts, constraint, index)
        }
        (Payload::Uri(parts), ConstraintKind::LimitProbe) => {
            uri_probe_variant(parts, constraint, opts, index)
        }
        (Payload::BgpFilter(input), _) => bgp_variant(input, constraint, index),
        (Payload::Graph(input), _) => graph_variant(input, constraint, opts, index),
        _ => None,
    }
}

fn dns_length_variant(name: &str, constraint: &Constraint, index: usize) -> Option<Variant> {
    match constraint.param_str("applies") {
        Some("label") => {
            let max = constraint.param_i64("max")? as usize;
            let label_len = max + 1 + index;
            // Stay under the total-length limit so only this rule fires.
            if label_len + 1 + name.chars().count() > 253 {
                return None;
            }
            let mutated = format!("{}.{name}", "a".repeat(label_len));
            Some(Variant::reject(
                Payload::DnsName(mutated),
                format!("first label is {label_len} characters"),
            ))
        }
        Some("name") => {
            let max = constraint.param_i64("max")? as usize;
            let seed_len = name.chars().count();
            // Smallest repetition count of "a." that pushes the total past
            // the limit.
            let base = (max.saturating_sub(seed_len)) / 2 + 1;
            let reps = base + index;
            let mutated = format!("{}{name}", "a.".repeat(reps));
            Some(Variant::reject(
                Payload::DnsName(mutated.clone()),
                format!(
                    "\"a.\" repeated {reps} times makes the name {} characters",
                    mutated.chars().count()
                ),
            ))
        }
        _ => None,
    }
}

fn dns_structural_variant(name: &str, constraint: &Constraint, index: usize) -> Option<Variant> {
    let case = |n: String, note: &str| Some(Variant::reject(Payload::DnsName(n), note));
    match (constraint.param_str("rule")?, index) {
        ("dns-no-hyphen-edge", 0) => {
            let (first, rest) = name.split_once('.')?;
            case(format!("{first}-.{rest}"), "label ends with a hyphen")
        }
        ("dns-no-hyphen-edge", 1) => case(format!("-{name}"), "label starts with a hyphen"),
        ("dns-no-empty-label", 0) => {
            let (first, rest) = name.split_once('.')?;
            case(format!("{first}..{rest}"), "empty label between dots")
        }
        ("dns-no-leading-dot", 0) => case(format!(".{name}"), "leading dot"),
        ("dns-single-trailing-dot", 0) => case(format!("{name}.."), "two trailing dots"),
        _ => None,
    }
}

fn uri_structural_variant(
    parts: &UriParts,
    constraint: &Constraint,
    index: usize,
) -> Option<Variant> {
    let with_scheme = |s: &str| {
        let mut out = parts.clone();
        out.scheme = s.to_string();
        out
    };
    let with_path = |p: String| {
        let mut out = parts.clone();
        out.path = p;
        out
    };
    match (constraint.param_str("rule")?, index) {
        ("uri-scheme-leading-alpha", 0) => Some(Variant::reject(
            Payload::Uri(with_scheme(&format!("1{}", parts.scheme))),
            "scheme starts with a digit",
        )),
        ("uri-scheme-leading-alpha", 1) => Some(Variant::reject(
            Payload::Uri(with_scheme("")),
            "empty scheme",
        )),
        ("uri-pct-well-formed", 0) => Some(Variant::reject(
            Payload::Uri(with_path(format!("{}%zz", parts.path))),
            "'%' followed by non-hex digits",
        )),
        ("uri-pct-well-formed", 1) => Some(Variant::reject(
            Payload::Uri(with_path(format!("{}%", parts.path))),
            "truncated percent-encoding at end of path",
        )),
        ("uri-pct-nul-byte", 0) => Some(Variant::reject(
            Payload::Uri(with_path("/foo%00bar".to_string())),
            "percent-encoded NUL byte in the path",
        )),
        ("uri-pct-nul-byte", 1) => Some(Variant::reject(
            Payload::Uri(with_path(format!("{}%00", parts.path))),
            "percent-encoded NUL byte appended to the path",
        )),
        _ => None,
    }
}

fn uri_numeric_variant(parts: &UriParts, constraint: &Constraint, index: usize) -> Option<Variant> {
    if constraint.param_str("field") != Some("port") {
        return None;
    }
    let max = constraint.param_i64("max")? as u64;
    let port = max + 1 + index as u64;
    let mut out = parts.clone();
    out.port = Some(port.to_string());
    Some(Variant::reject(
        Payload::Uri(out),
        format!("port {port} exceeds {max}"),
    ))
}

fn uri_probe_variant(
    parts: &UriParts,
    _constraint: &Constraint,
    opts: &GenerationOptions,
    index: usize,
) -> Option<Variant> {
    if index > 0 {
        return None;
    }
    let len = opts.limit_probe_length.max(1);
    let mut out = parts.clone();
    out.path = format!("/{}", "a".repeat(len - 1));
    Some(Variant {
        payload: Payload::Uri(out),
        expected: Expectation::AgreementOnly,
        note: format!("path of exactly {len} characters (no formal limit exists)"),
    })
}

fn bgp_variant(input: &BgpInput, constraint: &Constraint, index: usize) -> Option<Variant> {
    let mut out = input.clone();
    let note: String;
    match constraint.kind {
        ConstraintKind::Structural => match (constraint.param_str("rule")?, index) {
            ("bgp-route-prefix", 0) => {
                out.route.prefix = Some("300.0.0.0/24".into());
                note = "route prefix with an out-of-range octet".into();
            }
            ("bgp-route-prefix", 1) => {
                out.route.prefix = Some("10.0.0.0/33".into());
                note = "route prefix with an out-of-range mask".into();
            }
            ("bgp-route-prefix", 2) => {
                out.route.prefix = Some("10.0.0/24".into());
                note = "route prefix with three octets".into();
            }
            ("bgp-community-format", 0) => {
                out.route.community = vec!["abc:def".into()];
                note = "non-numeric community".into();
            }
            ("bgp-community-format", 1) => {
                out.route.community = vec!["70000:1".into()];
                note = "community half above 65535".into();
            }
            ("bgp-prefix-list-format", 0) => {
                out.rmap.prefix_list = vec![MatchEntry::new("198.51.100.0", "permit")];
                note = "prefix-list match without a mask".into();
            }
            ("bgp-prefix-list-format", 1) => {
                out.rmap.prefix_list = vec![MatchEntry::new("300.0.0.0/24", "permit")];
                note = "prefix-list match with an out-of-range octet".into();
            }
            ("bgp-rmap-action", 0) => {
                out.rmap.rmap_action = None;
                note = "missing rmap-action field".into();
            }
            ("bgp-rmap-action", 1) => {
                out.rmap.rmap_action = Some("forward".into());
                note = "rmap-action outside permit/deny".into();
            }
            _ => return None,
        },
        ConstraintKind::NumericRange => match (constraint.param_str("field")?, index) {
            ("local-pref", 0) => {
                out.route.local_pref = Some(-100);
                note = "negative local preference".into();
            }
            ("local-pref", 1) => {
                out.route.local_pref = Some(4_294_967_296);
                note = "local preference above the four-octet range".into();
            }
            ("local-pref", k) => {
                out.route.local_pref = Some(-(100 + k as i64));
                note = "negative local preference".into();
            }
            ("med", 0) => {
                out.route.med = Some(-1);
                note = "negative MED".into();
            }
            ("med", 1) => {
                out.route.med = Some(4_294_967_296);
                note = "MED above the four-octet range".into();
            }
            ("med", k) => {
                out.route.med = Some(-(1 + k as i64));
                note = "negative MED".into();
            }
            ("as-path", 0) => {
                out.route.as_path = Some("65001 4294967296".into());
                note = "AS number above the four-octet range".into();
            }
            ("as-path", 1) => {
                out.route.as_path = Some("65001 -1".into());
                note = "negative AS number".into();
            }
            ("as-path", 2) => {
                out.route.as_path = Some("65001 corp".into());
                note = "non-numeric AS-path token".into();
            }
            _ => return None,
        },
        ConstraintKind::EnumMembership => match (constraint.param_str("field")?, index) {
            ("origin", 0) => {
                out.route.origin = Some("bogus".into());
                note = "origin outside igp/egp/incomplete".into();
            }
            ("origin", 1) => {
                out.route.origin = Some("IGP".into());
                note = "origin with the wrong case".into();
            }
            ("list.action", 0) => {
                out.rmap.community_list = vec![MatchEntry::new("65000:1", "drop")];
                note = "community-list entry with action \"drop\"".into();
            }
            ("list.action", 1) => {
                out.rmap.prefix_list = vec![MatchEntry {
                    pattern: "10.0.0.0/24".into(),
                    action: None,
                }];
                note = "prefix-list entry without an action".into();
            }
            _ => return None,
        },
        ConstraintKind::RegexWellformed => {
            let pattern = match index {
                0 => "[",
                1 => "(",
                2 => "*",
                _ => return None,
            };
            out.rmap.as_path_list = vec![MatchEntry::new(pattern, "permit")];
            note = format!("AS-path regex {pattern:?} does not compile");
        }
        _ => return None,
    }
    Some(Variant::reject(Payload::BgpFilter(out), note))
}

fn graph_variant(
    input: &GraphInput,
    constraint: &Constraint,
    opts: &GenerationOptions,
    index: usize,
) -> Option<Variant> {
    let mk = |form: GraphForm, source: usize, target: usize, policy: WeightPolicy| GraphInput {
        form,
        source,
        target,
        weight_policy: policy,
    };
    match constraint.kind {
        ConstraintKind::NumericRange if constraint.param_str("field") == Some("weight") => {
            let w = -(1.0 + index as f64);
            Some(Variant::reject(
                Payload::Graph(mk(
                    GraphForm::Matrix(triangle(w, 1.0, 1.0)),
                    input.source,
                    input.target,
                    input.weight_policy,
                )),
                format!("edge with negative weight {w}"),
            ))
        }
        ConstraintKind::Structural => match (constraint.param_str("rule")?, index) {
            ("graph-finite-weight", 0) => {
                let w = Cell::Weight;
                let matrix = vec![
                    vec![w(0.0), w(1e308), Cell::Absent],
                    vec![w(1e308), w(0.0), w(1e308)],
                    vec![Cell::Absent, w(1e308), w(0.0)],
                ];
                Some(Variant::reject(
                    Payload::Graph(mk(GraphForm::Matrix(matrix), 1, 3, input.weight_policy)),
                    "two near-max weights whose path sum overflows a double",
                ))
            }
            ("graph-finite-weight", 1) => {
                let edges = vec![
                    Edge { from: 1, to: 2, weight: Some(f64::NAN) },
                    Edge { from: 2, to: 3, weight: Some(1.0) },
                ];
                Some(Variant::reject(
                    Payload::Graph(mk(GraphForm::Edges(edges), 1, 3, input.weight_policy)),
                    "edge with NaN weight",
                ))
            }
            ("graph-weight-defined", 0) => {
                let edges = vec![
                    Edge { from: 1, to: 2, weight: None },
                    Edge { from: 2, to: 3, weight: Some(5.0) },
                ];
                Some(Variant::reject(
                    Payload::Graph(mk(GraphForm::Edges(edges), 1, 3, WeightPolicy::Strict)),
                    "one edge left without a weight under the strict policy",
                ))
            }
            _ => None,
        },
        ConstraintKind::LimitProbe => {
            if index > 0 {
                return None;
            }
            let probe = constraint
                .param_i64("probe_nodes")
                .map(|n| n.max(2) as usize)
                .unwrap_or(opts.max_graph_nodes);
            let n = probe.min(opts.max_graph_nodes).max(2);
            let mut matrix = vec![vec![Cell::Weight(1.0); n]; n];
            for (i, row) in matrix.iter_mut().enumerate() {
                row[i] = Cell::Weight(0.0);
            }
            Some(Variant {
                payload: Payload::Graph(mk(GraphForm::Matrix(matrix), 1, n, WeightPolicy::Strict)),
                expected: Expectation::AgreementOnly,
                note: format!("complete graph capped at {n} nodes (memory probe)"),
            })
        }
        _ => None,
    }
}

// ── Public operations ────────────────────────────────────────────────────

fn make_case(
    protocol: Protocol,
    kind: &str,
    constraint: &Constraint,
    suffix: String,
    variant: Variant,
) -> TestCase {
    TestCase {
        id: format!("{protocol}:{kind}:{}:{suffix}", constraint.id),
        protocol,
        input: variant.payload,
        violates: vec![constraint.id.clone()],
        expected: variant.expected,
        provenance: Provenance::Builtin,
        notes: variant.note,
    }
}

/// Produces the builtin suite: for every must/should constraint at least
/// `per_constraint_count` single-violation cases (capped by the constraint's
/// variant capacity), and one agreement-only case per limit-probe.
pub fn generate_builtin(catalog: &ConstraintCatalog, opts: &GenerationOptions) -> Vec<TestCase> {
    let seed = seed_payload(catalog.protocol, opts);
    let mut out = Vec::new();
    for constraint in &catalog.constraints {
        let want = if constraint.severity == Severity::LimitProbe {
            1
        } else {
            builtin_count(catalog, constraint).max(opts.per_constraint_count)
        };
        for index in 0..want {
            let Some(v) = variant(catalog, constraint, &seed, opts, index) else {
                break;
            };
            out.push(make_case(
                catalog.protocol,
                "builtin",
                constraint,
                index.to_string(),
                v,
            ));
        }
    }
    out
}

/// One case per (charset constraint, owned character) over the full ASCII
/// range, plus one representative per non-enumerable forbidden class.
/// Ordering is (constraint id, code point).
pub fn generate_exhaustive_charset(
    catalog: &ConstraintCatalog,
    opts: &GenerationOptions,
) -> Result<Vec<TestCase>, GenerateError> {
    let seed = seed_payload(catalog.protocol, opts);
    let mut charsets: Vec<&Constraint> = catalog
        .constraints
        .iter()
        .filter(|c| c.kind == ConstraintKind::Charset)
        .collect();
    if charsets.is_empty() {
        return Err(GenerateError::NoCharsetConstraints);
    }
    charsets.sort_by(|a, b| a.id.cmp(&b.id));

    let mut out = Vec::new();
    for constraint in charsets {
        let mut chars = if constraint.param_str("forbidden_class") == Some("non-ascii") {
            vec![NON_ASCII_REPS[0]]
        } else {
            catalog.owned_ascii_chars(constraint)
        };
        chars.sort();
        for ch in chars {
            let Some(v) = charset_case_for_char(catalog, constraint, &seed, ch) else {
                continue;
            };
            out.push(make_case(
                catalog.protocol,
                "exhaustive",
                constraint,
                format!("{:04x}", ch as u32),
                v,
            ));
        }
    }
    Ok(out)
}

/// Full suite for the options: the builtin cases, plus the exhaustive
/// charset enumeration when `exhaustive_charset` is set (and the catalog
/// has charset constraints to enumerate).
pub fn generate_suite(
    catalog: &ConstraintCatalog,
    opts: &GenerationOptions,
) -> Result<Vec<TestCase>, GenerateError> {
    let mut out = generate_builtin(catalog, opts);
    if opts.exhaustive_charset {
        let builtin_ids: std::collections::BTreeSet<String> =
            out.iter().map(|c| c.id.clone()).collect();
        let exhaustive = generate_exhaustive_charset(catalog, opts)?;
        out.extend(exhaustive.into_iter().filter(|c| !builtin_ids.contains(&c.id)));
    }
    Ok(out)
}

/// Mutates the seed's component governed by `constraint`, selecting among
/// its deterministic variants.
pub fn mutate_single(
    seed: &TestCase,
    constraint: &Constraint,
    variant_index: usize,
) -> Result<TestCase, GenerateError> {
    mutate_single_with(seed, constraint, variant_index, &GenerationOptions::default())
}

pub fn mutate_single_with(
    seed: &TestCase,
    constraint: &Constraint,
    variant_index: usize,
    opts: &GenerationOptions,
) -> Result<TestCase, GenerateError> {
    if seed.expected != Expectation::Accept {
        return Err(GenerateError::NotASeed);
    }
    if constraint.protocol != seed.protocol {
        return Err(GenerateError::ProtocolMismatch {
            constraint: constraint.protocol,
            seed: seed.protocol,
        });
    }
    let catalog = crate::catalog::builtin_catalog(seed.protocol);
    let v = variant(&catalog, constraint, &seed.input, opts, variant_index).ok_or(
        GenerateError::VariantOutOfRange {
            constraint: constraint.id.clone(),
            index: variant_index,
        },
    )?;
    Ok(make_case(
        seed.protocol,
        "mutated",
        constraint,
        variant_index.to_string(),
        v,
    ))
}

/// Names of top-level components in which `case` differs from `seed`
/// (the inverse edit restores exactly these).
pub fn differing_components(seed: &Payload, case: &Payload) -> Vec<String> {
    match (seed, case) {
        (Payload::DnsName(a), Payload::DnsName(b)) => {
            if a == b {
                Vec::new()
            } else {
                vec!["name".to_string()]
            }
        }
        (Payload::Uri(a), Payload::Uri(b)) => URI_COMPONENTS
            .iter()
            .filter(|c| a.component(c) != b.component(c))
            .map(|c| c.to_string())
            .collect(),
        (Payload::BgpFilter(a), Payload::BgpFilter(b)) => {
            let mut out = Vec::new();
            let va = serde_json::to_value(a).expect("bgp serializes");
            let vb = serde_json::to_value(b).expect("bgp serializes");
            for side in ["route", "rmap"] {
                let (na, nb) = (&va[side], &vb[side]);
                let keys: std::collections::BTreeSet<&String> = na
                    .as_object()
                    .into_iter()
                    .chain(nb.as_object())
                    .flat_map(|o| o.keys())
                    .collect();
                for key in keys {
                    if na.get(key) != nb.get(key) {
                        out.push(format!("{side}.{key}"));
                    }
                }
            }
            out
        }
        (Payload::Graph(a), Payload::Graph(b)) => {
            if a == b {
                Vec::new()
            } else {
                vec!["graph".to_string()]
            }
        }
        _ => vec!["protocol".to_string()],
    }
}

/// Applies the inverse edit: restores the seed's value for every component
/// in which `case` differs.
pub fn restore_seed_components(seed: &Payload, _case: &Payload) -> Payload {
    // Restoring every mutated component of a single-seed mutation is the
    // seed itself; kept as a function so call sites state intent.
    seed.clone()
}

/// Options sanity check used by CLI entry points.
pub fn check_options(opts: &GenerationOptions) -> Result<(), GenerateError> {
    if opts.limit_probe_length < 1 {
        return Err(GenerateError::BadProbeLength);
    }
    Ok(())
}
