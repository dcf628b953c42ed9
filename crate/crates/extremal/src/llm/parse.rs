//! Parsers for provider responses: test-case arrays and constraint drafts.
//!
//! Test parsing extracts the first well-formed JSON array in the text,
//! tolerating surrounding prose and code fences. Elements with schema gaps
//! are kept where a payload can still be built (a missing required field is
//! itself an extremal case) and carry a diagnostic note; elements that
//! cannot produce a payload at all are dropped with a diagnostic.
//!
//! Expected verdicts from the model are never trusted blindly: `violates`
//! is recomputed with the strict reference validator and any disagreement
//! is recorded in the case's notes.

use serde_json::Value;
use thiserror::Error;

use crate::catalog::{builtin_catalog, Constraint, ConstraintKind, Params, Protocol, Severity};
use crate::payload::{
    BgpInput, BgpRoute, Expectation, GraphForm, GraphInput, Payload, Provenance, RouteMap,
    TestCase, UriParts, WeightPolicy,
};
use crate::validate::{validate, Mode};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("no JSON test array found in the response")]
    NoTestArray { raw: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTests {
    pub cases: Vec<TestCase>,
    /// Per-element diagnostics for dropped or flagged elements.
    pub diagnostics: Vec<String>,
}

/// First well-formed JSON array in `text`, parsed as a prefix at each `[`.
pub(crate) fn extract_first_json_array(text: &str) -> Option<Vec<Value>> {
    for (pos, _) in text.char_indices().filter(|(_, c)| *c == '[') {
        let slice = &text[pos..];
        let mut de = serde_json::Deserializer::from_str(slice);
        if let Ok(Value::Array(items)) = Value::deserialize(&mut de) {
            return Some(items);
        }
    }
    None
}

use serde::Deserialize;

fn get_str(obj: &Value, keys: &[&str]) -> Option<String> {
    keys.iter()
        .find_map(|k| obj.get(*k).and_then(Value::as_str))
        .map(str::to_string)
}

fn element_number(obj: &Value, index: usize) -> String {
    obj.get("test case")
        .or_else(|| obj.get("test_case"))
        .or_else(|| obj.get("id"))
        .map(|v| match v {
            Value::Number(n) => n.to_string(),
            Value::String(s) => s.clone(),
            other => other.to_string(),
        })
        .unwrap_or_else(|| (index + 1).to_string())
}

fn expected_from(obj: &Value, notes: &mut Vec<String>) -> Expectation {
    match obj.get("expected").and_then(Value::as_str) {
        Some("permit") | Some("accept") | Some("valid") => Expectation::Accept,
        Some("deny") | Some("reject") | Some("invalid") => Expectation::Reject,
        Some(other) => {
            notes.push(format!("unrecognized expected verdict {other:?}; treated as reject"));
            Expectation::Reject
        }
        None => {
            notes.push("no expected field; defaulted to reject".to_string());
            Expectation::Reject
        }
    }
}

fn payload_from_element(
    protocol: Protocol,
    element: &Value,
    notes: &mut Vec<String>,
) -> Option<Payload> {
    match protocol {
        Protocol::DnsName => {
            if let Some(name) = element.as_str() {
                return Some(Payload::DnsName(name.to_string()));
            }
            let name = get_str(element, &["name", "domain", "dns_name", "input"])?;
            Some(Payload::DnsName(name))
        }
        Protocol::Uri => {
            let obj = element.as_object()?;
            let pick = |key: &str| obj.get(key).and_then(Value::as_str).map(str::to_string);
            let scheme = pick("scheme").unwrap_or_else(|| {
                notes.push("missing scheme; treated as empty".to_string());
                String::new()
            });
            let host = pick("host")
                .or_else(|| pick("authority"))
                .unwrap_or_else(|| {
                    notes.push("missing host; treated as empty".to_string());
                    String::new()
                });
            let path = pick("path").unwrap_or_default();
            Some(Payload::Uri(UriParts {
                scheme,
                userinfo: pick("userinfo"),
                host,
                port: match obj.get("port") {
                    Some(Value::Number(n)) => Some(n.to_string()),
                    Some(Value::String(s)) => Some(s.clone()),
                    _ => None,
                },
                path,
                query: pick("query"),
                fragment: pick("fragment"),
            }))
        }
        Protocol::BgpFilter => {
            if !element.is_object() {
                return None;
            }
            let route: BgpRoute = element
                .get("route")
                .and_then(|v| BgpRoute::deserialize(v.clone()).ok())
                .unwrap_or_else(|| {
                    notes.push("missing or malformed route; treated as empty".to_string());
                    BgpRoute::default()
                });
            let rmap: RouteMap = element
                .get("rmap")
                .and_then(|v| RouteMap::deserialize(v.clone()).ok())
                .unwrap_or_else(|| {
                    notes.push("missing or malformed rmap; treated as empty".to_string());
                    RouteMap::default()
                });
            if rmap.rmap_action.is_none() {
                notes.push("rmap-action field missing".to_string());
            }
            Some(Payload::BgpFilter(BgpInput { route, rmap }))
        }
        Protocol::Graph => {
            let obj = element.as_object()?;
            let form = if let Some(matrix) = obj.get("matrix") {
                GraphForm::Matrix(Deserialize::deserialize(matrix.clone()).ok()?)
            } else {
                let edges = obj.get("edges")?;
                GraphForm::Edges(Deserialize::deserialize(edges.clone()).ok()?)
            };
            let node_count = match &form {
                GraphForm::Matrix(m) => m.len(),
                GraphForm::Edges(e) => e.iter().map(|e| e.from.max(e.to)).max().unwrap_or(1),
            };
            let source = obj.get("source").and_then(Value::as_u64).unwrap_or_else(|| {
                notes.push("missing source; defaulted to 1".to_string());
                1
            }) as usize;
            let target = obj.get("target").and_then(Value::as_u64).unwrap_or_else(|| {
                notes.push(format!("missing target; defaulted to {node_count}"));
                node_count as u64
            }) as usize;
            let weight_policy = match obj.get("weight-policy").and_then(Value::as_str) {
                Some("default-1") => WeightPolicy::Default1,
                Some("strict") | None => WeightPolicy::Strict,
                Some(other) => {
                    notes.push(format!("unknown weight-policy {other:?}; treated as strict"));
                    WeightPolicy::Strict
                }
            };
            Some(Payload::Graph(GraphInput {
                form,
                source,
                target,
                weight_policy,
            }))
        }
    }
}

/// Parses a provider response into test cases with provenance `llm`.
pub fn parse_tests(response_text: &str, protocol: Protocol) -> Result<ParsedTests, ParseError> {
    let items = extract_first_json_array(response_text).ok_or_else(|| ParseError::NoTestArray {
        raw: response_text.to_string(),
    })?;
    let catalog = builtin_catalog(protocol);
    let mut cases: Vec<TestCase> = Vec::new();
    let mut diagnostics = Vec::new();
    let mut seen_ids = std::collections::BTreeSet::new();

    for (index, element) in items.iter().enumerate() {
        let mut notes: Vec<String> = Vec::new();
        let Some(payload) = payload_from_element(protocol, element, &mut notes) else {
            diagnostics.push(format!(
                "element {}: cannot build a {protocol} payload; dropped",
                index + 1
            ));
            continue;
        };
        let expected = expected_from(element, &mut notes);
        if let Some(description) = get_str(element, &["description"]) {
            notes.insert(0, description);
        }

        let violates = match validate(&payload, &catalog, Mode::Strict) {
            Ok(result) => result.violated_ids(),
            Err(e) => {
                notes.push(format!("payload failed shape validation: {e}"));
                Vec::new()
            }
        };
        match (expected, violates.is_empty()) {
            (Expectation::Accept, false) => notes.push(format!(
                "reference validator disagrees: violates [{}]",
                violates.join(", ")
            )),
            (Expectation::Reject, true) => notes.push(
                "reference validator found no violation (valid input or policy-level expectation)"
                    .to_string(),
            ),
            _ => {}
        }
        if !notes.is_empty() {
            diagnostics.push(format!("element {}: {}", index + 1, notes.join("; ")));
        }

        // Models sometimes repeat numbering; matrix rows need unique ids.
        let mut id = format!("{protocol}:llm:{}", element_number(element, index));
        if !seen_ids.insert(id.clone()) {
            id = format!("{id}-{}", index + 1);
            seen_ids.insert(id.clone());
        }
        cases.push(TestCase {
            id,
            protocol,
            input: payload,
            violates,
            expected,
            provenance: Provenance::Llm,
            notes: notes.join("; "),
        });
    }
    Ok(ParsedTests { cases, diagnostics })
}

fn is_item_start(line: &str) -> bool {
    let trimmed = line.trim_start();
    if let Some(rest) = trimmed.strip_prefix(|c: char| c.is_ascii_digit()) {
        let rest = rest.trim_start_matches(|c: char| c.is_ascii_digit());
        return rest.starts_with('.') || rest.starts_with(')') || rest.starts_with(':');
    }
    trimmed.starts_with('-') || trimmed.starts_with('*') || trimmed.starts_with('•')
}

/// Heuristic extraction of numbered/bulleted statements into draft
/// constraints for human curation. Drafts are never auto-merged into the
/// builtin catalogs.
pub fn parse_constraints(response_text: &str, protocol: Protocol) -> Vec<Constraint> {
    let mut items: Vec<String> = Vec::new();
    let mut current: Option<String> = None;
    for line in response_text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            if let Some(item) = current.take() {
                items.push(item);
            }
            continue;
        }
        if is_item_start(trimmed) {
            if let Some(item) = current.take() {
                items.push(item);
            }
            current = Some(trimmed.to_string());
        } else if let Some(item) = current.as_mut() {
            item.push(' ');
            item.push_str(trimmed);
        }
    }
    if let Some(item) = current.take() {
        items.push(item);
    }

    items
        .into_iter()
        .filter(|item| item.len() >= 8)
        .enumerate()
        .map(|(i, description)| Constraint {
            id: format!("{protocol}.draft.{}", i + 1),
            protocol,
            description,
            kind: ConstraintKind::Structural,
            params: Params::new(),
            severity: Severity::Must,
            spec_ref: "llm draft (uncurated)".to_string(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extracts_array_from_prose_and_fences() {
        let text = "Sure! Here are the cases:\n```json\n[1, 2, 3]\n```\nEnjoy.";
        assert_eq!(
            extract_first_json_array(text).unwrap(),
            vec![Value::from(1), Value::from(2), Value::from(3)]
        );
    }

    #[test]
    fn skips_malformed_bracket_runs() {
        let text = "ranges [1..5] are fine, data: [\"a\", \"b\"]";
        let items = extract_first_json_array(text).unwrap();
        assert_eq!(items.len(), 2);
    }

    #[test]
    fn prose_only_is_an_error() {
        assert!(matches!(
            parse_tests("no JSON here at all", Protocol::DnsName),
            Err(ParseError::NoTestArray { .. })
        ));
    }

    #[test]
    fn bgp_element_with_missing_rmap_action_is_kept_and_flagged() {
        let text = r#"[
          {"test case": 1, "description": "ok route",
           "route": {"prefix": "10.0.0.0/24", "local-pref": 100, "med": 50,
                     "as-path": "65001", "origin": "igp", "community": ["65000:1"]},
           "rmap": {"prefix-list": [], "community-list": [], "as-path-list": []},
           "expected": "deny"}
        ]"#;
        let parsed = parse_tests(text, Protocol::BgpFilter).unwrap();
        assert_eq!(parsed.cases.len(), 1);
        let case = &parsed.cases[0];
        assert!(case.notes.contains("rmap-action"));
        assert_eq!(case.violates, vec!["bgp.rmap.action-required"]);
        assert_eq!(case.provenance, Provenance::Llm);
    }

    #[test]
    fn expected_field_is_mapped_and_disagreements_noted() {
        let text = r#"[
          {"test case": 1, "route": {"prefix": "10.0.0.0/24"},
           "rmap": {"rmap-action": "permit"}, "expected": "deny"}
        ]"#;
        let parsed = parse_tests(text, Protocol::BgpFilter).unwrap();
        let case = &parsed.cases[0];
        assert_eq!(case.expected, Expectation::Reject);
        assert!(case.violates.is_empty());
        assert!(case.notes.contains("no violation"));
    }

    #[test]
    fn dns_names_parse_from_strings_or_objects() {
        let text = r#"["example..com", {"test case": 2, "name": "-bad.com"}]"#;
        let parsed = parse_tests(text, Protocol::DnsName).unwrap();
        assert_eq!(parsed.cases.len(), 2);
        assert_eq!(parsed.cases[0].violates, vec!["dns.name.no-empty-label"]);
        assert_eq!(parsed.cases[1].violates, vec!["dns.label.no-hyphen-edge"]);
    }

    #[test]
    fn undroppable_elements_are_dropped_with_diagnostics() {
        let text = r#"[{"name": "ok.example.com"}, 42]"#;
        let parsed = parse_tests(text, Protocol::DnsName).unwrap();
        assert_eq!(parsed.cases.len(), 1);
        assert!(parsed.diagnostics.iter().any(|d| d.contains("dropped")));
    }

    #[test]
    fn shape_failures_always_carry_a_diagnostic_note() {
        // A graph payload that builds but fails shape validation downstream.
        let text = r#"[{"test case": 1, "matrix": [[0, 1], [1]], "source": 1, "target": 2}]"#;
        let parsed = parse_tests(text, Protocol::Graph).unwrap();
        assert_eq!(parsed.cases.len(), 1);
        assert!(parsed.cases[0].notes.contains("shape validation"));
    }

    #[test]
    fn constraint_drafts_from_numbered_list() {
        let text = "Here are some rules:\n\n1. Labels must be between 1 and 63 characters.\n\n2. Only letters, digits, and hyphens are allowed.\n\n- A trailing dot denotes the root.\n";
        let drafts = parse_constraints(text, Protocol::DnsName);
        assert_eq!(drafts.len(), 3);
        assert!(drafts[0].description.contains("63"));
        assert_eq!(drafts[0].id, "dns-name.draft.1");
    }

    #[test]
    fn empty_text_yields_no_drafts() {
        assert!(parse_constraints("", Protocol::DnsName).is_empty());
    }

    #[test]
    fn single_bullet_yields_one_draft() {
        let drafts = parse_constraints("- weights must be non-negative", Protocol::Graph);
        assert_eq!(drafts.len(), 1);
    }
}
