//! Reference route-map evaluator with conjunctive match semantics.
//!
//! The model is a single-clause list with first-match semantics and an
//! implicit deny when nothing matches. Within one match list the first
//! entry whose pattern matches decides via its action (ANY-of); across the
//! three list kinds every non-empty list must produce a match (ALL-of).
//! AS-path patterns are anchored-capable regular expressions evaluated over
//! the space-joined AS-path string.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{builtin_catalog, Protocol};
use crate::payload::{BgpInput, BgpRoute, MatchEntry, Payload, RouteMap};
use crate::validate::{validate, Mode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RouteMapVerdict {
    #[serde(rename = "permit")]
    Permit,
    #[serde(rename = "deny")]
    Deny,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DenyReason {
    #[serde(rename = "clause-action")]
    ClauseAction,
    #[serde(rename = "implicit-deny")]
    ImplicitDeny,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteMapOutcome {
    pub verdict: RouteMapVerdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub matched_clause: Option<usize>,
    pub reason: DenyReason,
}

#[derive(Debug, Error)]
pub enum RouteMapError {
    #[error("inputs must pass strict validation before evaluation: {0}")]
    InvalidInput(String),
}

/// Outcome of matching one list: pass/fail of the condition plus whether a
/// deny entry matched.
enum ListMatch {
    /// List empty: no condition.
    NoCondition,
    /// An entry's pattern matched; carries the entry's action.
    Matched { deny: bool },
    /// No entry's pattern matched.
    Unmatched,
}

fn match_list(list: &[MatchEntry], mut matches: impl FnMut(&str) -> bool) -> ListMatch {
    if list.is_empty() {
        return ListMatch::NoCondition;
    }
    for entry in list {
        if matches(&entry.pattern) {
            return ListMatch::Matched {
                deny: entry.action.as_deref() == Some("deny"),
            };
        }
    }
    ListMatch::Unmatched
}

fn evaluate_clause(route: &BgpRoute, clause: &RouteMap) -> Option<bool> {
    let mut any_deny = false;

    let prefix = match_list(&clause.prefix_list, |pattern| {
        route.prefix.as_deref() == Some(pattern)
    });
    let community = match_list(&clause.community_list, |pattern| {
        route.community.iter().any(|c| c == pattern)
    });
    let as_path = match_list(&clause.as_path_list, |pattern| {
        let path = route.as_path.as_deref().unwrap_or("");
        regex::Regex::new(pattern)
            .map(|re| re.is_match(path))
            .unwrap_or(false)
    });

    for outcome in [prefix, community, as_path] {
        match outcome {
            ListMatch::NoCondition => {}
            ListMatch::Unmatched => return None,
            ListMatch::Matched { deny } => any_deny |= deny,
        }
    }
    Some(any_deny)
}

/// Evaluates `route` against `rmap` (one clause). Both payloads must pass
/// strict BGP validation first.
pub fn evaluate_route_map(
    route: &BgpRoute,
    rmap: &RouteMap,
) -> Result<RouteMapOutcome, RouteMapError> {
    let input = BgpInput {
        route: route.clone(),
        rmap: rmap.clone(),
    };
    let catalog = builtin_catalog(Protocol::BgpFilter);
    let result = validate(&Payload::BgpFilter(input), &catalog, Mode::Strict)
        .map_err(|e| RouteMapError::InvalidInput(e.to_string()))?;
    if !result.valid {
        return Err(RouteMapError::InvalidInput(
            result.violated_ids().join(", "),
        ));
    }

    match evaluate_clause(route, rmap) {
        Some(entry_denied) => {
            let clause_denies = rmap.rmap_action.as_deref() == Some("deny");
            let verdict = if entry_denied || clause_denies {
                RouteMapVerdict::Deny
            } else {
                RouteMapVerdict::Permit
            };
            Ok(RouteMapOutcome {
                verdict,
                matched_clause: Some(0),
                reason: DenyReason::ClauseAction,
            })
        }
        None => Ok(RouteMapOutcome {
            verdict: RouteMapVerdict::Deny,
            matched_clause: None,
            reason: DenyReason::ImplicitDeny,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn route() -> BgpRoute {
        BgpRoute {
            prefix: Some("10.0.0.0/24".into()),
            local_pref: Some(100),
            med: Some(50),
            as_path: Some("65050 65001".into()),
            origin: Some("igp".into()),
            community: vec!["65000:1".into()],
        }
    }

    fn rmap_with(as_path_pattern: &str) -> RouteMap {
        RouteMap {
            prefix_list: vec![MatchEntry::new("10.0.0.0/24", "permit")],
            as_path_list: vec![MatchEntry::new(as_path_pattern, "permit")],
            rmap_action: Some("permit".into()),
            ..RouteMap::default()
        }
    }

    #[test]
    fn conjunctive_failure_is_implicit_deny() {
        // Prefix matches but the anchored AS-path pattern does not: the
        // clause does not match, so the implicit deny applies.
        let outcome = evaluate_route_map(&route(), &rmap_with("^65051")).unwrap();
        assert_eq!(outcome.verdict, RouteMapVerdict::Deny);
        assert_eq!(outcome.reason, DenyReason::ImplicitDeny);
        assert_eq!(outcome.matched_clause, None);
    }

    #[test]
    fn unanchored_pattern_matches_and_permits() {
        let outcome = evaluate_route_map(&route(), &rmap_with("65050")).unwrap();
        assert_eq!(outcome.verdict, RouteMapVerdict::Permit);
        assert_eq!(outcome.matched_clause, Some(0));
        assert_eq!(outcome.reason, DenyReason::ClauseAction);
    }

    #[test]
    fn anchored_pattern_matching_start_permits() {
        let outcome = evaluate_route_map(&route(), &rmap_with("^65050")).unwrap();
        assert_eq!(outcome.verdict, RouteMapVerdict::Permit);
    }

    #[test]
    fn match_all_clause_permits() {
        let rmap = RouteMap {
            rmap_action: Some("permit".into()),
            ..RouteMap::default()
        };
        let outcome = evaluate_route_map(&route(), &rmap).unwrap();
        assert_eq!(outcome.verdict, RouteMapVerdict::Permit);
        assert_eq!(outcome.matched_clause, Some(0));
    }

    #[test]
    fn deny_entry_denies_with_clause_action() {
        let rmap = RouteMap {
            community_list: vec![MatchEntry::new("65000:1", "deny")],
            rmap_action: Some("permit".into()),
            ..RouteMap::default()
        };
        let outcome = evaluate_route_map(&route(), &rmap).unwrap();
        assert_eq!(outcome.verdict, RouteMapVerdict::Deny);
        assert_eq!(outcome.reason, DenyReason::ClauseAction);
        assert_eq!(outcome.matched_clause, Some(0));
    }

    #[test]
    fn deny_rmap_action_denies_matching_route() {
        let rmap = RouteMap {
            prefix_list: vec![MatchEntry::new("10.0.0.0/24", "permit")],
            rmap_action: Some("deny".into()),
            ..RouteMap::default()
        };
        let outcome = evaluate_route_map(&route(), &rmap).unwrap();
        assert_eq!(outcome.verdict, RouteMapVerdict::Deny);
        assert_eq!(outcome.matched_clause, Some(0));
    }

    #[test]
    fn end_anchor_matches_path_tail() {
        let outcome = evaluate_route_map(&route(), &rmap_with("65001$")).unwrap();
        assert_eq!(outcome.verdict, RouteMapVerdict::Permit);
    }

    #[test]
    fn wildcard_pattern_permits_everything() {
        let outcome = evaluate_route_map(&route(), &rmap_with(".*")).unwrap();
        assert_eq!(outcome.verdict, RouteMapVerdict::Permit);
    }

    #[test]
    fn empty_clause_with_deny_action_denies() {
        let rmap = RouteMap {
            rmap_action: Some("deny".into()),
            ..RouteMap::default()
        };
        let outcome = evaluate_route_map(&route(), &rmap).unwrap();
        assert_eq!(outcome.verdict, RouteMapVerdict::Deny);
        assert_eq!(outcome.matched_clause, Some(0));
        assert_eq!(outcome.reason, DenyReason::ClauseAction);
    }

    #[test]
    fn missing_community_fails_the_community_condition() {
        let mut r = route();
        r.community = vec!["65000:5".into()];
        let rmap = RouteMap {
            prefix_list: vec![MatchEntry::new("10.0.0.0/24", "permit")],
            community_list: vec![MatchEntry::new("65000:1", "permit")],
            rmap_action: Some("permit".into()),
            ..RouteMap::default()
        };
        let outcome = evaluate_route_map(&r, &rmap).unwrap();
        assert_eq!(outcome.verdict, RouteMapVerdict::Deny);
        assert_eq!(outcome.reason, DenyReason::ImplicitDeny);
    }

    #[test]
    fn invalid_inputs_are_errors() {
        let mut bad = route();
        bad.local_pref = Some(-100);
        let rmap = RouteMap {
            rmap_action: Some("permit".into()),
            ..RouteMap::default()
        };
        assert!(evaluate_route_map(&bad, &rmap).is_err());
    }
}
