//! BGP route and route-map checks.

use regex::Regex;

use crate::catalog::{Constraint, ConstraintCatalog, ConstraintKind};
use crate::payload::{BgpInput, MatchEntry};

use super::Sink;

/// Dotted-quad prefix with a required mask: octets 0-255, mask 0-32.
pub(crate) fn valid_prefix(s: &str) -> bool {
    let Some((addr, mask)) = s.split_once('/') else {
        return false;
    };
    let octets: Vec<&str> = addr.split('.').collect();
    if octets.len() != 4 {
        return false;
    }
    let octet_ok = |o: &&str| {
        !o.is_empty()
            && o.len() <= 3
            && o.bytes().all(|b| b.is_ascii_digit())
            && o.parse::<u32>().map(|n| n <= 255).unwrap_or(false)
    };
    if !octets.iter().all(octet_ok) {
        return false;
    }
    !mask.is_empty()
        && mask.len() <= 2
        && mask.bytes().all(|b| b.is_ascii_digit())
        && mask.parse::<u32>().map(|n| n <= 32).unwrap_or(false)
}

/// "A:B" community with A, B numeric in 0-65535.
pub(crate) fn valid_community(s: &str) -> bool {
    let Some((a, b)) = s.split_once(':') else {
        return false;
    };
    let half_ok = |h: &str| {
        !h.is_empty()
            && h.bytes().all(|b| b.is_ascii_digit())
            && h.parse::<u32>().map(|n| n <= 65535).unwrap_or(false)
    };
    half_ok(a) && half_ok(b)
}

fn check_range(
    sink: &mut Sink<'_>,
    constraint: &Constraint,
    value: Option<i64>,
    location: &str,
) {
    let Some(v) = value else { return };
    let min = constraint.param_i64("min").unwrap_or(i64::MIN);
    let max = constraint.param_i64("max").unwrap_or(i64::MAX);
    if v < min || v > max {
        sink.report(
            constraint,
            format!("value {v} outside [{min}, {max}]"),
            location,
        );
    }
}

fn check_actions(sink: &mut Sink<'_>, constraint: &Constraint, list: &[MatchEntry], name: &str) {
    let values: Vec<&str> = constraint
        .param_str("values")
        .unwrap_or("")
        .split(',')
        .collect();
    for (i, entry) in list.iter().enumerate() {
        let ok = entry
            .action
            .as_deref()
            .map(|a| values.contains(&a))
            .unwrap_or(false);
        if !ok {
            sink.report(
                constraint,
                format!(
                    "action {:?} must be one of {}",
                    entry.action.as_deref().unwrap_or("<missing>"),
                    values.join("/")
                ),
                format!("rmap.{name}[{i}]"),
            );
        }
    }
}

pub(crate) fn check(input: &BgpInput, catalog: &ConstraintCatalog, sink: &mut Sink<'_>) {
    let route = &input.route;
    let rmap = &input.rmap;

    for constraint in &catalog.constraints {
        match constraint.kind {
            ConstraintKind::Structural => match constraint.param_str("rule") {
                Some("bgp-route-prefix") => match route.prefix.as_deref() {
                    None => sink.report(constraint, "route has no prefix", "route.prefix"),
                    Some(p) if !valid_prefix(p) => sink.report(
                        constraint,
                        format!("prefix {p:?} is not dotted-quad/mask"),
                        "route.prefix",
                    ),
                    _ => {}
                },
                Some("bgp-community-format") => {
                    for (i, c) in route.community.iter().enumerate() {
                        if !valid_community(c) {
                            sink.report(
                                constraint,
                                format!("community {c:?} is not numeric A:B"),
                                format!("route.community[{i}]"),
                            );
                        }
                    }
                    for (i, entry) in rmap.community_list.iter().enumerate() {
                        if !valid_community(&entry.pattern) {
                            sink.report(
                                constraint,
                                format!("community match {:?} is not numeric A:B", entry.pattern),
                                format!("rmap.community-list[{i}]"),
                            );
                        }
                    }
                }
                Some("bgp-prefix-list-format") => {
                    for (i, entry) in rmap.prefix_list.iter().enumerate() {
                        if !valid_prefix(&entry.pattern) {
                            sink.report(
                                constraint,
                                format!("prefix match {:?} is not dotted-quad/mask", entry.pattern),
                                format!("rmap.prefix-list[{i}]"),
                            );
                        }
                    }
                }
                Some("bgp-rmap-action") => {
                    let ok = matches!(rmap.rmap_action.as_deref(), Some("permit") | Some("deny"));
                    if !ok {
                        sink.report(
                            constraint,
                            format!(
                                "rmap-action {:?} must be permit or deny",
                                rmap.rmap_action.as_deref().unwrap_or("<missing>")
                            ),
                            "rmap.rmap-action",
                        );
                    }
                }
                _ => {}
            },
            ConstraintKind::NumericRange => match constraint.param_str("field") {
                Some("local-pref") => {
                    check_range(sink, constraint, route.local_pref, "route.local-pref");
                    check_range(sink, constraint, rmap.local_pref, "rmap.local-pref");
                }
                Some("med") => {
                    check_range(sink, constraint, route.med, "route.med");
                    check_range(sink, constraint, rmap.med, "rmap.med");
                }
                Some("as-path") => {
                    let Some(path) = route.as_path.as_deref() else {
                        continue;
                    };
                    let min = constraint.param_i64("min").unwrap_or(0) as i128;
                    let max = constraint.param_i64("max").unwrap_or(i64::MAX) as i128;
                    for (i, token) in path.split_whitespace().enumerate() {
                        let in_range = token
                            .parse::<i128>()
                            .map(|n| n >= min && n <= max)
                            .unwrap_or(false);
                        if !in_range {
                            sink.report(
                                constraint,
                                format!("AS number {token:?} is not numeric in range"),
                                format!("route.as-path token {i}"),
                            );
                        }
                    }
                }
                _ => {}
            },
            ConstraintKind::EnumMembership => match constraint.param_str("field") {
                Some("origin") => {
                    let Some(origin) = route.origin.as_deref() else {
                        continue;
                    };
                    let values: Vec<&str> = constraint
                        .param_str("values")
                        .unwrap_or("")
                        .split(',')
                        .collect();
                    if !values.contains(&origin) {
                        sink.report(
                            constraint,
                            format!("origin {origin:?} not one of {}", values.join("/")),
                            "route.origin",
                        );
                    }
                }
                Some("list.action") => {
                    check_actions(sink, constraint, &rmap.prefix_list, "prefix-list");
                    check_actions(sink, constraint, &rmap.community_list, "community-list");
                    check_actions(sink, constraint, &rmap.as_path_list, "as-path-list");
                }
                _ => {}
            },
            ConstraintKind::RegexWellformed => {
                for (i, entry) in rmap.as_path_list.iter().enumerate() {
                    if Regex::new(&entry.pattern).is_err() {
                        sink.report(
                            constraint,
                            format!("pattern {:?} does not compile", entry.pattern),
                            format!("rmap.as-path-list[{i}]"),
                        );
                    }
                }
            }
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{builtin_catalog, Protocol};
    use crate::payload::{BgpRoute, Payload, RouteMap};
    use crate::validate::{validate, Mode};

    fn seed() -> BgpInput {
        BgpInput {
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
        }
    }

    fn ids(input: BgpInput) -> Vec<String> {
        let cat = builtin_catalog(Protocol::BgpFilter);
        validate(&Payload::BgpFilter(input), &cat, Mode::Strict)
            .unwrap()
            .violated_ids()
    }

    #[test]
    fn seed_is_valid() {
        assert!(ids(seed()).is_empty());
    }

    #[test]
    fn invalid_prefix() {
        let mut input = seed();
        input.route.prefix = Some("300.0.0.0/24".into());
        assert_eq!(ids(input), vec!["bgp.route.prefix-format"]);
    }

    #[test]
    fn negative_local_pref() {
        let mut input = seed();
        input.route.local_pref = Some(-100);
        assert_eq!(ids(input), vec!["bgp.route.local-pref-range"]);
    }

    #[test]
    fn bad_regex() {
        let mut input = seed();
        input.rmap.as_path_list = vec![MatchEntry::new("[", "permit")];
        assert_eq!(ids(input), vec!["bgp.rmap.as-path-regex"]);
    }

    #[test]
    fn maskless_prefix_list_match() {
        let mut input = seed();
        input.rmap.prefix_list = vec![MatchEntry::new("198.51.100.0", "permit")];
        assert_eq!(ids(input), vec!["bgp.rmap.prefix-list-format"]);
    }

    #[test]
    fn drop_action() {
        let mut input = seed();
        input.rmap.community_list = vec![MatchEntry::new("65000:1", "drop")];
        assert_eq!(ids(input), vec!["bgp.list.action"]);
    }

    #[test]
    fn missing_rmap_action() {
        let mut input = seed();
        input.rmap.rmap_action = None;
        assert_eq!(ids(input), vec!["bgp.rmap.action-required"]);
    }

    #[test]
    fn bogus_origin_and_community() {
        let mut input = seed();
        input.route.origin = Some("bogus".into());
        assert_eq!(ids(input), vec!["bgp.route.origin"]);
        let mut input = seed();
        input.route.community = vec!["abc:def".into()];
        assert_eq!(ids(input), vec!["bgp.community.format"]);
    }

    #[test]
    fn as_path_out_of_range() {
        let mut input = seed();
        input.route.as_path = Some("65001 4294967296".into());
        assert_eq!(ids(input), vec!["bgp.aspath.as-number-range"]);
    }

    #[test]
    fn prefix_format_corners() {
        assert!(valid_prefix("0.0.0.0/0"));
        assert!(valid_prefix("255.255.255.255/32"));
        assert!(!valid_prefix("10.0.0.0"));
        assert!(!valid_prefix("10.0.0/24"));
        assert!(!valid_prefix("10.0.0.0/33"));
        assert!(!valid_prefix("10.0.0.0/"));
        assert!(!valid_prefix("256.0.0.0/8"));
        assert!(!valid_prefix("1.2.3.4.5/8"));
    }

    #[test]
    fn community_format_corners() {
        assert!(valid_community("0:0"));
        assert!(valid_community("65535:65535"));
        assert!(!valid_community("65536:1"));
        assert!(!valid_community("abc:def"));
        assert!(!valid_community("65000"));
        assert!(!valid_community(":1"));
    }
}
