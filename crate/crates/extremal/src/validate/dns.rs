//! DNS name checks.
//!
//! Names are analyzed in presentation form. A single trailing dot is the
//! root label and is legal; everything else the catalog constraints decide.

use crate::catalog::{ConstraintCatalog, ConstraintKind};

use super::Sink;

/// Split view of a presentation-form name.
pub(crate) struct NameParts<'a> {
    /// Labels of the name body (trailing root dots stripped). May contain
    /// empty strings for leading/interior empty labels.
    pub labels: Vec<&'a str>,
    /// Number of trailing dots ('.': 1 is the root, >1 is malformed).
    pub trailing_dots: usize,
    /// The name with all trailing dots removed.
    pub body: &'a str,
}

pub(crate) fn split_name(name: &str) -> NameParts<'_> {
    let body = name.trim_end_matches('.');
    let trailing_dots = name.len() - body.len();
    let labels = if body.is_empty() {
        Vec::new()
    } else {
        body.split('.').collect()
    };
    NameParts {
        labels,
        trailing_dots,
        body,
    }
}

pub(crate) fn check(name: &str, catalog: &ConstraintCatalog, sink: &mut Sink<'_>) {
    let parts = split_name(name);

    for constraint in &catalog.constraints {
        match constraint.kind {
            ConstraintKind::LengthRange => match constraint.param_str("applies") {
                Some("label") => {
                    let max = constraint.param_i64("max").unwrap_or(i64::MAX);
                    for (i, label) in parts.labels.iter().enumerate() {
                        let len = label.chars().count() as i64;
                        if len > max {
                            sink.report(
                                constraint,
                                format!("label is {len} characters (limit {max})"),
                                format!("label {}", i + 1),
                            );
                        }
                    }
                }
                Some("name") => {
                    let max = constraint.param_i64("max").unwrap_or(i64::MAX);
                    let exclude_root = constraint
                        .param_bool("exclude_trailing_root_dot")
                        .unwrap_or(true);
                    let len = if exclude_root {
                        parts.body.chars().count() as i64
                    } else {
                        name.chars().count() as i64
                    };
                    if len > max {
                        sink.report(
                            constraint,
                            format!("name is {len} characters (limit {max})"),
                            "name",
                        );
                    }
                }
                _ => {}
            },
            ConstraintKind::Charset => {
                for (i, label) in parts.labels.iter().enumerate() {
                    for (offset, ch) in label.chars().enumerate() {
                        let owner = catalog.charset_owner("label", ch);
                        if owner.map(|c| c.id == constraint.id).unwrap_or(false) {
                            sink.report(
                                constraint,
                                format!("character {:?} is not allowed", ch),
                                format!("label {}, offset {offset}", i + 1),
                            );
                        }
                    }
                }
            }
            ConstraintKind::Structural => match constraint.param_str("rule") {
                Some("dns-no-hyphen-edge") => {
                    for (i, label) in parts.labels.iter().enumerate() {
                        if label.starts_with('-') || label.ends_with('-') {
                            sink.report(
                                constraint,
                                "label starts or ends with a hyphen",
                                format!("label {}", i + 1),
                            );
                        }
                    }
                }
                Some("dns-no-empty-label") => {
                    if name.is_empty() {
                        sink.report(constraint, "empty name", "name");
                    }
                    for (i, label) in parts.labels.iter().enumerate() {
                        if i > 0 && label.is_empty() {
                            sink.report(
                                constraint,
                                "empty label between dots",
                                format!("label {}", i + 1),
                            );
                        }
                    }
                }
                Some("dns-no-leading-dot") => {
                    if parts.labels.first().map(|l| l.is_empty()).unwrap_or(false) {
                        sink.report(constraint, "leading dot (empty first label)", "label 1");
                    }
                }
                Some("dns-single-trailing-dot") if parts.trailing_dots > 1 => {
                    sink.report(
                        constraint,
                        format!(
                            "{} trailing dots (only one root dot is valid)",
                            parts.trailing_dots
                        ),
                        "name",
                    );
                }
                _ => {}
            },
            _ => {}
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::catalog::{builtin_catalog, Protocol};
    use crate::payload::Payload;
    use crate::validate::{validate, Mode};

    fn ids(name: &str) -> Vec<String> {
        let cat = builtin_catalog(Protocol::DnsName);
        validate(&Payload::DnsName(name.into()), &cat, Mode::Strict)
            .unwrap()
            .violated_ids()
    }

    #[test]
    fn oversized_label() {
        let name = format!("{}.example.com", "a".repeat(64));
        assert_eq!(ids(&name), vec!["dns.label.max-length"]);
    }

    #[test]
    fn oversized_total_length() {
        let name = format!("{}example.com", "a.".repeat(130));
        assert_eq!(ids(&name), vec!["dns.name.max-total-length"]);
    }

    #[test]
    fn root_dot_not_counted_in_total_length() {
        // 253 characters plus the root dot is still legal.
        let label = "a".repeat(63);
        let name = format!("{label}.{label}.{label}.{}.", "a".repeat(61));
        assert_eq!(name.len(), 254);
        assert!(ids(&name).is_empty(), "{name:?}");
    }

    #[test]
    fn hyphen_edges() {
        assert_eq!(ids("example-.com"), vec!["dns.label.no-hyphen-edge"]);
        assert_eq!(ids("-example.com"), vec!["dns.label.no-hyphen-edge"]);
        assert!(ids("exa-mple.com").is_empty());
    }

    #[test]
    fn dot_structure() {
        assert_eq!(ids(".example.com"), vec!["dns.name.no-leading-dot"]);
        assert_eq!(ids("example.com.."), vec!["dns.name.single-trailing-dot"]);
        assert_eq!(ids("example..com"), vec!["dns.name.no-empty-label"]);
        assert!(ids(".").is_empty(), "the root name is valid");
    }

    #[test]
    fn charset_cases() {
        assert_eq!(ids("exam ple.com"), vec!["dns.label.charset"]);
        assert_eq!(ids("exam!ple.com"), vec!["dns.label.hostname-charset"]);
        assert_eq!(ids("test_domain.com"), vec!["dns.label.hostname-charset"]);
        assert_eq!(ids("münich.com"), vec!["dns.name.ascii-only"]);
    }

    #[test]
    fn digit_led_labels_are_fine() {
        assert!(ids("3com.com").is_empty());
    }
}
