//! URI component checks against the RFC 3986 per-component grammars.
//!
//! Validation is per component over the component map, never over a
//! recomposed string, so a forbidden character in one component cannot be
//! reinterpreted as a delimiter for another.

use crate::catalog::{ConstraintCatalog, ConstraintKind};
use crate::payload::UriParts;

use super::Sink;

/// Components that may contain percent-encoded triplets.
const PCT_COMPONENTS: [&str; 5] = ["userinfo", "host", "path", "query", "fragment"];

pub(crate) fn check(parts: &UriParts, catalog: &ConstraintCatalog, sink: &mut Sink<'_>) {
    for constraint in &catalog.constraints {
        match constraint.kind {
            ConstraintKind::Charset => {
                let Some(component) = constraint.component() else {
                    continue;
                };
                let Some(text) = parts.component(component) else {
                    continue;
                };
                let skip_pct = constraint
                    .param_str("structural")
                    .map(|s| s.contains('%'))
                    .unwrap_or(false);
                for (offset, ch) in pct_aware_chars(text, skip_pct) {
                    let owner = catalog.charset_owner(component, ch);
                    if owner.map(|c| c.id == constraint.id).unwrap_or(false) {
                        sink.report(
                            constraint,
                            format!("character {:?} is not allowed", ch),
                            format!("{component}, offset {offset}"),
                        );
                    }
                }
            }
            ConstraintKind::Structural => match constraint.param_str("rule") {
                Some("uri-scheme-leading-alpha") => {
                    let ok = parts
                        .scheme
                        .chars()
                        .next()
                        .map(|c| c.is_ascii_alphabetic())
                        .unwrap_or(false);
                    if !ok {
                        sink.report(
                            constraint,
                            "scheme must be non-empty and start with a letter",
                            "scheme, offset 0",
                        );
                    }
                }
                Some("uri-pct-well-formed") => {
                    for component in PCT_COMPONENTS {
                        let Some(text) = parts.component(component) else {
                            continue;
                        };
                        for offset in malformed_pct_offsets(text) {
                            sink.report(
                                constraint,
                                "'%' not followed by two hexadecimal digits",
                                format!("{component}, offset {offset}"),
                            );
                        }
                    }
                }
                Some("uri-pct-nul-byte") => {
                    for component in PCT_COMPONENTS {
                        let Some(text) = parts.component(component) else {
                            continue;
                        };
                        for (offset, byte) in pct_decoded_bytes(text) {
                            if byte == 0 {
                                sink.report(
                                    constraint,
                                    "percent-encoded NUL byte (%00)",
                                    format!("{component}, offset {offset}"),
                                );
                            }
                        }
                    }
                }
                _ => {}
            },
            ConstraintKind::NumericRange => {
                if constraint.param_str("field") != Some("port") {
                    continue;
                }
                let Some(port) = parts.port.as_deref() else {
                    continue;
                };
                if port.is_empty() || !port.bytes().all(|b| b.is_ascii_digit()) {
                    continue; // charset rule's business
                }
                let max = constraint.param_i64("max").unwrap_or(i64::MAX) as u128;
                if port.parse::<u128>().map(|p| p > max).unwrap_or(true) {
                    sink.report(
                        constraint,
                        format!("port {port} exceeds {max}"),
                        "port",
                    );
                }
            }
            _ => {}
        }
    }
}

/// Characters of `text` with their offsets. When `skip_pct` is set,
/// well-formed `%XX` triplets are skipped entirely (the hex digits are not
/// subject to charset checks) and a malformed `%` is skipped as a single
/// character (it belongs to the pct-well-formed rule).
fn pct_aware_chars(text: &str, skip_pct: bool) -> Vec<(usize, char)> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if skip_pct && ch == '%' {
            let well_formed = i + 2 < chars.len()
                && chars[i + 1].is_ascii_hexdigit()
                && chars[i + 2].is_ascii_hexdigit();
            i += if well_formed { 3 } else { 1 };
            continue;
        }
        out.push((i, ch));
        i += 1;
    }
    out
}

/// Offsets of `%` signs not introducing two hex digits.
fn malformed_pct_offsets(text: &str) -> Vec<usize> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '%' {
            let well_formed = i + 2 < chars.len()
                && chars[i + 1].is_ascii_hexdigit()
                && chars[i + 2].is_ascii_hexdigit();
            if well_formed {
                i += 3;
                continue;
            }
            out.push(i);
        }
        i += 1;
    }
    out
}

/// Decoded bytes of all well-formed `%XX` triplets with their offsets.
fn pct_decoded_bytes(text: &str) -> Vec<(usize, u8)> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '%' && i + 2 < chars.len() {
            let (h, l) = (chars[i + 1], chars[i + 2]);
            if h.is_ascii_hexdigit() && l.is_ascii_hexdigit() {
                let byte = (h.to_digit(16).unwrap() * 16 + l.to_digit(16).unwrap()) as u8;
                out.push((i, byte));
                i += 3;
                continue;
            }
        }
        i += 1;
    }
    out
}
