//! Protocol artifact emitters.
//!
//! All emitters are pure: identical test cases yield identical bytes.
//! Invalid inputs are emitted verbatim; deploying the malformed value is
//! the point of the artifact.

use std::net::Ipv4Addr;

use crate::payload::{Payload, TestCase};

use super::HarnessError;

fn expect_protocol(test: &TestCase, wanted: crate::catalog::Protocol) -> Result<(), HarnessError> {
    if test.protocol != wanted {
        return Err(HarnessError::WrongProtocol {
            test: test.id.clone(),
            wanted,
            got: test.protocol,
        });
    }
    Ok(())
}

/// Minimal master-file zone: $ORIGIN line, SOA record, NS record, then the
/// test name as the owner of an A record. LF line endings, byte-stable.
pub fn emit_zone_file(
    test: &TestCase,
    origin: &str,
    address: Ipv4Addr,
) -> Result<Vec<u8>, HarnessError> {
    expect_protocol(test, crate::catalog::Protocol::DnsName)?;
    let Payload::DnsName(name) = &test.input else {
        unreachable!("protocol checked above");
    };
    let origin = if origin.ends_with('.') {
        origin.to_string()
    } else {
        format!("{origin}.")
    };
    let zone = format!(
        "$ORIGIN {origin}\n\
         @ 3600 IN SOA ns.{origin} admin.{origin} 1 7200 3600 1209600 3600\n\
         @ 3600 IN NS ns.{origin}\n\
         {name} 3600 IN A {address}\n"
    );
    Ok(zone.into_bytes())
}

/// Raw HTTP/1.1 request bytes in origin-form. Percent-encodings are emitted
/// literally, never re-encoded; the fragment is a client-side construct and
/// is never written to the wire.
pub fn emit_http_request(test: &TestCase, host_header: &str) -> Result<Vec<u8>, HarnessError> {
    expect_protocol(test, crate::catalog::Protocol::Uri)?;
    let Payload::Uri(parts) = &test.input else {
        unreachable!("protocol checked above");
    };
    let mut target = if parts.path.is_empty() {
        "/".to_string()
    } else {
        parts.path.clone()
    };
    if let Some(q) = &parts.query {
        target.push('?');
        target.push_str(q);
    }
    let request =
        format!("GET {target} HTTP/1.1\r\nHost: {host_header}\r\nConnection: close\r\n\r\n");
    Ok(request.into_bytes())
}

/// Canonical JSON route/route-map document: sorted keys, two-space indent,
/// LF-terminated. External adapters translate it to their router configs.
pub fn emit_bgp_config(test: &TestCase) -> Result<Vec<u8>, HarnessError> {
    expect_protocol(test, crate::catalog::Protocol::BgpFilter)?;
    let Payload::BgpFilter(input) = &test.input else {
        unreachable!("protocol checked above");
    };
    // serde_json's default map is ordered, so round-tripping through Value
    // yields sorted keys.
    let value = serde_json::to_value(input).expect("bgp payload serializes");
    let mut bytes = serde_json::to_vec_pretty(&value).expect("value serializes");
    bytes.push(b'\n');
    Ok(bytes)
}

/// Graph payload as canonical JSON, for external-command adapters.
pub fn emit_graph_input(test: &TestCase) -> Result<Vec<u8>, HarnessError> {
    expect_protocol(test, crate::catalog::Protocol::Graph)?;
    let value = test.input.to_value();
    let mut bytes = serde_json::to_vec_pretty(&value).expect("value serializes");
    bytes.push(b'\n');
    Ok(bytes)
}
