//! External SUT adapters: raw HTTP over TCP and artifact-fed commands.
//!
//! Failures never abort a campaign: unreachable or hung SUTs are recorded
//! as timeout/crash-suspect verdicts and the matrix stays complete.

use std::io::{Read, Write};
use std::net::{TcpStream, ToSocketAddrs};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use crate::catalog::Protocol;
use crate::payload::{Payload, TestCase};

use super::{RawVerdict, SutDescriptor, VerdictChannel};

const DEFAULT_TIMEOUT_SECS: u64 = 10;

fn timeout_of(sut: &SutDescriptor) -> Duration {
    let secs = sut
        .params
        .get("timeout")
        .and_then(|v| v.as_i64())
        .filter(|s| *s > 0)
        .unwrap_or(DEFAULT_TIMEOUT_SECS as i64);
    Duration::from_secs(secs as u64)
}

fn exception(token: &str, detail: impl Into<String>) -> RawVerdict {
    RawVerdict::token(VerdictChannel::Exception, token, detail)
}

/// Sends the raw request bytes for a URI test to `host`/`port` and parses
/// the status line of the response.
pub(super) fn run_http(test: &TestCase, sut: &SutDescriptor) -> RawVerdict {
    let timeout = timeout_of(sut);
    let uri_host = match &test.input {
        Payload::Uri(parts) => parts.host.clone(),
        _ => return exception("payload", "not a uri payload"),
    };
    let host = sut
        .params
        .get("host")
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_else(|| uri_host.clone());
    let port = sut
        .params
        .get("port")
        .and_then(|v| v.as_i64())
        .unwrap_or(80) as u16;
    let host_header = sut
        .params
        .get("host_header")
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or(uri_host);

    let request = match super::emit::emit_http_request(test, &host_header) {
        Ok(bytes) => bytes,
        Err(e) => return exception("emit", e.to_string()),
    };

    let addr = match (host.as_str(), port).to_socket_addrs() {
        Ok(mut addrs) => match addrs.next() {
            Some(addr) => addr,
            None => return exception("resolve", format!("no address for {host}:{port}")),
        },
        Err(e) => return exception("resolve", e.to_string()),
    };

    let mut stream = match TcpStream::connect_timeout(&addr, timeout) {
        Ok(s) => s,
        Err(e) if e.kind() == std::io::ErrorKind::TimedOut => {
            return exception("timeout", "connect timed out")
        }
        Err(e) => return exception("connect", e.to_string()),
    };
    let _ = stream.set_read_timeout(Some(timeout));
    let _ = stream.set_write_timeout(Some(timeout));
    if let Err(e) = stream.write_all(&request) {
        return exception("send", e.to_string());
    }

    let mut buf = Vec::new();
    let mut chunk = [0u8; 4096];
    let deadline = Instant::now() + timeout;
    loop {
        match stream.read(&mut chunk) {
            Ok(0) => break,
            Ok(n) => {
                buf.extend_from_slice(&chunk[..n]);
                if buf.windows(2).any(|w| w == b"\r\n") || buf.len() > 64 * 1024 {
                    break;
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::TimedOut => {
                return exception("timeout", "read timed out")
            }
            Err(e) => return exception("read", e.to_string()),
        }
        if Instant::now() > deadline {
            return exception("timeout", "response deadline exceeded");
        }
    }

    parse_status_line(&buf)
}

fn parse_status_line(buf: &[u8]) -> RawVerdict {
    let line_end = buf
        .windows(2)
        .position(|w| w == b"\r\n")
        .unwrap_or(buf.len());
    let line = String::from_utf8_lossy(&buf[..line_end]).to_string();
    let mut fields = line.split_whitespace();
    let version = fields.next().unwrap_or("");
    let status = fields.next().unwrap_or("");
    if !version.starts_with("HTTP/") {
        return exception("malformed-response", line);
    }
    match status.parse::<i64>() {
        Ok(code) => RawVerdict::code(VerdictChannel::StatusCode, code, line),
        Err(_) => exception("malformed-response", line),
    }
}

/// Writes the protocol artifact to a temp file, substitutes `{artifact}` in
/// the command template, and runs it under the per-SUT timeout.
pub(super) fn run_command(test: &TestCase, sut: &SutDescriptor) -> RawVerdict {
    let timeout = timeout_of(sut);
    let Some(template) = sut.params.get("command").and_then(|v| v.as_str()) else {
        return exception("config", "external-command SUT needs a \"command\" param");
    };

    let artifact = match artifact_bytes(test, sut) {
        Ok(bytes) => bytes,
        Err(e) => return exception("emit", e.to_string()),
    };
    // One file per execution: concurrent SUTs share test ids, so the name
    // must not collide across them.
    static SEQ: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);
    let dir = std::env::temp_dir();
    let filename = format!(
        "extremal-{}-{}-{}.artifact",
        std::process::id(),
        SEQ.fetch_add(1, std::sync::atomic::Ordering::Relaxed),
        sanitize(&test.id)
    );
    let path = dir.join(filename);
    if let Err(e) = std::fs::write(&path, &artifact) {
        return exception("io", e.to_string());
    }

    let command_line = template.replace("{artifact}", &path.to_string_lossy());
    let verdict = run_with_timeout(&command_line, timeout, sut);
    let _ = std::fs::remove_file(&path);
    verdict
}

fn sanitize(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '-' })
        .collect()
}

fn artifact_bytes(test: &TestCase, sut: &SutDescriptor) -> Result<Vec<u8>, super::HarnessError> {
    match test.protocol {
        Protocol::DnsName => {
            let origin = sut
                .params
                .get("origin")
                .and_then(|v| v.as_str())
                .unwrap_or("example.test.");
            let address = sut
                .params
                .get("address")
                .and_then(|v| v.as_str())
                .unwrap_or("192.0.2.1")
                .parse()
                .unwrap_or(std::net::Ipv4Addr::new(192, 0, 2, 1));
            super::emit::emit_zone_file(test, origin, address)
        }
        Protocol::Uri => {
            let host = sut
                .params
                .get("host_header")
                .and_then(|v| v.as_str())
                .unwrap_or("example.com");
            super::emit::emit_http_request(test, host)
        }
        Protocol::BgpFilter => super::emit::emit_bgp_config(test),
        Protocol::Graph => super::emit::emit_graph_input(test),
    }
}

fn run_with_timeout(command_line: &str, timeout: Duration, sut: &SutDescriptor) -> RawVerdict {
    let mut child = match Command::new("sh")
        .arg("-c")
        .arg(command_line)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
    {
        Ok(child) => child,
        Err(e) => return exception("spawn", e.to_string()),
    };

    let deadline = Instant::now() + timeout;
    let status = loop {
        match child.try_wait() {
            Ok(Some(status)) => break status,
            Ok(None) => {
                if Instant::now() > deadline {
                    let _ = child.kill();
                    let _ = child.wait();
                    return exception("timeout", format!("exceeded {timeout:?}"));
                }
                std::thread::sleep(Duration::from_millis(10));
            }
            Err(e) => return exception("wait", e.to_string()),
        }
    };

    let mut stdout = String::new();
    if let Some(mut pipe) = child.stdout.take() {
        let _ = pipe.read_to_string(&mut stdout);
    }

    let channel = sut
        .params
        .get("channel")
        .and_then(|v| v.as_str())
        .unwrap_or("exit-code");
    match channel {
        "load-result" => {
            let token = stdout
                .lines()
                .rev()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("")
                .trim()
                .to_string();
            RawVerdict::token(VerdictChannel::LoadResult, &token, stdout.trim().to_string())
        }
        _ => {
            let code = status.code().unwrap_or(-1) as i64;
            RawVerdict::code(VerdictChannel::ExitCode, code, stdout.trim().to_string())
        }
    }
}
