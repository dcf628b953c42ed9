//! Provider transport with record/replay fixtures.
//!
//! Fixtures are keyed by a content digest of the full request (model,
//! temperature, messages) so any prompt edit invalidates stale recordings.
//! Replay mode performs zero network operations; record mode performs the
//! live call and persists the fixture with a write-temp-then-rename.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::catalog::{Constraint, Protocol};
use crate::payload::TestCase;

pub const DEFAULT_ENDPOINT: &str = "https://api.openai.com/v1/chat/completions";
pub const DEFAULT_MODEL: &str = "gpt-4o";
pub const API_KEY_ENV: &str = "EXTREMAL_LLM_API_KEY";
pub const ENDPOINT_ENV: &str = "EXTREMAL_LLM_ENDPOINT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProviderMode {
    #[serde(rename = "live")]
    Live,
    #[serde(rename = "record")]
    Record,
    #[serde(rename = "replay")]
    Replay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderConfig {
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub mode: ProviderMode,
    pub temperature: f64,
}

impl ProviderConfig {
    /// Defaults, honoring the endpoint override environment variable.
    /// Temperature 0 maximizes replayability.
    pub fn new(mode: ProviderMode) -> Self {
        ProviderConfig {
            endpoint: std::env::var(ENDPOINT_ENV).unwrap_or_else(|_| DEFAULT_ENDPOINT.to_string()),
            model: DEFAULT_MODEL.to_string(),
            api_key_env: API_KEY_ENV.to_string(),
            mode,
            temperature: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: String,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChatRequest {
    pub model: String,
    pub temperature: f64,
    pub messages: Vec<ChatMessage>,
}

impl ChatRequest {
    pub fn single_user(config: &ProviderConfig, prompt: &str) -> Self {
        ChatRequest {
            model: config.model.clone(),
            temperature: config.temperature,
            messages: vec![ChatMessage {
                role: "user".to_string(),
                content: prompt.to_string(),
            }],
        }
    }
}

/// Content digest of the full request; a pure function of the request.
pub fn request_digest(request: &ChatRequest) -> String {
    let canonical = serde_json::to_string(request).expect("request serializes");
    let mut hasher = Sha256::new();
    hasher.update(canonical.as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Parse output attached to an exchange.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ParsedPayload {
    #[serde(rename = "constraints")]
    Constraints(Vec<ConstraintDraft>),
    #[serde(rename = "tests")]
    Tests(Vec<TestCase>),
}

/// Serialization-friendly view of a draft constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintDraft {
    pub id: String,
    pub protocol: Protocol,
    pub description: String,
}

impl From<&Constraint> for ConstraintDraft {
    fn from(c: &Constraint) -> Self {
        ConstraintDraft {
            id: c.id.clone(),
            protocol: c.protocol,
            description: c.description.clone(),
        }
    }
}

/// One rendered prompt with its provider response, replayable from fixtures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptExchange {
    pub request: ChatRequest,
    pub request_digest: String,
    pub response_text: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub parsed: Option<ParsedPayload>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fixture_path: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum ProviderError {
    #[error("no fixture for digest {digest} under {dir}")]
    FixtureMissing { digest: String, dir: PathBuf },
    #[error("fixture {path} does not match the request digest")]
    FixtureCorrupt { path: PathBuf },
    #[error("transport failure: {0}")]
    Transport(String),
    #[error("provider returned status {status}: {body}")]
    ProviderStatus { status: u16, body: String },
    #[error("API key environment variable {var} is not set")]
    ApiKeyMissing { var: String },
    #[error("malformed provider response: {0}")]
    MalformedResponse(String),
    #[error("fixture I/O: {0}")]
    Io(String),
}

#[derive(Debug, Serialize, Deserialize)]
struct FixtureFile {
    request: ChatRequest,
    response_text: String,
    recorded_at: u64,
}

fn fixture_path(fixtures_dir: &Path, protocol: Protocol, digest: &str) -> PathBuf {
    fixtures_dir.join(protocol.as_str()).join(format!("{digest}.json"))
}

fn read_fixture(
    fixtures_dir: &Path,
    protocol: Protocol,
    request: &ChatRequest,
    digest: &str,
) -> Result<PromptExchange, ProviderError> {
    let path = fixture_path(fixtures_dir, protocol, digest);
    let bytes = std::fs::read(&path).map_err(|_| ProviderError::FixtureMissing {
        digest: digest.to_string(),
        dir: fixtures_dir.to_path_buf(),
    })?;
    let fixture: FixtureFile =
        serde_json::from_slice(&bytes).map_err(|e| ProviderError::Io(e.to_string()))?;
    if request_digest(&fixture.request) != digest {
        return Err(ProviderError::FixtureCorrupt { path });
    }
    Ok(PromptExchange {
        request: request.clone(),
        request_digest: digest.to_string(),
        response_text: fixture.response_text,
        parsed: None,
        fixture_path: Some(path),
    })
}

fn write_fixture(
    fixtures_dir: &Path,
    protocol: Protocol,
    request: &ChatRequest,
    digest: &str,
    response_text: &str,
) -> Result<PathBuf, ProviderError> {
    let path = fixture_path(fixtures_dir, protocol, digest);
    let dir = path.parent().expect("fixture path has a parent");
    std::fs::create_dir_all(dir).map_err(|e| ProviderError::Io(e.to_string()))?;
    let fixture = FixtureFile {
        request: request.clone(),
        response_text: response_text.to_string(),
        recorded_at: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    };
    let body = serde_json::to_vec_pretty(&fixture).map_err(|e| ProviderError::Io(e.to_string()))?;
    let tmp = dir.join(format!(".{digest}.tmp-{}", std::process::id()));
    std::fs::write(&tmp, &body).map_err(|e| ProviderError::Io(e.to_string()))?;
    std::fs::rename(&tmp, &path).map_err(|e| ProviderError::Io(e.to_string()))?;
    Ok(path)
}

fn live_call(request: &ChatRequest, config: &ProviderConfig) -> Result<String, ProviderError> {
    let api_key = std::env::var(&config.api_key_env).map_err(|_| ProviderError::ApiKeyMissing {
        var: config.api_key_env.clone(),
    })?;
    let body = serde_json::to_string(request).expect("request serializes");

    let agent: ureq::Agent = ureq::Agent::config_builder()
        .http_status_as_error(false)
        .timeout_global(Some(std::time::Duration::from_secs(120)))
        .build()
        .into();
    let mut response = agent
        .post(&config.endpoint)
        .header("Authorization", &format!("Bearer {api_key}"))
        .header("Content-Type", "application/json")
        .send(body.as_bytes())
        .map_err(|e| ProviderError::Transport(e.to_string()))?;
    let status = response.status().as_u16();
    let text = response
        .body_mut()
        .read_to_string()
        .map_err(|e| ProviderError::Transport(e.to_string()))?;
    if !(200..300).contains(&status) {
        return Err(ProviderError::ProviderStatus { status, body: text });
    }
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| ProviderError::MalformedResponse(e.to_string()))?;
    value["choices"][0]["message"]["content"]
        .as_str()
        .map(str::to_string)
        .ok_or_else(|| {
            ProviderError::MalformedResponse("no choices[0].message.content in response".into())
        })
}

/// Executes a chat request under the configured mode.
///
/// live: HTTPS call; record: live call plus fixture write; replay: fixture
/// read keyed by the request digest, no network.
pub fn execute(
    request: ChatRequest,
    config: &ProviderConfig,
    fixtures_dir: &Path,
    protocol: Protocol,
) -> Result<PromptExchange, ProviderError> {
    let digest = request_digest(&request);
    match config.mode {
        ProviderMode::Replay => read_fixture(fixtures_dir, protocol, &request, &digest),
        ProviderMode::Live => {
            let response_text = live_call(&request, config)?;
            Ok(PromptExchange {
                request,
                request_digest: digest,
                response_text,
                parsed: None,
                fixture_path: None,
            })
        }
        ProviderMode::Record => {
            let response_text = live_call(&request, config)?;
            let path = write_fixture(fixtures_dir, protocol, &request, &digest, &response_text)?;
            Ok(PromptExchange {
                request,
                request_digest: digest,
                response_text,
                parsed: None,
                fixture_path: Some(path),
            })
        }
    }
}
