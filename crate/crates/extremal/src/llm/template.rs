//! Prompt templates for the three prompting strategies.
//!
//! The two-stage strategy owns a constraints stage and a tests stage; the
//! one-stage strategies own only a tests stage. Two protocols carry the
//! exact stage-1 wordings used historically; everything else renders from
//! the generic template.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::Protocol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "two-stage")]
    TwoStage,
    #[serde(rename = "one-stage-with-constraints")]
    OneStageWithConstraints,
    #[serde(rename = "one-stage-bare")]
    OneStageBare,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [
        Strategy::TwoStage,
        Strategy::OneStageWithConstraints,
        Strategy::OneStageBare,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::TwoStage => "two-stage",
            Strategy::OneStageWithConstraints => "one-stage-with-constraints",
            Strategy::OneStageBare => "one-stage-bare",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Strategy {
    type Err = TemplateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "two-stage" => Ok(Strategy::TwoStage),
            "one-stage-with-constraints" => Ok(Strategy::OneStageWithConstraints),
            "one-stage-bare" => Ok(Strategy::OneStageBare),
            other => Err(TemplateError::UnknownStrategy(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    #[serde(rename = "constraints")]
    Constraints,
    #[serde(rename = "tests")]
    Tests,
    #[serde(rename = "feedback")]
    Feedback,
}

impl FromStr for Stage {
    type Err = TemplateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "constraints" => Ok(Stage::Constraints),
            "tests" => Ok(Stage::Tests),
            "feedback" => Ok(Stage::Feedback),
            other => Err(TemplateError::UnknownStage(other.to_string())),
        }
    }
}

#[derive(Debug, Error)]
pub enum TemplateError {
    #[error("unknown strategy \"{0}\"")]
    UnknownStrategy(String),
    #[error("unknown stage \"{0}\"")]
    UnknownStage(String),
    #[error("strategy {strategy} does not own stage {stage:?}")]
    InvalidPair { strategy: Strategy, stage: Stage },
    #[error("two-stage tests rendering requires the stage-1 response as context")]
    MissingContext,
    #[error("the feedback stage is rendered from a differential report (see build_feedback_prompt)")]
    FeedbackNeedsReport,
}

/// Display name used inside prompt prose.
pub fn protocol_display(protocol: Protocol) -> &'static str {
    match protocol {
        Protocol::DnsName => "DNS",
        Protocol::Uri => "HTTP",
        Protocol::BgpFilter => "BGP",
        Protocol::Graph => "shortest path",
    }
}

/// Feature phrase used when the caller does not supply one.
pub fn default_feature(protocol: Protocol) -> &'static str {
    match protocol {
        Protocol::DnsName => "domain names",
        Protocol::Uri => "URIs",
        Protocol::BgpFilter => "route and route maps",
        Protocol::Graph => "graph inputs",
    }
}

/// Generic stage-1 template with placeholders.
pub const STAGE1_TEMPLATE: &str = "Tell me some validity constraints for {Feature} of {Protocol}.";

fn stage1(protocol: Protocol, feature: &str) -> String {
    match (protocol, feature) {
        (Protocol::DnsName, "domain names") => {
            "Tell me some validity constraints for DNS domain names.".to_string()
        }
        (Protocol::BgpFilter, "route and route maps") => {
            "Give me some validity constraints for BGP route and route maps.".to_string()
        }
        _ => STAGE1_TEMPLATE
            .replace("{Feature}", feature)
            .replace("{Protocol}", protocol_display(protocol)),
    }
}

/// Output-schema instruction appended to every tests-stage prompt.
pub fn schema_instruction(protocol: Protocol) -> String {
    let sample = match protocol {
        Protocol::DnsName => {
            "[{\"test case\": 1,\n  \"description\": ...,\n  \"name\": ...},\n ...\n]"
        }
        Protocol::Uri => {
            "[{\"test case\": 1,\n  \"description\": ...,\n  \"scheme\":_, \"userinfo\":_, \"host\":_, \"port\":_, \"path\":_, \"query\":_, \"fragment\":_,\n  \"expected\":\"accept\"/\"reject\"},\n ...\n]"
        }
        Protocol::BgpFilter => {
            "[{\"test case\": 1,\n  \"description\": ...,\n  \"route\": {\"prefix\":_, \"local-pref\":_, \"med\":_, \"as-path\":_, \"origin\":_, \"community\":_},\n  \"rmap\": {\"local-pref\":_,\"med\":_,\n  \"prefix-list\": [{\"match\":_,\"action\":_},...], \"community-list\": [{\"match\":_,\"action\":_},...], \"as-path-list\": [{\"match\":_,\"action\":_},...], \"rmap-action\": \"permit\"/\"deny\"},\n  \"expected\":\"permit\"/\"deny\"},\n ...\n]"
        }
        Protocol::Graph => {
            "[{\"test case\": 1,\n  \"description\": ...,\n  \"matrix\": [[_, _], [_, _]] (or \"edges\": [{\"from\":_,\"to\":_,\"weight\":_},...]),\n  \"source\":_, \"target\":_, \"weight-policy\": \"strict\"/\"default-1\",\n  \"expected\":\"accept\"/\"reject\"},\n ...\n]"
        }
    };
    format!("Do not include any comments in the json output. A sample output is shown below:\n{sample}")
}

/// Renders the prompt for (strategy, stage). Two-stage tests rendering
/// embeds the stage-1 response verbatim as "the above constraints".
pub fn render_prompt(
    strategy: Strategy,
    stage: Stage,
    protocol: Protocol,
    feature: &str,
    context: Option<&str>,
) -> Result<String, TemplateError> {
    let display = protocol_display(protocol);
    match (strategy, stage) {
        (Strategy::TwoStage, Stage::Constraints) => Ok(stage1(protocol, feature)),
        (Strategy::TwoStage, Stage::Tests) => {
            let ctx = context.ok_or(TemplateError::MissingContext)?;
            Ok(format!(
                "{ctx}\n\nGenerate a set of invalid test cases for {feature} that violate one or more of the above constraints and can be used to test real {display} implementations.\n\n{}",
                schema_instruction(protocol)
            ))
        }
        (Strategy::OneStageWithConstraints, Stage::Tests) => Ok(format!(
            "Generate a set of invalid test cases for {feature} of {display} that violate one or more validity constraints and can be used to test real implementations.\n\n{}",
            schema_instruction(protocol)
        )),
        (Strategy::OneStageBare, Stage::Tests) => Ok(format!(
            "Generate a set of invalid test cases for {feature} of {display} to test real {display} implementations.\n\n{}",
            schema_instruction(protocol)
        )),
        (_, Stage::Feedback) => Err(TemplateError::FeedbackNeedsReport),
        (strategy, stage) => Err(TemplateError::InvalidPair { strategy, stage }),
    }
}
