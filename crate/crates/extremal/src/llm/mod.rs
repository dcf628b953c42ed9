//! LLM prompt pipeline: strategy templates, a record/replay provider
//! transport, response parsers, and the feedback-round prompt builder.

mod parse;
mod provider;
mod template;

pub use parse::{parse_constraints, parse_tests, ParseError, ParsedTests};
pub use provider::{
    execute, request_digest, ChatMessage, ChatRequest, ConstraintDraft, ParsedPayload,
    PromptExchange, ProviderConfig, ProviderError, ProviderMode, API_KEY_ENV, DEFAULT_ENDPOINT,
    DEFAULT_MODEL, ENDPOINT_ENV,
};
pub use template::{
    default_feature, protocol_display, render_prompt, schema_instruction, Stage, Strategy,
    TemplateError, STAGE1_TEMPLATE,
};

use std::path::Path;

use thiserror::Error;

use crate::catalog::Protocol;
use crate::harness::{render_report_table, DifferentialReport};

#[derive(Debug, Error)]
pub enum LlmError {
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error(transparent)]
    Provider(#[from] ProviderError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("report is empty; nothing to build feedback from")]
    EmptyReport,
    #[error("report suite \"{suite}\" does not match protocol {protocol}")]
    ReportProtocolMismatch { suite: String, protocol: Protocol },
}

/// Renders and executes one prompt stage, attaching the parse result for
/// tests stages (constraint parsing is attached for stage 1).
pub fn prompt_stage(
    strategy: Strategy,
    stage: Stage,
    protocol: Protocol,
    feature: &str,
    context: Option<&str>,
    config: &ProviderConfig,
    fixtures_dir: &Path,
) -> Result<PromptExchange, LlmError> {
    let prompt = render_prompt(strategy, stage, protocol, feature, context)?;
    let request = ChatRequest::single_user(config, &prompt);
    let mut exchange = execute(request, config, fixtures_dir, protocol)?;
    exchange.parsed = match stage {
        Stage::Constraints => {
            let drafts = parse_constraints(&exchange.response_text, protocol);
            Some(ParsedPayload::Constraints(
                drafts.iter().map(ConstraintDraft::from).collect(),
            ))
        }
        Stage::Tests => {
            let parsed = parse_tests(&exchange.response_text, protocol)?;
            Some(ParsedPayload::Tests(parsed.cases))
        }
        Stage::Feedback => None,
    };
    Ok(exchange)
}

/// Runs the full two-stage chain (constraints, then tests with the stage-1
/// response embedded) and returns both exchanges.
pub fn run_two_stage(
    protocol: Protocol,
    feature: &str,
    config: &ProviderConfig,
    fixtures_dir: &Path,
) -> Result<(PromptExchange, PromptExchange), LlmError> {
    let stage1 = prompt_stage(
        Strategy::TwoStage,
        Stage::Constraints,
        protocol,
        feature,
        None,
        config,
        fixtures_dir,
    )?;
    let stage2 = prompt_stage(
        Strategy::TwoStage,
        Stage::Tests,
        protocol,
        feature,
        Some(&stage1.response_text),
        config,
        fixtures_dir,
    )?;
    Ok((stage1, stage2))
}

/// Renders the feedback-round prompt: the verdict matrix as a plain-text
/// table followed by the follow-up sentence with a parameterized count.
pub fn build_feedback_prompt(
    report: &DifferentialReport,
    protocol: Protocol,
    count: usize,
) -> Result<String, LlmError> {
    if report.matrix.is_empty() {
        return Err(LlmError::EmptyReport);
    }
    if report.suite != protocol.as_str() {
        return Err(LlmError::ReportProtocolMismatch {
            suite: report.suite.clone(),
            protocol,
        });
    }
    let table = render_report_table(report);
    Ok(format!(
        "This is the differential testing results obtained after running the previous test cases.\n{table}Based on these results generate {count} additional test cases to maximize the possibility of finding a bug."
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin_catalog;
    use crate::generate::{generate_builtin, GenerationOptions};
    use crate::harness::{run_matrix, SutDescriptor, SutKind};

    fn dns_report() -> DifferentialReport {
        let catalog = builtin_catalog(Protocol::DnsName);
        let tests = generate_builtin(&catalog, &GenerationOptions::default());
        let suts = vec![
            SutDescriptor::builtin("strict", SutKind::BuiltinStrict, Protocol::DnsName),
            SutDescriptor::builtin("lenient", SutKind::BuiltinLenient, Protocol::DnsName),
        ];
        run_matrix(&tests, &suts, 2).unwrap()
    }

    #[test]
    fn feedback_prompt_contains_table_and_sentence() {
        let report = dns_report();
        let prompt = build_feedback_prompt(&report, Protocol::DnsName, 10).unwrap();
        assert!(prompt.starts_with(
            "This is the differential testing results obtained after running the previous test cases."
        ));
        assert!(prompt.contains("strict"));
        assert!(prompt.contains("lenient"));
        assert!(prompt.ends_with("generate 10 additional test cases to maximize the possibility of finding a bug."));
    }

    #[test]
    fn feedback_count_is_parameterized() {
        let report = dns_report();
        let prompt = build_feedback_prompt(&report, Protocol::DnsName, 5).unwrap();
        assert!(prompt.contains("5 additional test cases"));
    }

    #[test]
    fn empty_report_is_an_error() {
        let report = DifferentialReport {
            suite: "dns-name".into(),
            matrix: Default::default(),
            discrepancies: Vec::new(),
        };
        assert!(matches!(
            build_feedback_prompt(&report, Protocol::DnsName, 10),
            Err(LlmError::EmptyReport)
        ));
    }

    #[test]
    fn zero_discrepancy_report_still_renders() {
        let catalog = builtin_catalog(Protocol::DnsName);
        let tests = generate_builtin(&catalog, &GenerationOptions::default());
        let suts = vec![SutDescriptor::builtin(
            "strict",
            SutKind::BuiltinStrict,
            Protocol::DnsName,
        )];
        let report = run_matrix(&tests, &suts, 1).unwrap();
        assert!(report.discrepancies.is_empty());
        let prompt = build_feedback_prompt(&report, Protocol::DnsName, 10).unwrap();
        assert!(prompt.contains("additional test cases"));
    }
}
