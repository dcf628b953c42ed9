//! Command-line entry point: catalogs, generation, prompting, differential
//! runs, feedback prompts, and prefiltering.
//!
//! Exit codes: 0 success; 1 discrepancies found (run) or input rejected
//! (filter); 2 usage/config error; 3 environment error (missing fixture,
//! unreachable provider, unwritable output).

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use extremal::catalog::{
    builtin_catalog, catalog_to_json, lint_catalog, load_catalog, ConstraintCatalog, Protocol,
};
use extremal::generate::{
    check_options, generate_builtin, generate_exhaustive_charset, GenerationOptions,
};
use extremal::harness::{render_report_table, run_matrix, DifferentialReport, SutSetFile};
use extremal::llm::{
    self, build_feedback_prompt, prompt_stage, run_two_stage, ParsedPayload, ProviderConfig,
    ProviderError, ProviderMode, Stage, Strategy,
};
use extremal::payload::{load_suite, suite_to_json, Payload, TestCase};
use extremal::validate::{compile_prefilter, Mode};

const EXIT_OK: u8 = 0;
const EXIT_FINDINGS: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_ENV: u8 = 3;

#[derive(Parser)]
#[command(
    name = "extremal",
    about = "Extremal test generation and differential testing for network protocol inputs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List, show, or lint constraint catalogs
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Generate an extremal test suite from a catalog
    Generate(GenerateArgs),
    /// Render and execute LLM prompts (with record/replay fixtures)
    Prompt(PromptArgs),
    /// Run a suite against a set of SUTs and report discrepancies
    Run(RunArgs),
    /// Build the feedback-round prompt from a differential report
    Feedback(FeedbackArgs),
    /// Classify inputs with a compiled prefilter
    Filter(FilterArgs),
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Print the supported protocols
    List,
    /// Print a catalog as JSON
    Show {
        protocol: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// Check a catalog for structural problems and warnings
    Lint {
        protocol: Option<String>,
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenerateMode {
    Builtin,
    Exhaustive,
}

#[derive(Args)]
struct GenerateArgs {
    protocol: String,
    #[arg(long, value_enum, default_value = "builtin")]
    mode: GenerateMode,
    /// Write the suite JSON here (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1008)]
    probe_length: usize,
    #[arg(long, default_value_t = 2000)]
    max_graph_nodes: usize,
    /// Minimum cases per constraint (parameterizable constraints only)
    #[arg(long, default_value_t = 1)]
    per_constraint: usize,
    #[arg(long, default_value = "example")]
    seed_label: String,
}

#[derive(Args)]
struct ProviderFlags {
    /// Replay recorded fixtures (no network); optionally names the dir
    #[arg(long, value_name = "DIR", num_args = 0..=1, default_missing_value = "fixtures")]
    replay: Option<PathBuf>,
    /// Record live responses into the fixtures dir
    #[arg(long, value_name = "DIR", num_args = 0..=1, default_missing_value = "fixtures")]
    record: Option<PathBuf>,
    /// Call the provider without recording
    #[arg(long)]
    live: bool,
    /// Fixtures directory (when --replay/--record carry no value)
    #[arg(long, default_value = "fixtures")]
    fixtures: PathBuf,
    #[arg(long, default_value = "gpt-4o")]
    model: String,
    /// Provider endpoint (EXTREMAL_LLM_ENDPOINT overrides the default)
    #[arg(long)]
    endpoint: Option<String>,
}

impl ProviderFlags {
    fn mode_and_dir(&self) -> Result<(ProviderMode, PathBuf), String> {
        let chosen = [self.replay.is_some(), self.record.is_some(), self.live]
            .iter()
            .filter(|b| **b)
            .count();
        if chosen > 1 {
            return Err("choose one of --replay, --record, --live".to_string());
        }
        if let Some(dir) = &self.record {
            return Ok((ProviderMode::Record, dir.clone()));
        }
        if self.live {
            return Ok((ProviderMode::Live, self.fixtures.clone()));
        }
        let dir = self.replay.clone().unwrap_or_else(|| self.fixtures.clone());
        Ok((ProviderMode::Replay, dir))
    }

    fn config(&self, mode: ProviderMode) -> ProviderConfig {
        let mut config = ProviderConfig::new(mode);
        config.model = self.model.clone();
        if let Some(endpoint) = &self.endpoint {
            config.endpoint = endpoint.clone();
        }
        config
    }
}

#[derive(Args)]
struct PromptArgs {
    protocol: String,
    /// Feature phrase for the templates (defaults per protocol)
    #[arg(long)]
    feature: Option<String>,
    #[arg(long, default_value = "two-stage")]
    strategy: String,
    /// Run a single stage (constraints|tests); default runs the strategy's
    /// full chain and parses tests
    #[arg(long)]
    stage: Option<String>,
    /// Write parsed output here (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    provider: ProviderFlags,
}

#[derive(Args)]
struct RunArgs {
    /// Suite JSON file
    #[arg(long)]
    tests: PathBuf,
    /// SUT set JSON file
    #[arg(long)]
    suts: PathBuf,
    /// Report JSON path (a .txt table is written next to it)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    parallelism: usize,
    /// Per-execution timeout in seconds for external SUTs that do not set
    /// their own
    #[arg(long)]
    timeout: Option<u64>,
}

#[derive(Args)]
struct FeedbackArgs {
    protocol: String,
    /// Differential report JSON
    #[arg(long)]
    report: PathBuf,
    #[arg(long, default_value_t = 10)]
    count: usize,
    /// Write the prompt (or parsed round-2 tests with provider flags) here
    #[arg(long)]
    out: Option<PathBuf>,
    /// Execute the feedback prompt against the provider and parse tests
    #[arg(long)]
    execute: bool,
    #[command(flatten)]
    provider: ProviderFlags,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FilterMode {
    Strict,
    Lenient,
}

#[derive(Args)]
struct FilterArgs {
    protocol: String,
    /// Payload or suite JSON file ("-" for stdin)
    #[arg(long, default_value = "-")]
    input: String,
    #[arg(long, value_enum, default_value = "strict")]
    mode: FilterMode,
}

fn usage_error(message: impl std::fmt::Display) -> u8 {
    eprintln!("error: {message}");
    EXIT_USAGE
}

fn env_error(message: impl std::fmt::Display) -> u8 {
    eprintln!("error: {message}");
    EXIT_ENV
}

fn parse_protocol(s: &str) -> Result<Protocol, u8> {
    s.parse::<Protocol>().map_err(usage_error)
}

fn write_or_print(out: &Option<PathBuf>, content: &str, what: &str) -> Result<(), u8> {
    match out {
        Some(path) => {
            std::fs::write(path, content)
                .map_err(|e| env_error(format!("cannot write {what} to {path:?}: {e}")))?;
            println!("{what} written to {}", path.display());
            Ok(())
        }
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn load_catalog_arg(
    protocol: &Option<String>,
    file: &Option<PathBuf>,
) -> Result<ConstraintCatalog, u8> {
    match (protocol, file) {
        (_, Some(path)) => {
            let bytes = std::fs::read(path)
                .map_err(|e| usage_error(format!("cannot read {path:?}: {e}")))?;
            load_catalog(&bytes).map_err(usage_error)
        }
        (Some(name), None) => Ok(builtin_catalog(parse_protocol(name)?)),
        (None, None) => Err(usage_error("provide a protocol or --file")),
    }
}

fn cmd_catalog(action: CatalogAction) -> u8 {
    match action {
        CatalogAction::List => {
            for p in Protocol::ALL {
                println!("{p}");
            }
            EXIT_OK
        }
        CatalogAction::Show { protocol, file } => match load_catalog_arg(&protocol, &file) {
            Ok(catalog) => {
                println!("{}", catalog_to_json(&catalog));
                EXIT_OK
            }
            Err(code) => code,
        },
        CatalogAction::Lint { protocol, file } => {
            // Load failures are themselves lint findings.
            let catalog = match (&protocol, &file) {
                (_, Some(path)) => {
                    let bytes = match std::fs::read(path) {
                        Ok(bytes) => bytes,
                        Err(e) => return usage_error(format!("cannot read {path:?}: {e}")),
                    };
                    match load_catalog(&bytes) {
                        Ok(catalog) => catalog,
                        Err(e) => {
                            println!("1 issue");
                            println!("- {e}");
                            return EXIT_USAGE;
                        }
                    }
                }
                _ => match load_catalog_arg(&protocol, &file) {
                    Ok(catalog) => catalog,
                    Err(code) => return code,
                },
            };
            let issues = lint_catalog(&catalog);
            println!(
                "{} issue{}",
                issues.len(),
                if issues.len() == 1 { "" } else { "s" }
            );
            for issue in &issues {
                println!("- {}: {}", issue.constraint_id, issue.message);
            }
            if issues.is_empty() {
                EXIT_OK
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn cmd_generate(args: GenerateArgs) -> u8 {
    let protocol = match parse_protocol(&args.protocol) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let opts = GenerationOptions {
        exhaustive_charset: args.mode == GenerateMode::Exhaustive,
        per_constraint_count: args.per_constraint.max(1),
        limit_probe_length: args.probe_length,
        max_graph_nodes: args.max_graph_nodes,
        seed_label: args.seed_label.clone(),
    };
    if let Err(e) = check_options(&opts) {
        return usage_error(e);
    }
    let catalog = builtin_catalog(protocol);
    let cases = match args.mode {
        GenerateMode::Builtin => generate_builtin(&catalog, &opts),
        GenerateMode::Exhaustive => match generate_exhaustive_charset(&catalog, &opts) {
            Ok(cases) => cases,
            Err(e) => return usage_error(e),
        },
    };

    let mut counts: std::collections::BTreeMap<&str, usize> = Default::default();
    for case in &cases {
        for id in &case.violates {
            *counts.entry(id.as_str()).or_default() += 1;
        }
    }
    let json = suite_to_json(&cases);
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &json) {
                return env_error(format!("cannot write suite to {path:?}: {e}"));
            }
            println!("{} cases written to {}", cases.len(), path.display());
        }
        None => println!("{json}"),
    }
    for (id, count) in &counts {
        eprintln!("{id}: {count}");
    }
    EXIT_OK
}

fn provider_exit(err: &llm::LlmError) -> u8 {
    match err {
        llm::LlmError::Template(e) => usage_error(e),
        llm::LlmError::Provider(ProviderError::FixtureMissing { digest, dir }) => env_error(
            format!("no fixture for digest {digest} under {}", dir.display()),
        ),
        llm::LlmError::Provider(e) => env_error(e),
        llm::LlmError::Parse(e) => env_error(e),
        other => usage_error(other),
    }
}

fn cmd_prompt(args: PromptArgs) -> u8 {
    let protocol = match parse_protocol(&args.protocol) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let strategy: Strategy = match args.strategy.parse() {
        Ok(s) => s,
        Err(e) => return usage_error(e),
    };
    let feature = args
        .feature
        .clone()
        .unwrap_or_else(|| llm::default_feature(protocol).to_string());
    let (mode, fixtures_dir) = match args.provider.mode_and_dir() {
        Ok(pair) => pair,
        Err(e) => return usage_error(e),
    };
    let config = args.provider.config(mode);

    let stage = match &args.stage {
        Some(s) => match s.parse::<Stage>() {
            Ok(stage) => Some(stage),
            Err(e) => return usage_error(e),
        },
        None => None,
    };

    let result: Result<(Vec<String>, Option<ParsedPayload>), llm::LlmError> =
        match (strategy, stage) {
            (Strategy::TwoStage, None) | (Strategy::TwoStage, Some(Stage::Tests)) => {
                run_two_stage(protocol, &feature, &config, &fixtures_dir).map(|(s1, s2)| {
                    (
                        vec![s1.request_digest.clone(), s2.request_digest.clone()],
                        s2.parsed,
                    )
                })
            }
            (Strategy::TwoStage, Some(Stage::Constraints)) => prompt_stage(
                strategy,
                Stage::Constraints,
                protocol,
                &feature,
                None,
                &config,
                &fixtures_dir,
            )
            .map(|ex| (vec![ex.request_digest.clone()], ex.parsed)),
            (_, Some(Stage::Constraints)) => {
                return usage_error("one-stage strategies own only the tests stage")
            }
            (_, Some(Stage::Feedback)) => {
                return usage_error("use the feedback subcommand for feedback prompts")
            }
            (s, _) => prompt_stage(
                s,
                Stage::Tests,
                protocol,
                &feature,
                None,
                &config,
                &fixtures_dir,
            )
            .map(|ex| (vec![ex.request_digest.clone()], ex.parsed)),
        };

    let (digests, parsed) = match result {
        Ok(pair) => pair,
        Err(e) => return provider_exit(&e),
    };
    println!("strategy: {strategy}");
    for digest in &digests {
        println!("digest: {digest}");
    }
    match parsed {
        Some(ParsedPayload::Tests(cases)) => {
            println!("parsed {} test case(s), provenance=llm", cases.len());
            if write_or_print(&args.out, &suite_to_json(&cases), "suite").is_err() {
                return EXIT_ENV;
            }
        }
        Some(ParsedPayload::Constraints(drafts)) => {
            println!("parsed {} constraint draft(s)", drafts.len());
            let json = serde_json::to_string_pretty(&drafts).expect("drafts serialize");
            if write_or_print(&args.out, &json, "drafts").is_err() {
                return EXIT_ENV;
            }
        }
        None => {}
    }
    EXIT_OK
}

fn cmd_run(args: RunArgs) -> u8 {
    let tests_bytes = match std::fs::read(&args.tests) {
        Ok(bytes) => bytes,
        Err(e) => return usage_error(format!("cannot read {:?}: {e}", args.tests)),
    };
    let tests: Vec<TestCase> = match load_suite(&tests_bytes) {
        Ok(tests) => tests,
        Err(e) => return usage_error(format!("suite file: {e}")),
    };
    let suts_bytes = match std::fs::read(&args.suts) {
        Ok(bytes) => bytes,
        Err(e) => return usage_error(format!("cannot read {:?}: {e}", args.suts)),
    };
    let mut sut_set: SutSetFile = match serde_json::from_slice(&suts_bytes) {
        Ok(set) => set,
        Err(e) => return usage_error(format!("SUT set file: {e}")),
    };
    if args.parallelism < 1 {
        return usage_error("--parallelism must be >= 1");
    }
    if let Some(timeout) = args.timeout {
        for sut in &mut sut_set.suts {
            sut.params
                .entry("timeout".to_string())
                .or_insert(extremal::catalog::ParamValue::Int(timeout as i64));
        }
    }

    let report = match run_matrix(&tests, &sut_set.suts, args.parallelism) {
        Ok(report) => report,
        Err(e) => return usage_error(e),
    };

    let table = render_report_table(&report);
    if let Some(out) = &args.out {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        if let Err(e) = std::fs::write(out, &json) {
            return env_error(format!("cannot write report to {out:?}: {e}"));
        }
        let table_path = out.with_extension("txt");
        if let Err(e) = std::fs::write(&table_path, &table) {
            return env_error(format!("cannot write table to {table_path:?}: {e}"));
        }
        println!(
            "report written to {} (table: {})",
            out.display(),
            table_path.display()
        );
    } else {
        println!("{table}");
    }
    println!(
        "{} test(s) x {} SUT(s): {} discrepancy(ies)",
        report.matrix.len(),
        sut_set.suts.len(),
        report.discrepancies.len()
    );
    for d in &report.discrepancies {
        println!("- {} [{:?}] {}", d.test_id, d.kind, d.details);
    }
    if report.discrepancies.is_empty() {
        EXIT_OK
    } else {
        EXIT_FINDINGS
    }
}

fn cmd_feedback(args: FeedbackArgs) -> u8 {
    let protocol = match parse_protocol(&args.protocol) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let bytes = match std::fs::read(&args.report) {
        Ok(bytes) => bytes,
        Err(e) => return usage_error(format!("cannot read {:?}: {e}", args.report)),
    };
    let report: DifferentialReport = match serde_json::from_slice(&bytes) {
        Ok(report) => report,
        Err(e) => return usage_error(format!("report file: {e}")),
    };
    let prompt = match build_feedback_prompt(&report, protocol, args.count) {
        Ok(prompt) => prompt,
        Err(e) => return usage_error(e),
    };

    let wants_execute = args.execute
        || args.provider.replay.is_some()
        || args.provider.record.is_some()
        || args.provider.live;
    if !wants_execute {
        if write_or_print(&args.out, &prompt, "feedback prompt").is_err() {
            return EXIT_ENV;
        }
        return EXIT_OK;
    }

    let (mode, fixtures_dir) = match args.provider.mode_and_dir() {
        Ok(pair) => pair,
        Err(e) => return usage_error(e),
    };
    let config = args.provider.config(mode);
    let request = llm::ChatRequest::single_user(&config, &prompt);
    let exchange = match llm::execute(request, &config, &fixtures_dir, protocol) {
        Ok(ex) => ex,
        Err(e) => return provider_exit(&llm::LlmError::Provider(e)),
    };
    let parsed = match llm::parse_tests(&exchange.response_text, protocol) {
        Ok(parsed) => parsed,
        Err(e) => return provider_exit(&llm::LlmError::Parse(e)),
    };
    println!("digest: {}", exchange.request_digest);
    println!("parsed {} round-2 test case(s)", parsed.cases.len());
    for diagnostic in &parsed.diagnostics {
        eprintln!("note: {diagnostic}");
    }
    if write_or_print(&args.out, &suite_to_json(&parsed.cases), "suite").is_err() {
        return EXIT_ENV;
    }
    EXIT_OK
}

fn cmd_filter(args: FilterArgs) -> u8 {
    let protocol = match parse_protocol(&args.protocol) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let bytes = if args.input == "-" {
        let mut buf = Vec::new();
        if let Err(e) = std::io::stdin().read_to_end(&mut buf) {
            return env_error(format!("cannot read stdin: {e}"));
        }
        buf
    } else {
        match std::fs::read(Path::new(&args.input)) {
            Ok(bytes) => bytes,
            Err(e) => return usage_error(format!("cannot read {:?}: {e}", args.input)),
        }
    };

    // A suite file, a bare payload value, or (for DNS) one name per line.
    let inputs: Vec<(String, Payload)> = if let Ok(suite) = load_suite(&bytes) {
        suite
            .into_iter()
            .filter(|t| t.protocol == protocol)
            .map(|t| (t.id.clone(), t.input))
            .collect()
    } else if let Ok(value) = serde_json::from_slice::<serde_json::Value>(&bytes) {
        match Payload::from_value(protocol, &value) {
            Ok(payload) => vec![("input".to_string(), payload)],
            Err(e) => return usage_error(e),
        }
    } else if protocol == Protocol::DnsName {
        match String::from_utf8(bytes) {
            Ok(text) => text
                .lines()
                .filter(|l| !l.trim().is_empty())
                .enumerate()
                .map(|(i, l)| {
                    (
                        format!("line {}", i + 1),
                        Payload::DnsName(l.trim().to_string()),
                    )
                })
                .collect(),
            Err(e) => return usage_error(format!("input is neither JSON nor UTF-8 text: {e}")),
        }
    } else {
        return usage_error("input is neither a suite nor a payload JSON value");
    };

    if inputs.is_empty() {
        return usage_error("no inputs for this protocol in the file");
    }

    let mode = match args.mode {
        FilterMode::Strict => Mode::Strict,
        FilterMode::Lenient => Mode::Lenient,
    };
    let prefilter = compile_prefilter(&builtin_catalog(protocol), mode);
    let mut rejected = 0usize;
    for (label, payload) in &inputs {
        match prefilter.classify(payload) {
            Ok(result) if result.valid => println!("{label}: accept"),
            Ok(result) => {
                rejected += 1;
                println!("{label}: reject [{}]", result.violated_ids().join(", "));
            }
            Err(e) => return usage_error(format!("{label}: {e}")),
        }
    }
    if rejected > 0 {
        EXIT_FINDINGS
    } else {
        EXIT_OK
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Catalog { action } => cmd_catalog(action),
        Command::Generate(args) => cmd_generate(args),
        Command::Prompt(args) => cmd_prompt(args),
        Command::Run(args) => cmd_run(args),
        Command::Feedback(args) => cmd_feedback(args),
        Command::Filter(args) => cmd_filter(args),
    };
    ExitCode::from(code)
}
