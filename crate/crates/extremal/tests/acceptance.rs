//! Acceptance suite: one test per release criterion, each printing a
//! PASS line (run with --nocapture to see them).
//!
//! `REGEN_GOLDENS=1 cargo test -p extremal --test acceptance` rewrites the
//! golden artifact files under tests/golden/.

mod common;

use std::collections::BTreeSet;
use std::net::Ipv4Addr;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use extremal::catalog::{builtin_catalog, Protocol};
use extremal::generate::{
    base_valid_input, differing_components, generate_builtin, generate_exhaustive_charset,
    GenerationOptions,
};
use extremal::harness::{
    emit_bgp_config, emit_http_request, emit_zone_file, run_matrix, SutDescriptor, SutKind,
};
use extremal::llm::{self, ParsedPayload, ProviderConfig, ProviderMode, Stage, Strategy};
use extremal::payload::{
    BgpRoute, Cell, Expectation, GraphForm, GraphInput, MatchEntry, Payload, RouteMap, TestCase,
    WeightPolicy,
};
use extremal::routemap::{evaluate_route_map, DenyReason, RouteMapVerdict};
use extremal::shortest_path::{shortest_path_checked, PathStatus};
use extremal::validate::{compile_prefilter, validate, Mode};

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn strict_ids(protocol: Protocol, input: &Payload) -> Vec<String> {
    validate(input, &builtin_catalog(protocol), Mode::Strict)
        .expect("validation runs")
        .violated_ids()
}

/// Criterion 1: the builtin DNS suite covers the classic invalid-name
/// corpus, each case strictly rejected with exactly its violation, and the
/// canonical valid names pass. Generation under one second.
#[test]
fn acceptance_1_dns_fidelity() {
    let started = Instant::now();
    let catalog = builtin_catalog(Protocol::DnsName);
    let cases = generate_builtin(&catalog, &GenerationOptions::default());
    assert!(cases.len() >= 11, "expected >= 11 cases, got {}", cases.len());

    let covered: BTreeSet<&str> = cases
        .iter()
        .flat_map(|c| c.violates.iter().map(String::as_str))
        .collect();
    for constraint in &catalog.constraints {
        assert!(
            covered.contains(constraint.id.as_str()),
            "constraint {} not covered",
            constraint.id
        );
    }

    for case in &cases {
        assert_eq!(
            strict_ids(Protocol::DnsName, &case.input),
            case.violates,
            "case {}",
            case.id
        );
    }
    for name in ["example.com", "cnn.com"] {
        assert!(
            strict_ids(Protocol::DnsName, &Payload::DnsName(name.into())).is_empty(),
            "{name} must be accepted"
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!("ACCEPTANCE 1 (dns fidelity): PASS");
}

/// Criterion 2: single-violation isolation across every protocol's builtin
/// suite — the strict validator reports exactly the targeted constraint,
/// the mutation touches exactly one component, and the inverse edit
/// restores a strict-valid input.
#[test]
fn acceptance_2_single_violation_isolation() {
    for protocol in Protocol::ALL {
        let catalog = builtin_catalog(protocol);
        let opts = GenerationOptions::default();
        let seed = base_valid_input(protocol);
        let cases = generate_builtin(&catalog, &opts);
        assert!(!cases.is_empty());
        for case in &cases {
            let diff = differing_components(&seed.input, &case.input);
            assert_eq!(diff.len(), 1, "{}: changed {diff:?}", case.id);

            let strict = strict_ids(protocol, &case.input);
            match case.expected {
                Expectation::AgreementOnly => {
                    assert!(strict.is_empty(), "{}: probe flagged {strict:?}", case.id)
                }
                _ => assert_eq!(strict, case.violates, "{}", case.id),
            }

            let restored = common::apply_inverse_edit(&seed.input, &case.input);
            assert_eq!(restored, seed.input, "{}: inverse edit differs from seed", case.id);
            assert!(
                strict_ids(protocol, &restored).is_empty(),
                "{}: restored input not strict-valid",
                case.id
            );
        }
    }
    println!("ACCEPTANCE 2 (single-violation isolation): PASS");
}

/// Criterion 3: exhaustive charset mode emits at least 300 single-violation
/// URI cases across the seven components, each strictly rejected with the
/// targeted constraint, in under five seconds.
#[test]
fn acceptance_3_exhaustive_uri_scale() {
    let started = Instant::now();
    let catalog = builtin_catalog(Protocol::Uri);
    let cases = generate_exhaustive_charset(&catalog, &GenerationOptions::default()).unwrap();
    assert!(cases.len() >= 300, "got {} cases", cases.len());

    let components: BTreeSet<&str> = cases
        .iter()
        .filter_map(|c| c.violates.first())
        .filter_map(|id| catalog.get(id))
        .filter_map(|c| c.component())
        .collect();
    for component in ["scheme", "userinfo", "host", "port", "path", "query", "fragment"] {
        assert!(components.contains(component), "{component} not covered");
    }
    for case in &cases {
        assert_eq!(
            strict_ids(Protocol::Uri, &case.input),
            case.violates,
            "case {}",
            case.id
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!(
        "ACCEPTANCE 3 (exhaustive uri scale, {} cases): PASS",
        cases.len()
    );
}

/// Criterion 4: the builtin DNS suite against strict+lenient reference
/// SUTs diverges on exactly the '!' and '_' charset cases, independent of
/// parallelism.
#[test]
fn acceptance_4_builtin_differential_fixed_point() {
    let catalog = builtin_catalog(Protocol::DnsName);
    let tests = generate_builtin(&catalog, &GenerationOptions::default());
    let suts = vec![
        SutDescriptor::builtin("builtin-strict", SutKind::BuiltinStrict, Protocol::DnsName),
        SutDescriptor::builtin("builtin-lenient", SutKind::BuiltinLenient, Protocol::DnsName),
    ];
    let serial = run_matrix(&tests, &suts, 1).unwrap();
    let parallel = run_matrix(&tests, &suts, 8).unwrap();
    assert_eq!(serial, parallel, "report differs across parallelism");

    let diverging: BTreeSet<&str> = serial
        .discrepancies
        .iter()
        .map(|d| d.test_id.as_str())
        .collect();
    let hostname_cases: BTreeSet<&str> = tests
        .iter()
        .filter(|t| t.violates == vec!["dns.label.hostname-charset".to_string()])
        .map(|t| t.id.as_str())
        .collect();
    assert_eq!(diverging, hostname_cases);

    let names: BTreeSet<&str> = tests
        .iter()
        .filter(|t| hostname_cases.contains(t.id.as_str()))
        .filter_map(|t| t.input.as_dns())
        .collect();
    assert_eq!(
        names,
        BTreeSet::from(["exam!ple.com", "test_domain.com"]),
        "divergence must be the '!' and '_' cases"
    );
    println!("ACCEPTANCE 4 (builtin differential fixed point): PASS");
}

/// Criterion 5: route-map conjunctive semantics and strict BGP validation
/// of the classic invalid attributes.
#[test]
fn acceptance_5_bgp_semantics() {
    let route = BgpRoute {
        prefix: Some("10.0.0.0/24".into()),
        local_pref: Some(100),
        med: Some(50),
        as_path: Some("65050 65001".into()),
        origin: Some("igp".into()),
        community: vec!["65000:1".into()],
    };
    let rmap = |pattern: &str| RouteMap {
        prefix_list: vec![MatchEntry::new("10.0.0.0/24", "permit")],
        as_path_list: vec![MatchEntry::new(pattern, "permit")],
        rmap_action: Some("permit".into()),
        ..RouteMap::default()
    };

    let denied = evaluate_route_map(&route, &rmap("^65051")).unwrap();
    assert_eq!(denied.verdict, RouteMapVerdict::Deny);
    assert_eq!(denied.reason, DenyReason::ImplicitDeny);
    assert_eq!(denied.matched_clause, None);

    let permitted = evaluate_route_map(&route, &rmap("65050")).unwrap();
    assert_eq!(permitted.verdict, RouteMapVerdict::Permit);

    let seed = base_valid_input(Protocol::BgpFilter);
    let mut with_negative_lp = seed.input.as_bgp().unwrap().clone();
    with_negative_lp.route.local_pref = Some(-100);
    assert_eq!(
        strict_ids(Protocol::BgpFilter, &Payload::BgpFilter(with_negative_lp)),
        vec!["bgp.route.local-pref-range"]
    );

    let mut with_bad_prefix = seed.input.as_bgp().unwrap().clone();
    with_bad_prefix.route.prefix = Some("300.0.0.0/24".into());
    assert_eq!(
        strict_ids(Protocol::BgpFilter, &Payload::BgpFilter(with_bad_prefix)),
        vec!["bgp.route.prefix-format"]
    );

    let mut with_bad_regex = seed.input.as_bgp().unwrap().clone();
    with_bad_regex.rmap.as_path_list = vec![MatchEntry::new("[", "permit")];
    assert_eq!(
        strict_ids(Protocol::BgpFilter, &Payload::BgpFilter(with_bad_regex)),
        vec!["bgp.rmap.as-path-regex"]
    );
    println!("ACCEPTANCE 5 (bgp semantics): PASS");
}

/// Criterion 6: checked shortest path — the overflow matrix yields status
/// overflow (never a saturated distance), the weight corners return their
/// statuses, and 1000 random small graphs agree exactly with an
/// all-simple-paths brute-force oracle.
#[test]
fn acceptance_6_checked_shortest_path() {
    let w = Cell::Weight;
    let overflow = GraphInput {
        form: GraphForm::Matrix(vec![
            vec![w(0.0), w(1e308), Cell::Absent],
            vec![w(1e308), w(0.0), w(1e308)],
            vec![Cell::Absent, w(1e308), w(0.0)],
        ]),
        source: 1,
        target: 3,
        weight_policy: WeightPolicy::Strict,
    };
    let result = shortest_path_checked(&overflow, 1, 3).unwrap();
    assert_eq!(result.status, PathStatus::Overflow);
    assert_eq!(result.distance, None, "must never report a max-finite distance");

    let negative = GraphInput {
        form: GraphForm::Matrix(vec![
            vec![w(0.0), w(-1.0), w(1.0)],
            vec![w(-1.0), w(0.0), w(1.0)],
            vec![w(1.0), w(1.0), w(0.0)],
        ]),
        source: 1,
        target: 3,
        weight_policy: WeightPolicy::Strict,
    };
    assert_eq!(
        shortest_path_checked(&negative, 1, 3).unwrap().status,
        PathStatus::NegativeWeight
    );

    let edges = vec![
        extremal::payload::Edge { from: 1, to: 2, weight: None },
        extremal::payload::Edge { from: 2, to: 3, weight: Some(5.0) },
    ];
    let strict = GraphInput {
        form: GraphForm::Edges(edges.clone()),
        source: 1,
        target: 3,
        weight_policy: WeightPolicy::Strict,
    };
    assert_eq!(
        shortest_path_checked(&strict, 1, 3).unwrap().status,
        PathStatus::MissingWeight
    );
    let default1 = GraphInput {
        form: GraphForm::Edges(edges),
        source: 1,
        target: 3,
        weight_policy: WeightPolicy::Default1,
    };
    let r = shortest_path_checked(&default1, 1, 3).unwrap();
    assert_eq!(r.status, PathStatus::Ok);
    assert_eq!(r.distance, Some(6.0));
    assert_eq!(common::brute_force_shortest(&default1), Some(6.0));

    // 1000 seeded random graphs with safe integer weights: exact agreement
    // with the oracle.
    for seed in 0..1000u64 {
        let mut rng = StdRng::seed_from_u64(seed);
        let n = rng.gen_range(2..=6);
        let mut matrix = vec![vec![Cell::Absent; n]; n];
        for (i, row) in matrix.iter_mut().enumerate() {
            row[i] = Cell::Weight(0.0);
        }
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
        for (i, j) in pairs {
            if rng.gen_bool(0.6) {
                let weight = rng.gen_range(0..=1000) as f64;
                matrix[i][j] = Cell::Weight(weight);
                matrix[j][i] = Cell::Weight(weight);
            }
        }
        let graph = GraphInput {
            form: GraphForm::Matrix(matrix),
            source: 1,
            target: n,
            weight_policy: WeightPolicy::Strict,
        };
        let checked = shortest_path_checked(&graph, 1, n).unwrap();
        let oracle = common::brute_force_shortest(&graph);
        match (checked.status, oracle) {
            (PathStatus::Ok, Some(expected)) => {
                assert_eq!(checked.distance, Some(expected), "seed {seed}")
            }
            (PathStatus::Unreachable, None) => {}
            other => panic!("seed {seed}: disagreement {other:?}"),
        }
    }
    println!("ACCEPTANCE 6 (checked shortest path): PASS");
}

/// Criterion 7: compiled prefilters reject every expected-reject case of
/// the builtin and exhaustive suites and accept every protocol seed.
#[test]
fn acceptance_7_prefilter_completeness() {
    for protocol in Protocol::ALL {
        let catalog = builtin_catalog(protocol);
        let prefilter = compile_prefilter(&catalog, Mode::Strict);
        let opts = GenerationOptions::default();

        let mut cases: Vec<TestCase> = generate_builtin(&catalog, &opts);
        if let Ok(exhaustive) = generate_exhaustive_charset(&catalog, &opts) {
            cases.extend(exhaustive);
        }
        assert!(!cases.is_empty());
        for case in &cases {
            let result = prefilter.classify(&case.input).unwrap();
            match case.expected {
                Expectation::Reject => assert!(
                    !result.valid,
                    "{}: prefilter let an extremal case through",
                    case.id
                ),
                Expectation::AgreementOnly | Expectation::Accept => assert!(
                    result.valid,
                    "{}: prefilter rejected a non-extremal case: {:?}",
                    case.id, result.violations
                ),
            }
        }

        let seed = base_valid_input(protocol);
        let result = prefilter.classify(&seed.input).unwrap();
        assert!(result.valid, "{protocol} seed rejected: {:?}", result.violations);
    }
    println!("ACCEPTANCE 7 (prefilter completeness): PASS");
}

/// Criterion 8: the shipped fixtures replay with zero network into at
/// least 6 constraint drafts (including the 63 and 253 limits) and at
/// least 10 test cases, and the three strategies render pairwise-distinct
/// prompts whose two-stage stage-1 text starts from the canonical template.
#[test]
fn acceptance_8_replay_pipeline() {
    let config = ProviderConfig {
        endpoint: "replay-never-dials".to_string(),
        model: llm::DEFAULT_MODEL.to_string(),
        api_key_env: "EXTREMAL_ACCEPTANCE_UNSET".to_string(),
        mode: ProviderMode::Replay,
        temperature: 0.0,
    };
    let (stage1, stage2) =
        llm::run_two_stage(Protocol::DnsName, "domain names", &config, &fixtures_dir()).unwrap();
    assert!(stage1.fixture_path.is_some(), "stage 1 came from a fixture");
    assert!(stage2.fixture_path.is_some(), "stage 2 came from a fixture");

    let Some(ParsedPayload::Constraints(drafts)) = &stage1.parsed else {
        panic!("stage 1 parses constraint drafts");
    };
    assert!(drafts.len() >= 6, "got {} drafts", drafts.len());
    assert!(drafts.iter().any(|d| d.description.contains("63")));
    assert!(drafts.iter().any(|d| d.description.contains("253")));

    let Some(ParsedPayload::Tests(dns_cases)) = &stage2.parsed else {
        panic!("stage 2 parses tests");
    };
    assert!(dns_cases.len() >= 10, "got {} cases", dns_cases.len());

    let (_, bgp_stage2) = llm::run_two_stage(
        Protocol::BgpFilter,
        "route and route maps",
        &config,
        &fixtures_dir(),
    )
    .unwrap();
    let Some(ParsedPayload::Tests(bgp_cases)) = &bgp_stage2.parsed else {
        panic!("bgp stage 2 parses tests");
    };
    assert!(bgp_cases.len() >= 10);

    for protocol in Protocol::ALL {
        let feature = llm::default_feature(protocol);
        let two =
            llm::render_prompt(Strategy::TwoStage, Stage::Tests, protocol, feature, Some("ctx"))
                .unwrap();
        let with = llm::render_prompt(
            Strategy::OneStageWithConstraints,
            Stage::Tests,
            protocol,
            feature,
            None,
        )
        .unwrap();
        let bare =
            llm::render_prompt(Strategy::OneStageBare, Stage::Tests, protocol, feature, None)
                .unwrap();
        assert!(two != with && with != bare && two != bare);
    }

    // Generic stage-1 instantiations are a prefix match of the canonical
    // template modulo placeholder substitution.
    let rendered = llm::render_prompt(
        Strategy::TwoStage,
        Stage::Constraints,
        Protocol::Uri,
        "URIs",
        None,
    )
    .unwrap();
    let instantiated = llm::STAGE1_TEMPLATE
        .replace("{Feature}", "URIs")
        .replace("{Protocol}", llm::protocol_display(Protocol::Uri));
    assert!(rendered.starts_with(&instantiated));
    println!("ACCEPTANCE 8 (replay pipeline): PASS");
}

fn golden_check(name: &str, actual: &[u8]) {
    let path = golden_dir().join(name);
    if std::env::var("REGEN_GOLDENS").as_deref() == Ok("1") {
        std::fs::create_dir_all(golden_dir()).unwrap();
        std::fs::write(&path, actual).unwrap();
        println!("wrote {}", path.display());
        return;
    }
    let expected = std::fs::read(&path)
        .unwrap_or_else(|_| panic!("missing golden {path:?}; run REGEN_GOLDENS=1"));
    assert_eq!(
        actual,
        expected.as_slice(),
        "{name} drifted from its golden bytes"
    );
}

/// Criterion 9: emitted artifacts are byte-identical to the checked-in
/// goldens for the empty-label zone, the NUL-path request, and the
/// invalid-prefix route document.
#[test]
fn acceptance_9_emitter_goldens() {
    let dns = generate_builtin(&builtin_catalog(Protocol::DnsName), &GenerationOptions::default());
    let empty_label = dns
        .iter()
        .find(|c| c.input.as_dns() == Some("example..com"))
        .expect("empty-label case present");
    let zone = emit_zone_file(empty_label, "example.test.", Ipv4Addr::new(192, 0, 2, 1)).unwrap();
    assert!(String::from_utf8_lossy(&zone).contains("example..com"));
    golden_check("zone_empty_label.golden", &zone);

    let uri = generate_builtin(&builtin_catalog(Protocol::Uri), &GenerationOptions::default());
    let nul_case = uri
        .iter()
        .find(|c| c.input.as_uri().map(|p| p.path.as_str()) == Some("/foo%00bar"))
        .expect("NUL path case present");
    let request = emit_http_request(nul_case, "example.com").unwrap();
    assert!(request.starts_with(b"GET /foo%00bar"));
    golden_check("request_nul_path.golden", &request);

    let bgp = generate_builtin(&builtin_catalog(Protocol::BgpFilter), &GenerationOptions::default());
    let bad_prefix = bgp
        .iter()
        .find(|c| {
            c.input
                .as_bgp()
                .and_then(|b| b.route.prefix.as_deref())
                == Some("300.0.0.0/24")
        })
        .expect("invalid-prefix case present");
    let config = emit_bgp_config(bad_prefix).unwrap();
    assert!(String::from_utf8_lossy(&config).contains("300.0.0.0/24"));
    golden_check("bgp_invalid_prefix.golden", &config);
    println!("ACCEPTANCE 9 (emitter goldens): PASS");
}
