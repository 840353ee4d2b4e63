use ghost_lab::commands::{cmd_certify, cmd_family, cmd_ghost, CommandError};
use ghost_lab::config::RunConfig;
use ghost_lab::report::{render, without_timing};
use serde_json::Value;

// Z/4 acting on itself, every nonidentity element a generator: K_4.
const COMPLETE_K4: &str = r#"
kind = "product"
pairing = [1, 0, 2]
policy = "trivial"

[[levels]]
label = "Z/4"
degree = 4
permutations = [[[0, 1, 2, 3]], [[0, 3, 2, 1]], [[0, 2], [1, 3]]]
expected_order = 4
"#;

fn sl2(primes: &[u32]) -> RunConfig {
    let mut cfg = RunConfig::new("sl2");
    cfg.primes = primes.to_vec();
    cfg
}

#[test]
fn family_orders() {
    let out = cmd_family(&sl2(&[3, 5, 7])).unwrap();
    assert_eq!(out.report["family"]["orders"], serde_json::json!([24, 120, 336]));
    let mut alt = RunConfig::new("alt");
    alt.degrees = vec![4, 5];
    assert!(cmd_family(&alt).unwrap().summary.contains("orders: 12,60"));
}

#[test]
fn complete_graph_gap_is_its_order() {
    let cfg = RunConfig::from_toml_str(COMPLETE_K4).unwrap();
    let out = cmd_certify(&cfg).unwrap();
    let lambda1 = out.report["spectra"][0]["lambda1"].as_f64().unwrap();
    assert!((lambda1 - 4.0).abs() < 1e-10);
    assert!(out.summary.contains("lambda1 4.00000"), "{}", out.summary);
}

#[test]
fn empty_window_is_a_usage_error() {
    let mut cfg = sl2(&[3]);
    cfg.window = Some(vec![]);
    let e = cmd_certify(&cfg).unwrap_err();
    assert!(matches!(e, CommandError::Config(_)));
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn unsupported_policy_is_a_usage_error() {
    let mut cfg = RunConfig::new("alt");
    cfg.degrees = vec![4, 5];
    cfg.policy = Some("steinberg".into());
    assert_eq!(cmd_ghost(&cfg).unwrap_err().exit_code(), 2);
}

#[test]
fn ghost_report_round_trips_and_is_stable() {
    let mut cfg = sl2(&[3, 5]);
    cfg.truncate = Some(1);
    let a = cmd_ghost(&cfg).unwrap();
    cfg.parallelism = 3;
    let b = cmd_ghost(&cfg).unwrap();
    assert_eq!(render(&without_timing(&a.report)), render(&without_timing(&b.report)));

    let text = render(&a.report);
    let back: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(render(&back), text);

    let r = &a.report;
    assert_eq!(r["schema"], "ghost-lab/1");
    assert!(r["header"].as_str().unwrap().starts_with("finite-scale evidence"));
    assert_eq!(r["ranks"]["diagonal"], serde_json::json!([3, 5]));
    assert_eq!(r["ranks"]["table"], r["ranks"]["oracle"]);
    assert!(r["claim1"]["min_gap"].as_f64().unwrap() > 1e-3);
    assert_eq!(r["truncation"]["tail"], serde_json::json!([0]));
    assert_eq!(r["blocks"].as_array().unwrap().len(), 4);
}

#[test]
fn toy_window_ghost_runs_end_to_end() {
    let cfg = RunConfig::from_toml_str(COMPLETE_K4).unwrap();
    let out = cmd_ghost(&cfg).unwrap();
    assert_eq!(out.report["ranks"]["diagonal"], serde_json::json!([1]));
    // T on K_4 has spectrum {1, -1/3}.
    let gap = out.report["claim1"]["min_gap"].as_f64().unwrap();
    assert!((gap - 4.0 / 3.0).abs() < 1e-10, "{gap}");
}
