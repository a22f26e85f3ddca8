//! End-to-end checks of the command-line surface.

use std::path::Path;

use rmdp_cli::run_cli;
use rmdp_core::io::{self, ModelDocument};
use rmdp_core::{counterexample_coverage_exact, counterexample_model, Distribution};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut argv = vec!["rmdp".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(&argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn write_counterexample(path: &Path) {
    let doc = ModelDocument {
        model: counterexample_model(0.9).unwrap(),
        true_dist: Some(Distribution::bernoulli(0.5).unwrap()),
    };
    io::save_model(&doc, path).unwrap();
}

fn parse_values(stdout: &str) -> Vec<f64> {
    stdout
        .lines()
        .filter(|l| l.starts_with("state "))
        .map(|l| {
            let v = l.split("value ").nth(1).unwrap();
            v.split_whitespace().next().unwrap().parse::<f64>().unwrap()
        })
        .collect()
}

#[test]
fn counterexample_table_matches_exact_formula() {
    let (code, out, _) = run(&["counterexample", "--max-n", "12"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 12);
    for (i, line) in lines.iter().enumerate() {
        let n = (i + 1) as u32;
        let p = counterexample_coverage_exact(n).unwrap();
        let (num, den) = p.reduced();
        assert!(line.contains(&format!("{num}/{den}")), "line: {line}");
    }
}

#[test]
fn robust_solve_at_zero_radius_equals_solve() {
    let dir = tempfile::tempdir().unwrap();
    let model_path = dir.path().join("cx.json");
    write_counterexample(&model_path);
    let model_arg = model_path.to_str().unwrap();
    let (code, solve_out, _) = run(&["solve", "--model", model_arg]);
    assert_eq!(code, 0);
    let (code, robust_out, _) = run(&[
        "robust-solve",
        "--model",
        model_arg,
        "--distance",
        "tv",
        "--epsilon",
        "0",
    ]);
    assert_eq!(code, 0);
    let v1 = parse_values(&solve_out);
    let v2 = parse_values(&robust_out);
    assert_eq!(v1.len(), 5);
    for (a, b) in v1.iter().zip(&v2) {
        assert!((a - b).abs() <= 1e-10);
    }
    assert!((v1[0] - 6.0).abs() <= 1e-8);
}

#[test]
fn robust_solve_wasserstein_ball_value() {
    // On the two-point disturbance space with unit metric, a transport
    // budget of 0.1 matches the TV shift, so the state-0 value is 6.4.
    let dir = tempfile::tempdir().unwrap();
    let model_path = dir.path().join("cx.json");
    write_counterexample(&model_path);
    let (code, out, _) = run(&[
        "robust-solve",
        "--model",
        model_path.to_str().unwrap(),
        "--distance",
        "wasserstein",
        "--epsilon",
        "0.1",
    ]);
    assert_eq!(code, 0);
    let values = parse_values(&out);
    assert!((values[0] - 6.4).abs() < 1e-8, "{out}");
    assert!(out.contains("fixed_point_residual"));
}

#[test]
fn radius_formula_example() {
    let (code, out, _) = run(&[
        "radius",
        "--distance",
        "wasserstein",
        "--samples",
        "100",
        "--gamma",
        "0.1",
        "--dim-m",
        "3",
        "--tail-a",
        "3",
        "--c1",
        "2",
        "--c2",
        "1",
    ]);
    assert_eq!(code, 0);
    let eps: f64 = out.trim().parse().unwrap();
    assert!((eps - (20f64.ln() / 100.0).powf(1.0 / 3.0)).abs() < 1e-12);
    assert!((eps - 0.31058).abs() < 1e-4);
}

#[test]
fn distance_subcommand_evaluates_chi2() {
    let (code, out, _) = run(&[
        "distance",
        "--distance",
        "chi2",
        "--nu",
        "0.6,0.4",
        "--rho",
        "0.5,0.5",
    ]);
    assert_eq!(code, 0);
    let v: f64 = out.split_whitespace().last().unwrap().parse().unwrap();
    assert!((v - 0.04).abs() < 1e-12);
}

#[test]
fn worst_case_subcommand_reports_witness() {
    let (code, out, _) = run(&[
        "worst-case",
        "--distance",
        "tv",
        "--center",
        "0.5,0.5",
        "--payoff",
        "0,1",
        "--epsilon",
        "0.2",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("value 7.00000000000e-1"), "{out}");
    assert!(out.contains("witness 3.00000000000e-1,7.00000000000e-1"), "{out}");
}

#[test]
fn unknown_flag_exits_one_with_usage() {
    let (code, _, err) = run(&["solve", "--frobnicate"]);
    assert_eq!(code, 1);
    assert!(err.to_lowercase().contains("usage") || err.contains("unexpected"), "{err}");
}

#[test]
fn missing_true_dist_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let model_path = dir.path().join("cx.json");
    let doc = ModelDocument {
        model: counterexample_model(0.9).unwrap(),
        true_dist: None,
    };
    io::save_model(&doc, &model_path).unwrap();
    let (code, _, err) = run(&["solve", "--model", model_path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("true_dist"), "{err}");
}

#[test]
fn generate_inventory_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let model_path = dir.path().join("inv.json");
    let (code, _, _) = run(&[
        "generate-inventory",
        "--capacity",
        "3",
        "--demand-levels",
        "3",
        "--true-dist",
        "0.5,0.3,0.2",
        "--out",
        model_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let doc = io::load_model(&model_path).unwrap();
    assert_eq!(doc.model.n_states(), 4);
    assert_eq!(doc.model.n_disturbances(), 3);
    assert_eq!(doc.true_dist.as_ref().unwrap().mass(), &[0.5, 0.3, 0.2]);
    // save → load → save fixpoint
    let json1 = io::model_to_json(&doc).unwrap();
    let doc2 = io::model_from_json(&json1).unwrap();
    assert_eq!(json1, io::model_to_json(&doc2).unwrap());
}

#[test]
fn evaluate_policy_values() {
    let dir = tempfile::tempdir().unwrap();
    let model_path = dir.path().join("cx.json");
    write_counterexample(&model_path);
    let (code, out, _) = run(&[
        "evaluate",
        "--model",
        model_path.to_str().unwrap(),
        "--policy",
        "0,0,0,0,0",
    ]);
    assert_eq!(code, 0);
    let values = parse_values(&out);
    assert!((values[0] - 7.0).abs() < 1e-10);
    for v in &values[1..] {
        assert!(v.abs() < 1e-12);
    }
}

#[test]
fn experiment_requires_seed() {
    let dir = tempfile::tempdir().unwrap();
    let model_path = dir.path().join("cx.json");
    write_counterexample(&model_path);
    let (code, _, err) = run(&[
        "coverage",
        "--model",
        model_path.to_str().unwrap(),
        "--distance",
        "tv",
        "--samples",
        "10",
        "--trials",
        "5",
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("--seed"), "{err}");
}

#[test]
fn coverage_experiment_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let model_path = dir.path().join("cx.json");
    write_counterexample(&model_path);
    let prefix = dir.path().join("report");
    let (code, out, err) = run(&[
        "coverage",
        "--model",
        model_path.to_str().unwrap(),
        "--distance",
        "tv",
        "--samples",
        "10",
        "--trials",
        "8",
        "--radius-mode",
        "calibrated",
        "--cal-trials",
        "150",
        "--seed",
        "5",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "stderr: {err}");
    assert!(out.contains("coverage_rate"));
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(csv.starts_with(
        "trial,N,epsilon,dist_mu_muhat,premise,coverage_ok,sup_gap_robust,sup_gap_oos,wall_ms"
    ));
    assert_eq!(csv.lines().count(), 9);
    let json = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(json.contains("\"experiment\": \"coverage\""));
}
