//! Black-box tests of the `eqopt` binary: exit codes, emitted files and
//! their schemas.

mod helpers;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use helpers::assert_valid_svg;

fn eqopt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eqopt"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path
}

const SMALL_INSTANCE: &str = r#""instance": {
    "kind": "quadratic", "n": 24, "c": 10, "r": 6,
    "m": 0.5, "L": 5.0, "sigma1": 4.0, "sigmar": 0.25, "seed": 42
}"#;

#[test]
fn missing_config_exits_2() {
    let out = eqopt(&["solve", "--config", "/nonexistent/nope.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn malformed_json_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "{ not json");
    let out = eqopt(&["generate", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn infeasible_rank_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"instance": {"kind": "quadratic", "n": 4, "c": 2, "r": 3,
            "m": 1.0, "L": 2.0, "sigma1": 1.0, "sigmar": 0.5, "seed": 0}}"#,
    );
    let out = eqopt(&["generate", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_requires_exactly_one_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &format!("{{ {SMALL_INSTANCE} }}"));
    let out = eqopt(&[
        "solve",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "zero algorithms must be rejected");
}

#[test]
fn solve_writes_trace_and_record() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        &format!(
            r#"{{ {SMALL_INSTANCE},
                 "algorithms": [{{"algorithm": "igm", "two_ell": 2}}],
                 "budget": {{"max_iter": 20000, "tol": 1e-9}} }}"#
        ),
    );
    let out_dir = dir.path().join("out");
    let out = eqopt(&[
        "solve",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let trace = fs::read_to_string(out_dir.join("trace.csv")).unwrap();
    assert!(trace.starts_with("k,rel_err,matvec_count,wall_ms\n"));
    assert!(trace.trim_end().ends_with("# status=converged"));

    let record: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("run.json")).unwrap()).unwrap();
    assert_eq!(record["algorithm"], "igm_l1");
    assert_eq!(record["status"], "converged");
    assert!(record["config_hash"].as_str().unwrap().len() == 16);
    assert!(record["iterations_to_tol"].as_u64().is_some());

    // Plot from the written trace.
    let plot = eqopt(&[
        "plot",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(plot.status.code(), Some(0));
    let svg = fs::read_to_string(out_dir.join("convergence.svg")).unwrap();
    assert_valid_svg(&svg);
    assert_eq!(svg.matches("<polyline").count(), 1);
}

#[test]
fn generate_honors_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &format!("{{ {SMALL_INSTANCE} }}"));
    let out_dir = dir.path().join("out");
    let out = eqopt(&[
        "generate",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--seed",
        "777",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let spec: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("instance.json")).unwrap()).unwrap();
    assert_eq!(spec["seed"], 777);
    assert_eq!(spec["kind"], "quadratic");
    assert_eq!(spec["L"], 5.0);
}

#[test]
fn bench_emits_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        &format!(
            r#"{{ {SMALL_INSTANCE}, "budget": {{"max_iter": 60000, "tol": 1e-8}} }}"#
        ),
    );
    let out_dir = dir.path().join("out");
    let out = eqopt(&[
        "bench",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    // Default cells: gda, papc, igm at ell = 0.5, 1, 2.
    for label in ["gda", "papc", "igm_l0.5", "igm_l1", "igm_l2"] {
        let path = out_dir.join("traces").join(format!("{label}.csv"));
        assert!(path.is_file(), "missing trace for {label}");
        let parsed =
            eqopt_core::solvers::IterateTrace::from_csv(&fs::read_to_string(&path).unwrap())
                .unwrap();
        assert!(!parsed.rows.is_empty());
        for pair in parsed.rows.windows(2) {
            assert!(pair[1].k > pair[0].k, "k strictly increasing in {label}");
        }
    }

    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("bench.json")).unwrap()).unwrap();
    assert_eq!(summary["records"].as_array().unwrap().len(), 5);
    let expected_hash = {
        let config = eqopt_cli::config::ExperimentConfig::load(&config).unwrap();
        config.hash()
    };
    assert_eq!(summary["config_hash"], serde_json::Value::String(expected_hash));

    let reference = fs::read_to_string(out_dir.join("reference.csv")).unwrap();
    assert!(reference.starts_with("k,rel_err\n"));
    assert!(reference.contains("# rho_star_l1="));

    let svg = fs::read_to_string(out_dir.join("convergence.svg")).unwrap();
    assert_valid_svg(&svg);
    assert_eq!(svg.matches("<polyline").count(), 6, "five traces plus reference");
    assert!(svg.contains("rho_star(l=1)"));
}

#[test]
fn certify_reports_pass_for_optimal_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        &format!(r#"{{ {SMALL_INSTANCE}, "certify": {{"two_ell": 2, "theta_points": 512}} }}"#),
    );
    let out_dir = dir.path().join("out");
    let out = eqopt(&[
        "certify",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("certificate.json")).unwrap())
            .unwrap();
    assert_eq!(report["pass"], true);
    for key in [
        "rho",
        "rho_star",
        "L_tilde",
        "spr_min_margin",
        "worst_point",
        "pole_max_modulus",
        "mode_scan_max_radius",
    ] {
        assert!(!report[key].is_null(), "missing field {key}");
    }
    assert!(report["spr_min_margin"].as_f64().unwrap() > 0.0);
    assert!(report["pole_max_modulus"].as_f64().unwrap() < 1.0);
}

#[test]
fn plot_without_traces_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), &format!("{{ {SMALL_INSTANCE} }}"));
    let empty = dir.path().join("empty");
    fs::create_dir_all(&empty).unwrap();
    let out = eqopt(&[
        "plot",
        "--config",
        config.to_str().unwrap(),
        "--out",
        empty.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
