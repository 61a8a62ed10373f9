//! Implementations of the CLI subcommands.

use std::fs;
use std::path::Path;

use serde::Serialize;

use eqopt_core::certificate::certify;
use eqopt_core::oracle::{fit_rate, oracle_solve};
use eqopt_core::problems::gen_instance;
use eqopt_core::solvers::run;
use eqopt_core::{Error, Result};

use crate::bench::{run_bench, RunRecord, RATIO_TOL};
use crate::config::{CertifySettings, ExperimentConfig};

fn load_config(config_path: &Path, seed: Option<u64>) -> Result<ExperimentConfig> {
    let mut config = ExperimentConfig::load(config_path)?;
    if let Some(seed) = seed {
        config.instance.seed = seed;
    }
    Ok(config)
}

fn ensure_out(out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir)
        .map_err(|e| Error::InvalidParams(format!("create {}: {e}", out_dir.display())))
}

/// `generate`: materialize the instance once (validating its invariants)
/// and write the regenerable descriptor JSON.
pub fn cmd_generate(config_path: &Path, out_dir: &Path, seed: Option<u64>) -> Result<()> {
    let config = load_config(config_path, seed)?;
    ensure_out(out_dir)?;
    let inst = gen_instance(&config.instance)?;
    let path = out_dir.join("instance.json");
    fs::write(&path, config.instance.to_json_string())
        .map_err(|e| Error::InvalidParams(format!("write {}: {e}", path.display())))?;
    println!(
        "generated {} instance: n={} c={} rank={} kappa_f={:.3e} kappa_E={:.3e} -> {}",
        config.instance.kind,
        config.instance.n,
        config.instance.c,
        inst.constraint.rank,
        inst.objective.condition_number(),
        inst.constraint.condition_number(),
        path.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct SolveReport<'a> {
    #[serde(flatten)]
    record: &'a RunRecord,
}

/// `solve`: run the single configured algorithm, write trace + record.
pub fn cmd_solve(config_path: &Path, out_dir: &Path, seed: Option<u64>) -> Result<()> {
    let config = load_config(config_path, seed)?;
    if config.algorithms.len() != 1 {
        return Err(Error::InvalidParams(format!(
            "solve needs exactly one algorithm cell, got {}",
            config.algorithms.len()
        )));
    }
    ensure_out(out_dir)?;

    let inst = gen_instance(&config.instance)?;
    let oracle = oracle_solve(&inst, 1e-12)?;
    let cell = &config.algorithms[0];
    let algo = cell.parse_algorithm()?;
    let params = cell.resolve_params(&inst.objective, &inst.constraint)?;
    let options = eqopt_core::solvers::RunOptions {
        max_iter: config.budget.max_iter,
        tol: config.budget.tol,
        x0: config.x0.clone().map(eqopt_core::numkit::Vector::new),
        ..Default::default()
    };
    let trace = run(algo, &inst.objective, &inst.constraint, &params, &options, &oracle.x_star)?;

    let trace_path = out_dir.join("trace.csv");
    fs::write(&trace_path, trace.to_csv())
        .map_err(|e| Error::InvalidParams(format!("write {}: {e}", trace_path.display())))?;
    let record = RunRecord {
        config_hash: config.hash(),
        algorithm: algo.label(&params),
        params,
        trace_path: trace_path.display().to_string(),
        status: trace.status.as_str().to_string(),
        final_rel_err: trace.final_rel_err(),
        iterations: trace.rows.last().map(|r| r.k).unwrap_or(0),
        fitted_rate: fit_rate(&trace, 0.5).ok().map(|(r, _)| r),
        iterations_to_1e6: trace.first_at(RATIO_TOL).map(|p| p.0),
        matvecs_to_1e6: trace.first_at(RATIO_TOL).map(|p| p.1),
        iterations_to_tol: trace.first_at(config.budget.tol).map(|p| p.0),
    };
    let record_path = out_dir.join("run.json");
    fs::write(
        &record_path,
        serde_json::to_string_pretty(&SolveReport { record: &record }).expect("record json"),
    )
    .map_err(|e| Error::InvalidParams(format!("write {}: {e}", record_path.display())))?;
    println!(
        "{}: status={} final_rel_err={:.3e} iterations={} ({} / {})",
        record.algorithm,
        record.status,
        record.final_rel_err,
        record.iterations,
        trace_path.display(),
        record_path.display()
    );
    Ok(())
}

/// `bench`: all configured cells (or the standard five), traces, summary,
/// reference series and SVG.
pub fn cmd_bench(config_path: &Path, out_dir: &Path, seed: Option<u64>) -> Result<()> {
    let config = load_config(config_path, seed)?;
    ensure_out(out_dir)?;
    let output = run_bench(&config, out_dir)?;
    for record in &output.summary.records {
        println!(
            "{:>12}: status={} iterations={} rel_err={:.3e} it@1e-6={:?} mv@1e-6={:?}",
            record.algorithm,
            record.status,
            record.iterations,
            record.final_rel_err,
            record.iterations_to_1e6,
            record.matvecs_to_1e6
        );
    }
    println!(
        "bench complete: {} cells -> {}/bench.json, traces/, reference.csv, convergence.svg",
        output.summary.records.len(),
        out_dir.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct CertifyFile {
    config_hash: String,
    #[serde(flatten)]
    report: eqopt_core::certificate::CertifyReport,
}

/// `certify`: check the design conditions and rate formulas for the
/// instance constants, write the certificate JSON.
pub fn cmd_certify(config_path: &Path, out_dir: &Path, seed: Option<u64>) -> Result<()> {
    let config = load_config(config_path, seed)?;
    ensure_out(out_dir)?;
    let settings = config.certify.clone().unwrap_or_else(CertifySettings::default);
    let spec = settings.synthesis_spec(&config.instance)?;
    let report = certify(&spec, &settings.grid_settings(), settings.mode_grid)?;
    let path = out_dir.join("certificate.json");
    let file = CertifyFile { config_hash: config.hash(), report };
    fs::write(&path, serde_json::to_string_pretty(&file).expect("report json"))
        .map_err(|e| Error::InvalidParams(format!("write {}: {e}", path.display())))?;
    let report = &file.report;
    println!(
        "certificate: pass={} rho={:.9} rho_star={:.9} spr_margin={:.3e} pole_max={:.9} scan_max={:.9} -> {}",
        report.pass,
        report.rho,
        report.rho_star,
        report.spr_min_margin,
        report.pole_max_modulus,
        report.mode_scan_max_radius,
        path.display()
    );
    Ok(())
}

/// `plot`: rebuild the SVG from trace CSVs already on disk.
pub fn cmd_plot(config_path: &Path, out_dir: &Path, seed: Option<u64>) -> Result<()> {
    let config = load_config(config_path, seed)?;
    let title = format!(
        "{} n={} [{}]",
        config.instance.kind,
        config.instance.n,
        config.hash()
    );
    let path = crate::bench::plot_from_dir(out_dir, &title)?;
    println!("plot -> {}", path.display());
    Ok(())
}
