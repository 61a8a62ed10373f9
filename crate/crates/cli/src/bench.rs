//! Benchmark orchestration: run the configured algorithm cells against one
//! instance, write per-cell trace CSVs, a summary JSON, the theoretical
//! reference series and the convergence SVG.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use eqopt_core::certificate::rate_rho_star;
use eqopt_core::oracle::{fit_rate, oracle_solve, OracleSolution};
use eqopt_core::problems::{gen_instance, GeneratedInstance, InstanceSpec};
use eqopt_core::solvers::{run, IterateTrace, RunOptions, SolverParams};
use eqopt_core::{numkit::Vector, Error, Result};

use crate::config::{AlgorithmSpec, ExperimentConfig};
use crate::plot::{render_svg, Series};

/// Measurement point for the iteration/matvec ratio claims.
pub const RATIO_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub config_hash: String,
    pub algorithm: String,
    pub params: SolverParams,
    pub trace_path: String,
    pub status: String,
    pub final_rel_err: f64,
    pub iterations: u64,
    pub fitted_rate: Option<f64>,
    pub iterations_to_1e6: Option<u64>,
    pub matvecs_to_1e6: Option<u64>,
    pub iterations_to_tol: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchSummary {
    pub config_hash: String,
    pub instance: InstanceSpec,
    pub max_iter: u64,
    pub tol: f64,
    /// Theoretical optimal rate at ell = 1, plotted as the dashed line.
    pub rho_star_l1: f64,
    pub records: Vec<RunRecord>,
}

pub struct BenchOutput {
    pub summary: BenchSummary,
    pub traces: Vec<(String, IterateTrace)>,
    pub instance: GeneratedInstance,
    pub oracle: OracleSolution,
}

fn make_options(config: &ExperimentConfig) -> RunOptions {
    RunOptions {
        max_iter: config.budget.max_iter,
        tol: config.budget.tol,
        x0: config.x0.clone().map(Vector::new),
        ..RunOptions::default()
    }
}

/// Run one algorithm cell and build its record.
fn run_cell(
    cell: &AlgorithmSpec,
    config: &ExperimentConfig,
    inst: &GeneratedInstance,
    oracle: &OracleSolution,
    hash: &str,
    trace_dir: &Path,
) -> Result<(String, IterateTrace, RunRecord)> {
    let algo = cell.parse_algorithm()?;
    let params = cell.resolve_params(&inst.objective, &inst.constraint)?;
    let label = algo.label(&params);
    let options = make_options(config);
    let trace = run(
        algo,
        &inst.objective,
        &inst.constraint,
        &params,
        &options,
        &oracle.x_star,
    )?;
    let trace_path = trace_dir.join(format!("{label}.csv"));
    fs::write(&trace_path, trace.to_csv())
        .map_err(|e| Error::InvalidParams(format!("write {}: {e}", trace_path.display())))?;
    let record = RunRecord {
        config_hash: hash.to_string(),
        algorithm: label.clone(),
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
    Ok((label, trace, record))
}

/// Execute every configured cell (the standard five when the list is
/// empty), cells in parallel, one trace file per cell.
pub fn run_bench(config: &ExperimentConfig, out_dir: &Path) -> Result<BenchOutput> {
    let inst = gen_instance(&config.instance)?;
    let oracle = oracle_solve(&inst, 1e-12)?;
    let hash = config.hash();

    let cells = if config.algorithms.is_empty() {
        ExperimentConfig::standard_bench_cells()
    } else {
        config.algorithms.clone()
    };
    // Validate all cells up front so bad configs fail before any run.
    for cell in &cells {
        cell.resolve_params(&inst.objective, &inst.constraint)?;
    }

    let trace_dir = out_dir.join("traces");
    fs::create_dir_all(&trace_dir)
        .map_err(|e| Error::InvalidParams(format!("create {}: {e}", trace_dir.display())))?;

    let mut results: Vec<Option<Result<(String, IterateTrace, RunRecord)>>> =
        (0..cells.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for cell in &cells {
            let inst = &inst;
            let oracle = &oracle;
            let hash = &hash;
            let trace_dir = &trace_dir;
            handles.push(
                scope.spawn(move || run_cell(cell, config, inst, oracle, hash, trace_dir)),
            );
        }
        for (slot, handle) in results.iter_mut().zip(handles) {
            *slot = Some(handle.join().expect("bench cell thread panicked"));
        }
    });

    let mut traces = Vec::new();
    let mut records = Vec::new();
    for slot in results {
        let (label, trace, record) = slot.expect("cell result recorded")?;
        traces.push((label, trace));
        records.push(record);
    }

    let rho_star_l1 = rate_rho_star(
        config.instance.l / config.instance.m,
        config.instance.sigma1 / config.instance.sigmar,
        1.0,
    );
    let summary = BenchSummary {
        config_hash: hash,
        instance: config.instance.clone(),
        max_iter: config.budget.max_iter,
        tol: config.budget.tol,
        rho_star_l1,
        records,
    };

    write_reference_csv(&summary, &traces, out_dir)?;
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    fs::write(out_dir.join("bench.json"), json)
        .map_err(|e| Error::InvalidParams(format!("write bench.json: {e}")))?;

    let svg = convergence_svg(&summary, &traces);
    fs::write(out_dir.join("convergence.svg"), svg)
        .map_err(|e| Error::InvalidParams(format!("write convergence.svg: {e}")))?;

    Ok(BenchOutput { summary, traces, instance: inst, oracle })
}

/// Dashed-line data: `rel_err0 * rho_star(l=1)^k` down to 1e-14.
fn reference_rows(summary: &BenchSummary, traces: &[(String, IterateTrace)]) -> Vec<(u64, f64)> {
    let rel0 = traces
        .first()
        .and_then(|(_, t)| t.rows.first())
        .map(|r| r.rel_err)
        .unwrap_or(1.0)
        .max(1e-12);
    let rho = summary.rho_star_l1;
    let k_max = traces
        .iter()
        .flat_map(|(_, t)| t.rows.last())
        .map(|r| r.k)
        .max()
        .unwrap_or(100);
    let mut rows = Vec::new();
    let mut value = rel0;
    for k in 0..=k_max {
        rows.push((k, value));
        value *= rho;
        if value < 1e-14 {
            break;
        }
    }
    rows
}

fn write_reference_csv(
    summary: &BenchSummary,
    traces: &[(String, IterateTrace)],
    out_dir: &Path,
) -> Result<()> {
    let mut text = String::from("k,rel_err\n");
    for (k, v) in reference_rows(summary, traces) {
        text.push_str(&format!("{k},{v:.12e}\n"));
    }
    text.push_str(&format!("# rho_star_l1={:.12e}\n", summary.rho_star_l1));
    fs::write(out_dir.join("reference.csv"), text)
        .map_err(|e| Error::InvalidParams(format!("write reference.csv: {e}")))
}

fn convergence_svg(summary: &BenchSummary, traces: &[(String, IterateTrace)]) -> String {
    let mut series: Vec<Series> = traces
        .iter()
        .map(|(label, trace)| {
            Series::from_trace(
                label,
                trace.rows.iter().map(|r| (r.k, r.rel_err)),
                false,
            )
        })
        .collect();
    series.push(Series::from_trace(
        "rho_star(l=1)",
        reference_rows(summary, traces).into_iter(),
        true,
    ));
    let title = format!(
        "{} n={} kappa_f={:.0} kappa_E={:.0} [{}]",
        summary.instance.kind,
        summary.instance.n,
        summary.instance.l / summary.instance.m,
        summary.instance.sigma1 / summary.instance.sigmar,
        summary.config_hash
    );
    render_svg(&series, &title)
}

/// Minimal CSV reader for plotting: first two columns as `(k, rel_err)`,
/// `#` comment and header lines skipped.
pub fn read_plot_series(path: &Path) -> Result<Vec<(u64, f64)>> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidParams(format!("read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('k') {
            continue;
        }
        let mut fields = line.split(',');
        let k: u64 = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| Error::InvalidParams(format!("bad CSV row in {}", path.display())))?;
        let rel: f64 = fields
            .next()
            .and_then(|f| f.parse().ok())
            .ok_or_else(|| Error::InvalidParams(format!("bad CSV row in {}", path.display())))?;
        rows.push((k, rel));
    }
    Ok(rows)
}

/// Rebuild the convergence SVG from trace files on disk.
pub fn plot_from_dir(out_dir: &Path, title: &str) -> Result<PathBuf> {
    let trace_dir = out_dir.join("traces");
    let mut files: Vec<PathBuf> = Vec::new();
    if trace_dir.is_dir() {
        for entry in fs::read_dir(&trace_dir)
            .map_err(|e| Error::InvalidParams(format!("read {}: {e}", trace_dir.display())))?
        {
            let path = entry
                .map_err(|e| Error::InvalidParams(format!("read dir entry: {e}")))?
                .path();
            if path.extension().is_some_and(|e| e == "csv") {
                files.push(path);
            }
        }
    }
    let single = out_dir.join("trace.csv");
    if single.is_file() {
        files.push(single);
    }
    files.sort();
    if files.is_empty() {
        return Err(Error::InvalidParams(format!(
            "no trace CSV files under {}",
            out_dir.display()
        )));
    }

    let mut series = Vec::new();
    for path in &files {
        let label = path.file_stem().unwrap_or_default().to_string_lossy().to_string();
        let rows = read_plot_series(path)?;
        series.push(Series::from_trace(&label, rows.into_iter(), false));
    }
    let reference = out_dir.join("reference.csv");
    if reference.is_file() {
        let rows = read_plot_series(&reference)?;
        series.push(Series::from_trace("rho_star(l=1)", rows.into_iter(), true));
    }

    let svg_path = out_dir.join("convergence.svg");
    fs::write(&svg_path, render_svg(&series, title))
        .map_err(|e| Error::InvalidParams(format!("write {}: {e}", svg_path.display())))?;
    Ok(svg_path)
}
