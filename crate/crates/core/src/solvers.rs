//! Single-loop iterative solvers for `min f(x) s.t. Ex = q`: the
//! interpolated-gradient method (IGM) with a tunable matvec budget per
//! iteration, gradient descent-ascent (GDA), and PAPC in primal-dual and
//! reduced primal-only forms.
//!
//! `E'E` is never materialized; every application is a pair of products
//! with `E` and `E'`, and the state counts those products.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{Matrix, Vector};
use crate::problems::{Constraint, Objective};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Interpolated-gradient method; per-iteration work set by `two_ell`.
    Igm,
    /// Simultaneous gradient descent-ascent on the Lagrangian.
    Gda,
    /// PAPC with the explicit half-step (primal-dual form).
    PapcPd,
    /// PAPC reduced to primal-only updates.
    PapcPrimal,
}

impl Algorithm {
    pub fn id(&self) -> &'static str {
        match self {
            Algorithm::Igm => "igm",
            Algorithm::Gda => "gda",
            Algorithm::PapcPd => "papc",
            Algorithm::PapcPrimal => "papc_primal",
        }
    }

    /// Human-readable label; IGM gets its half-integer ell suffix.
    pub fn label(&self, params: &SolverParams) -> String {
        match self {
            Algorithm::Igm => {
                let two_ell = params.two_ell;
                if two_ell % 2 == 0 {
                    format!("igm_l{}", two_ell / 2)
                } else {
                    format!("igm_l{}.5", two_ell / 2)
                }
            }
            other => other.id().to_string(),
        }
    }
}

/// Step data shared by all algorithms. `alpha1`/`alpha2` drive IGM and
/// PAPC, `tau`/`theta` drive GDA, `two_ell` is the integer `2*ell` for IGM.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub two_ell: u32,
    pub tau: f64,
    pub theta: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams { alpha1: 0.0, alpha2: 0.0, two_ell: 2, tau: 0.0, theta: 0.0 }
    }
}

/// Rate-optimal or standard step sizes for each algorithm.
///
/// IGM uses the rate-optimizing `alpha1 = 2/(m+L)` and, for even `two_ell`,
/// `alpha2 = 2/(s1+sr)`. For odd `two_ell` the constraint polynomial is an
/// odd power of `I - alpha2 E'E`, which flips sign on modes with
/// `alpha2 sigma > 1` and can destabilize them; the default there is the
/// sign-safe `alpha2 = 1/s1`, priced accordingly by the rate formula.
/// PAPC uses `alpha1 = 1/L`, `alpha2 = L/s1` (so `alpha1*alpha2*s1 = 1`);
/// GDA uses `tau = 1/L`, `theta = m/s1`. The GDA/PAPC choices realize the
/// standard complexity regimes and can be overridden per run.
pub fn default_params(
    obj: &Objective,
    con: &Constraint,
    algorithm: Algorithm,
    two_ell: u32,
) -> SolverParams {
    let (m, l) = (obj.m, obj.l);
    let (s1, sr) = (con.sigma1, con.sigmar);
    match algorithm {
        Algorithm::Igm => SolverParams {
            alpha1: 2.0 / (m + l),
            alpha2: if two_ell % 2 == 0 { 2.0 / (s1 + sr) } else { 1.0 / s1 },
            two_ell,
            tau: 0.0,
            theta: 0.0,
        },
        Algorithm::Gda => SolverParams {
            alpha1: 0.0,
            alpha2: 0.0,
            two_ell,
            tau: 1.0 / l,
            theta: m / s1,
        },
        Algorithm::PapcPd | Algorithm::PapcPrimal => SolverParams {
            alpha1: 1.0 / l,
            alpha2: l / s1,
            two_ell,
            tau: 0.0,
            theta: 0.0,
        },
    }
}

/// Parameter validation, per algorithm.
///
/// The `alpha2 < 2/sigma1` window applies to IGM (where `alpha2` scales the
/// constraint polynomial); PAPC's dual step lives on a different scale and
/// is checked through `alpha1*alpha2*sigma1 <= 1` instead.
pub fn validate_params(
    obj: &Objective,
    con: &Constraint,
    algorithm: Algorithm,
    p: &SolverParams,
) -> Result<()> {
    let bad = |msg: String| Err(Error::InvalidParams(msg));
    match algorithm {
        Algorithm::Igm => {
            if !(p.alpha1 > 0.0 && p.alpha1 < 2.0 / obj.l) {
                return bad(format!("igm needs 0 < alpha1 < 2/L, got {}", p.alpha1));
            }
            if !(p.alpha2 > 0.0 && p.alpha2 < 2.0 / con.sigma1) {
                return bad(format!("igm needs 0 < alpha2 < 2/sigma1, got {}", p.alpha2));
            }
            if p.two_ell == 0 {
                return bad("igm needs two_ell >= 1".into());
            }
        }
        Algorithm::Gda => {
            if !(p.tau > 0.0) || !(p.theta > 0.0) {
                return bad(format!("gda needs tau, theta > 0, got {}, {}", p.tau, p.theta));
            }
        }
        Algorithm::PapcPd | Algorithm::PapcPrimal => {
            if !(p.alpha1 > 0.0 && p.alpha1 <= 1.0 / obj.l * (1.0 + 1e-12)) {
                return bad(format!("papc needs 0 < alpha1 <= 1/L, got {}", p.alpha1));
            }
            if !(p.alpha2 > 0.0 && p.alpha1 * p.alpha2 * con.sigma1 <= 1.0 + 1e-12) {
                return bad(format!(
                    "papc needs alpha1*alpha2*sigma1 <= 1, got {}",
                    p.alpha1 * p.alpha2 * con.sigma1
                ));
            }
        }
    }
    Ok(())
}

/// Per-algorithm mutable iteration state.
#[derive(Debug, Clone)]
enum StateKind {
    Igm { v_prev: Vector },
    Gda { y: Vector },
    PapcPd { v: Vector },
    PapcPrimal { v: Vector },
}

/// Current iterate plus whatever memory the algorithm carries, and the
/// running count of `E` / `E'` applications.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub x: Vector,
    pub k: u64,
    pub matvec_count: u64,
    kind: StateKind,
}

impl SolverState {
    /// Standard initialization: IGM takes `v^{-1} = x0`, dual states start
    /// at zero.
    pub fn init(algorithm: Algorithm, x0: Vector, con: &Constraint) -> Self {
        let kind = match algorithm {
            Algorithm::Igm => StateKind::Igm { v_prev: x0.clone() },
            Algorithm::Gda => StateKind::Gda { y: Vector::zeros(con.n_rows()) },
            Algorithm::PapcPd => StateKind::PapcPd { v: Vector::zeros(x0.len()) },
            Algorithm::PapcPrimal => StateKind::PapcPrimal { v: Vector::zeros(x0.len()) },
        };
        SolverState { x: x0, k: 0, matvec_count: 0, kind }
    }

    pub fn init_igm_with(x0: Vector, v_prev: Vector) -> Self {
        SolverState { x: x0, k: 0, matvec_count: 0, kind: StateKind::Igm { v_prev } }
    }

    pub fn init_gda_with(x0: Vector, y0: Vector) -> Self {
        SolverState { x: x0, k: 0, matvec_count: 0, kind: StateKind::Gda { y: y0 } }
    }

    pub fn init_papc_with(algorithm: Algorithm, x0: Vector, v0: Vector) -> Self {
        let kind = match algorithm {
            Algorithm::PapcPd => StateKind::PapcPd { v: v0 },
            Algorithm::PapcPrimal => StateKind::PapcPrimal { v: v0 },
            _ => panic!("init_papc_with expects a PAPC variant"),
        };
        SolverState { x: x0, k: 0, matvec_count: 0, kind }
    }

    /// Dual / auxiliary vector, when the algorithm keeps one.
    pub fn dual(&self) -> &Vector {
        match &self.kind {
            StateKind::Igm { v_prev } => v_prev,
            StateKind::Gda { y } => y,
            StateKind::PapcPd { v } | StateKind::PapcPrimal { v } => v,
        }
    }
}

/// Apply `alpha2 * p_ell(E'E) * E'(E w - q)` where `p_ell` is the geometric
/// sum `sum_{i=0}^{2l-1} (I - alpha2 E'E)^i`, via the recurrence
/// `s <- rvec + (I - alpha2 E'E) s`.
///
/// Costs exactly `two_ell` applications each of `E` and `E'`, added to
/// `matvec_count`.
pub fn horner_pl_apply(
    e: &Matrix,
    q: &Vector,
    w: &Vector,
    alpha2: f64,
    two_ell: u32,
    matvec_count: &mut u64,
) -> Result<Vector> {
    debug_assert!(two_ell >= 1);
    let mut ew = e.matvec(w)?;
    ew.axpy(-1.0, q);
    let rvec = e.matvec_t(&ew)?;
    *matvec_count += 2;

    let mut s = rvec.clone();
    for _ in 1..two_ell {
        // s <- rvec + s - alpha2 * E'(E s)
        let es = e.matvec(&s)?;
        let wts = e.matvec_t(&es)?;
        *matvec_count += 2;
        s.axpy(-alpha2, &wts);
        s.axpy(1.0, &rvec);
    }
    Ok(s.scale(alpha2))
}

/// One IGM iteration:
/// `v = x - a1 grad f(x)`, `w = x + v - v_prev`,
/// `x <- w - a2 p_ell(E'E) (E'E w - E'q)`.
pub fn igm_step(
    state: &mut SolverState,
    obj: &Objective,
    con: &Constraint,
    params: &SolverParams,
) -> Result<()> {
    let StateKind::Igm { v_prev } = &mut state.kind else {
        return Err(Error::InvalidParams("state is not an IGM state".into()));
    };
    let grad = obj.gradient(&state.x)?;
    let mut v = state.x.clone();
    v.axpy(-params.alpha1, &grad);

    let mut w = state.x.add(&v);
    w.axpy(-1.0, v_prev);

    let correction = horner_pl_apply(
        &con.e,
        &con.q,
        &w,
        params.alpha2,
        params.two_ell,
        &mut state.matvec_count,
    )?;
    let mut x_next = w;
    x_next.axpy(-1.0, &correction);

    *v_prev = v;
    state.x = x_next;
    state.k += 1;
    Ok(())
}

/// One simultaneous GDA iteration on the Lagrangian `f(x) + y'(Ex - q)`.
pub fn gda_step(
    state: &mut SolverState,
    obj: &Objective,
    con: &Constraint,
    params: &SolverParams,
) -> Result<()> {
    let StateKind::Gda { y } = &mut state.kind else {
        return Err(Error::InvalidParams("state is not a GDA state".into()));
    };
    let grad = obj.gradient(&state.x)?;
    let ety = con.e.matvec_t(y)?;
    let mut ex = con.e.matvec(&state.x)?;
    state.matvec_count += 2;
    ex.axpy(-1.0, &con.q);

    let mut x_next = state.x.clone();
    x_next.axpy(-params.tau, &grad);
    x_next.axpy(-params.tau, &ety);
    y.axpy(params.theta, &ex);

    state.x = x_next;
    state.k += 1;
    Ok(())
}

/// One PAPC iteration in primal-dual form (with the explicit half-step).
pub fn papc_pd_step(
    state: &mut SolverState,
    obj: &Objective,
    con: &Constraint,
    params: &SolverParams,
) -> Result<()> {
    let StateKind::PapcPd { v } = &mut state.kind else {
        return Err(Error::InvalidParams("state is not a PAPC-pd state".into()));
    };
    let grad = obj.gradient(&state.x)?;
    let mut x_half = state.x.clone();
    x_half.axpy(-params.alpha1, &grad);
    x_half.axpy(-params.alpha1, v);

    let mut ex = con.e.matvec(&x_half)?;
    ex.axpy(-1.0, &con.q);
    let corr = con.e.matvec_t(&ex)?;
    state.matvec_count += 2;
    v.axpy(params.alpha2, &corr);

    let mut x_next = state.x.clone();
    x_next.axpy(-params.alpha1, &grad);
    x_next.axpy(-params.alpha1, v);

    state.x = x_next;
    state.k += 1;
    Ok(())
}

/// One PAPC iteration in reduced primal-only form:
/// `v <- (I - a1 a2 E'E) v + a2 E'(E(x - a1 grad f(x)) - q)`,
/// `x <- x - a1 grad f(x) - a1 v`.
pub fn papc_primal_step(
    state: &mut SolverState,
    obj: &Objective,
    con: &Constraint,
    params: &SolverParams,
) -> Result<()> {
    let StateKind::PapcPrimal { v } = &mut state.kind else {
        return Err(Error::InvalidParams("state is not a PAPC-primal state".into()));
    };
    let grad = obj.gradient(&state.x)?;
    let mut z = state.x.clone();
    z.axpy(-params.alpha1, &grad);

    let mut ez = con.e.matvec(&z)?;
    ez.axpy(-1.0, &con.q);
    let affine = con.e.matvec_t(&ez)?;
    let ev = con.e.matvec(v)?;
    let wv = con.e.matvec_t(&ev)?;
    state.matvec_count += 4;

    v.axpy(-params.alpha1 * params.alpha2, &wv);
    v.axpy(params.alpha2, &affine);

    let mut x_next = z;
    x_next.axpy(-params.alpha1, v);
    state.x = x_next;
    state.k += 1;
    Ok(())
}

/// Dispatch one iteration of whichever algorithm the state was built for.
pub fn step(
    state: &mut SolverState,
    obj: &Objective,
    con: &Constraint,
    params: &SolverParams,
) -> Result<()> {
    match state.kind {
        StateKind::Igm { .. } => igm_step(state, obj, con, params),
        StateKind::Gda { .. } => gda_step(state, obj, con, params),
        StateKind::PapcPd { .. } => papc_pd_step(state, obj, con, params),
        StateKind::PapcPrimal { .. } => papc_primal_step(state, obj, con, params),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    MaxIter,
    Diverged,
}

impl RunStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RunStatus::Converged => "converged",
            RunStatus::MaxIter => "maxiter",
            RunStatus::Diverged => "diverged",
        }
    }

    pub fn parse(s: &str) -> Option<RunStatus> {
        match s {
            "converged" => Some(RunStatus::Converged),
            "maxiter" => Some(RunStatus::MaxIter),
            "diverged" => Some(RunStatus::Diverged),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub k: u64,
    pub rel_err: f64,
    pub matvec_count: u64,
    pub wall_ms: f64,
}

/// Per-iteration relative-error trace of one run.
#[derive(Debug, Clone)]
pub struct IterateTrace {
    pub rows: Vec<TraceRow>,
    pub status: RunStatus,
    /// Optional iterate snapshots `(k, x^k)` for offline metric checks.
    pub checkpoints: Vec<(u64, Vector)>,
}

impl IterateTrace {
    /// First row at or below `tol`, as `(k, matvec_count)`.
    pub fn first_at(&self, tol: f64) -> Option<(u64, u64)> {
        self.rows
            .iter()
            .find(|r| r.rel_err <= tol)
            .map(|r| (r.k, r.matvec_count))
    }

    pub fn final_rel_err(&self) -> f64 {
        self.rows.last().map(|r| r.rel_err).unwrap_or(f64::NAN)
    }

    /// CSV with header `k,rel_err,matvec_count,wall_ms` and a trailing
    /// `# status=...` comment line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,rel_err,matvec_count,wall_ms\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.12e},{},{:.3}\n",
                r.k, r.rel_err, r.matvec_count, r.wall_ms
            ));
        }
        out.push_str(&format!("# status={}\n", self.status.as_str()));
        out
    }

    pub fn from_csv(text: &str) -> Result<IterateTrace> {
        let mut rows = Vec::new();
        let mut status = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line == "k,rel_err,matvec_count,wall_ms" {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(v) = rest.trim().strip_prefix("status=") {
                    status = RunStatus::parse(v.trim());
                }
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(Error::InvalidParams(format!(
                    "trace CSV line {} has {} fields",
                    lineno + 1,
                    fields.len()
                )));
            }
            let parse_err =
                |what: &str| Error::InvalidParams(format!("trace CSV line {}: bad {what}", lineno + 1));
            rows.push(TraceRow {
                k: fields[0].parse().map_err(|_| parse_err("k"))?,
                rel_err: fields[1].parse().map_err(|_| parse_err("rel_err"))?,
                matvec_count: fields[2].parse().map_err(|_| parse_err("matvec_count"))?,
                wall_ms: fields[3].parse().map_err(|_| parse_err("wall_ms"))?,
            });
        }
        Ok(IterateTrace {
            rows,
            status: status.ok_or_else(|| Error::InvalidParams("trace CSV missing status".into()))?,
            checkpoints: Vec::new(),
        })
    }
}

/// Termination and instrumentation settings for `run`.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub max_iter: u64,
    pub tol: f64,
    /// Starting point; zeros when absent.
    pub x0: Option<Vector>,
    /// Snapshot the iterate every this many iterations.
    pub checkpoint_every: Option<u64>,
    /// Abort with `Diverged` status past this relative error.
    pub divergence_threshold: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            max_iter: 100_000,
            tol: 1e-8,
            x0: None,
            checkpoint_every: None,
            divergence_threshold: 1e8,
        }
    }
}

/// Iterate until `rel_err <= tol` or the budget runs out, recording one
/// trace row per iteration against the reference solution `x_star`.
pub fn run(
    algorithm: Algorithm,
    obj: &Objective,
    con: &Constraint,
    params: &SolverParams,
    options: &RunOptions,
    x_star: &Vector,
) -> Result<IterateTrace> {
    validate_params(obj, con, algorithm, params)?;
    let n = obj.dim();
    if con.e.cols() != n || x_star.len() != n {
        return Err(Error::DimensionMismatch {
            context: "run",
            expected: n,
            got: con.e.cols().max(x_star.len()),
        });
    }
    let x0 = options.x0.clone().unwrap_or_else(|| Vector::zeros(n));
    let star_norm = x_star.norm();
    let rel = |x: &Vector| {
        let d = x.sub(x_star).norm();
        if star_norm > 0.0 {
            d / star_norm
        } else {
            d
        }
    };

    let started = Instant::now();
    let mut state = SolverState::init(algorithm, x0, con);
    let mut trace = IterateTrace {
        rows: Vec::new(),
        status: RunStatus::MaxIter,
        checkpoints: Vec::new(),
    };
    let record = |state: &SolverState, trace: &mut IterateTrace| -> Result<f64> {
        let e = rel(&state.x);
        if !e.is_finite() {
            return Ok(f64::INFINITY);
        }
        trace.rows.push(TraceRow {
            k: state.k,
            rel_err: e,
            matvec_count: state.matvec_count,
            wall_ms: started.elapsed().as_secs_f64() * 1e3,
        });
        Ok(e)
    };

    let mut err = record(&state, &mut trace)?;
    if let Some(every) = options.checkpoint_every {
        if every > 0 {
            trace.checkpoints.push((0, state.x.clone()));
        }
    }
    if err <= options.tol {
        trace.status = RunStatus::Converged;
        return Ok(trace);
    }

    while state.k < options.max_iter {
        step(&mut state, obj, con, params)?;
        err = record(&state, &mut trace)?;
        if let Some(every) = options.checkpoint_every {
            if every > 0 && state.k % every == 0 {
                trace.checkpoints.push((state.k, state.x.clone()));
            }
        }
        if !err.is_finite() || err > options.divergence_threshold {
            trace.status = RunStatus::Diverged;
            return Ok(trace);
        }
        if err <= options.tol {
            trace.status = RunStatus::Converged;
            return Ok(trace);
        }
    }
    trace.status = RunStatus::MaxIter;
    Ok(trace)
}
