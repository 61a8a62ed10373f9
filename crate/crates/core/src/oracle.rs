//! High-accuracy reference solutions and empirical rate fitting.
//!
//! The oracle parametrizes the feasible set as `x = x_par + V2 u` using the
//! stored SVD of `E` and minimizes over the null-space coordinates `u`:
//! directly for quadratics, by damped Newton otherwise. Solver traces are
//! measured against the resulting `x_star`.

use crate::error::{Error, Result};
use crate::numkit::{lu_solve, Matrix, Vector};
use crate::problems::{GeneratedInstance, Objective, ObjectiveKind};
use crate::solvers::IterateTrace;

/// Reference solution with the optimality data used by tests and metrics.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub x_star: Vector,
    /// Minimum-norm particular solution of `E x = q`.
    pub x_par: Vector,
    /// Null-space coordinates `V2' x_star`.
    pub null_coords: Vector,
    /// Range-side gradient coefficients `V1' grad f(x_star)`.
    pub range_grad: Vector,
    /// `(||E x_star - q||, ||V2' grad f(x_star)||)`.
    pub kkt_residuals: (f64, f64),
}

impl OracleSolution {
    /// Minimum-norm dual certificate `y_star` with `E' y_star = -grad f(x_star)`.
    pub fn dual_certificate(&self, inst: &GeneratedInstance) -> Vector {
        let dec = &inst.decomposition;
        let mut y = Vector::zeros(inst.constraint.n_rows());
        for k in 0..inst.spec.r {
            y.axpy(-self.range_grad[k] / dec.s[k], &dec.u.column(k));
        }
        y
    }
}

const NEWTON_MAX_ITER: usize = 200;

/// Solve the instance to near machine precision.
///
/// `tol_factor` scales the gradient stopping rule
/// `||V2' grad|| <= tol_factor * (1 + ||grad f(x_par)||)`; `1e-12` is the
/// standard setting. The returned solution is checked against the KKT
/// residual bound `1e-10 * scale` and an error is raised if it fails.
pub fn oracle_solve(inst: &GeneratedInstance, tol_factor: f64) -> Result<OracleSolution> {
    let n = inst.spec.n;
    let r = inst.spec.r;
    let dec = &inst.decomposition;
    let v2 = inst.v2();
    let nu = n - r;

    // Particular solution through the pseudo-inverse of E.
    let sing_tol = 1e-10 * inst.spec.sigma1.sqrt();
    let x_par = dec.pinv_apply(&inst.constraint.q, sing_tol)?;

    let grad_par_norm = inst.objective.gradient(&x_par)?.norm();
    let gtol = tol_factor * (1.0 + grad_par_norm);

    let x_of = |u: &Vector| -> Result<Vector> {
        let mut x = x_par.clone();
        for j in 0..u.len() {
            x.axpy(u[j], &v2.column(j));
        }
        Ok(x)
    };

    let u_star = if nu == 0 {
        Vector::zeros(0)
    } else if let ObjectiveKind::Quadratic { .. } = inst.objective.kind {
        // One exact Newton step from u = 0 solves the reduced problem.
        newton_direction(&inst.objective, &v2, &x_par)?
    } else {
        damped_newton(&inst.objective, &v2, &x_of, gtol)?
    };

    let x_star = x_of(&u_star)?;
    let grad = inst.objective.gradient(&x_star)?;

    let mut feas = inst.constraint.e.matvec(&x_star)?;
    feas.axpy(-1.0, &inst.constraint.q);
    let feas_norm = feas.norm();
    let null_grad_norm = v2.matvec_t(&grad)?.norm();

    let v1 = inst.v1();
    let range_grad = v1.matvec_t(&grad)?;
    let null_coords = v2.matvec_t(&x_star)?;

    let feas_scale = 1.0 + inst.constraint.q.norm() + inst.spec.sigma1.sqrt() * x_star.norm();
    let grad_scale = 1.0 + grad.norm();
    if feas_norm > 1e-10 * feas_scale || null_grad_norm > 1e-10 * grad_scale {
        return Err(Error::OracleAccuracy(format!(
            "KKT residuals ({feas_norm:.3e}, {null_grad_norm:.3e}) exceed 1e-10 * scale"
        )));
    }

    Ok(OracleSolution {
        x_star,
        x_par,
        null_coords,
        range_grad,
        kkt_residuals: (feas_norm, null_grad_norm),
    })
}

/// Reduced Hessian and gradient at `x = x_par + V2 u`, solved for the
/// Newton step `H_u d = -g_u`.
fn newton_system(
    obj: &Objective,
    v2: &Matrix,
    x: &Vector,
) -> Result<(Matrix, Vector)> {
    let nu = v2.cols();
    let grad = obj.gradient(x)?;
    let g_u = v2.matvec_t(&grad)?;
    let mut h_u = Matrix::zeros(nu, nu);
    for j in 0..nu {
        let hv = obj.hess_mv(x, &v2.column(j))?;
        let col = v2.matvec_t(&hv)?;
        for i in 0..nu {
            h_u.set(i, j, col[i]);
        }
    }
    Ok((h_u, g_u))
}

fn newton_direction(obj: &Objective, v2: &Matrix, x: &Vector) -> Result<Vector> {
    let (h_u, g_u) = newton_system(obj, v2, x)?;
    lu_solve(&h_u, &g_u.scale(-1.0))
}

fn damped_newton(
    obj: &Objective,
    v2: &Matrix,
    x_of: &impl Fn(&Vector) -> Result<Vector>,
    gtol: f64,
) -> Result<Vector> {
    let mut u = Vector::zeros(v2.cols());
    let mut residual = f64::INFINITY;
    for _it in 0..NEWTON_MAX_ITER {
        let x = x_of(&u)?;
        let (value, grad) = obj.value_grad(&x)?;
        let g_u = v2.matvec_t(&grad)?;
        residual = g_u.norm();
        if residual <= gtol {
            return Ok(u);
        }
        let (h_u, _) = newton_system(obj, v2, &x)?;
        let d = lu_solve(&h_u, &g_u.scale(-1.0))?;

        // Backtracking line search on the reduced objective.
        let slope = g_u.dot(&d);
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let mut u_try = u.clone();
            u_try.axpy(t, &d);
            let (v_try, _) = obj.value_grad(&x_of(&u_try)?)?;
            if v_try <= value + 1e-4 * t * slope {
                u = u_try;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // Step has collapsed below float resolution around the optimum.
            return Ok(u);
        }
    }
    Err(Error::NewtonNoConvergence { maxit: NEWTON_MAX_ITER, residual })
}

/// Fit the asymptotic contraction factor of a trace.
///
/// Takes the rows in the decaying window `(1e-12, 1e-1]`, keeps the final
/// `window_fraction` of them, and least-squares fits `ln(rel_err)` against
/// `k`. Returns `(rate, M)` where `M = exp(intercept)` is the envelope
/// constant. Errors when fewer than 50 decaying rows exist or the window
/// does not actually decay.
pub fn fit_rate(trace: &IterateTrace, window_fraction: f64) -> Result<(f64, f64)> {
    let decaying: Vec<(f64, f64)> = trace
        .rows
        .iter()
        .filter(|r| r.rel_err > 1e-12 && r.rel_err <= 1e-1)
        .map(|r| (r.k as f64, r.rel_err.ln()))
        .collect();
    if decaying.len() < 50 {
        return Err(Error::InsufficientDecay(format!(
            "only {} rows inside the decay window, need 50",
            decaying.len()
        )));
    }
    let frac = window_fraction.clamp(0.05, 1.0);
    let start = ((decaying.len() as f64) * (1.0 - frac)).floor() as usize;
    let window = &decaying[start.min(decaying.len() - 2)..];

    let n = window.len() as f64;
    let mean_k = window.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = window.iter().map(|p| p.1).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (k, y) in window {
        sxx += (k - mean_k) * (k - mean_k);
        sxy += (k - mean_k) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::InsufficientDecay("degenerate iteration window".into()));
    }
    let slope = sxy / sxx;
    if slope >= 0.0 {
        return Err(Error::InsufficientDecay(format!(
            "window does not decay (slope {slope:.3e})"
        )));
    }
    let intercept = mean_y - slope * mean_k;
    Ok((slope.exp(), intercept.exp()))
}
