//! One-sided Jacobi SVD and symmetric power iteration.

use super::{Matrix, Vector};
use crate::error::{Error, Result};
use crate::rng::Rng;

const MAX_SWEEPS: usize = 60;
const OFFDIAG_TOL: f64 = 1e-14;

/// Full singular value decomposition `M = U diag(S) V^T`.
///
/// `U` is `rows x rows`, `V` is `cols x cols`, both orthogonal; `S` holds
/// the `min(rows, cols)` singular values in nonincreasing order. The full
/// factors are kept (rather than thin ones) so rank-deficient inputs still
/// yield a complete null-space basis in the trailing columns of `V`.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: Matrix,
    pub s: Vector,
    pub v: Matrix,
}

impl SvdResult {
    /// `U diag(S) V^T`, for residual checks.
    pub fn reconstruct(&self) -> Matrix {
        let rows = self.u.rows();
        let cols = self.v.rows();
        let k = self.s.len();
        let mut out = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let mut acc = 0.0;
                for t in 0..k {
                    acc += self.u.get(i, t) * self.s[t] * self.v.get(j, t);
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    /// Number of singular values above `threshold`.
    pub fn rank(&self, threshold: f64) -> usize {
        self.s.iter().filter(|&&s| s > threshold).count()
    }

    /// Minimum-norm solution of `M x = b` via the pseudo-inverse, treating
    /// singular values at or below `threshold` as zero.
    pub fn pinv_apply(&self, b: &Vector, threshold: f64) -> Result<Vector> {
        let w = self.u.matvec_t(b)?;
        let mut x = Vector::zeros(self.v.rows());
        for t in 0..self.s.len() {
            if self.s[t] > threshold {
                x.axpy(w[t] / self.s[t], &self.v.column(t));
            }
        }
        Ok(x)
    }
}

/// One-sided Jacobi SVD with row-cyclic sweeps.
///
/// Column pairs are rotated until all pairwise inner products fall below
/// `1e-14` relative to the column norms; errors if 60 sweeps do not reach
/// that point. Intended for desk-scale problems (dimensions up to ~2000).
pub fn svd(m: &Matrix) -> Result<SvdResult> {
    if m.rows() > 2000 || m.cols() > 2000 {
        return Err(Error::InvalidParams(format!(
            "svd is desk-scale only (max 2000), got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.all_finite() {
        return Err(Error::NonFinite("svd input"));
    }
    // Orient tall: one-sided Jacobi orthogonalizes columns.
    let transposed = m.rows() < m.cols();
    let work = if transposed { m.transpose() } else { m.clone() };
    let (u, s, v) = jacobi_tall(&work)?;
    if transposed {
        Ok(SvdResult { u: v, s, v: u })
    } else {
        Ok(SvdResult { u, s, v })
    }
}

fn jacobi_tall(a: &Matrix) -> Result<(Matrix, Vector, Matrix)> {
    let p = a.rows();
    let t = a.cols();
    debug_assert!(p >= t);

    // Column-major working copy: g[j] is the j-th column.
    let mut g: Vec<Vec<f64>> = (0..t).map(|j| (0..p).map(|i| a.get(i, j)).collect()).collect();
    let mut v: Vec<Vec<f64>> = (0..t)
        .map(|j| (0..t).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    let fro2: f64 = g.iter().flat_map(|c| c.iter()).map(|x| x * x).sum();
    if fro2 == 0.0 {
        // Zero matrix: S = 0 with identity factors.
        return Ok((
            Matrix::identity(p),
            Vector::zeros(t),
            Matrix::identity(t),
        ));
    }
    let tiny = f64::MIN_POSITIVE * fro2.max(1.0);

    let mut converged = false;
    let mut worst = 0.0_f64;
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        worst = 0.0;
        for i in 0..t.saturating_sub(1) {
            for j in (i + 1)..t {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for k in 0..p {
                    let gi = g[i][k];
                    let gj = g[j][k];
                    alpha += gi * gi;
                    beta += gj * gj;
                    gamma += gi * gj;
                }
                let scale = (alpha * beta).sqrt();
                if scale <= tiny {
                    continue;
                }
                let ratio = gamma.abs() / scale;
                worst = worst.max(ratio);
                if ratio <= OFFDIAG_TOL {
                    continue;
                }
                // Jacobi rotation zeroing the (i, j) inner product.
                let zeta = (beta - alpha) / (2.0 * gamma);
                let tan = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cos = 1.0 / (1.0 + tan * tan).sqrt();
                let sin = cos * tan;
                for k in 0..p {
                    let gi = g[i][k];
                    let gj = g[j][k];
                    g[i][k] = cos * gi - sin * gj;
                    g[j][k] = sin * gi + cos * gj;
                }
                for k in 0..t {
                    let vi = v[i][k];
                    let vj = v[j][k];
                    v[i][k] = cos * vi - sin * vj;
                    v[j][k] = sin * vi + cos * vj;
                }
                rotated = true;
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SvdNoConvergence {
            sweeps: MAX_SWEEPS,
            residual: worst,
        });
    }

    // Singular values are the column norms; sort nonincreasing.
    let mut order: Vec<usize> = (0..t).collect();
    let norms: Vec<f64> = g.iter().map(|c| c.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));

    let s = Vector::new(order.iter().map(|&j| norms[j]).collect());
    let rank_tol = f64::EPSILON * s[0].max(0.0) * (p.max(t) as f64);

    let mut v_full = Matrix::zeros(t, t);
    for (col, &j) in order.iter().enumerate() {
        for k in 0..t {
            v_full.set(k, col, v[j][k]);
        }
    }

    // Left vectors: normalized nonzero columns, completed to a full
    // orthonormal basis against the canonical vectors.
    let mut u_cols: Vec<Vec<f64>> = Vec::with_capacity(p);
    for (idx, &j) in order.iter().enumerate() {
        if s[idx] > rank_tol && s[idx] > 0.0 {
            u_cols.push(g[j].iter().map(|x| x / s[idx]).collect());
        }
    }
    complete_basis(&mut u_cols, p);
    let mut u_full = Matrix::zeros(p, p);
    for (col, uc) in u_cols.iter().enumerate() {
        for k in 0..p {
            u_full.set(k, col, uc[k]);
        }
    }

    Ok((u_full, s, v_full))
}

/// Extend `cols` to `dim` orthonormal vectors by Gram-Schmidt over the
/// canonical basis, always seeding from the candidate `e_k` with the
/// largest remaining residual (at least sqrt((dim - len)/dim), so the
/// construction cannot stall). Residual norms are tracked incrementally:
/// adding basis vector `w` lowers candidate `k`'s squared residual by
/// `w[k]^2`.
fn complete_basis(cols: &mut Vec<Vec<f64>>, dim: usize) {
    let orthogonalize = |w: &mut Vec<f64>, cols: &[Vec<f64>]| {
        for _pass in 0..2 {
            for c in cols {
                let proj: f64 = c.iter().zip(w.iter()).map(|(a, b)| a * b).sum();
                for (wk, ck) in w.iter_mut().zip(c) {
                    *wk -= proj * ck;
                }
            }
        }
    };
    let mut residual2 = vec![1.0_f64; dim];
    for c in cols.iter() {
        for (rk, ck) in residual2.iter_mut().zip(c) {
            *rk -= ck * ck;
        }
    }
    while cols.len() < dim {
        let cand = residual2
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(k, _)| k)
            .expect("dim > 0");
        let mut w = vec![0.0; dim];
        w[cand] = 1.0;
        orthogonalize(&mut w, cols);
        let norm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(norm > 1e-8, "basis completion stalled");
        for wk in w.iter_mut() {
            *wk /= norm;
        }
        for (rk, wk) in residual2.iter_mut().zip(&w) {
            *rk = (*rk - wk * wk).max(0.0);
        }
        cols.push(w);
    }
}

/// Dominant eigenvalue of a symmetric positive semidefinite operator.
///
/// `apply` is called as the operator; convergence is declared when the
/// Rayleigh quotient stabilizes to relative accuracy `tol`. Errors with the
/// last estimate if `maxit` is exhausted.
pub fn power_iteration_sym(
    apply: impl Fn(&Vector) -> Vector,
    n: usize,
    maxit: usize,
    tol: f64,
) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    // Fixed pseudo-random start so results are deterministic per build.
    let mut rng = Rng::seed_from(0x9e37_79b9_7f4a_7c15);
    let mut v = Vector::from_fn(n, |_| rng.next_gaussian());
    let nv = v.norm();
    v.scale_in_place(1.0 / nv);

    let mut lambda = 0.0_f64;
    for it in 0..maxit {
        let av = apply(&v);
        let norm_av = av.norm();
        if norm_av == 0.0 {
            // Operator annihilates the iterate: dominant eigenvalue 0.
            return Ok(0.0);
        }
        let next_lambda = v.dot(&av);
        let rel = (next_lambda - lambda).abs() / next_lambda.abs().max(f64::MIN_POSITIVE);
        v = av.scale(1.0 / norm_av);
        lambda = next_lambda;
        if it >= 2 && rel <= tol {
            return Ok(lambda);
        }
    }
    Err(Error::PowerIterationNoConvergence { maxit, last: lambda })
}
