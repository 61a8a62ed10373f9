//! Objective functions, constraint and instance generation with a
//! prescribed singular spectrum, and analytic property checks.
//!
//! Instances regenerate from their JSON descriptor (kind, dimensions,
//! constants, seed) alone; matrices are never serialized.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{power_iteration_sym, svd, Matrix, SvdResult, Vector};
use crate::rng::Rng;

/// Objective family selector, as stored in instance descriptors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveClass {
    Quadratic,
    Logistic,
    SmoothL1,
}

impl std::fmt::Display for ObjectiveClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ObjectiveClass::Quadratic => write!(f, "quadratic"),
            ObjectiveClass::Logistic => write!(f, "logistic"),
            ObjectiveClass::SmoothL1 => write!(f, "smooth_l1"),
        }
    }
}

/// Problem data for one objective.
#[derive(Debug, Clone)]
pub enum ObjectiveKind {
    /// `f(x) = x'Qx/2 - b'x` with `spec(Q) in [m, L]`.
    Quadratic { q: Matrix, b: Vector },
    /// Regularized logistic loss over rows of `a` with labels in {0, 1}.
    Logistic { a: Matrix, y: Vec<f64> },
    /// Separable smooth approximation of the l1 norm plus a ridge.
    SmoothL1 { n: usize },
}

/// An `m`-strongly convex objective with `L`-Lipschitz gradient.
#[derive(Debug, Clone)]
pub struct Objective {
    pub kind: ObjectiveKind,
    pub m: f64,
    pub l: f64,
}

fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^t) without overflow.
fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

impl Objective {
    pub fn dim(&self) -> usize {
        match &self.kind {
            ObjectiveKind::Quadratic { q, .. } => q.cols(),
            ObjectiveKind::Logistic { a, .. } => a.cols(),
            ObjectiveKind::SmoothL1 { n } => *n,
        }
    }

    pub fn condition_number(&self) -> f64 {
        self.l / self.m
    }

    /// Value and exact analytic gradient at `x`.
    pub fn value_grad(&self, x: &Vector) -> Result<(f64, Vector)> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "objective evaluation",
                expected: self.dim(),
                got: x.len(),
            });
        }
        match &self.kind {
            ObjectiveKind::Quadratic { q, b } => {
                let qx = q.matvec(x)?;
                let value = 0.5 * x.dot(&qx) - b.dot(x);
                Ok((value, qx.sub(b)))
            }
            ObjectiveKind::Logistic { a, y } => {
                let t = a.matvec(x)?;
                let mut value = 0.0;
                let mut resid = Vector::zeros(t.len());
                for i in 0..t.len() {
                    value += -y[i] * t[i] + softplus(t[i]);
                    resid[i] = sigmoid(t[i]) - y[i];
                }
                value += 0.5 * self.m * x.dot(x);
                let mut grad = a.matvec_t(&resid)?;
                grad.axpy(self.m, x);
                Ok((value, grad))
            }
            ObjectiveKind::SmoothL1 { .. } => {
                let delta = 1.0 / (self.l - self.m);
                let mut value = 0.0;
                let mut grad = Vector::zeros(x.len());
                for i in 0..x.len() {
                    let root = (x[i] * x[i] + delta * delta).sqrt();
                    value += root + 0.5 * self.m * x[i] * x[i];
                    grad[i] = x[i] / root + self.m * x[i];
                }
                Ok((value, grad))
            }
        }
    }

    pub fn gradient(&self, x: &Vector) -> Result<Vector> {
        Ok(self.value_grad(x)?.1)
    }

    /// Hessian-vector product at `x`, used by the Newton oracle.
    pub fn hess_mv(&self, x: &Vector, v: &Vector) -> Result<Vector> {
        if x.len() != self.dim() || v.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                context: "hess_mv",
                expected: self.dim(),
                got: x.len().max(v.len()),
            });
        }
        match &self.kind {
            ObjectiveKind::Quadratic { q, .. } => q.matvec(v),
            ObjectiveKind::Logistic { a, .. } => {
                let t = a.matvec(x)?;
                let av = a.matvec(v)?;
                let weighted =
                    Vector::from_fn(t.len(), |i| sigmoid(t[i]) * (1.0 - sigmoid(t[i])) * av[i]);
                let mut out = a.matvec_t(&weighted)?;
                out.axpy(self.m, v);
                Ok(out)
            }
            ObjectiveKind::SmoothL1 { .. } => Ok(Vector::from_fn(x.len(), |i| {
                smoothl1_curvature_unchecked(self.m, self.l, x[i]) * v[i]
            })),
        }
    }
}

fn smoothl1_curvature_unchecked(m: f64, l: f64, x: f64) -> f64 {
    let d2 = 1.0 / ((l - m) * (l - m));
    d2 * (x * x + d2).powf(-1.5) + m
}

/// Second derivative of the scalar smooth-l1 term: `d^2/(x^2 + d^2)^{3/2} + m`
/// with `d = 1/(L - m)`. Equals `L` at `x = 0` and tends to `m` as `|x|`
/// grows. Errors when `L <= m`.
pub fn smoothl1_curvature(m: f64, l: f64, x: f64) -> Result<f64> {
    if l <= m {
        return Err(Error::InvalidParams(format!(
            "smooth_l1 curvature requires L > m (got m={m}, L={l})"
        )));
    }
    Ok(smoothl1_curvature_unchecked(m, l, x))
}

/// Linear equality constraint `E x = q` with spectral data of `E'E`.
#[derive(Debug, Clone)]
pub struct Constraint {
    /// Maps variables (length n) to constraint rows (length c).
    pub e: Matrix,
    pub q: Vector,
    /// Largest nonzero eigenvalue of `E'E`.
    pub sigma1: f64,
    /// Smallest nonzero eigenvalue of `E'E`.
    pub sigmar: f64,
    pub rank: usize,
}

impl Constraint {
    pub fn condition_number(&self) -> f64 {
        self.sigma1 / self.sigmar
    }

    pub fn n_vars(&self) -> usize {
        self.e.cols()
    }

    pub fn n_rows(&self) -> usize {
        self.e.rows()
    }

    /// `E'(E x - q)`, the affine operator the solvers iterate with.
    pub fn normal_residual(&self, x: &Vector) -> Result<Vector> {
        let mut ex = self.e.matvec(x)?;
        ex.axpy(-1.0, &self.q);
        self.e.matvec_t(&ex)
    }
}

/// JSON-serializable instance descriptor; regeneration is by seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub kind: ObjectiveClass,
    pub n: usize,
    pub c: usize,
    pub r: usize,
    pub m: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub sigma1: f64,
    pub sigmar: f64,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.c == 0 {
            return Err(Error::InvalidParams("n and c must be positive".into()));
        }
        if self.r == 0 || self.r > self.n.min(self.c) {
            return Err(Error::InvalidParams(format!(
                "rank r={} must satisfy 1 <= r <= min(n, c) = {}",
                self.r,
                self.n.min(self.c)
            )));
        }
        if !(self.m > 0.0) || !(self.l >= self.m) {
            return Err(Error::InvalidParams(format!(
                "need 0 < m <= L (got m={}, L={})",
                self.m, self.l
            )));
        }
        if !(self.sigmar > 0.0) || !(self.sigma1 >= self.sigmar) {
            return Err(Error::InvalidParams(format!(
                "need 0 < sigmar <= sigma1 (got sigmar={}, sigma1={})",
                self.sigmar, self.sigma1
            )));
        }
        if self.r == 1 && self.sigma1 != self.sigmar {
            return Err(Error::InvalidParams(
                "rank 1 cannot attain two distinct spectrum endpoints".into(),
            ));
        }
        if self.kind == ObjectiveClass::SmoothL1 && self.l <= self.m {
            return Err(Error::InvalidParams("smooth_l1 requires L > m".into()));
        }
        Ok(())
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance spec serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s)
            .map_err(|e| Error::InvalidParams(format!("instance JSON: {e}")))
    }
}

/// A fully materialized problem instance with its ground truth and the SVD
/// of `E` (right factor carries the range/null split used by the oracle).
#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub spec: InstanceSpec,
    pub objective: Objective,
    pub constraint: Constraint,
    pub x_bar: Vector,
    pub seed: u64,
    pub decomposition: SvdResult,
}

impl GeneratedInstance {
    /// Right singular vectors with nonzero singular value (n x r).
    pub fn v1(&self) -> Matrix {
        columns_of(&self.decomposition.v, 0, self.spec.r)
    }

    /// Orthonormal basis of the null space of `E` (n x (n - r)).
    pub fn v2(&self) -> Matrix {
        columns_of(&self.decomposition.v, self.spec.r, self.spec.n)
    }
}

fn columns_of(m: &Matrix, from: usize, to: usize) -> Matrix {
    Matrix::from_fn(m.rows(), to - from, |i, j| m.get(i, from + j))
}

/// Log-spaced values from `hi` down to `lo` (both attained exactly).
fn log_spaced_desc(hi: f64, lo: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![hi];
    }
    let (lh, ll) = (hi.ln(), lo.ln());
    (0..count)
        .map(|k| {
            if k == 0 {
                hi
            } else if k == count - 1 {
                lo
            } else {
                (lh + (ll - lh) * k as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

/// Build a `c x n` constraint with exactly `r` nonzero singular values of
/// `E'E` log-spaced across `[sigmar, sigma1]`, endpoints attained.
///
/// The returned SVD is exact by construction (the matrix is assembled from
/// its factors). `q` is left empty here; `gen_instance` fills it.
pub fn gen_constraint(
    n: usize,
    c: usize,
    r: usize,
    sigma1: f64,
    sigmar: f64,
    rng: &mut Rng,
) -> Result<(Constraint, SvdResult)> {
    if r == 0 || r > n.min(c) {
        return Err(Error::InvalidParams(format!(
            "infeasible constraint shape: r={r}, n={n}, c={c}"
        )));
    }
    if !(sigmar > 0.0) || sigma1 < sigmar {
        return Err(Error::InvalidParams(format!(
            "need 0 < sigmar <= sigma1 (got {sigmar}, {sigma1})"
        )));
    }
    if r == 1 && sigma1 != sigmar {
        return Err(Error::InvalidParams(
            "rank 1 cannot attain two distinct spectrum endpoints".into(),
        ));
    }

    let g = Matrix::from_fn(c, n, |_, _| rng.next_gaussian());
    let base = svd(&g)?;

    // Singular values of E are sqrt of the target eigenvalues of E'E.
    let mut s = Vector::zeros(base.s.len());
    for (k, val) in log_spaced_desc(sigma1.sqrt(), sigmar.sqrt(), r).into_iter().enumerate() {
        s[k] = val;
    }

    let mut e = Matrix::zeros(c, n);
    for k in 0..r {
        let sk = s[k];
        for i in 0..c {
            let uik = base.u.get(i, k) * sk;
            for j in 0..n {
                e.set(i, j, e.get(i, j) + uik * base.v.get(j, k));
            }
        }
    }

    let decomposition = SvdResult { u: base.u, s, v: base.v };
    let constraint = Constraint {
        e,
        q: Vector::zeros(c),
        sigma1,
        sigmar,
        rank: r,
    };
    Ok((constraint, decomposition))
}

/// Logistic design matrix and labels.
///
/// `A` is standard normal rescaled so that `||A||_2^2 = 4(L - m)`, making
/// the Hessian at the origin equal `A'A/4 + mI` with top eigenvalue exactly
/// `L`. Labels are drawn from the logistic model of a random unit-norm
/// planted parameter.
pub fn gen_logistic_data(
    n_samples: usize,
    n: usize,
    m: f64,
    l: f64,
    rng: &mut Rng,
) -> Result<(Matrix, Vec<f64>)> {
    let mut a = Matrix::from_fn(n_samples, n, |_, _| rng.next_gaussian());
    if n_samples > 0 && l > m {
        let lambda = power_iteration_sym(
            |v| a.matvec_t(&a.matvec(v).expect("dims fixed")).expect("dims fixed"),
            n,
            200_000,
            1e-12,
        )?;
        let scale = (4.0 * (l - m) / lambda).sqrt();
        a = Matrix::from_fn(n_samples, n, |i, j| scale * a.get(i, j));
    } else if l == m {
        // Pure ridge: no data curvature allowed.
        a = Matrix::zeros(n_samples, n);
    }

    let mut planted = Vector::from_fn(n, |_| rng.next_gaussian());
    let norm = planted.norm();
    if norm > 0.0 {
        planted.scale_in_place(1.0 / norm);
    }
    let logits = a.matvec(&planted).expect("dims fixed");
    let mut y = vec![0.0; n_samples];
    for (i, yi) in y.iter_mut().enumerate() {
        let p = sigmoid(logits[i]);
        *yi = if rng.next_f64() < p { 1.0 } else { 0.0 };
    }
    Ok((a, y))
}

/// Materialize an instance from its descriptor.
///
/// Draw order from the seed is fixed: constraint matrix, ground truth
/// support, then objective data.
pub fn gen_instance(spec: &InstanceSpec) -> Result<GeneratedInstance> {
    spec.validate()?;
    let mut rng = Rng::seed_from(spec.seed);

    let (mut constraint, decomposition) =
        gen_constraint(spec.n, spec.c, spec.r, spec.sigma1, spec.sigmar, &mut rng)?;

    let nnz = ((0.05 * spec.n as f64).round() as usize).max(1).min(spec.n);
    let mut x_bar = Vector::zeros(spec.n);
    for idx in rng.sample_indices(spec.n, nnz) {
        x_bar[idx] = 1.0;
    }
    constraint.q = constraint.e.matvec(&x_bar)?;

    let kind = match spec.kind {
        ObjectiveClass::Logistic => {
            let (a, y) = gen_logistic_data(spec.n, spec.n, spec.m, spec.l, &mut rng)?;
            ObjectiveKind::Logistic { a, y }
        }
        ObjectiveClass::Quadratic => {
            // Eigenbasis shared with E's right singular basis, curvatures
            // anti-monotone across the constraint spectrum (L paired with
            // the smallest nonzero sigma). This realizes the worst-case
            // curvature/spectrum pairing the rate formula prices, so the
            // quadratic family exercises the certified rate rather than a
            // lucky faster one. Null-space directions sweep [m, L] too.
            let mut eigs = vec![0.0; spec.n];
            let range_part = {
                let mut v = log_spaced_desc(spec.l, spec.m, spec.r);
                v.reverse(); // ascending: sigma_1 direction gets m, sigma_r gets L
                v
            };
            eigs[..spec.r].copy_from_slice(&range_part);
            if spec.n > spec.r {
                let null_part = log_spaced_desc(spec.l, spec.m, spec.n - spec.r);
                eigs[spec.r..].copy_from_slice(&null_part);
            }
            let basis = &decomposition.v;
            let mut q = Matrix::zeros(spec.n, spec.n);
            for (k, &lam) in eigs.iter().enumerate() {
                for i in 0..spec.n {
                    let uik = basis.get(i, k) * lam;
                    for j in 0..=i {
                        q.set(i, j, q.get(i, j) + uik * basis.get(j, k));
                    }
                }
            }
            // Symmetrize exactly.
            for i in 0..spec.n {
                for j in (i + 1)..spec.n {
                    q.set(i, j, q.get(j, i));
                }
            }
            let b = Vector::from_fn(spec.n, |_| rng.next_gaussian());
            ObjectiveKind::Quadratic { q, b }
        }
        ObjectiveClass::SmoothL1 => ObjectiveKind::SmoothL1 { n: spec.n },
    };

    Ok(GeneratedInstance {
        spec: spec.clone(),
        objective: Objective { kind, m: spec.m, l: spec.l },
        constraint,
        x_bar,
        seed: spec.seed,
        decomposition,
    })
}

/// Result of a randomized sector-bound probe of the gradient map.
#[derive(Debug, Clone, Serialize)]
pub struct SectorReport {
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub pairs_tested: usize,
    pub pass: bool,
}

/// Sample difference quotients `<grad f(x) - grad f(u), x - u> / ||x - u||^2`
/// and check they stay within `[m - 1e-9, L + 1e-9]`.
pub fn sector_check(obj: &Objective, trials: usize, seed: u64) -> Result<SectorReport> {
    let n = obj.dim();
    let mut rng = Rng::seed_from(seed);
    let mut min_ratio = f64::INFINITY;
    let mut max_ratio = f64::NEG_INFINITY;
    let mut tested = 0;
    for _ in 0..trials {
        let scale = 10f64.powf(-1.0 + 3.0 * rng.next_f64());
        let x = Vector::from_fn(n, |_| scale * rng.next_gaussian());
        let u = Vector::from_fn(n, |_| scale * rng.next_gaussian());
        let d = x.sub(&u);
        let dn2 = d.dot(&d);
        if dn2 < 1e-24 {
            continue; // degenerate pair
        }
        let gx = obj.gradient(&x)?;
        let gu = obj.gradient(&u)?;
        let ratio = gx.sub(&gu).dot(&d) / dn2;
        min_ratio = min_ratio.min(ratio);
        max_ratio = max_ratio.max(ratio);
        tested += 1;
    }
    let pass = tested > 0 && min_ratio >= obj.m - 1e-9 && max_ratio <= obj.l + 1e-9;
    Ok(SectorReport { min_ratio, max_ratio, pairs_tested: tested, pass })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_gradient(obj: &Objective, x: &Vector, h: f64) -> Vector {
        Vector::from_fn(x.len(), |i| {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let (fp, _) = obj.value_grad(&xp).unwrap();
            let (fm, _) = obj.value_grad(&xm).unwrap();
            (fp - fm) / (2.0 * h)
        })
    }

    #[test]
    fn smoothl1_value_grad_at_zero() {
        let obj = Objective { kind: ObjectiveKind::SmoothL1 { n: 1 }, m: 1.0, l: 2.0 };
        let (v, g) = obj.value_grad(&Vector::zeros(1)).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert_eq!(g[0], 0.0);
    }

    #[test]
    fn quadratic_identity_value() {
        let obj = Objective {
            kind: ObjectiveKind::Quadratic { q: Matrix::identity(2), b: Vector::zeros(2) },
            m: 1.0,
            l: 1.0,
        };
        let (v, g) = obj.value_grad(&Vector::new(vec![3.0, 4.0])).unwrap();
        assert!((v - 12.5).abs() < 1e-14);
        assert_eq!(g.as_slice(), &[3.0, 4.0]);
    }

    #[test]
    fn logistic_gradient_matches_finite_differences() {
        let spec = InstanceSpec {
            kind: ObjectiveClass::Logistic,
            n: 12,
            c: 5,
            r: 4,
            m: 0.5,
            l: 3.0,
            sigma1: 4.0,
            sigmar: 0.25,
            seed: 77,
        };
        let inst = gen_instance(&spec).unwrap();
        let mut rng = Rng::seed_from(5);
        for _ in 0..20 {
            let x = Vector::from_fn(12, |_| rng.next_gaussian());
            let g = inst.objective.gradient(&x).unwrap();
            let fd = fd_gradient(&inst.objective, &x, 1e-6);
            let err = g.sub(&fd).norm() / g.norm().max(1.0);
            assert!(err < 1e-6, "gradient error {err}");
        }
    }

    #[test]
    fn curvature_endpoints() {
        assert!((smoothl1_curvature(1.0, 2.0, 0.0).unwrap() - 2.0).abs() < 1e-12);
        let far = smoothl1_curvature(1.0, 2.0, 1e6).unwrap();
        assert!((far - 1.0).abs() < 1e-9);
        // Even function.
        let a = smoothl1_curvature(1.0, 1.5, 0.37).unwrap();
        let b = smoothl1_curvature(1.0, 1.5, -0.37).unwrap();
        assert_eq!(a, b);
        assert!(smoothl1_curvature(2.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn constraint_spectrum_endpoints() {
        let mut rng = Rng::seed_from(404);
        let (con, dec) = gen_constraint(50, 20, 10, 100.0, 0.01, &mut rng).unwrap();
        // Eigenvalues of E'E are squared singular values of E.
        let fresh = svd(&con.e).unwrap();
        let evs: Vec<f64> = fresh.s.iter().map(|s| s * s).collect();
        assert!((evs[0] - 100.0).abs() / 100.0 < 1e-8);
        assert!((evs[9] - 0.01).abs() / 0.01 < 1e-8);
        let thresh = 1e-10 * 100.0_f64.sqrt();
        assert_eq!(fresh.s.iter().filter(|&&s| s > thresh).count(), 10);
        for &ev in &evs[..10] {
            assert!(ev >= 0.01 * (1.0 - 1e-8) && ev <= 100.0 * (1.0 + 1e-8));
        }
        // Stored decomposition reproduces E.
        let rec = dec.reconstruct();
        let mut diff = 0.0_f64;
        for i in 0..20 {
            for j in 0..50 {
                diff += (rec.get(i, j) - con.e.get(i, j)).powi(2);
            }
        }
        assert!(diff.sqrt() <= 1e-10 * con.e.frobenius_norm());
    }

    #[test]
    fn constraint_rank_one() {
        let mut rng = Rng::seed_from(2);
        let (con, _) = gen_constraint(6, 3, 1, 4.0, 4.0, &mut rng).unwrap();
        let fresh = svd(&con.e).unwrap();
        assert!((fresh.s[0] * fresh.s[0] - 4.0).abs() < 1e-10);
        assert!(fresh.s[1] < 1e-12);
        assert!(gen_constraint(6, 3, 1, 4.0, 1.0, &mut rng).is_err());
    }

    #[test]
    fn orthogonal_when_square_full_rank_unit() {
        let mut rng = Rng::seed_from(8);
        let (con, _) = gen_constraint(5, 5, 5, 1.0, 1.0, &mut rng).unwrap();
        let w = con.e.transpose().mat_mul(&con.e);
        for i in 0..5 {
            for j in 0..5 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((w.get(i, j) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn instance_ground_truth_consistency() {
        let spec = InstanceSpec {
            kind: ObjectiveClass::SmoothL1,
            n: 20,
            c: 8,
            r: 5,
            m: 0.1,
            l: 10.0,
            sigma1: 10.0,
            sigmar: 0.1,
            seed: 99,
        };
        let inst = gen_instance(&spec).unwrap();
        let nnz = inst.x_bar.iter().filter(|&&v| v != 0.0).count();
        assert_eq!(nnz, 1); // max(1, round(0.05 * 20))
        let q = inst.constraint.e.matvec(&inst.x_bar).unwrap();
        assert_eq!(q.as_slice(), inst.constraint.q.as_slice());
    }

    #[test]
    fn nnz_matches_five_percent() {
        for (n, expect) in [(1000usize, 50usize), (20, 1), (200, 10)] {
            let nnz = ((0.05 * n as f64).round() as usize).max(1);
            assert_eq!(nnz, expect);
        }
    }

    #[test]
    fn logistic_scaling_hits_declared_l() {
        let mut rng = Rng::seed_from(31);
        let (a, y) = gen_logistic_data(40, 30, 0.5, 4.0, &mut rng).unwrap();
        assert_eq!(y.len(), 40);
        let lambda = power_iteration_sym(
            |v| a.matvec_t(&a.matvec(v).unwrap()).unwrap(),
            30,
            200_000,
            1e-12,
        )
        .unwrap();
        let attained = 0.5 + lambda / 4.0;
        assert!((attained - 4.0).abs() / 4.0 < 1e-8, "L attained {attained}");
        assert!(y.iter().all(|&v| v == 0.0 || v == 1.0));
    }

    #[test]
    fn logistic_empty_data_is_pure_ridge() {
        let obj = Objective {
            kind: ObjectiveKind::Logistic { a: Matrix::zeros(0, 3), y: vec![] },
            m: 2.0,
            l: 2.0,
        };
        let x = Vector::new(vec![1.0, -1.0, 0.5]);
        let (v, g) = obj.value_grad(&x).unwrap();
        assert!((v - 2.25).abs() < 1e-14);
        assert_eq!(g.as_slice(), &[2.0, -2.0, 1.0]);
    }

    #[test]
    fn sector_bounds_on_diag_quadratic() {
        let q = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 5.0]]);
        let obj = Objective {
            kind: ObjectiveKind::Quadratic { q, b: Vector::zeros(2) },
            m: 1.0,
            l: 5.0,
        };
        let rep = sector_check(&obj, 2000, 11).unwrap();
        assert!(rep.pass, "sector report {rep:?}");
        assert!(rep.min_ratio >= 1.0 - 1e-9);
        assert!(rep.max_ratio <= 5.0 + 1e-9);
        // Axis-aligned pairs attain both endpoints.
        let e1 = Vector::new(vec![1.0, 0.0]);
        let e2 = Vector::new(vec![0.0, 1.0]);
        let g1 = obj.gradient(&e1).unwrap();
        let g2 = obj.gradient(&e2).unwrap();
        assert!((g1.dot(&e1) - 1.0).abs() < 1e-14);
        assert!((g2.dot(&e2) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn instance_spec_json_roundtrip() {
        let spec = InstanceSpec {
            kind: ObjectiveClass::Logistic,
            n: 200,
            c: 50,
            r: 40,
            m: 0.1,
            l: 10.0,
            sigma1: 10.0,
            sigmar: 0.01,
            seed: 31415,
        };
        let text = spec.to_json_string();
        assert!(text.contains("\"L\""));
        assert!(text.contains("\"logistic\""));
        let back = InstanceSpec::from_json_str(&text).unwrap();
        assert_eq!(back, spec);
        // Same seed regenerates the same constraint matrix.
        let a = gen_instance(&spec).unwrap();
        let b = gen_instance(&back).unwrap();
        assert_eq!(a.constraint.e, b.constraint.e);
        assert_eq!(a.x_bar.as_slice(), b.x_bar.as_slice());
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = InstanceSpec {
            kind: ObjectiveClass::Quadratic,
            n: 10,
            c: 4,
            r: 5,
            m: 1.0,
            l: 2.0,
            sigma1: 1.0,
            sigmar: 0.5,
            seed: 0,
        };
        assert!(spec.validate().is_err()); // r > min(n, c)
        spec.r = 3;
        spec.m = -1.0;
        assert!(spec.validate().is_err());
        spec.m = 1.0;
        spec.sigmar = 0.0;
        assert!(spec.validate().is_err());
    }
}
