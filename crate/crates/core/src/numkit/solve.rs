//! Dense linear solve via LU with partial pivoting.

use super::{Matrix, Vector};
use crate::error::{Error, Result};

/// Solve `A x = b` for square `A`. Errors on dimension mismatch or a
/// (numerically) zero pivot.
pub fn lu_solve(a: &Matrix, b: &Vector) -> Result<Vector> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch {
            context: "lu_solve (square matrix)",
            expected: n,
            got: a.cols(),
        });
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            context: "lu_solve (rhs)",
            expected: n,
            got: b.len(),
        });
    }

    let mut lu: Vec<f64> = (0..n * n).map(|k| a.get(k / n, k % n)).collect();
    let mut x: Vec<f64> = b.as_slice().to_vec();
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for col in 0..n {
        // Partial pivot.
        let mut pivot_row = col;
        let mut pivot_val = lu[col * n + col].abs();
        for r in (col + 1)..n {
            let v = lu[r * n + col].abs();
            if v > pivot_val {
                pivot_val = v;
                pivot_row = r;
            }
        }
        if pivot_val <= f64::EPSILON * scale {
            return Err(Error::SingularMatrix { row: col });
        }
        if pivot_row != col {
            for k in 0..n {
                lu.swap(col * n + k, pivot_row * n + k);
            }
            x.swap(col, pivot_row);
        }
        let piv = lu[col * n + col];
        for r in (col + 1)..n {
            let factor = lu[r * n + col] / piv;
            lu[r * n + col] = factor;
            for k in (col + 1)..n {
                lu[r * n + k] -= factor * lu[col * n + k];
            }
            x[r] -= factor * x[col];
        }
    }

    // Back substitution.
    for col in (0..n).rev() {
        let mut acc = x[col];
        for k in (col + 1)..n {
            acc -= lu[col * n + k] * x[k];
        }
        x[col] = acc / lu[col * n + col];
    }
    Ok(Vector::new(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn solves_random_systems() {
        let mut rng = Rng::seed_from(7);
        for _ in 0..20 {
            let n = 1 + (rng.next_u64() % 15) as usize;
            let a = Matrix::from_fn(n, n, |i, j| {
                rng.next_gaussian() + if i == j { 4.0 } else { 0.0 }
            });
            let x_true = Vector::from_fn(n, |_| rng.next_gaussian());
            let b = a.matvec(&x_true).unwrap();
            let x = lu_solve(&a, &b).unwrap();
            let err = x.sub(&x_true).norm() / x_true.norm().max(1e-300);
            assert!(err < 1e-10, "solve error {err}");
        }
    }

    #[test]
    fn rejects_singular() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        let b = Vector::new(vec![1.0, 2.0]);
        assert!(lu_solve(&a, &b).is_err());
    }

    #[test]
    fn solves_indefinite_saddle_system() {
        // KKT-style block [[I, e], [e^T, 0]] is indefinite but nonsingular.
        let a = Matrix::from_rows(&[
            vec![1.0, 0.0, 1.0],
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0],
        ]);
        let b = Vector::new(vec![0.0, 0.0, 1.0]);
        let x = lu_solve(&a, &b).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14);
        assert!(x[1].abs() < 1e-14);
        assert!((x[2] + 1.0).abs() < 1e-14);
    }
}
