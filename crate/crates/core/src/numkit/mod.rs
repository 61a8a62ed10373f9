//! Minimal dense real/complex numerics used by the rest of the crate:
//! vectors, matrices, matrix-vector products, a small-matrix SVD, power
//! iteration, a partial-pivot LU solve and quadratic root finding.
//!
//! All scalars are `f64`. Dot products accumulate sequentially so results
//! are bit-reproducible for a fixed seed and build.

mod complex;
mod solve;
mod svd;

pub use complex::{quadratic_roots, ComplexScalar};
pub use solve::lu_solve;
pub use svd::{power_iteration_sym, svd, SvdResult};

use crate::error::{Error, Result};

/// Dense real vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(entries: Vec<f64>) -> Self {
        Vector(entries)
    }

    pub fn zeros(n: usize) -> Self {
        Vector(vec![0.0; n])
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> f64) -> Self {
        Vector((0..n).map(f).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    /// Sequential dot product (deterministic reduction order).
    pub fn dot(&self, other: &Vector) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        let mut acc = 0.0;
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            acc += a * b;
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|x| s * x).collect())
    }

    pub fn add(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.len(), other.len());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Vector) -> Vector {
        debug_assert_eq!(self.len(), other.len());
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: f64, other: &Vector) {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += s * b;
        }
    }

    pub fn scale_in_place(&mut self, s: f64) {
        for a in self.0.iter_mut() {
            *a *= s;
        }
    }

    pub fn all_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for Vector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

/// Dense row-major real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector::from_fn(self.rows, |i| self.get(i, j))
    }

    /// `M v`; errors when `v.len() != cols`.
    pub fn matvec(&self, v: &Vector) -> Result<Vector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "matvec",
                expected: self.cols,
                got: v.len(),
            });
        }
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let row = self.row(i);
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(v.as_slice()) {
                acc += a * b;
            }
            out[i] = acc;
        }
        Ok(Vector(out))
    }

    /// `M^T v` without forming the transpose; errors when `v.len() != rows`.
    pub fn matvec_t(&self, v: &Vector) -> Result<Vector> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch {
                context: "matvec_t",
                expected: self.rows,
                got: v.len(),
            });
        }
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let row = self.row(i);
            let vi = v[i];
            for (o, a) in out.iter_mut().zip(row) {
                *o += vi * a;
            }
        }
        Ok(Vector(out))
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn mat_mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "mat_mul shape");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        let mut acc = 0.0;
        for x in &self.data {
            acc += x * x;
        }
        acc.sqrt()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn matvec_identity() {
        let m = Matrix::identity(3);
        let v = Vector::new(vec![1.0, 2.0, 3.0]);
        assert_eq!(m.matvec(&v).unwrap().as_slice(), &[1.0, 2.0, 3.0]);
        assert_eq!(m.matvec_t(&v).unwrap().as_slice(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn matvec_hand_values() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]);
        let v = Vector::new(vec![1.0, 1.0]);
        assert_eq!(m.matvec(&v).unwrap().as_slice(), &[3.0, 7.0]);
        assert_eq!(m.matvec_t(&v).unwrap().as_slice(), &[4.0, 6.0]);
    }

    #[test]
    fn matvec_zero_matrix() {
        let m = Matrix::zeros(2, 2);
        let v = Vector::new(vec![5.0, 6.0]);
        assert_eq!(m.matvec(&v).unwrap().as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn matvec_t_row_vector() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0, 3.0]]);
        let v = Vector::new(vec![2.0]);
        assert_eq!(m.matvec_t(&v).unwrap().as_slice(), &[2.0, 4.0, 6.0]);
    }

    #[test]
    fn matvec_dimension_mismatch() {
        let m = Matrix::zeros(2, 3);
        let v = Vector::zeros(2);
        assert!(m.matvec(&v).is_err());
        let v = Vector::zeros(3);
        assert!(m.matvec_t(&v).is_err());
    }

    #[test]
    fn adjoint_identity() {
        // <M^T u, v> == <u, M v> for random inputs.
        let mut rng = Rng::seed_from(17);
        for _ in 0..50 {
            let rows = 1 + (rng.next_u64() % 12) as usize;
            let cols = 1 + (rng.next_u64() % 12) as usize;
            let m = Matrix::from_fn(rows, cols, |_, _| rng.next_gaussian());
            let u = Vector::from_fn(rows, |_| rng.next_gaussian());
            let v = Vector::from_fn(cols, |_| rng.next_gaussian());
            let lhs = m.matvec_t(&u).unwrap().dot(&v);
            let rhs = u.dot(&m.matvec(&v).unwrap());
            let scale = lhs.abs().max(rhs.abs()).max(1e-300);
            assert!(
                (lhs - rhs).abs() / scale <= 1e-12,
                "adjoint identity violated: {lhs} vs {rhs}"
            );
        }
    }
}
