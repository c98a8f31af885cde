//! Minimal dense matrix support.
//!
//! The crate needs just enough linear algebra for the low-rank adjacency
//! predictors and the neural layers: a row-major matrix, a symmetric
//! eigensolver, and orthonormalization for subspace iteration.

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mat<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

impl<F: Real> Mat<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![F::zero(); rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<F>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> F {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: F) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[F] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [F] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn data(&self) -> &[F] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [F] {
        &mut self.data
    }

    /// `self * other`
    pub fn matmul(&self, other: &Mat<F>) -> Mat<F> {
        assert_eq!(self.cols, other.rows);
        let mut out = Mat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == F::zero() {
                    continue;
                }
                let orow = other.row(k);
                let out_row = out.row_mut(i);
                for (o, &b) in out_row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// `self^T * other`
    pub fn transpose_matmul(&self, other: &Mat<F>) -> Mat<F> {
        assert_eq!(self.rows, other.rows);
        let mut out = Mat::zeros(self.cols, other.cols);
        for r in 0..self.rows {
            for i in 0..self.cols {
                let a = self.get(r, i);
                if a == F::zero() {
                    continue;
                }
                let orow = other.row(r);
                let out_row = out.row_mut(i);
                for (o, &b) in out_row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat<F> {
        let mut out = Mat::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    pub fn scale(&mut self, s: F) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    pub fn frobenius_norm(&self) -> F {
        self.data
            .iter()
            .map(|&v| v * v)
            .sum::<F>()
            .sqrt()
    }
}

/// Eigendecomposition of a symmetric matrix by the cyclic Jacobi method.
///
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors as columns, sorted
/// by decreasing eigenvalue magnitude (the order used for singular triplets
/// of a symmetric matrix).
pub fn symmetric_eigen<F: Real>(a: &Mat<F>) -> (Vec<F>, Mat<F>) {
    assert_eq!(a.rows(), a.cols());
    let n = a.rows();
    let mut m = a.clone();
    let mut v = Mat::zeros(n, n);
    for i in 0..n {
        v.set(i, i, F::one());
    }

    let eps = F::of_f64(1e-14);
    for _sweep in 0..100 {
        let mut off = F::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off += m.get(p, q) * m.get(p, q);
            }
        }
        if off.sqrt() <= eps * (F::one() + m.frobenius_norm()) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq == F::zero() {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (F::of_f64(2.0) * apq);
                // tan of the rotation angle, numerically stable form
                let t = {
                    let s = if theta >= F::zero() { F::one() } else { -F::one() };
                    s / (theta.abs() + (theta * theta + F::one()).sqrt())
                };
                let c = F::one() / (t * t + F::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<F> = (0..n).map(|i| m.get(i, i)).collect();
    order.sort_by(|&i, &j| {
        diag[j]
            .abs()
            .partial_cmp(&diag[i].abs())
            .unwrap()
            .then(i.cmp(&j))
    });
    let values: Vec<F> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (new_c, &old_c) in order.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, new_c, v.get(r, old_c));
        }
    }
    (values, vectors)
}

/// Orthonormalize the columns of `m` in place (modified Gram-Schmidt).
///
/// A column whose residual shrinks below `1e-9` of its original norm is
/// numerically dependent on earlier columns and is zeroed rather than
/// normalized, so the produced basis is a stable function of the input.
pub fn orthonormalize_columns<F: Real>(m: &mut Mat<F>) {
    let (rows, cols) = (m.rows(), m.cols());
    for c in 0..cols {
        let mut original = F::zero();
        for r in 0..rows {
            original += m.get(r, c) * m.get(r, c);
        }
        let original = original.sqrt();
        for prev in 0..c {
            let mut dot = F::zero();
            for r in 0..rows {
                dot += m.get(r, c) * m.get(r, prev);
            }
            for r in 0..rows {
                let v = m.get(r, c) - dot * m.get(r, prev);
                m.set(r, c, v);
            }
        }
        let mut norm = F::zero();
        for r in 0..rows {
            norm += m.get(r, c) * m.get(r, c);
        }
        let norm = norm.sqrt();
        if norm > F::of_f64(1e-9) * original.max(F::of_f64(1e-300)) {
            for r in 0..rows {
                let v = m.get(r, c) / norm;
                m.set(r, c, v);
            }
        } else {
            for r in 0..rows {
                m.set(r, c, F::zero());
            }
        }
    }
}
