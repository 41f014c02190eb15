//! Small dense row-major matrix type with the handful of operations the
//! control solvers need. Not a general linear algebra library.

use crate::error::{Error, Result};
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Build from a row-major slice; `data.len()` must equal `rows * cols`.
    pub fn from_row_slice(rows: usize, cols: usize, data: &[f64]) -> Self {
        assert_eq!(rows * cols, data.len(), "row-major data length mismatch");
        Self { rows, cols, data: data.to_vec() }
    }

    pub fn from_rows<const C: usize>(rows: &[[f64; C]]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * C);
        for r in rows {
            data.extend_from_slice(r);
        }
        Self { rows: rows.len(), cols: C, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if (self[(i, j)] - self[(j, i)]).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Solve `self * X = rhs` by LU factorization with partial pivoting.
    pub fn solve(&self, rhs: &Matrix) -> Result<Matrix> {
        const OP: &str = "linear solve";
        if !self.is_square() {
            return Err(Error::NonSquare { op: OP, rows: self.rows, cols: self.cols });
        }
        if rhs.rows != self.rows {
            return Err(Error::DimensionMismatch {
                op: OP,
                detail: format!("lhs is {}x{}, rhs has {} rows", self.rows, self.cols, rhs.rows),
            });
        }
        let n = self.rows;
        let mut lu = self.clone();
        let mut x = rhs.clone();
        for col in 0..n {
            let (pivot_row, pivot_val) = (col..n)
                .map(|r| (r, lu[(r, col)].abs()))
                .fold((col, 0.0), |best, cand| if cand.1 > best.1 { cand } else { best });
            if pivot_val == 0.0 || !pivot_val.is_finite() {
                return Err(Error::SingularSystem { op: OP });
            }
            if pivot_row != col {
                for j in 0..n {
                    lu.data.swap(pivot_row * n + j, col * n + j);
                }
                for j in 0..x.cols {
                    x.data.swap(pivot_row * x.cols + j, col * x.cols + j);
                }
            }
            for r in (col + 1)..n {
                let f = lu[(r, col)] / lu[(col, col)];
                lu[(r, col)] = 0.0;
                if f != 0.0 {
                    for j in (col + 1)..n {
                        lu[(r, j)] -= f * lu[(col, j)];
                    }
                    for j in 0..x.cols {
                        x[(r, j)] -= f * x[(col, j)];
                    }
                }
            }
        }
        for col in (0..n).rev() {
            for j in 0..x.cols {
                let mut acc = x[(col, j)];
                for k in (col + 1)..n {
                    acc -= lu[(col, k)] * x[(k, j)];
                }
                x[(col, j)] = acc / lu[(col, col)];
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        self.solve(&Matrix::identity(self.rows))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_recovers_known_solution() {
        let a = Matrix::from_rows(&[[4.0, 1.0, 0.0], [1.0, 3.0, -1.0], [0.0, -1.0, 2.0]]);
        let x_true = Matrix::from_row_slice(3, 1, &[1.0, -2.0, 0.5]);
        let b = &a * &x_true;
        let x = a.solve(&b).unwrap();
        for i in 0..3 {
            assert!((x[(i, 0)] - x_true[(i, 0)]).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_matrix_rejected() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0]]);
        let b = Matrix::from_row_slice(2, 1, &[1.0, 0.0]);
        assert!(matches!(a.solve(&b), Err(Error::SingularSystem { .. })));
    }

    #[test]
    fn inverse_times_self_is_identity() {
        let a = Matrix::from_rows(&[[2.0, 1.0], [1.0, 3.0]]);
        let prod = &a * &a.inverse().unwrap();
        assert!((&prod - &Matrix::identity(2)).max_abs() < 1e-14);
    }
}
