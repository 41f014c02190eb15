//! Continuous Lyapunov equation `A' P + P A = -Q`.
//!
//! The n^2 x n^2 Kronecker vectorization is solved directly; exact and cheap
//! at the 4x4 scale every caller in this crate uses.

use super::eigen::eigenvalues;
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Eigenvalue floor used when checking that `q` is positive semi-definite.
const PSD_TOL: f64 = 1e-9;

pub(crate) fn check_symmetric_psd(q: &Matrix, op: &'static str) -> Result<()> {
    let scale = q.max_abs().max(1.0);
    if !q.is_symmetric(1e-9 * scale) {
        return Err(Error::NotPositiveDefinite { op, detail: "q is not symmetric".into() });
    }
    let eig = eigenvalues(q)?;
    let min_real = eig.values.iter().fold(f64::INFINITY, |m, z| m.min(z.re));
    if min_real < -PSD_TOL * scale {
        return Err(Error::NotPositiveDefinite {
            op,
            detail: format!("q has eigenvalue {min_real}"),
        });
    }
    Ok(())
}

/// Solve `a' P + P a = -q` for `a` Hurwitz and `q` symmetric PSD.
///
/// The solution is symmetric, and positive definite whenever `q` is.
pub fn solve_lyapunov(a: &Matrix, q: &Matrix) -> Result<Matrix> {
    const OP: &str = "solve_lyapunov";
    if !a.is_square() {
        return Err(Error::NonSquare { op: OP, rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    if q.rows() != n || q.cols() != n {
        return Err(Error::DimensionMismatch {
            op: OP,
            detail: format!("a is {n}x{n}, q is {}x{}", q.rows(), q.cols()),
        });
    }
    if !a.is_finite() || !q.is_finite() {
        return Err(Error::NonFinite { op: OP });
    }
    check_symmetric_psd(q, OP)?;
    let eig = eigenvalues(a)?;
    if !eig.is_hurwitz() {
        return Err(Error::NotHurwitz { op: OP, real_part: eig.max_real_part() });
    }

    // Row-major vec(P): equation (i,j) reads sum_k a_ki p_kj + sum_l a_lj p_il = -q_ij.
    let mut system = Matrix::zeros(n * n, n * n);
    let mut rhs = Matrix::zeros(n * n, 1);
    for i in 0..n {
        for j in 0..n {
            let eq = i * n + j;
            for k in 0..n {
                system[(eq, k * n + j)] += a[(k, i)];
                system[(eq, i * n + k)] += a[(k, j)];
            }
            rhs[(eq, 0)] = -q[(i, j)];
        }
    }
    let x = system.solve(&rhs)?;
    let mut p = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            p[(i, j)] = x[(i * n + j, 0)];
        }
    }
    Ok(p)
}

/// Frobenius norm of `a' P + P a + q`.
pub fn lyapunov_residual(a: &Matrix, p: &Matrix, q: &Matrix) -> f64 {
    let at_p = &a.transpose() * p;
    let pa = p * a;
    (&(&at_p + &pa) + q).frobenius_norm()
}
