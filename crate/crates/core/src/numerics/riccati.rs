//! Continuous algebraic Riccati equation by Kleinman-Newton iteration.
//!
//! Each Newton step is one Lyapunov solve on the current closed loop. The
//! initial stabilizing gain comes from a pole-shifted Lyapunov equation
//! (Bass construction), so no Hamiltonian/Schur machinery is needed.

use super::eigen::eigenvalues;
use super::lyapunov::{check_symmetric_psd, solve_lyapunov};
use super::matrix::Matrix;
use crate::error::{Error, Result};

const MAX_NEWTON_ITERATIONS: usize = 100;
const TARGET_RESIDUAL: f64 = 1e-10;
/// Contract bound on the relative Riccati residual of an accepted solution.
const ACCEPT_RESIDUAL: f64 = 1e-8;

/// Frobenius norm of `A'P + PA - P B R^-1 B' P + Q`.
pub fn care_residual(a: &Matrix, b: &Matrix, q: &Matrix, r: &Matrix, p: &Matrix) -> f64 {
    let r_inv_bt = r.solve(&b.transpose()).expect("r invertible");
    let pb = p * b;
    let quad = &(&pb * &r_inv_bt) * p;
    let at_p = &a.transpose() * p;
    let pa = p * a;
    (&(&(&at_p + &pa) - &quad) + q).frobenius_norm()
}

/// Stabilizing gain for (A, B) via the shifted Lyapunov equation
/// `(beta I + A) X + X (beta I + A)' = 2 B B'`, K0 = B' X^-1.
fn initial_stabilizing_gain(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    let eig = eigenvalues(a)?;
    if eig.is_hurwitz() {
        return Ok(Matrix::zeros(b.cols(), n));
    }
    let beta = 1.0 + eig.values.iter().fold(0.0_f64, |m, z| m.max(z.re.abs()));
    // shifted = -(beta I + A) is Hurwitz by construction
    let mut shifted = a.scale(-1.0);
    for i in 0..n {
        shifted[(i, i)] -= beta;
    }
    let bbt = &(b * &b.transpose()).scale(2.0);
    let x = solve_lyapunov(&shifted.transpose(), bbt)?;
    let k0 = match x.inverse() {
        Ok(x_inv) => &b.transpose() * &x_inv,
        Err(_) => {
            return Err(Error::NotStabilizable {
                detail: "shifted controllability Gramian is singular".into(),
            })
        }
    };
    let cl = &a.scale(1.0) - &(b * &k0);
    if !eigenvalues(&cl)?.is_hurwitz() {
        return Err(Error::NotStabilizable {
            detail: "pole-shift initialization failed to stabilize".into(),
        });
    }
    Ok(k0)
}

/// Solve `A'P + PA - P B R^-1 B' P + Q = 0` for the stabilizing `P`,
/// returning `(P, K)` with `K = R^-1 B' P` and `A - B K` Hurwitz.
pub fn solve_care(a: &Matrix, b: &Matrix, q: &Matrix, r: &Matrix) -> Result<(Matrix, Matrix)> {
    const OP: &str = "solve_care";
    if !a.is_square() {
        return Err(Error::NonSquare { op: OP, rows: a.rows(), cols: a.cols() });
    }
    let n = a.rows();
    let m = b.cols();
    if b.rows() != n || q.rows() != n || q.cols() != n || r.rows() != m || r.cols() != m {
        return Err(Error::DimensionMismatch {
            op: OP,
            detail: format!(
                "a {n}x{n}, b {}x{}, q {}x{}, r {}x{}",
                b.rows(), b.cols(), q.rows(), q.cols(), r.rows(), r.cols()
            ),
        });
    }
    if !(a.is_finite() && b.is_finite() && q.is_finite() && r.is_finite()) {
        return Err(Error::NonFinite { op: OP });
    }
    check_symmetric_psd(q, OP)?;
    check_symmetric_psd(r, OP)?;
    if r.solve(&Matrix::identity(m)).is_err() {
        return Err(Error::NotPositiveDefinite { op: OP, detail: "r is singular".into() });
    }

    let mut k = initial_stabilizing_gain(a, b)?;
    let q_scale = q.frobenius_norm().max(1.0);
    let mut best: Option<(Matrix, Matrix, f64)> = None;
    for _ in 0..MAX_NEWTON_ITERATIONS {
        let a_cl = &a.scale(1.0) - &(b * &k);
        let ktrk = &(&k.transpose() * r) * &k;
        let q_eff = q + &ktrk;
        // Kleinman iterate: symmetric PSD by construction, skip the recheck.
        let p = {
            let eig = eigenvalues(&a_cl)?;
            if !eig.is_hurwitz() {
                return Err(Error::NotStabilizable {
                    detail: "Newton iterate lost stability".into(),
                });
            }
            solve_lyapunov_unchecked(&a_cl, &q_eff)?
        };
        k = r.solve(&(&b.transpose() * &p))?;
        let residual = care_residual(a, b, q, r, &p);
        if best.as_ref().map_or(true, |(_, _, br)| residual < *br) {
            best = Some((p, k.clone(), residual));
        }
        if residual <= TARGET_RESIDUAL * q_scale {
            break;
        }
    }
    let (p, k, residual) = best.expect("at least one Newton iterate");
    if residual > ACCEPT_RESIDUAL * q_scale {
        return Err(Error::NonConvergence {
            op: OP,
            iterations: MAX_NEWTON_ITERATIONS,
            residual,
        });
    }
    let cl = &a.scale(1.0) - &(b * &k);
    if !eigenvalues(&cl)?.is_hurwitz() {
        return Err(Error::NotStabilizable { detail: "converged gain is not stabilizing".into() });
    }
    Ok((p, k))
}

/// Lyapunov solve without the symmetry/PSD validation of the public entry
/// point; the Kleinman loop builds `q` as `Q + K'RK`, PSD by construction.
fn solve_lyapunov_unchecked(a_cl: &Matrix, q: &Matrix) -> Result<Matrix> {
    let n = a_cl.rows();
    let mut system = Matrix::zeros(n * n, n * n);
    let mut rhs = Matrix::zeros(n * n, 1);
    for i in 0..n {
        for j in 0..n {
            let eq = i * n + j;
            for k in 0..n {
                system[(eq, k * n + j)] += a_cl[(k, i)];
                system[(eq, i * n + k)] += a_cl[(k, j)];
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

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_analytic_case() {
        // a=0, b=1, q=1, r=1: p^2 = 1 -> p = 1, k = 1.
        let a = Matrix::from_row_slice(1, 1, &[0.0]);
        let b = Matrix::from_row_slice(1, 1, &[1.0]);
        let q = Matrix::identity(1);
        let r = Matrix::identity(1);
        let (p, k) = solve_care(&a, &b, &q, &r).unwrap();
        assert!((p[(0, 0)] - 1.0).abs() < 1e-10);
        assert!((k[(0, 0)] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn stable_plant_stays_stable() {
        let a = Matrix::from_rows(&[
            [-1.0, 0.2, 0.0, 0.0],
            [0.0, -2.0, 0.4, 0.0],
            [0.3, 0.0, -1.5, 0.1],
            [0.0, 0.2, 0.0, -0.7],
        ]);
        let b = Matrix::identity(4);
        let (p, k) = solve_care(&a, &b, &Matrix::identity(4), &Matrix::identity(4)).unwrap();
        assert!(care_residual(&a, &b, &Matrix::identity(4), &Matrix::identity(4), &p) < 1e-8);
        let cl = &a - &(&b * &k);
        assert!(eigenvalues(&cl).unwrap().is_hurwitz());
    }

    #[test]
    fn singular_r_rejected() {
        let a = Matrix::from_row_slice(1, 1, &[0.0]);
        let b = Matrix::from_row_slice(1, 1, &[1.0]);
        let q = Matrix::identity(1);
        let r = Matrix::from_row_slice(1, 1, &[0.0]);
        assert!(matches!(
            solve_care(&a, &b, &q, &r),
            Err(Error::NotPositiveDefinite { .. }) | Err(Error::SingularSystem { .. })
        ));
    }

    #[test]
    fn unstabilizable_pair_rejected() {
        // Unstable mode with zero input authority.
        let a = Matrix::diagonal(&[1.0, -1.0]);
        let b = Matrix::from_row_slice(2, 1, &[0.0, 1.0]);
        let q = Matrix::identity(2);
        let r = Matrix::identity(1);
        assert!(solve_care(&a, &b, &q, &r).is_err());
    }
}
