//! Eigenvalues of small real matrices.
//!
//! Characteristic polynomial by the Faddeev-LeVerrier recursion, roots by
//! Durand-Kerner simultaneous iteration. Sized for the 4x4 flight-dynamics
//! plants (capped at 8x8); a QR pipeline would be overkill here.

use super::matrix::Matrix;
use crate::error::{Error, Result};
use num_complex::Complex64;

/// Largest matrix dimension the solver accepts.
pub const MAX_DIM: usize = 8;

const ROOT_TOL: f64 = 1e-12;
const MAX_ITERATIONS: usize = 500;

/// Eigenvalues of a real square matrix. This method produces values only.
#[derive(Clone, Debug)]
pub struct Eigen {
    pub values: Vec<Complex64>,
}

impl Eigen {
    pub fn max_real_part(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, z| m.max(z.re))
    }

    pub fn is_hurwitz(&self) -> bool {
        self.values.iter().all(|z| z.re < 0.0)
    }
}

/// Coefficients `c` of det(lambda*I - A) = lambda^n + c[0]*lambda^(n-1) + ... + c[n-1],
/// by the Faddeev-LeVerrier trace recursion.
fn characteristic_polynomial(a: &Matrix) -> Vec<f64> {
    let n = a.rows();
    let mut coeffs = Vec::with_capacity(n);
    let mut m = Matrix::zeros(n, n);
    let mut c = 1.0;
    for k in 1..=n {
        for i in 0..n {
            m[(i, i)] += c;
        }
        m = a * &m;
        let trace: f64 = (0..n).map(|i| m[(i, i)]).sum();
        c = -trace / k as f64;
        coeffs.push(c);
    }
    coeffs
}

fn poly_eval(coeffs: &[f64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for &c in coeffs {
        acc = acc * z + c;
    }
    acc
}

/// All roots of the monic polynomial with the given trailing coefficients.
fn durand_kerner(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let n = coeffs.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![Complex64::new(-coeffs[0], 0.0)]);
    }
    // Cauchy bound on root magnitude fixes the starting circle.
    let radius = 1.0 + coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32 + 1) * radius).collect();

    for iteration in 0..MAX_ITERATIONS {
        let mut max_step = 0.0_f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                // Coincident iterates; nudge apart and continue.
                roots[i] += Complex64::new(1e-8 * radius, 1e-8 * radius);
                max_step = f64::MAX;
                continue;
            }
            let step = poly_eval(coeffs, roots[i]) / denom;
            roots[i] -= step;
            let scale = roots[i].norm().max(1.0);
            max_step = max_step.max(step.norm() / scale);
        }
        if max_step <= ROOT_TOL {
            return Ok(roots);
        }
        if iteration == MAX_ITERATIONS - 1 {
            // Stalled step size can still mean converged residuals (clustered
            // roots converge linearly); accept if the polynomial is satisfied.
            let residual = roots
                .iter()
                .map(|&z| poly_eval(coeffs, z).norm())
                .fold(0.0_f64, f64::max);
            let scale = radius.powi(n as i32 - 1).max(1.0);
            if residual <= 1e-8 * scale {
                return Ok(roots);
            }
            return Err(Error::NonConvergence {
                op: "eigenvalues",
                iterations: MAX_ITERATIONS,
                residual,
            });
        }
    }
    unreachable!()
}

/// Enforce the conjugate-pair structure of roots of a real polynomial:
/// snap near-real roots onto the axis, then average matched pairs.
fn symmetrize_conjugates(roots: &mut [Complex64]) {
    let scale = roots.iter().fold(1.0_f64, |m, z| m.max(z.norm()));
    let snap = 1e-9 * scale;
    for z in roots.iter_mut() {
        if z.im.abs() <= snap {
            z.im = 0.0;
        }
    }
    let n = roots.len();
    let mut used = vec![false; n];
    for i in 0..n {
        if used[i] || roots[i].im <= 0.0 {
            continue;
        }
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if i == j || used[j] || roots[j].im >= 0.0 {
                continue;
            }
            let d = (roots[i] - roots[j].conj()).norm();
            if best.map_or(true, |(_, bd)| d < bd) {
                best = Some((j, d));
            }
        }
        if let Some((j, _)) = best {
            let avg = (roots[i] + roots[j].conj()) * 0.5;
            roots[i] = avg;
            roots[j] = avg.conj();
            used[i] = true;
            used[j] = true;
        }
    }
}

/// Eigenvalues of a real square matrix with n <= 8.
pub fn eigenvalues(a: &Matrix) -> Result<Eigen> {
    const OP: &str = "eigenvalues";
    if !a.is_square() {
        return Err(Error::NonSquare { op: OP, rows: a.rows(), cols: a.cols() });
    }
    if a.rows() > MAX_DIM {
        return Err(Error::TooLarge { op: OP, n: a.rows(), max: MAX_DIM });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite { op: OP });
    }
    let coeffs = characteristic_polynomial(a);
    let mut roots = durand_kerner(&coeffs)?;
    symmetrize_conjugates(&mut roots);
    roots.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap().then(x.im.partial_cmp(&y.im).unwrap()));
    Ok(Eigen { values: roots })
}
