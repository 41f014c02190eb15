//! LQR synthesis of the model-reference plant and the Lyapunov-based
//! adaptive feedback law.
//!
//! The adaptation law is
//!
//! ```text
//! L_dot = (B' N B)^-1 B' P e y_d'
//! ```
//!
//! with `e = y_d - y_m`, `P` solving `A_m' P + P A_m = -C'C`, and `N` a
//! positive-definite weighting. Along trajectories of the unlimited loop the
//! function `V = e'Pe + Tr[(A_d - B L - A_m)' N (A_d - B L - A_m)]` is
//! non-increasing, which is what the property tests pin down.

use crate::aircraft::StateSpaceModel;
use crate::error::{Error, Result};
use crate::numerics::{eigenvalues, solve_care, solve_lyapunov, Matrix};

/// State and control weights used for the shipped 747 design:
/// `Q = 1e5 diag(1, 2, 0.1, 1)`, `R = 1e3 I`.
pub fn canonical_lqr_weights() -> (Matrix, Matrix) {
    (
        Matrix::diagonal(&[1e5, 2e5, 1e4, 1e5]),
        Matrix::diagonal(&[1e3, 1e3]),
    )
}

/// Scalar weight on the gain-error term of the adaptation metric; the shipped
/// `N` is this times the identity. The weighting is a free design parameter
/// and sets the adaptation speed inversely: identity-scale `N` adapts far too
/// slowly to catch the open-loop divergence of the damaged plant.
pub const ADAPTATION_WEIGHT: f64 = 1e-7;

/// An LQR design for the damaged plant together with the model-reference
/// dynamics it induces.
#[derive(Clone, Debug)]
pub struct LqrDesign {
    pub q: Matrix,
    pub r: Matrix,
    pub k: Matrix,
    pub a_m: Matrix,
    /// Stabilizing Riccati solution behind `k`.
    pub riccati: Matrix,
}

/// Solve the LQR problem for the plant and assemble `A_m = A - B K`,
/// verified Hurwitz.
pub fn design_lqr(plant: &StateSpaceModel, q: &Matrix, r: &Matrix) -> Result<LqrDesign> {
    let (riccati, k) = solve_care(&plant.a, &plant.b, q, r)?;
    let a_m = &plant.a - &(&plant.b * &k);
    let eig = eigenvalues(&a_m)?;
    if !eig.is_hurwitz() {
        return Err(Error::NotHurwitz { op: "design_lqr", real_part: eig.max_real_part() });
    }
    Ok(LqrDesign { q: q.clone(), r: r.clone(), k, a_m, riccati })
}

/// The adaptive feedback matrix `L`, evolved online.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptiveGain {
    pub l: Matrix,
}

impl AdaptiveGain {
    pub fn zero(inputs: usize, states: usize) -> Self {
        Self { l: Matrix::zeros(inputs, states) }
    }
}

/// Fixed data of the adaptation law.
#[derive(Clone, Debug)]
pub struct MracConfig {
    /// Gain-error weighting `N` (positive definite).
    pub n_weight: Matrix,
    /// Solution of `A_m' P + P A_m = -q_lyap`.
    pub p: Matrix,
    /// `C'C`; identity for these plants.
    pub q_lyap: Matrix,
    pub l_initial: Matrix,
}

impl MracConfig {
    /// Standard configuration for a design: `q_lyap = C'C = I`, `P` from the
    /// model-plant Lyapunov equation, `N = ADAPTATION_WEIGHT * I`, `L(0) = 0`.
    pub fn for_design(design: &LqrDesign) -> Result<Self> {
        let n = design.a_m.rows();
        let q_lyap = Matrix::identity(n);
        let p = solve_lyapunov(&design.a_m, &q_lyap)?;
        Ok(Self {
            n_weight: Matrix::identity(n).scale(ADAPTATION_WEIGHT),
            p,
            q_lyap,
            l_initial: Matrix::zeros(design.k.rows(), n),
        })
    }

    /// Same configuration but starting from a matched gain (`L(0) = K`), so
    /// the damaged closed loop begins identical to the model plant.
    pub fn matched(design: &LqrDesign) -> Result<Self> {
        let mut cfg = Self::for_design(design)?;
        cfg.l_initial = design.k.clone();
        Ok(cfg)
    }
}

/// Precompute `(B' N B)^-1 B' P`, the constant factor of the adaptation law.
pub fn adaptation_gain_matrix(cfg: &MracConfig, b: &Matrix) -> Result<Matrix> {
    let bt_n_b = &(&b.transpose() * &cfg.n_weight) * b;
    let bt_p = &b.transpose() * &cfg.p;
    bt_n_b.solve(&bt_p).map_err(|_| Error::Precondition {
        op: "adaptation_gain_matrix",
        detail: "B'NB is singular (input matrix not full column rank)".into(),
    })
}

/// `L_dot = (B'NB)^-1 B' P e y_d'` for the current tracking error and
/// damaged-plant output.
pub fn adaptation_rate(
    error: &[f64; 4],
    y_d: &[f64; 4],
    cfg: &MracConfig,
    b: &Matrix,
) -> Result<Matrix> {
    let gain = adaptation_gain_matrix(cfg, b)?;
    let ge = gain.mul_vec(error);
    let mut rate = Matrix::zeros(gain.rows(), 4);
    for i in 0..gain.rows() {
        for j in 0..4 {
            rate[(i, j)] = ge[i] * y_d[j];
        }
    }
    Ok(rate)
}

/// `u = u_c - L y_d`.
pub fn control_law(u_c: [f64; 2], gain: &AdaptiveGain, y_d: &[f64; 4]) -> [f64; 2] {
    let feedback = gain.l.mul_vec(y_d);
    [u_c[0] - feedback[0], u_c[1] - feedback[1]]
}

/// The adaptive-loop Lyapunov function
/// `V = e' P e + Tr[(A_d - B L - A_m)' N (A_d - B L - A_m)]`.
pub fn lyapunov_value(
    error: &[f64; 4],
    l: &Matrix,
    a_d: &Matrix,
    b: &Matrix,
    a_m: &Matrix,
    cfg: &MracConfig,
) -> f64 {
    let pe = cfg.p.mul_vec(error);
    let quad: f64 = error.iter().zip(&pe).map(|(a, b)| a * b).sum();
    let mismatch = &(a_d - &(b * l)) - a_m;
    let weighted = &(&mismatch.transpose() * &cfg.n_weight) * &mismatch;
    let trace: f64 = (0..weighted.rows()).map(|i| weighted[(i, i)]).sum();
    quad + trace
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aircraft::canonical_models;

    fn design() -> LqrDesign {
        let (_, damaged) = canonical_models();
        let (q, r) = canonical_lqr_weights();
        design_lqr(&damaged, &q, &r).unwrap()
    }

    #[test]
    fn gain_matches_published_design_within_half_percent() {
        let design = design();
        let expected = [
            [9.6697, 13.2854, -9.1487, 0.8729],
            [1.9631, 2.8644, -12.1067, 11.5702],
        ];
        for i in 0..2 {
            for j in 0..4 {
                let got = design.k[(i, j)];
                let want = expected[i][j];
                assert!(
                    ((got - want) / want).abs() < 5e-3,
                    "k[{i}][{j}] = {got}, want {want}"
                );
            }
        }
    }

    #[test]
    fn model_matrix_matches_published_design_within_half_percent() {
        let design = design();
        let expected = [
            [0.0, 1.0, 0.0, 0.0],
            [-2.2026, -3.8851, -0.5390, -0.2595],
            [0.0478, 0.0, 0.0, -1.0],
            [-1.4455, -2.1243, 8.3210, -7.8597],
        ];
        for i in 0..4 {
            for j in 0..4 {
                let got = design.a_m[(i, j)];
                let want = expected[i][j];
                if want == 0.0 {
                    assert!(got.abs() < 1e-9, "a_m[{i}][{j}] = {got}, want 0");
                } else {
                    assert!(
                        ((got - want) / want).abs() < 5e-3,
                        "a_m[{i}][{j}] = {got}, want {want}"
                    );
                }
            }
        }
        assert!(eigenvalues(&design.a_m).unwrap().is_hurwitz());
    }

    #[test]
    fn identity_weights_on_stable_plant_stay_stable() {
        let (nominal, _) = canonical_models();
        let design = design_lqr(&nominal, &Matrix::identity(4), &Matrix::identity(2)).unwrap();
        assert!(eigenvalues(&design.a_m).unwrap().is_hurwitz());
    }

    #[test]
    fn adaptation_rate_vanishes_without_error_or_regressor() {
        let design = design();
        let cfg = MracConfig::for_design(&design).unwrap();
        let (_, damaged) = canonical_models();
        let zero = adaptation_rate(&[0.0; 4], &[0.3, -0.1, 0.05, 0.0], &cfg, &damaged.b).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
        let zero = adaptation_rate(&[0.2, 0.0, -0.4, 0.1], &[0.0; 4], &cfg, &damaged.b).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
    }

    #[test]
    fn adaptation_rate_matches_straight_line_arithmetic() {
        // Independent elementwise computation of (B'NB)^-1 B'P e y_d'
        // with N = I (2x2 inverse written out by hand).
        let design = design();
        let mut cfg = MracConfig::for_design(&design).unwrap();
        cfg.n_weight = Matrix::identity(4);
        let (_, damaged) = canonical_models();
        let b = &damaged.b;
        let e = [0.1, 0.0, 0.0, 0.0];
        let y_d = [1.0, 0.0, 0.0, 0.0];

        let mut btb = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..4 {
                    btb[i][j] += b[(k, i)] * b[(k, j)];
                }
            }
        }
        let det = btb[0][0] * btb[1][1] - btb[0][1] * btb[1][0];
        let inv = [
            [btb[1][1] / det, -btb[0][1] / det],
            [-btb[1][0] / det, btb[0][0] / det],
        ];
        let mut btpe = [0.0; 2];
        for i in 0..2 {
            for k in 0..4 {
                let mut pe_k = 0.0;
                for l in 0..4 {
                    pe_k += cfg.p[(k, l)] * e[l];
                }
                btpe[i] += b[(k, i)] * pe_k;
            }
        }
        let ge = [
            inv[0][0] * btpe[0] + inv[0][1] * btpe[1],
            inv[1][0] * btpe[0] + inv[1][1] * btpe[1],
        ];
        let rate = adaptation_rate(&e, &y_d, &cfg, b).unwrap();
        for i in 0..2 {
            for j in 0..4 {
                let want = ge[i] * y_d[j];
                assert!(
                    (rate[(i, j)] - want).abs() <= 1e-12 * want.abs().max(1.0),
                    "rate[{i}][{j}] = {}, want {want}",
                    rate[(i, j)]
                );
            }
        }
    }

    #[test]
    fn control_law_limits() {
        let design = design();
        let zero_gain = AdaptiveGain::zero(2, 4);
        let u_c = [0.02, -0.01];
        assert_eq!(control_law(u_c, &zero_gain, &[0.1, 0.2, 0.3, 0.4]), u_c);

        // u_c = 0 with L = K reduces to the plain LQR regulator -K y
        let lqr_gain = AdaptiveGain { l: design.k.clone() };
        let y = [0.01, -0.02, 0.005, 0.0];
        let u = control_law([0.0, 0.0], &lqr_gain, &y);
        let ky = design.k.mul_vec(&y);
        assert_eq!(u, [-ky[0], -ky[1]]);
    }

    #[test]
    fn lyapunov_value_is_zero_at_matched_equilibrium() {
        let design = design();
        let cfg = MracConfig::matched(&design).unwrap();
        let (_, damaged) = canonical_models();
        let v = lyapunov_value(&[0.0; 4], &cfg.l_initial, &damaged.a, &damaged.b, &design.a_m, &cfg);
        assert!(v.abs() < 1e-16, "V = {v}");
    }
}
