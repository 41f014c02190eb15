//! Dense small-matrix linear algebra and the three control-theoretic solvers
//! (eigenvalues, continuous Lyapunov, continuous algebraic Riccati) the rest
//! of the crate is built on. All operations are pure functions of their
//! inputs and safe to call from concurrent simulations.

mod eigen;
mod lyapunov;
mod matrix;
mod riccati;

pub use eigen::{eigenvalues, Eigen, MAX_DIM};
pub use lyapunov::{lyapunov_residual, solve_lyapunov};
pub use matrix::Matrix;
pub use riccati::{care_residual, solve_care};
