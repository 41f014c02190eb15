//! Lateral/directional flight control of a transport aircraft that has lost
//! its vertical stabilizer, using differential thrust in place of the rudder.
//!
//! The crate builds the nominal and damaged linear models, synthesizes an
//! LQR model-reference plant, closes a Lyapunov-based adaptive loop around
//! the damaged dynamics with engine-lagged differential thrust, and measures
//! robustness under additive plant uncertainty.

pub mod aircraft;
pub mod allocation;
pub mod controllers;
pub mod error;
pub mod numerics;
pub mod propulsion;
pub mod robustness;
pub mod simulator;

pub use error::{Error, Result};
