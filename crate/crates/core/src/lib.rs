//! Desk-scale numerical laboratory for Gaussian-decay rigidity of magnetic
//! Schrödinger evolutions `∂ₜu = i(Δ_A + V)u`.
//!
//! - [`example`]: a closed-form real magnetic example with critical Gaussian decay.
//! - [`gauge`]: reduction of a vector potential to the radial (`x·A = 0`) gauge.
//! - [`appell`]: pseudoconformal change of variables and time rescalings.
//! - [`convexity`]: the weight-profile iteration and its limit, log-convexity tools.
//! - [`propagator`]: Crank–Nicolson evolution and weighted-norm traces.

pub mod appell;
pub mod convexity;
pub mod error;
pub mod example;
pub mod gauge;
pub mod grid;
pub mod propagator;
pub mod quadrature;
pub mod wave;

pub use error::{LabError, Result};
