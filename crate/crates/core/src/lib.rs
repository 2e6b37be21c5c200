//! Numerical construction of solutions of the ultrahyperbolic equation
//! `(Δ_y − Δ_x) u = 0` on ℝ^d × ℝ^n from their scattering data at infinity,
//! with checkers for the transform pair, the compatibility condition, the
//! ray asymptotics and the Fourier decay estimates behind them.

pub mod error;
pub mod fit;
pub mod geometry;
pub mod lemma_lab;
pub mod quad;
pub mod report;
pub mod scattering;
pub mod solver;
pub mod stationary_phase;
pub mod transforms;

pub use error::{Error, Result};
