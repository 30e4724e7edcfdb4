//! Fan subsolutions, Riemann fans and convex-integration building blocks for
//! the two-dimensional isentropic Euler system.

pub mod convexint;
pub mod error;
pub mod fanalgebra;
pub mod number;
pub mod pressure;
pub mod pressuredesign;
pub mod quadrature;
pub mod riemann1d;
pub mod scalar;
pub mod state;
pub mod weakform;

pub use error::{Error, Result};
pub use number::{QuadraticNumber, Rational};
pub use pressure::{check_hyperbolicity, HyperbolicityReport, PressureLaw, TabulatedPressure};
pub use scalar::Scalar;
pub use state::{EulerState, FanPartition, FanSubsolutionCandidate, StatePoint};
