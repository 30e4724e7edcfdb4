//! Distributional checks of the compressible Euler system and of fan subsolutions by
//! quadrature against compactly supported test functions.

mod field;
mod random;
mod residual;
mod testfn;

pub use field::{FieldHandle, LocalState, PiecewiseFan, SampledOverlay};
pub use random::{oracle_equivalence, random_fans, EquivalenceReport, EquivalenceRow, RandomFan, ALGEBRAIC_ZERO};
pub use residual::{subsolution_residual, weak_residual, QuadOptions, ResidualRow};
pub use testfn::TestFunction;
