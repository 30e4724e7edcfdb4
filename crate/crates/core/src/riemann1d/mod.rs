//! Self-similar solutions of the plane-symmetric system in `(ρ, m₁, m₂)`.
mod compression;
mod solver;
mod waves;

pub use compression::{compression_wave, CompressionWave};
pub use solver::{solve_riemann, SelfSimilarSolution, Wave};
pub use waves::{
    eigenvalues, rarefaction_curve_1, rarefaction_integral, rarefaction_integral_between, riemann_invariants,
    shock_curve, ReducedState,
};

/// Evaluates `sol` at `ξ = x₂/t`.
pub fn eval_self_similar(sol: &SelfSimilarSolution, xi: f64) -> crate::Result<ReducedState> {
    sol.eval(xi)
}
