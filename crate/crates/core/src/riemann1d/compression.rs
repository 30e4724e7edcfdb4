use serde::{Deserialize, Serialize};

use super::solver::{solve_riemann, SelfSimilarSolution};
use super::waves::{rarefaction_integral_between, ReducedState};
use crate::error::{Error, Result};
use crate::pressure::PressureLaw;
use crate::state::EulerState;

/// Backward-in-time compression wave: for `t < 0` the field is the forward
/// 1-rarefaction evaluated at `(−x₂, −t)`, which focuses into a jump at `t = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressionWave {
    pub rho_minus: f64,
    pub rho_plus: f64,
    /// Forward rarefaction from `(ρ₊, (−1, 0))` to `(ρ₋, m_R)`.
    pub forward: SelfSimilarSolution,
}

/// Builds the compression wave between `0 < rho_minus < rho_plus`.
pub fn compression_wave(rho_minus: f64, rho_plus: f64, law: &PressureLaw) -> Result<CompressionWave> {
    if !(rho_minus > 0.0 && rho_minus < rho_plus && rho_plus.is_finite()) {
        return Err(Error::Domain(format!(
            "compression wave needs 0 < rho_minus < rho_plus, got {rho_minus}, {rho_plus}"
        )));
    }
    if rho_minus < 1e-12 * rho_plus {
        return Err(Error::Unsupported(format!("rho_minus = {rho_minus} is too close to vacuum")));
    }
    let left = ReducedState::new(rho_plus, -1.0, 0.0)?;
    let m2 = rho_minus * rarefaction_integral_between(law, rho_minus, rho_plus)?;
    let right = ReducedState::new(rho_minus, -rho_minus / rho_plus, m2)?;
    let forward = solve_riemann(&left, &right, law, 1e-12)?;
    Ok(CompressionWave { rho_minus, rho_plus, forward })
}

impl CompressionWave {
    /// Density and velocity at `(x₂, t)`, `t < 0`.
    pub fn state(&self, x2: f64, t: f64) -> Result<EulerState> {
        if !(t < 0.0) {
            return Err(Error::Domain(format!("compression wave is defined for t < 0, got {t}")));
        }
        let s = self.forward.eval(x2 / t)?;
        EulerState::new(s.rho, s.velocity())
    }

    /// Limit states as `t ↑ 0`: `(ρ₋, v₋)` for `x₂ < 0` and `(ρ₊, v₊)` for `x₂ > 0`.
    pub fn datum(&self) -> Result<(EulerState, EulerState)> {
        let minus = self.forward.right_state();
        let plus = self.forward.left_state();
        Ok((EulerState::new(minus.rho, minus.velocity())?, EulerState::new(plus.rho, plus.velocity())?))
    }

    /// Largest `|∂ρ/∂x₂|` on the slice `t`, from `n` differences across the fan.
    pub fn max_density_slope(&self, t: f64, n: usize) -> Result<f64> {
        let (a, b) = match self.forward.breakpoints().as_slice() {
            [] => return Ok(0.0),
            bp => (bp[0] * t, bp[bp.len() - 1] * t),
        };
        let (lo, hi) = (a.min(b), a.max(b));
        let h = (hi - lo) / n.max(1) as f64;
        let mut best = 0.0f64;
        let mut prev = self.state(lo, t)?.rho;
        for i in 1..=n {
            let r = self.state(lo + h * i as f64, t)?.rho;
            best = best.max((r - prev).abs() / h);
            prev = r;
        }
        Ok(best)
    }

    /// CSV `t,x2,rho,v1,v2` on the tensor grid `ts × x2s` (`t < 0`).
    pub fn sample_csv(&self, ts: &[f64], x2s: &[f64]) -> Result<String> {
        let mut out = String::from("t,x2,rho,v1,v2\n");
        for &t in ts {
            for &x in x2s {
                let s = self.state(x, t)?;
                out.push_str(&format!("{t:?},{x:?},{:?},{:?},{:?}\n", s.rho, s.v[0], s.v[1]));
            }
        }
        Ok(out)
    }
}
