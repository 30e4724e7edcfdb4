use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pressure::PressureLaw;

/// State of the plane-symmetric system: density and the momentum `(m₁, m₂) = ρv`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedState {
    pub rho: f64,
    pub m1: f64,
    pub m2: f64,
}

impl ReducedState {
    pub fn new(rho: f64, m1: f64, m2: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) || !m1.is_finite() || !m2.is_finite() {
            return Err(Error::Domain(format!("invalid state rho={rho}, m=({m1}, {m2})")));
        }
        Ok(ReducedState { rho, m1, m2 })
    }

    /// From density and velocity.
    pub fn from_velocity(rho: f64, v: [f64; 2]) -> Result<Self> {
        Self::new(rho, rho * v[0], rho * v[1])
    }

    pub fn velocity(&self) -> [f64; 2] {
        [self.m1 / self.rho, self.m2 / self.rho]
    }

    /// Normal velocity `m₂/ρ`.
    pub fn u(&self) -> f64 {
        self.m2 / self.rho
    }

    /// Transported quantity `m₁/ρ`.
    pub fn w(&self) -> f64 {
        self.m1 / self.rho
    }
}

/// `(λ₁, λ₂, λ₃) = (u − √p′, u, u + √p′)`.
pub fn eigenvalues(s: &ReducedState, law: &PressureLaw) -> Result<(f64, f64, f64)> {
    let c = law.sound_speed(s.rho)?;
    let u = s.u();
    Ok((u - c, u, u + c))
}

/// `∫_a^b √p′(τ)/τ dτ`.
pub fn rarefaction_integral_between(law: &PressureLaw, a: f64, b: f64) -> Result<f64> {
    match law {
        PressureLaw::Polytropic { kappa, gamma } => {
            if !(a > 0.0 && b > 0.0) {
                return Err(Error::Domain(format!("densities must be positive: {a}, {b}")));
            }
            let k = 0.5 * (gamma - 1.0);
            Ok((kappa * gamma).sqrt() / k * (b.powf(k) - a.powf(k)))
        }
        PressureLaw::Tabulated(t) => {
            law.sound_speed(a)?;
            law.sound_speed(b)?;
            Ok(t.integrate_cells(a, b, |r| t.fprime(r).max(0.0).sqrt() / r))
        }
    }
}

/// `∫₀^ρ √p′(τ)/τ dτ`; only laws where it converges at zero support this.
pub fn rarefaction_integral(law: &PressureLaw, rho: f64) -> Result<f64> {
    match law {
        PressureLaw::Polytropic { kappa, gamma } => {
            if !(rho > 0.0) {
                return Err(Error::Domain(format!("density must be positive, got {rho}")));
            }
            let k = 0.5 * (gamma - 1.0);
            Ok((kappa * gamma).sqrt() / k * rho.powf(k))
        }
        PressureLaw::Tabulated(_) => Err(Error::UnsupportedPressure(
            "tabulated laws do not reach zero density, so the integral from 0 is undefined".into(),
        )),
    }
}

/// `(w₁, w₂, w₃) = (u − I(ρ), m₁/ρ, u + I(ρ))` with `I(ρ) = ∫₀^ρ √p′/τ`.
pub fn riemann_invariants(s: &ReducedState, law: &PressureLaw) -> Result<(f64, f64, f64)> {
    let i = rarefaction_integral(law, s.rho)?;
    Ok((s.u() - i, s.w(), s.u() + i))
}

/// State of density `rho ≤ left.rho` on the 1-rarefaction through `left`.
pub fn rarefaction_curve_1(left: &ReducedState, rho: f64, law: &PressureLaw) -> Result<ReducedState> {
    if !(rho > 0.0) || rho > left.rho {
        return Err(Error::WrongBranch(format!(
            "1-rarefaction needs 0 < rho <= {}, got {rho}",
            left.rho
        )));
    }
    if rho == left.rho {
        return Ok(*left);
    }
    let u = left.u() + rarefaction_integral_between(law, rho, left.rho)?;
    ReducedState::new(rho, rho * left.w(), rho * u)
}

/// Normal-velocity jump magnitude `√((p − p₀)(ρ − ρ₀)/(ρρ₀))` of a shock between two densities.
pub(crate) fn shock_jump(law: &PressureLaw, rho0: f64, rho: f64) -> Result<f64> {
    let dp = law.p(rho)? - law.p(rho0)?;
    Ok((dp * (rho - rho0) / (rho * rho0)).max(0.0).sqrt())
}

/// Admissible shock of the given family with `left` on its left and density `rho` on its right.
///
/// Family 1 needs `rho > left.rho`, family 3 needs `rho < left.rho`.
pub fn shock_curve(family: u8, left: &ReducedState, rho: f64, law: &PressureLaw) -> Result<(ReducedState, f64)> {
    let ok = match family {
        1 => rho > left.rho,
        3 => rho > 0.0 && rho < left.rho,
        _ => return Err(Error::Invalid(format!("shock family must be 1 or 3, got {family}"))),
    };
    if !ok {
        return Err(Error::WrongBranch(format!(
            "{family}-shock from density {} cannot reach {rho}",
            left.rho
        )));
    }
    // Both admissible families decrease the normal velocity.
    let u = left.u() - shock_jump(law, left.rho, rho)?;
    let right = ReducedState::new(rho, rho * left.w(), rho * u)?;
    let speed = (right.m2 - left.m2) / (right.rho - left.rho);
    Ok((right, speed))
}

/// Normal velocity reached from `left` along its forward 1-wave curve at density `rho`.
pub(crate) fn forward_1_velocity(left: &ReducedState, rho: f64, law: &PressureLaw) -> Result<f64> {
    if rho <= left.rho {
        Ok(left.u() + rarefaction_integral_between(law, rho, left.rho)?)
    } else {
        Ok(left.u() - shock_jump(law, left.rho, rho)?)
    }
}

/// Normal velocity of the state at density `rho` that connects to `right` by a 3-wave.
pub(crate) fn backward_3_velocity(right: &ReducedState, rho: f64, law: &PressureLaw) -> Result<f64> {
    if rho <= right.rho {
        Ok(right.u() - rarefaction_integral_between(law, rho, right.rho)?)
    } else {
        Ok(right.u() + shock_jump(law, right.rho, rho)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const S2: f64 = std::f64::consts::SQRT_2;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn eigenvalue_examples() {
        let law = PressureLaw::quadratic();
        let (a, b, c) = eigenvalues(&ReducedState::new(4.0, -1.0, 0.0).unwrap(), &law).unwrap();
        assert!(close(a, -2.0 * S2, 1e-15) && b == 0.0 && close(c, 2.0 * S2, 1e-15));
        let (a, b, c) = eigenvalues(&ReducedState::new(1.0, 0.0, 2.0 * S2).unwrap(), &law).unwrap();
        assert!(close(a, S2, 1e-15) && close(b, 2.0 * S2, 1e-15) && close(c, 3.0 * S2, 1e-15));
        let (a, b, c) = eigenvalues(&ReducedState::new(1.0, 0.0, 0.0).unwrap(), &law).unwrap();
        assert!(close(a, -S2, 1e-15) && b == 0.0 && close(c, S2, 1e-15));
    }

    #[test]
    fn invariant_examples() {
        let law = PressureLaw::quadratic();
        let (w1, w2, w3) = riemann_invariants(&ReducedState::new(4.0, -1.0, 0.0).unwrap(), &law).unwrap();
        assert!(close(w1, -4.0 * S2, 1e-15) && w2 == -0.25 && close(w3, 4.0 * S2, 1e-15));
        let (w1, w2, w3) = riemann_invariants(&ReducedState::new(1.0, -0.25, 2.0 * S2).unwrap(), &law).unwrap();
        assert!(w1.abs() < 1e-15 && w2 == -0.25 && close(w3, 4.0 * S2, 1e-15));
    }

    #[test]
    fn rarefaction_examples() {
        let law = PressureLaw::quadratic();
        let left = ReducedState::new(4.0, -1.0, 0.0).unwrap();
        let s = rarefaction_curve_1(&left, 1.0, &law).unwrap();
        assert!(close(s.m1, -0.25, 1e-15) && close(s.m2, 2.0 * S2, 1e-15));
        assert_eq!(rarefaction_curve_1(&left, 4.0, &law).unwrap(), left);
        let s = rarefaction_curve_1(&left, 16.0 / 9.0, &law).unwrap();
        assert!(close(s.m2, 64.0 * S2 / 27.0, 1e-14));
        assert!(matches!(rarefaction_curve_1(&left, 5.0, &law), Err(Error::WrongBranch(_))));
    }

    /// Eliminates `s` and `m₂` from the two jump relations directly:
    /// `s = Δm/Δρ` and `s Δm = Δ(m²/ρ + p)` give a scalar equation in `m₂`.
    fn rh_oracle(left: &ReducedState, rho: f64, law: &PressureLaw, lo: f64, hi: f64) -> f64 {
        let g = |m: f64| {
            let s = (m - left.m2) / (rho - left.rho);
            s * (m - left.m2) - ((m * m / rho + law.p(rho).unwrap()) - (left.m2 * left.m2 / left.rho + law.p(left.rho).unwrap()))
        };
        let (mut a, mut b) = (lo, hi);
        assert!(g(a) * g(b) < 0.0);
        for _ in 0..200 {
            let c = 0.5 * (a + b);
            if g(a) * g(c) <= 0.0 { b = c } else { a = c }
        }
        0.5 * (a + b)
    }

    #[test]
    fn shock_matches_jump_oracle() {
        let law = PressureLaw::quadratic();
        let left = ReducedState::new(1.0, -0.25, 2.0 * S2).unwrap();
        let (right, s) = shock_curve(1, &left, 4.0, &law).unwrap();
        // The admissible root has lower normal velocity than the left state.
        let m = rh_oracle(&left, 4.0, &law, -50.0, 4.0 * left.u());
        assert!((right.m2 - m).abs() < 1e-12);
        assert!((s * (right.rho - left.rho) - (right.m2 - left.m2)).abs() < 1e-12);
        let flux = |q: &ReducedState| q.m2 * q.m2 / q.rho + law.p(q.rho).unwrap();
        assert!((s * (right.m2 - left.m2) - (flux(&right) - flux(&left))).abs() < 1e-11);
        let (l1, _, _) = eigenvalues(&left, &law).unwrap();
        let (r1, _, _) = eigenvalues(&right, &law).unwrap();
        assert!(l1 > s && s > r1);
    }

    #[test]
    fn weak_shock_speed_tends_to_characteristic() {
        let law = PressureLaw::quadratic();
        let left = ReducedState::new(1.0, 0.3, 0.7).unwrap();
        let (l1, _, _) = eigenvalues(&left, &law).unwrap();
        let (_, s) = shock_curve(1, &left, 1.0 + 1e-7, &law).unwrap();
        assert!((s - l1).abs() < 1e-6);
    }

    #[test]
    fn three_shock_is_lax_admissible() {
        let law = PressureLaw::quadratic();
        let left = ReducedState::new(4.0, -1.0, 0.0).unwrap();
        let (right, s) = shock_curve(3, &left, 1.0, &law).unwrap();
        let (_, _, l3) = eigenvalues(&left, &law).unwrap();
        let (_, _, r3) = eigenvalues(&right, &law).unwrap();
        assert!(l3 > s && s > r3);
        assert!(shock_curve(3, &left, 5.0, &law).is_err());
        assert!(shock_curve(1, &left, 1.0, &law).is_err());
    }

    #[test]
    fn tabulated_integral_matches_closed_form() {
        let rho: Vec<f64> = (0..=40).map(|i| 0.5 + 0.1 * i as f64).collect();
        let f: Vec<f64> = rho.iter().map(|r| 2.0 * r).collect();
        let t = crate::pressure::TabulatedPressure::new(rho, f, 1.0, 1.0).unwrap();
        let law = PressureLaw::Tabulated(t);
        let v = rarefaction_integral_between(&law, 1.0, 4.0).unwrap();
        assert!((v - 2.0 * S2 * (2.0 - 1.0)).abs() < 1e-11);
        assert!(matches!(rarefaction_integral(&law, 1.0), Err(Error::UnsupportedPressure(_))));
    }

    proptest! {
        #[test]
        fn rarefaction_keeps_invariants(rho_l in 0.05f64..50.0, frac in 0.01f64..1.0, m1 in -5.0f64..5.0, m2 in -5.0f64..5.0, gamma in 1.2f64..3.0) {
            let law = PressureLaw::polytropic(1.0, gamma).unwrap();
            let left = ReducedState::new(rho_l, m1, m2).unwrap();
            let s = rarefaction_curve_1(&left, frac * rho_l, &law).unwrap();
            let (_, a2, a3) = riemann_invariants(&left, &law).unwrap();
            let (_, b2, b3) = riemann_invariants(&s, &law).unwrap();
            prop_assert!((a2 - b2).abs() <= 1e-12 * (1.0 + a2.abs()));
            prop_assert!((a3 - b3).abs() <= 1e-12 * (1.0 + a3.abs()));
        }

        #[test]
        fn strictly_hyperbolic(rho in 1e-3f64..1e3, m2 in -10.0f64..10.0, gamma in 1.1f64..3.0) {
            let law = PressureLaw::polytropic(1.0, gamma).unwrap();
            let (a, b, c) = eigenvalues(&ReducedState::new(rho, 0.0, m2).unwrap(), &law).unwrap();
            prop_assert!(a < b && b < c);
        }
    }
}
