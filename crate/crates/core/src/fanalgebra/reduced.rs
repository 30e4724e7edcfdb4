use crate::error::Result;
use crate::number::QuadraticNumber;

/// Outer velocities of the compression-wave datum: `v₊ = (−1/ρ₊, 0)`,
/// `v₋ = (−1/ρ₊, 2√2(√ρ₊ − √ρ₋))`, valid for `p = ρ²`.
pub fn compression_data(rho_minus: &QuadraticNumber, rho_plus: &QuadraticNumber) -> Result<([QuadraticNumber; 2], [QuadraticNumber; 2])> {
    let s = QuadraticNumber::sqrt_of_rational(rho_plus.rational_part())?
        - QuadraticNumber::sqrt_of_rational(rho_minus.rational_part())?;
    let v1 = -rho_plus.invert()?;
    let v2 = QuadraticNumber::sqrt2() * QuadraticNumber::from_int(2) * s;
    Ok(([v1.clone(), v2], [v1, QuadraticNumber::from_int(0)]))
}

/// The system after substituting the compression-wave datum and `p = ρ²`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedResiduals {
    /// Same order and sign convention as the general identities.
    pub equalities: [QuadraticNumber; 6],
    pub e_left: QuadraticNumber,
    pub e_right: QuadraticNumber,
}

/// Reduced identities written directly in `(ρ±, ρ₁, α, β, γ, δ, C₁, ν±)`.
///
/// Uses `ρ₋ v₋₂ |v₋|²/2 = √2 ρ₋ s (1/ρ₊² + 8 s²)` with `s = √ρ₊ − √ρ₋`.
#[allow(clippy::too_many_arguments)]
pub fn reduced_residuals(
    rho_minus: &QuadraticNumber,
    rho_plus: &QuadraticNumber,
    rho_1: &QuadraticNumber,
    alpha: &QuadraticNumber,
    beta: &QuadraticNumber,
    gamma: &QuadraticNumber,
    delta: &QuadraticNumber,
    c_1: &QuadraticNumber,
    nu_minus: &QuadraticNumber,
    nu_plus: &QuadraticNumber,
) -> Result<ReducedResiduals> {
    let n = QuadraticNumber::from_int;
    let (rm, rp, r1) = (rho_minus, rho_plus, rho_1);
    let s = QuadraticNumber::sqrt_of_rational(rp.rational_part())? - QuadraticNumber::sqrt_of_rational(rm.rational_part())?;
    let s2 = &s * &s;
    let sqrt2 = QuadraticNumber::sqrt2();
    let w = &n(2) * &sqrt2 * rm * &s;
    let ratio = rm.checked_div(rp)?;
    let half_c1r1 = c_1 * r1 * QuadraticNumber::from_ratio(1, 2);

    let cont_left = nu_minus * &(rm - r1) - (&w - r1 * beta);
    let mom_1_left = nu_minus * &(-&ratio - r1 * alpha) - (-(&n(2) * &sqrt2 * &ratio * &s) - r1 * delta);
    let mom_2_left = nu_minus * &(&w - r1 * beta)
        - (&n(8) * rm * &s2 + r1 * gamma + rm * rm - r1 * r1 - &half_c1r1);
    let cont_right = nu_plus * &(r1 - rp) - r1 * beta;
    let mom_1_right = nu_plus * &(r1 * alpha + n(1)) - r1 * delta;
    let mom_2_right = nu_plus * &(r1 * beta) - (-(r1 * gamma) + r1 * r1 - rp * rp + &half_c1r1);

    let left_lhs = nu_minus
        * &(rm * rm - r1 * r1 + rm.checked_div(&(&n(2) * rp * rp))? + &n(4) * rm * &s2 - &half_c1r1);
    let left_rhs = &sqrt2 * rm * &s * (&n(4) * rm + (rp * rp).invert()? + &n(8) * &s2)
        - &n(2) * r1 * r1 * beta
        - beta * &half_c1r1;
    let right_lhs = nu_plus * &(r1 * r1 - rp * rp + &half_c1r1 - rp.checked_div(&(&n(2) * rp * rp))?);
    let right_rhs = &n(2) * r1 * r1 * beta + &half_c1r1 * beta;

    Ok(ReducedResiduals {
        equalities: [cont_left, mom_1_left, mom_2_left, cont_right, mom_1_right, mom_2_right],
        e_left: left_rhs - left_lhs,
        e_right: right_rhs - right_lhs,
    })
}
