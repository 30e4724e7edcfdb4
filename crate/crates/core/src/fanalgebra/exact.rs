use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number::{rat, QuadraticNumber, Rational};
use crate::state::FanSubsolutionCandidate;

/// Admissible values of `C₁`: the open lower end and the closed upper end.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct C1Interval {
    pub lower_exclusive: QuadraticNumber,
    pub upper_inclusive: QuadraticNumber,
}

impl C1Interval {
    pub fn midpoint(&self) -> QuadraticNumber {
        (&self.lower_exclusive + &self.upper_inclusive) * QuadraticNumber::from_ratio(1, 2)
    }

    pub fn is_nonempty(&self) -> bool {
        self.lower_exclusive < self.upper_inclusive
    }

    /// Name of the bound `c1` violates, if any.
    pub fn violated_bound(&self, c1: &QuadraticNumber) -> Option<&'static str> {
        if c1 <= &self.lower_exclusive {
            Some("surv4_1")
        } else if c1 > &self.upper_inclusive {
            Some("surv4_2")
        } else {
            None
        }
    }
}

/// One-parameter family (in `C₁`) of solutions with `β = δ = ν₊ = 0` over
/// compression-wave data `(ρ₋, ρ₊)` and `p = ρ²`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExplicitFamily {
    pub rho_minus: QuadraticNumber,
    pub rho_plus: QuadraticNumber,
    pub rho_1: QuadraticNumber,
    pub alpha: QuadraticNumber,
    pub nu_minus: QuadraticNumber,
    /// `C₁/2 − γ`, fixed by the right momentum balance.
    pub half_c1_minus_gamma: QuadraticNumber,
    pub interval: C1Interval,
}

impl ExplicitFamily {
    /// The candidate at a given `C₁`.
    pub fn candidate(&self, c1: QuadraticNumber) -> FanSubsolutionCandidate<QuadraticNumber> {
        let z = QuadraticNumber::from_int(0);
        let sqrt = |r: &QuadraticNumber| {
            QuadraticNumber::sqrt_of_rational(r.rational_part()).expect("checked at construction")
        };
        let gap = sqrt(&self.rho_plus) - sqrt(&self.rho_minus);
        let v1 = -(&self.rho_plus.invert().expect("positive density"));
        let two_sqrt2 = QuadraticNumber::sqrt2() * QuadraticNumber::from_int(2);
        FanSubsolutionCandidate {
            rho_minus: self.rho_minus.clone(),
            rho_plus: self.rho_plus.clone(),
            rho_1: self.rho_1.clone(),
            v_minus: [v1.clone(), two_sqrt2 * gap],
            v_plus: [v1, z.clone()],
            alpha: self.alpha.clone(),
            beta: z.clone(),
            gamma: &c1 * &QuadraticNumber::from_ratio(1, 2) - &self.half_c1_minus_gamma,
            delta: z.clone(),
            c_1: c1,
            nu_minus: self.nu_minus.clone(),
            nu_plus: z,
        }
    }
}

/// Solves the reduced system in closed form for rational `0 < ρ₋ < ρ₊` whose
/// square roots lie in ℚ(√2).
pub fn explicit_family(rho_minus: &Rational, rho_plus: &Rational) -> Result<ExplicitFamily> {
    let zero = Rational::from_integer(0.into());
    if !(rho_minus > &zero && rho_minus < rho_plus) {
        return Err(Error::Domain(format!("need 0 < rho_minus < rho_plus, got {rho_minus}, {rho_plus}")));
    }
    let q = QuadraticNumber::from_rational;
    let n = |k: i64| QuadraticNumber::from_int(k);
    let (rm, rp) = (q(rho_minus.clone()), q(rho_plus.clone()));
    let s = QuadraticNumber::sqrt_of_rational(rho_plus)? - QuadraticNumber::sqrt_of_rational(rho_minus)?;
    let s2 = &s * &s;
    let sqrt2 = QuadraticNumber::sqrt2();
    let two_sqrt2 = &sqrt2 * &n(2);

    // Left momentum balance combined with the right one fixes ν₋; left mass balance then fixes ρ₁.
    let numer = &n(8) * &rm * &s2 + &rm * &rm - &rp * &rp;
    let nu_minus = numer.checked_div(&(&two_sqrt2 * &rm * &s))?;
    if !nu_minus.is_negative() {
        return Err(Error::Domain("interface speed nu_minus is not negative for these densities".into()));
    }
    let rho_1 = &rm - &(&two_sqrt2 * &rm * &s).checked_div(&nu_minus)?;
    if !rho_1.is_positive() {
        return Err(Error::Domain("middle density is not positive".into()));
    }
    let ratio = rm.checked_div(&rp)?;
    let alpha = (&(&two_sqrt2 * &ratio * &s).checked_div(&nu_minus)? - &ratio).checked_div(&rho_1)?;
    let k = (&rp * &rp - &rho_1 * &rho_1).checked_div(&rho_1)?;
    if !k.is_positive() {
        return Err(Error::Domain("determinant condition cannot hold: rho_1 >= rho_plus".into()));
    }

    let lower = &k + &(&alpha * &alpha);
    let a = &rm * &rm - &rho_1 * &rho_1 + rm.checked_div(&(&n(2) * &rp * &rp))? + &n(4) * &rm * &s2;
    let rhs = &sqrt2 * &rm * &s * (&n(4) * &rm + (&rp * &rp).invert()? + &n(8) * &s2);
    let upper = (&n(2) * (&a - &rhs.checked_div(&nu_minus)?)).checked_div(&rho_1)?;

    Ok(ExplicitFamily {
        rho_minus: rm,
        rho_plus: rp,
        rho_1,
        alpha,
        nu_minus,
        half_c1_minus_gamma: k,
        interval: C1Interval { lower_exclusive: lower, upper_inclusive: upper },
    })
}

/// Admissible `C₁` range for `ρ₋ = 1`, `ρ₊ = 4`.
pub fn admissible_c1_interval() -> C1Interval {
    explicit_family(&rat(1, 1), &rat(4, 1)).expect("fixed data are valid").interval
}

/// The explicit admissible fan subsolution over `ρ₋ = 1`, `ρ₊ = 4`, `p = ρ²`
/// with `C₁` at the middle of its admissible interval.
pub fn find_exact_solution() -> FanSubsolutionCandidate<QuadraticNumber> {
    let fam = explicit_family(&rat(1, 1), &rat(4, 1)).expect("fixed data are valid");
    let c1 = fam.interval.midpoint();
    fam.candidate(c1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fanalgebra::{evaluate_constraints, Verdict};
    use crate::pressure::PressureLaw;

    fn q(n: i64, d: i64) -> QuadraticNumber {
        QuadraticNumber::from_ratio(n, d)
    }

    #[test]
    fn interval_matches_printed_fractions() {
        let i = admissible_c1_interval();
        let lower = q(1, 16) + q(559, 105);
        let upper = q(2, 15) * (q(48, 1) + q(1, 4) + q(35, 1) + q(7, 32) - q(225, 7));
        assert_eq!(i.lower_exclusive, lower);
        assert_eq!(i.upper_inclusive, upper);
        assert_eq!(lower, q(9049, 1680));
        assert_eq!(upper, q(11497, 1680));
    }

    #[test]
    fn exact_solution_values() {
        let c = find_exact_solution();
        assert_eq!(c.c_1, q(10273, 1680));
        assert_eq!(c.rho_1, q(15, 7));
        assert_eq!(c.alpha, q(-1, 4));
        assert_eq!(c.nu_minus, QuadraticNumber::sqrt2() * q(-7, 4));
        assert_eq!(&c.c_1 * &q(1, 2) - &c.gamma, q(559, 105));
        assert_eq!(c, FanSubsolutionCandidate::explicit_with_c1(q(10273, 1680)));
        // ν₋(1 − ρ₁) = 2√2 and ρ₁(C₁/2 − γ) + ρ₁² = 16.
        assert_eq!(&c.nu_minus * &(q(1, 1) - &c.rho_1), QuadraticNumber::sqrt2() * q(2, 1));
        let k = &c.c_1 * &q(1, 2) - &c.gamma;
        assert_eq!(&c.rho_1 * &k + &c.rho_1 * &c.rho_1, q(16, 1));
    }

    #[test]
    fn exact_solution_is_admissible() {
        let c = find_exact_solution();
        let rep = evaluate_constraints(&c, &PressureLaw::quadratic()).unwrap();
        assert_eq!(rep.verdict, Verdict::ExactAdmissible);
        assert!(rep.equality_residuals.iter().all(|r| r.value.is_zero()));
        assert!(rep.slack("sub_trace").unwrap().is_positive());
        assert!(rep.slack("sub_det").unwrap().is_positive());
        assert!(rep.slack("E_left").unwrap().is_positive());
        assert!(rep.slack("E_right").unwrap().is_zero());
    }

    #[test]
    fn interval_endpoints_are_sharp() {
        let fam = explicit_family(&rat(1, 1), &rat(4, 1)).unwrap();
        let law = PressureLaw::quadratic();
        let lo = evaluate_constraints(&fam.candidate(fam.interval.lower_exclusive.clone()), &law).unwrap();
        assert!(lo.slack("sub_det").unwrap().is_zero());
        let hi = evaluate_constraints(&fam.candidate(fam.interval.upper_inclusive.clone()), &law).unwrap();
        assert!(hi.slack("E_left").unwrap().is_zero());
        assert_eq!(hi.verdict, Verdict::ExactAdmissible);
        assert_eq!(fam.interval.violated_bound(&q(5, 1)), Some("surv4_1"));
        assert_eq!(fam.interval.violated_bound(&q(7, 1)), Some("surv4_2"));
    }

    #[test]
    fn other_square_densities() {
        let law = PressureLaw::quadratic();
        for (a, b) in [(1, 9), (4, 9), (1, 2), (9, 16)] {
            let Ok(fam) = explicit_family(&rat(a, 1), &rat(b, 1)) else { continue };
            let c = fam.candidate(fam.interval.midpoint());
            let rep = evaluate_constraints(&c, &law).unwrap();
            assert!(rep.equality_residuals.iter().all(|r| r.value.is_zero()), "({a},{b})");
            if fam.interval.is_nonempty() {
                assert_eq!(rep.verdict, Verdict::ExactAdmissible, "({a},{b})");
            }
        }
    }
}
