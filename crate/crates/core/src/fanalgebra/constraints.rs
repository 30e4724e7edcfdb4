use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::pressure::PressureLaw;
use crate::scalar::Scalar;
use crate::state::FanSubsolutionCandidate;

/// Absolute tolerance for floating-point verdicts.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Rankine–Hugoniot identities, each reported as LHS − RHS.
pub const EQUALITY_NAMES: [&str; 6] =
    ["cont_left", "mom_1_left", "mom_2_left", "cont_right", "mom_1_right", "mom_2_right"];

/// Inequalities, each reported so that a nonnegative (strict ones: positive) value means satisfied.
pub const SLACK_NAMES: [&str; 6] = ["sub_trace", "sub_det", "E_left", "E_right", "rho_1_positive", "c_1_positive"];

/// Slacks that must be strictly positive; the energy inequalities are not strict.
pub(crate) const STRICT: [bool; 6] = [true, true, false, false, true, true];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedValue<S> {
    pub name: String,
    pub value: S,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    ExactAdmissible,
    AdmissibleWithin { tol: f64 },
    Violated { worst: String, value: f64 },
}

impl Verdict {
    pub fn is_admissible(&self) -> bool {
        !matches!(self, Verdict::Violated { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: Deserialize<'de>"))]
pub struct ConstraintReport<S> {
    pub equality_residuals: Vec<NamedValue<S>>,
    pub inequality_slacks: Vec<NamedValue<S>>,
    pub verdict: Verdict,
}

impl<S: Scalar> ConstraintReport<S> {
    pub fn residual(&self, name: &str) -> Option<&S> {
        self.equality_residuals.iter().find(|n| n.name == name).map(|n| &n.value)
    }

    pub fn slack(&self, name: &str) -> Option<&S> {
        self.inequality_slacks.iter().find(|n| n.name == name).map(|n| &n.value)
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.equality_residuals.iter().map(|n| n.value.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> ConstraintReport<f64> {
        let conv = |v: &[NamedValue<S>]| {
            v.iter().map(|n| NamedValue { name: n.name.clone(), value: n.value.to_f64() }).collect()
        };
        ConstraintReport {
            equality_residuals: conv(&self.equality_residuals),
            inequality_slacks: conv(&self.inequality_slacks),
            verdict: self.verdict.clone(),
        }
    }
}

/// Residuals and slacks in the candidate's own number type.
pub(crate) fn raw_constraints<S: Scalar>(
    c: &FanSubsolutionCandidate<S>,
    law: &PressureLaw,
) -> Result<([S; 6], [S; 6])> {
    let h = |x: S| x.half();
    let (rm, rp, r1) = (c.rho_minus.clone(), c.rho_plus.clone(), c.rho_1.clone());
    let (vm, vp) = (c.v_minus.clone(), c.v_plus.clone());
    let (al, be, ga, de, c1) = (c.alpha.clone(), c.beta.clone(), c.gamma.clone(), c.delta.clone(), c.c_1.clone());
    let (nm, np) = (c.nu_minus.clone(), c.nu_plus.clone());

    let pm = S::pressure(law, &rm)?;
    let pp = S::pressure(law, &rp)?;
    let p1 = S::pressure(law, &r1)?;
    let em = S::internal_energy(law, &rm)?;
    let ep = S::internal_energy(law, &rp)?;
    let e1 = S::internal_energy(law, &r1)?;

    let vm2 = vm[0].square() + vm[1].square();
    let vp2 = vp[0].square() + vp[1].square();
    let r1c = r1.clone() * c1.clone();

    let cont_left = nm.clone() * (rm.clone() - r1.clone()) - (rm.clone() * vm[1].clone() - r1.clone() * be.clone());
    let mom_1_left = nm.clone() * (rm.clone() * vm[0].clone() - r1.clone() * al.clone())
        - (rm.clone() * vm[0].clone() * vm[1].clone() - r1.clone() * de.clone());
    let mom_2_left = nm.clone() * (rm.clone() * vm[1].clone() - r1.clone() * be.clone())
        - (rm.clone() * vm[1].square() + r1.clone() * ga.clone() + pm.clone() - p1.clone() - h(r1c.clone()));
    let cont_right = np.clone() * (r1.clone() - rp.clone()) - (r1.clone() * be.clone() - rp.clone() * vp[1].clone());
    let mom_1_right = np.clone() * (r1.clone() * al.clone() - rp.clone() * vp[0].clone())
        - (r1.clone() * de.clone() - rp.clone() * vp[0].clone() * vp[1].clone());
    let mom_2_right = np.clone() * (r1.clone() * be.clone() - rp.clone() * vp[1].clone())
        - (-(r1.clone() * ga.clone()) - rp.clone() * vp[1].square() + p1.clone() - pp.clone() + h(r1c.clone()));

    let trace = c1.clone() - al.square() - be.square();
    let det = (h(c1.clone()) - al.square() + ga.clone()) * (h(c1.clone()) - be.square() - ga.clone())
        - (de.clone() - al.clone() * be.clone()).square();

    let (me, m1, mp) = (rm.clone() * em.clone(), r1.clone() * e1.clone(), rp.clone() * ep.clone());
    let e_left_lhs = nm.clone() * (me.clone() - m1.clone()) + nm.clone() * (h(rm.clone() * vm2.clone()) - h(r1c.clone()));
    let e_left_rhs = ((me.clone() + pm) * vm[1].clone() - (m1.clone() + p1.clone()) * be.clone())
        + (h(rm * vm[1].clone() * vm2) - h(r1c.clone() * be.clone()));
    let e_right_lhs = np.clone() * (m1.clone() - mp.clone()) + np * (h(r1c.clone()) - h(rp.clone() * vp2.clone()));
    let e_right_rhs = ((m1 + p1) * be.clone() - (mp + pp) * vp[1].clone())
        + (h(r1c * be) - h(rp * vp[1].clone() * vp2));

    Ok((
        [cont_left, mom_1_left, mom_2_left, cont_right, mom_1_right, mom_2_right],
        [trace, det, e_left_rhs - e_left_lhs, e_right_rhs - e_right_lhs, r1, c1],
    ))
}

fn verdict<S: Scalar>(eqs: &[S; 6], slacks: &[S; 6], tol: Option<f64>) -> Verdict {
    // Violation amount per constraint; positive means violated.
    let mut worst: Option<(usize, f64)> = None;
    let mut note = |i: usize, amount: f64| {
        if amount > 0.0 && worst.is_none_or(|(_, w)| amount > w) {
            worst = Some((i, amount));
        }
    };
    match tol {
        None => {
            for (i, r) in eqs.iter().enumerate() {
                if r.sign() != Ordering::Equal {
                    note(i, r.to_f64().abs().max(f64::MIN_POSITIVE));
                }
            }
            for (i, s) in slacks.iter().enumerate() {
                let bad = if STRICT[i] { s.sign() != Ordering::Greater } else { s.sign() == Ordering::Less };
                if bad {
                    note(6 + i, (-s.to_f64()).max(f64::MIN_POSITIVE));
                }
            }
        }
        Some(tol) => {
            for (i, r) in eqs.iter().enumerate() {
                let v = r.to_f64();
                note(i, if v.is_finite() { v.abs() - tol } else { f64::INFINITY });
            }
            for (i, s) in slacks.iter().enumerate() {
                let v = s.to_f64();
                let amount = if !v.is_finite() {
                    f64::INFINITY
                } else if STRICT[i] {
                    // Slack equal to tol is still treated as the boundary.
                    if v > tol { 0.0 } else { (tol - v).max(f64::MIN_POSITIVE) }
                } else {
                    -tol - v
                };
                note(6 + i, amount);
            }
        }
    }
    match worst {
        None if tol.is_none() => Verdict::ExactAdmissible,
        None => Verdict::AdmissibleWithin { tol: tol.unwrap() },
        Some((i, _)) => {
            let (name, value) = if i < 6 {
                (EQUALITY_NAMES[i], eqs[i].to_f64())
            } else {
                (SLACK_NAMES[i - 6], slacks[i - 6].to_f64())
            };
            Verdict::Violated { worst: name.to_string(), value }
        }
    }
}

fn assemble<S: Scalar>(eqs: [S; 6], slacks: [S; 6], tol: Option<f64>) -> ConstraintReport<S> {
    let verdict = verdict(&eqs, &slacks, tol);
    let named = |names: [&str; 6], vals: [S; 6]| {
        names.iter().zip(vals).map(|(n, v)| NamedValue { name: n.to_string(), value: v }).collect()
    };
    ConstraintReport { equality_residuals: named(EQUALITY_NAMES, eqs), inequality_slacks: named(SLACK_NAMES, slacks), verdict }
}

/// Evaluates every identity and inequality. Exact number types get an exact
/// verdict; floating point uses [`DEFAULT_TOL`].
pub fn evaluate_constraints<S: Scalar>(c: &FanSubsolutionCandidate<S>, law: &PressureLaw) -> Result<ConstraintReport<S>> {
    let tol = if S::EXACT { None } else { Some(DEFAULT_TOL) };
    let (eqs, slacks) = raw_constraints(c, law)?;
    Ok(assemble(eqs, slacks, tol))
}

/// Same as [`evaluate_constraints`] with an explicit absolute tolerance (used even for exact types).
pub fn evaluate_constraints_with_tol<S: Scalar>(
    c: &FanSubsolutionCandidate<S>,
    law: &PressureLaw,
    tol: f64,
) -> Result<ConstraintReport<S>> {
    let (eqs, slacks) = raw_constraints(c, law)?;
    Ok(assemble(eqs, slacks, Some(tol)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::QuadraticNumber;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> QuadraticNumber {
        QuadraticNumber::from_ratio(n, d)
    }

    #[test]
    fn constant_state_sits_on_the_boundary() {
        let (rho, v1, v2, c1) = (q(3, 2), q(1, 3), q(-2, 5), q(7, 2));
        let c = FanSubsolutionCandidate {
            rho_minus: rho.clone(),
            rho_plus: rho.clone(),
            rho_1: rho,
            v_minus: [v1.clone(), v2.clone()],
            v_plus: [v1.clone(), v2.clone()],
            alpha: v1.clone(),
            beta: v2.clone(),
            gamma: &c1 * &q(1, 2) - &v2 * &v2,
            delta: &v1 * &v2,
            c_1: c1,
            nu_minus: q(-1, 1),
            nu_plus: q(2, 1),
        };
        let rep = evaluate_constraints(&c, &PressureLaw::quadratic()).unwrap();
        for r in &rep.equality_residuals {
            assert!(r.value.is_zero(), "{}", r.name);
        }
        assert!(rep.slack("sub_det").unwrap().is_zero());
        assert!(!rep.verdict.is_admissible());
    }

    #[test]
    fn beta_shift_moves_left_mass_residual_linearly() {
        let mut c = FanSubsolutionCandidate::explicit_with_c1(q(10273, 1680));
        c.beta = &c.beta - &q(1, 1000);
        let rep = evaluate_constraints(&c, &PressureLaw::quadratic()).unwrap();
        let want = -(&c.rho_1 * &q(1, 1000));
        assert_eq!(rep.residual("cont_left").unwrap(), &want);
    }

    #[test]
    fn float_verdict_uses_tolerance() {
        let c = FanSubsolutionCandidate::explicit_with_c1(q(10273, 1680)).to_f64();
        let rep = evaluate_constraints(&c, &PressureLaw::quadratic()).unwrap();
        assert_eq!(rep.verdict, Verdict::AdmissibleWithin { tol: DEFAULT_TOL });
        assert!(rep.max_abs_residual() < 1e-13);
    }

    fn small() -> impl Strategy<Value = QuadraticNumber> {
        (-50i64..=50, 1i64..=20).prop_map(|(n, d)| q(n, d))
    }

    proptest! {
        #[test]
        fn right_energy_slack_vanishes_without_normal_motion(
            rho_plus in 1i64..20, rho_1 in 1i64..20, v1 in small(), alpha in small(),
            gamma in small(), delta in small(), c1 in small(), nu_minus in small(),
        ) {
            let mut c = FanSubsolutionCandidate::explicit_with_c1(c1);
            c.rho_plus = q(rho_plus, 1);
            c.rho_1 = q(rho_1, 3);
            c.v_plus = [v1, q(0, 1)];
            c.alpha = alpha;
            c.gamma = gamma;
            c.delta = delta;
            c.nu_minus = nu_minus;
            let rep = evaluate_constraints(&c, &PressureLaw::quadratic()).unwrap();
            prop_assert!(rep.slack("E_right").unwrap().is_zero());
        }

        #[test]
        fn scaling_beta_delta_and_speeds_breaks_identities(t in (1i64..40).prop_filter("t != 10", |t| *t != 10)) {
            let base = FanSubsolutionCandidate::explicit_with_c1(q(10273, 1680));
            // The explicit solution has β = δ = ν₊ = 0, so scale the interface speed ν₋.
            let mut c = base.clone();
            let t = q(t, 10);
            c.beta = &c.beta * &t;
            c.delta = &c.delta * &t;
            c.nu_minus = &c.nu_minus * &t;
            c.nu_plus = &c.nu_plus * &t;
            let rep = evaluate_constraints(&c, &PressureLaw::quadratic()).unwrap();
            prop_assert!(rep.equality_residuals.iter().any(|r| !r.value.is_zero()));
        }
    }
}
