//! States, fan partitions and candidate records.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number::QuadraticNumber;
use crate::scalar::Scalar;

/// Density and velocity of the compressible fluid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EulerState {
    pub rho: f64,
    pub v: [f64; 2],
}

impl EulerState {
    pub fn new(rho: f64, v: [f64; 2]) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::Domain(format!("density must be positive, got {rho}")));
        }
        Ok(EulerState { rho, v })
    }
}

/// Increasing slopes `ν₀ < … < ν_N` of the lines `x₂ = ν t` cutting the upper half plane.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FanPartition {
    speeds: Vec<f64>,
}

impl FanPartition {
    pub fn new(speeds: Vec<f64>) -> Result<Self> {
        if speeds.windows(2).any(|w| !(w[0] < w[1])) || speeds.iter().any(|s| !s.is_finite()) {
            return Err(Error::Invalid(format!("fan speeds must be strictly increasing: {speeds:?}")));
        }
        Ok(FanPartition { speeds })
    }

    pub fn speeds(&self) -> &[f64] {
        &self.speeds
    }

    /// Index of the open region containing `(x₂, t)`: 0 left of the first line,
    /// `N+1` right of the last. `None` on an interface or for `t ≤ 0`.
    pub fn region(&self, x2: f64, t: f64) -> Option<usize> {
        if t <= 0.0 {
            return None;
        }
        let mut idx = 0;
        for &s in &self.speeds {
            let line = s * t;
            if x2 == line {
                return None;
            }
            if x2 > line {
                idx += 1;
            }
        }
        Some(idx)
    }
}

/// A pair `(v, u)` with `u` symmetric and trace-free, stored as `(u11, u12)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StatePoint {
    pub v: [f64; 2],
    pub u11: f64,
    pub u12: f64,
}

impl StatePoint {
    pub fn new(v: [f64; 2], u11: f64, u12: f64) -> Self {
        StatePoint { v, u11, u12 }
    }

    /// Full matrix `[[u11, u12], [u12, −u11]]`.
    pub fn u(&self) -> [[f64; 2]; 2] {
        [[self.u11, self.u12], [self.u12, -self.u11]]
    }

    pub fn add(&self, o: &StatePoint) -> StatePoint {
        StatePoint { v: [self.v[0] + o.v[0], self.v[1] + o.v[1]], u11: self.u11 + o.u11, u12: self.u12 + o.u12 }
    }

    pub fn scale(&self, s: f64) -> StatePoint {
        StatePoint { v: [s * self.v[0], s * self.v[1]], u11: s * self.u11, u12: s * self.u12 }
    }

    pub fn norm(&self) -> f64 {
        (self.v[0].powi(2) + self.v[1].powi(2) + 2.0 * self.u11.powi(2) + 2.0 * self.u12.powi(2)).sqrt()
    }
}

/// Unknowns of the three-region fan subsolution: outer states, the middle
/// state `v₁ = (α, β)`, `u₁ = [[γ, δ], [δ, −γ]]`, energy constant `C₁` and interface speeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Serialize", deserialize = "S: Deserialize<'de>"))]
pub struct FanSubsolutionCandidate<S> {
    pub rho_minus: S,
    pub rho_plus: S,
    pub rho_1: S,
    pub v_minus: [S; 2],
    pub v_plus: [S; 2],
    pub alpha: S,
    pub beta: S,
    pub gamma: S,
    pub delta: S,
    pub c_1: S,
    pub nu_minus: S,
    pub nu_plus: S,
}

/// Number of scalar unknowns in a candidate.
pub const CANDIDATE_DIM: usize = 14;

/// Field names in the order used by [`FanSubsolutionCandidate::to_vec`].
pub const CANDIDATE_FIELDS: [&str; CANDIDATE_DIM] = [
    "rho_minus", "rho_plus", "rho_1", "v_minus_1", "v_minus_2", "v_plus_1", "v_plus_2", "alpha", "beta",
    "gamma", "delta", "c_1", "nu_minus", "nu_plus",
];

impl<S: Scalar> FanSubsolutionCandidate<S> {
    /// Checks positivity of densities and `ν₋ < ν₊`.
    pub fn validate(&self) -> Result<()> {
        use std::cmp::Ordering::Greater;
        for (name, r) in [("rho_minus", &self.rho_minus), ("rho_plus", &self.rho_plus), ("rho_1", &self.rho_1)] {
            if r.sign() != Greater {
                return Err(Error::Domain(format!("{name} must be positive")));
            }
        }
        if (self.nu_plus.clone() - self.nu_minus.clone()).sign() != Greater {
            return Err(Error::Invalid("interface speeds must satisfy nu_minus < nu_plus".into()));
        }
        Ok(())
    }

    pub fn map<T, F: Fn(&S) -> T>(&self, f: F) -> FanSubsolutionCandidate<T> {
        FanSubsolutionCandidate {
            rho_minus: f(&self.rho_minus),
            rho_plus: f(&self.rho_plus),
            rho_1: f(&self.rho_1),
            v_minus: [f(&self.v_minus[0]), f(&self.v_minus[1])],
            v_plus: [f(&self.v_plus[0]), f(&self.v_plus[1])],
            alpha: f(&self.alpha),
            beta: f(&self.beta),
            gamma: f(&self.gamma),
            delta: f(&self.delta),
            c_1: f(&self.c_1),
            nu_minus: f(&self.nu_minus),
            nu_plus: f(&self.nu_plus),
        }
    }

    pub fn to_f64(&self) -> FanSubsolutionCandidate<f64> {
        self.map(|x| x.to_f64())
    }

    /// Fan partition `{ν₋, ν₊}`.
    pub fn partition(&self) -> Result<FanPartition> {
        FanPartition::new(vec![self.nu_minus.to_f64(), self.nu_plus.to_f64()])
    }
}

impl FanSubsolutionCandidate<f64> {
    /// Flattens to `[ρ₋, ρ₊, ρ₁, v₋, v₊, α, β, γ, δ, C₁, ν₋, ν₊]`.
    pub fn to_vec(&self) -> Vec<f64> {
        vec![
            self.rho_minus, self.rho_plus, self.rho_1, self.v_minus[0], self.v_minus[1], self.v_plus[0],
            self.v_plus[1], self.alpha, self.beta, self.gamma, self.delta, self.c_1, self.nu_minus, self.nu_plus,
        ]
    }

    pub fn from_slice(x: &[f64]) -> Self {
        FanSubsolutionCandidate {
            rho_minus: x[0],
            rho_plus: x[1],
            rho_1: x[2],
            v_minus: [x[3], x[4]],
            v_plus: [x[5], x[6]],
            alpha: x[7],
            beta: x[8],
            gamma: x[9],
            delta: x[10],
            c_1: x[11],
            nu_minus: x[12],
            nu_plus: x[13],
        }
    }
}

impl FanSubsolutionCandidate<QuadraticNumber> {
    /// Candidate of the explicit construction with `C₁` left as a parameter and `γ = C₁/2 − 559/105`.
    pub fn explicit_with_c1(c_1: QuadraticNumber) -> Self {
        let q = QuadraticNumber::from_ratio;
        let gamma = &c_1 * &q(1, 2) - q(559, 105);
        FanSubsolutionCandidate {
            rho_minus: q(1, 1),
            rho_plus: q(4, 1),
            rho_1: q(15, 7),
            v_minus: [q(-1, 4), QuadraticNumber::sqrt2() * q(2, 1)],
            v_plus: [q(-1, 4), q(0, 1)],
            alpha: q(-1, 4),
            beta: q(0, 1),
            gamma,
            delta: q(0, 1),
            c_1,
            nu_minus: QuadraticNumber::sqrt2() * q(-7, 4),
            nu_plus: q(0, 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn region_lookup() {
        let fan = FanPartition::new(vec![-1.0, 2.0]).unwrap();
        assert_eq!(fan.region(-5.0, 1.0), Some(0));
        assert_eq!(fan.region(0.0, 1.0), Some(1));
        assert_eq!(fan.region(5.0, 1.0), Some(2));
        assert_eq!(fan.region(2.0, 1.0), None);
        assert_eq!(fan.region(0.0, 0.0), None);
        assert!(FanPartition::new(vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn candidate_flattening_round_trips() {
        let c = FanSubsolutionCandidate::explicit_with_c1(QuadraticNumber::from_ratio(10273, 1680)).to_f64();
        assert_eq!(FanSubsolutionCandidate::from_slice(&c.to_vec()), c);
    }

    #[test]
    fn exact_candidate_json_round_trips() {
        let c = FanSubsolutionCandidate::explicit_with_c1(QuadraticNumber::from_ratio(10273, 1680));
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("sqrt2_num"));
        let back: FanSubsolutionCandidate<QuadraticNumber> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
