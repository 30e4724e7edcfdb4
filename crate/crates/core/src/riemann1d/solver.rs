use serde::{Deserialize, Serialize};

use super::waves::{backward_3_velocity, eigenvalues, forward_1_velocity, rarefaction_integral_between, ReducedState};
use crate::error::{Error, Result};
use crate::pressure::PressureLaw;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Wave {
    Rarefaction { family: u8, xi_head: f64, xi_tail: f64, left: ReducedState, right: ReducedState },
    Shock { family: u8, speed: f64, left: ReducedState, right: ReducedState },
    Contact { speed: f64, m1_left: f64, m1_right: f64 },
}

impl Wave {
    /// Leftmost and rightmost `ξ` occupied by the wave.
    pub fn xi_range(&self) -> (f64, f64) {
        match *self {
            Wave::Rarefaction { xi_head, xi_tail, .. } => (xi_head, xi_tail),
            Wave::Shock { speed, .. } | Wave::Contact { speed, .. } => (speed, speed),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Wave::Rarefaction { .. } => "rarefaction",
            Wave::Shock { .. } => "shock",
            Wave::Contact { .. } => "contact",
        }
    }

    pub fn family(&self) -> u8 {
        match *self {
            Wave::Rarefaction { family, .. } | Wave::Shock { family, .. } => family,
            Wave::Contact { .. } => 2,
        }
    }
}

/// Self-similar solution `(ρ, m)(x₂, t) = (R, M)(x₂/t)`: waves in order with the
/// constant states between them (`states.len() == waves.len() + 1`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfSimilarSolution {
    pub waves: Vec<Wave>,
    pub states: Vec<ReducedState>,
    pub law: PressureLaw,
}

fn same_state(a: &ReducedState, b: &ReducedState, tol: f64) -> bool {
    let close = |x: f64, y: f64| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs()));
    close(a.rho, b.rho) && close(a.m1, b.m1) && close(a.m2, b.m2)
}

/// Middle density where the forward 1-curve of `left` meets the backward 3-curve of `right`.
fn middle_density(left: &ReducedState, right: &ReducedState, law: &PressureLaw) -> Result<f64> {
    let (dlo, dhi) = law.domain();
    let mut lo = (left.rho.min(right.rho) / 1e3).max(dlo);
    let mut hi = (left.rho.max(right.rho) * 1e3).min(dhi);
    let f = |r: f64| -> Result<f64> { Ok(forward_1_velocity(left, r, law)? - backward_3_velocity(right, r, law)?) };
    let (flo, fhi) = (f(lo)?, f(hi)?);
    if flo < 0.0 {
        return Err(Error::Unsupported(format!(
            "wave curves do not meet above density {lo}: vacuum forms (gap {flo})"
        )));
    }
    if fhi > 0.0 {
        return Err(Error::Solver(format!(
            "middle state not bracketed in [{lo}, {hi}]: curve gap {flo} .. {fhi}"
        )));
    }
    // The gap is decreasing in density, so bisection is globally safe.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Secant polish inside the final bracket.
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a)?, f(b)?);
    let mut x = if fa == fb { 0.5 * (a + b) } else { a - fa * (b - a) / (fb - fa) };
    for _ in 0..4 {
        if !(x > a.min(b) && x < a.max(b)) || fa == fb {
            break;
        }
        let fx = f(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        (a, fa, b, fb) = (b, fb, x, fx);
        x = b - fb * (b - a) / (fb - fa);
    }
    let r = 0.5 * (lo + hi);
    Ok(if (x - r).abs() <= (hi - lo) { x } else { r })
}

/// Solves the Riemann problem for the plane-symmetric system: at most one 1-wave,
/// a contact carrying the jump of `m₁/ρ`, and one 3-wave.
///
/// Waves whose strength is below `tol` (relative) are dropped and the neighboring
/// state is taken to be the exact datum.
pub fn solve_riemann(left: &ReducedState, right: &ReducedState, law: &PressureLaw, tol: f64) -> Result<SelfSimilarSolution> {
    for s in [left, right] {
        if !(s.rho > 0.0) {
            return Err(Error::Domain(format!("density must be positive, got {}", s.rho)));
        }
        law.sound_speed(s.rho)?;
    }
    if same_state(left, right, tol) {
        return Ok(SelfSimilarSolution { waves: vec![], states: vec![*left], law: law.clone() });
    }
    let rho_star = middle_density(left, right, law)?;
    let near = |a: f64, b: f64| (a - b).abs() <= tol * a.max(b);
    let u_star = forward_1_velocity(left, rho_star, law)?;

    let mut waves = Vec::new();
    let mut states = vec![*left];

    // 1-wave.
    let star_left = if near(rho_star, left.rho) {
        *left
    } else if near(rho_star, right.rho) && (left.w() - right.w()).abs() <= tol * (1.0 + left.w().abs()) {
        // Right datum lies on the 1-curve of the left one.
        *right
    } else {
        ReducedState::new(rho_star, rho_star * left.w(), rho_star * u_star)?
    };
    if !same_state(&star_left, left, 0.0) {
        if star_left.rho < left.rho {
            let (h, _, _) = eigenvalues(left, law)?;
            let (t, _, _) = eigenvalues(&star_left, law)?;
            waves.push(Wave::Rarefaction { family: 1, xi_head: h, xi_tail: t, left: *left, right: star_left });
        } else {
            let speed = (star_left.m2 - left.m2) / (star_left.rho - left.rho);
            waves.push(Wave::Shock { family: 1, speed, left: *left, right: star_left });
        }
        states.push(star_left);
    }

    // Contact.
    let star_right = if near(star_left.rho, right.rho) && near_u(&star_left, right, tol) {
        *right
    } else {
        ReducedState::new(star_left.rho, star_left.rho * right.w(), star_left.m2)?
    };
    if (star_left.w() - star_right.w()).abs() > tol * (1.0 + star_left.w().abs()) {
        waves.push(Wave::Contact { speed: star_left.u(), m1_left: star_left.m1, m1_right: star_right.m1 });
        states.push(star_right);
    }

    // 3-wave.
    if !same_state(&star_right, right, tol) {
        if star_right.rho < right.rho {
            let (_, _, h) = eigenvalues(&star_right, law)?;
            let (_, _, t) = eigenvalues(right, law)?;
            waves.push(Wave::Rarefaction { family: 3, xi_head: h, xi_tail: t, left: star_right, right: *right });
        } else {
            let speed = (right.m2 - star_right.m2) / (right.rho - star_right.rho);
            waves.push(Wave::Shock { family: 3, speed, left: star_right, right: *right });
        }
        states.push(*right);
    } else if let Some(last) = states.last_mut() {
        *last = *right;
    }
    Ok(SelfSimilarSolution { waves, states, law: law.clone() })
}

fn near_u(a: &ReducedState, b: &ReducedState, tol: f64) -> bool {
    (a.u() - b.u()).abs() <= tol * (1.0 + a.u().abs())
}

impl SelfSimilarSolution {
    /// State at `ξ = x₂/t`; at a shock or contact speed the right limit is returned.
    pub fn eval(&self, xi: f64) -> Result<ReducedState> {
        for (i, w) in self.waves.iter().enumerate() {
            match *w {
                Wave::Rarefaction { family, xi_head, xi_tail, left, right } => {
                    if xi < xi_head {
                        return Ok(self.states[i]);
                    }
                    if xi < xi_tail {
                        return rarefaction_state(family, &left, &right, xi, &self.law);
                    }
                }
                Wave::Shock { speed, .. } | Wave::Contact { speed, .. } => {
                    if xi < speed {
                        return Ok(self.states[i]);
                    }
                }
            }
        }
        Ok(*self.states.last().expect("at least one state"))
    }

    pub fn left_state(&self) -> ReducedState {
        self.states[0]
    }

    pub fn right_state(&self) -> ReducedState {
        *self.states.last().expect("at least one state")
    }

    /// All `ξ` where the solution is not smooth: shock and contact speeds and rarefaction edges.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .waves
            .iter()
            .flat_map(|w| {
                let (a, b) = w.xi_range();
                [a, b]
            })
            .collect();
        v.dedup();
        v
    }

    /// CSV `t,x2,rho,v1,v2` on the tensor grid `ts × x2s` (forward time, `t > 0`).
    pub fn sample_csv(&self, ts: &[f64], x2s: &[f64]) -> Result<String> {
        let mut out = String::from("t,x2,rho,v1,v2\n");
        for &t in ts {
            if !(t > 0.0) {
                return Err(Error::Invalid(format!("sample times must be positive, got {t}")));
            }
            for &x in x2s {
                let s = self.eval(x / t)?;
                let v = s.velocity();
                out.push_str(&format!("{t:?},{x:?},{:?},{:?},{:?}\n", s.rho, v[0], v[1]));
            }
        }
        Ok(out)
    }

    /// JSON summary listing waves with their speeds, ξ-ranges and adjacent states.
    pub fn summary(&self) -> serde_json::Value {
        let waves: Vec<serde_json::Value> = self
            .waves
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let (a, b) = w.xi_range();
                serde_json::json!({
                    "kind": w.kind(),
                    "family": w.family(),
                    "xi_range": [a, b],
                    "left_state": self.states[i],
                    "right_state": self.states[i + 1],
                })
            })
            .collect();
        serde_json::json!({ "waves": waves, "states": self.states })
    }
}

/// Point inside a rarefaction fan: `λ_family(state) = ξ`.
fn rarefaction_state(family: u8, left: &ReducedState, right: &ReducedState, xi: f64, law: &PressureLaw) -> Result<ReducedState> {
    let w = left.w();
    if let PressureLaw::Polytropic { kappa, gamma } = law {
        // u ∓ c with u = w₃ − I(ρ) (family 1) or w₁ + I(ρ) (family 3), both ∝ ρ^k.
        let k = 0.5 * (gamma - 1.0);
        let a = (kappa * gamma).sqrt();
        let i_left = a / k * left.rho.powf(k);
        let (rho_k, u) = if family == 1 {
            let w3 = left.u() + i_left;
            let rk = (w3 - xi) / (a / k + a);
            (rk, w3 - a / k * rk)
        } else {
            let w1 = left.u() - i_left;
            let rk = (xi - w1) / (a / k + a);
            (rk, w1 + a / k * rk)
        };
        let rho = rho_k.powf(1.0 / k);
        return ReducedState::new(rho, rho * w, rho * u);
    }
    // General law: bisection on the density between the two edge states.
    let (mut lo, mut hi) = (left.rho.min(right.rho), left.rho.max(right.rho));
    let speed = |r: f64| -> Result<f64> {
        let c = law.sound_speed(r)?;
        Ok(if family == 1 {
            left.u() + rarefaction_integral_between(law, r, left.rho)? - c
        } else {
            left.u() + rarefaction_integral_between(law, left.rho, r)? + c
        })
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        // Family-1 speed decreases with density, family-3 speed increases.
        let s = speed(mid)?;
        let go_up = if family == 1 { s > xi } else { s < xi };
        if go_up {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let rho = 0.5 * (lo + hi);
    let u = if family == 1 {
        left.u() + rarefaction_integral_between(law, rho, left.rho)?
    } else {
        left.u() + rarefaction_integral_between(law, left.rho, rho)?
    };
    ReducedState::new(rho, rho * w, rho * u)
}
