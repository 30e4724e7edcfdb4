use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Free parameters of the `v± = (±1, 0)`, `ρ₁ = 1` construction together with the
/// quantities solved from them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct S6Parameters {
    pub alpha: f64,
    pub beta_bar: f64,
    pub gamma: f64,
    pub delta_bar: f64,
    pub c_bar: f64,
    pub lambda: f64,
    pub eta: f64,
    pub theta: f64,
    pub nu_minus_bar: f64,
    pub nu_plus: f64,
    pub r_minus: f64,
    pub r_plus: f64,
    pub rho_minus: f64,
    pub rho_plus: f64,
    pub q_minus: f64,
    pub q_plus: f64,
}

impl S6Parameters {
    /// Solves for `ν⁻, ν₊, r±, ρ±, q±` given `λ = δ̄ − αβ̄`.
    pub fn from_lambda(alpha: f64, beta_bar: f64, gamma: f64, c_bar: f64, lambda: f64, eta: f64) -> Result<Self> {
        let vals = [alpha, beta_bar, gamma, c_bar, lambda, eta];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid(format!("non-finite parameter in {vals:?}")));
        }
        if alpha * alpha == 1.0 {
            return Err(Error::Domain("alpha = ±1 leaves the velocity system singular".into()));
        }
        let delta_bar = lambda + alpha * beta_bar;
        let nu_minus_bar = (delta_bar + beta_bar) / (1.0 + alpha);
        let nu_plus = (delta_bar - beta_bar) / (1.0 - alpha);
        let r_minus = lambda / (1.0 + alpha);
        let r_plus = lambda / (1.0 - alpha);
        Ok(S6Parameters {
            alpha,
            beta_bar,
            gamma,
            delta_bar,
            c_bar,
            lambda,
            eta,
            theta: 1.0 - alpha,
            nu_minus_bar,
            nu_plus,
            r_minus,
            r_plus,
            rho_minus: r_minus / nu_minus_bar,
            rho_plus: r_plus / nu_plus,
            q_minus: nu_minus_bar * beta_bar - (c_bar - gamma),
            q_plus: (c_bar - gamma) + nu_plus * beta_bar,
        })
    }

    /// `λ = √((C̄ − α² + γ)(C̄ − β̄² − γ)) − η`.
    pub fn from_free(alpha: f64, beta_bar: f64, gamma: f64, c_bar: f64, eta: f64) -> Result<Self> {
        let prod = (c_bar - alpha * alpha + gamma) * (c_bar - beta_bar * beta_bar - gamma);
        if !(prod > 0.0) {
            return Err(Error::Domain(format!(
                "(C - alpha^2 + gamma)(C - beta^2 - gamma) = {prod} must be positive"
            )));
        }
        Self::from_lambda(alpha, beta_bar, gamma, c_bar, prod.sqrt() - eta, eta)
    }

    /// `C₁ = 2C̄`.
    pub fn c_1(&self) -> f64 {
        2.0 * self.c_bar
    }

    /// Right-hand sides `((C₁ − 1)/2) ρ∓` of the two integral inequalities.
    pub fn thresholds(&self) -> (f64, f64) {
        let k = (self.c_1() - 1.0) / 2.0;
        (k * self.rho_minus, k * self.rho_plus)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainInequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs − rhs`; positive means satisfied.
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainLevel {
    pub name: String,
    pub inequalities: Vec<ChainInequality>,
    pub pass: bool,
}

impl ChainLevel {
    fn new(name: &str, items: Vec<(&str, f64, f64)>) -> Self {
        let inequalities: Vec<ChainInequality> = items
            .into_iter()
            .map(|(n, lhs, rhs)| ChainInequality { name: n.into(), lhs, rhs, slack: lhs - rhs })
            .collect();
        let pass = inequalities.iter().all(|i| i.slack > 0.0);
        ChainLevel { name: name.into(), inequalities, pass }
    }

    /// Smallest `slack / max(|lhs|, |rhs|)` over the level.
    pub fn min_relative_slack(&self) -> f64 {
        self.inequalities
            .iter()
            .map(|i| {
                let s = i.lhs.abs().max(i.rhs.abs());
                if s > 0.0 { i.slack / s } else { i.slack }
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Three successively stronger sufficient conditions.
///
/// `lambda` holds the conditions in terms of `λ`; `decoupled` removes `λ` and `δ̄`;
/// `scalar` removes `α` by letting it tend to 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub levels: Vec<ChainLevel>,
}

impl ChainReport {
    pub fn level(&self, name: &str) -> Option<&ChainLevel> {
        self.levels.iter().find(|l| l.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.levels.iter().all(|l| l.pass)
    }
}

/// Evaluates every inequality of the three levels.
pub fn check_inequality_chain(p: &S6Parameters) -> ChainReport {
    let (a, b, g, c, l) = (p.alpha, p.beta_bar, p.gamma, p.c_bar, p.lambda);
    let b2 = b * b;
    let first = c - a * a + g;
    let second = c - b2 - g;
    let lambda_level = ChainLevel::new(
        "lambda",
        vec![
            ("alpha_squared_below_one", 1.0, a * a),
            ("lambda_above_beta_gap", l, (1.0 - a) * b),
            ("beta_gap_positive", (1.0 - a) * b, 0.0),
            ("c_bar_above_half", c, 0.5),
            ("left_energy", b * (1.0 + a) * (b2 - c + g), (c - b2 - 0.5) * l),
            ("right_energy", b * (1.0 - a) * (-b2 + c - g), (c - b2 - 0.5) * l),
            ("trace", 2.0 * c, a * a + b2),
            ("determinant", first * second, l * l),
        ],
    );
    let root = (first.max(0.0) * second.max(0.0)).sqrt();
    let decoupled = ChainLevel::new(
        "decoupled",
        vec![
            ("alpha_squared_below_one", 1.0, a * a),
            ("c_bar_above_half", c, 0.5),
            ("first_factor", first, 0.0),
            ("second_factor", second, 0.0),
            ("beta_excess", b2 + 0.5 - c, 0.0),
            ("root_above_beta_gap", root, (1.0 - a) * b),
            ("beta_gap_positive", (1.0 - a) * b, 0.0),
            ("left_energy", (b2 + 0.5 - c) * first.max(0.0).sqrt(), b * (1.0 + a) * second.max(0.0).sqrt()),
        ],
    );
    ChainReport { levels: vec![lambda_level, decoupled, scalar_level(b, g, c)] }
}

fn scalar_level(b: f64, g: f64, c: f64) -> ChainLevel {
    let b2 = b * b;
    ChainLevel::new(
        "scalar",
        vec![
            ("beta_positive", b, 0.0),
            ("c_bar_above_half", c, 0.5),
            ("second_factor", c - b2 - g, 0.0),
            ("first_factor_at_one", c - 1.0 + g, 0.0),
            (
                "left_energy_at_one",
                (b2 + 0.5 - c) * (c - 1.0 + g).max(0.0).sqrt(),
                2.0 * b * (c - b2 - g).max(0.0).sqrt(),
            ),
        ],
    )
}

/// Energy-type slack `β̄q₋ − (C̄ − ½)r₋` in the substituted variables.
pub fn left_energy_slack(p: &S6Parameters) -> f64 {
    p.beta_bar * p.q_minus - (p.c_bar - 0.5) * p.r_minus
}

/// The same inequality before substitution: `−βq₋ − ((C₁ − 1)/2)(−ν₋ρ₋)`.
pub fn left_energy_slack_original(p: &S6Parameters) -> f64 {
    let (beta, nu_minus) = (-p.beta_bar, -p.nu_minus_bar);
    -beta * p.q_minus - (p.c_1() - 1.0) / 2.0 * (-nu_minus * p.rho_minus)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ParameterOptions {
    /// Use this `β̄` instead of twice the root of the scalar-level inequality.
    pub beta_bar: Option<f64>,
    /// Use this `α` instead of shrinking `θ = 1 − α`.
    pub alpha: Option<f64>,
    /// Use this `η` instead of shrinking it.
    pub eta: Option<f64>,
}

const MIN_RELATIVE_SLACK: f64 = 1e-3;
const MAX_HALVINGS: usize = 60;

/// `(β̄²/5 + ½)√(2β̄²/5 − 1) − 2β̄²/√5`, the scalar inequality along `C̄ = 4β̄²/5`, `γ = −2β̄²/5`.
fn scalar_gap(b: f64) -> f64 {
    let b2 = b * b;
    (b2 / 5.0 + 0.5) * (2.0 * b2 / 5.0 - 1.0).max(0.0).sqrt() - 2.0 * b2 / 5f64.sqrt()
}

/// Smallest `β̄ > √(5/2)` where the scalar inequality along the default ray becomes true.
pub fn scalar_threshold() -> f64 {
    let mut lo = 2.5f64.sqrt() * (1.0 + 1e-12);
    let mut hi = 2.0 * lo;
    while scalar_gap(hi) <= 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if scalar_gap(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Picks `C̄ = 4β̄²/5`, `γ = −2β̄²/5`, then shrinks `θ` and `η` geometrically from ½
/// until the decoupled and `λ` levels pass with relative slack `1e−3`.
pub fn find_parameters(opts: &ParameterOptions) -> Result<S6Parameters> {
    let beta_bar = opts.beta_bar.unwrap_or_else(|| 2.0 * scalar_threshold());
    if !(beta_bar > 0.0) {
        return Err(Error::Invalid(format!("beta_bar must be positive, got {beta_bar}")));
    }
    let c_bar = 0.8 * beta_bar * beta_bar;
    let gamma = -0.4 * beta_bar * beta_bar;
    let scalar = scalar_level(beta_bar, gamma, c_bar);
    if opts.beta_bar.is_none() && !scalar.pass {
        return Err(Error::Solver(format!("scalar level fails at beta_bar = {beta_bar}")));
    }
    let passes = |p: &S6Parameters, level: &str| {
        let rep = check_inequality_chain(p);
        let l = rep.level(level).expect("level exists");
        l.pass && l.min_relative_slack() >= MIN_RELATIVE_SLACK
    };
    let probe_eta = |alpha: f64| S6Parameters::from_free(alpha, beta_bar, gamma, c_bar, 0.0);

    let alpha = match opts.alpha {
        Some(a) => a,
        None => {
            let mut theta = 0.5;
            let mut found = None;
            for _ in 0..MAX_HALVINGS {
                if let Ok(p) = probe_eta(1.0 - theta) {
                    if passes(&p, "decoupled") {
                        found = Some(1.0 - theta);
                        break;
                    }
                }
                theta *= 0.5;
            }
            found.ok_or_else(|| Error::Solver(format!("no theta found for beta_bar = {beta_bar}")))?
        }
    };
    match opts.eta {
        Some(eta) => S6Parameters::from_free(alpha, beta_bar, gamma, c_bar, eta),
        None => {
            let mut eta = 0.5;
            for _ in 0..MAX_HALVINGS {
                if let Ok(p) = S6Parameters::from_free(alpha, beta_bar, gamma, c_bar, eta) {
                    if passes(&p, "lambda") {
                        return Ok(p);
                    }
                }
                eta *= 0.5;
            }
            Err(Error::Solver(format!("no eta found for beta_bar = {beta_bar}, alpha = {alpha}")))
        }
    }
}
