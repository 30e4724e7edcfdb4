use serde::{Deserialize, Serialize};

use super::params::S6Parameters;
use crate::error::{Error, Result};
use crate::pressure::{check_hyperbolicity, PressureLaw, TabulatedPressure};
use crate::quadrature::GaussLegendre;
use crate::state::FanSubsolutionCandidate;

/// Suprema of `L⁻` and `L⁺` over measures of mass `q∓` on `[ρ₋, ρ₁]` and `[ρ₁, ρ₊]`,
/// attained by a Dirac mass at `ρ₁`: `(q₋(ρ₁ − ρ₋)/ρ₁, q₊(ρ₊ − ρ₁)/ρ₁)`.
pub fn extremal_functionals(q_minus: f64, q_plus: f64, rho_minus: f64, rho_1: f64, rho_plus: f64) -> Result<(f64, f64)> {
    if !(rho_minus > 0.0 && rho_minus <= rho_1 && rho_1 <= rho_plus) {
        return Err(Error::Domain(format!(
            "need 0 < rho_minus <= rho_1 <= rho_plus, got {rho_minus}, {rho_1}, {rho_plus}"
        )));
    }
    if !(q_minus >= 0.0 && q_plus >= 0.0) {
        return Err(Error::Domain(format!("masses must be nonnegative, got {q_minus}, {q_plus}")));
    }
    Ok((q_minus * (rho_1 - rho_minus) / rho_1, q_plus * (rho_plus - rho_1) / rho_1))
}

/// `(L⁻(f), L⁺(f)) = (∫_{ρ₋}^{ρ₁} (r − ρ₋)/r f, ∫_{ρ₁}^{ρ₊} (ρ₊ − r)/r f)` for `f = p′` of a table.
pub fn functionals(t: &TabulatedPressure, rho_minus: f64, rho_1: f64, rho_plus: f64) -> (f64, f64) {
    let gl = GaussLegendre::new(8);
    let over = |a: f64, b: f64, w: &dyn Fn(f64) -> f64| {
        let mut cuts: Vec<f64> = vec![a];
        cuts.extend(t.breakpoints().iter().copied().filter(|&r| r > a && r < b));
        cuts.push(b);
        cuts.windows(2).map(|c| gl.integrate(c[0], c[1], |r| w(r) * t.fprime(r))).sum::<f64>()
    };
    (
        over(rho_minus, rho_1, &|r| (r - rho_minus) / r),
        over(rho_1, rho_plus, &|r| (rho_plus - r) / r),
    )
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DesignOptions {
    /// Allowed loss `m± − L±(f)`; default 5% of the smaller gap `m± − threshold`.
    pub epsilon: Option<f64>,
    /// Bump width as a fraction of `ρ₁ − ρ₋` and `ρ₊ − ρ₁`; default halves from 0.1
    /// until both losses are below `epsilon`.
    pub width_fraction: Option<f64>,
}

/// A tabulated pressure with prescribed jumps `p(ρ₁) − p(ρ₋) = q₋`, `p(ρ₊) − p(ρ₁) = q₊`
/// whose derivative concentrates next to `ρ₁`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignedPressure {
    pub law: PressureLaw,
    pub rho_minus: f64,
    pub rho_plus: f64,
    pub q_minus: f64,
    pub q_plus: f64,
    pub epsilon: f64,
    pub m_minus: f64,
    pub m_plus: f64,
    pub l_minus: f64,
    pub l_plus: f64,
    pub threshold_minus: f64,
    pub threshold_plus: f64,
    /// `L∓ − threshold∓`.
    pub margin_minus: f64,
    pub margin_plus: f64,
    pub bump_left: [f64; 2],
    pub bump_right: [f64; 2],
    pub floor: f64,
}

impl DesignedPressure {
    pub fn table(&self) -> &TabulatedPressure {
        match &self.law {
            PressureLaw::Tabulated(t) => t,
            PressureLaw::Polytropic { .. } => unreachable!("designed laws are tabulated"),
        }
    }
}

const BUMP_NODES: usize = 257;
const FLOOR_FRACTION: f64 = 1e-6;

fn bump(s: f64) -> f64 {
    if s.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - s * s)).exp()
    }
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
}

/// Breakpoints: coarse outside the bumps, `BUMP_NODES` across each bump, with
/// `ρ₋`, `ρ₁ = 1`, `ρ₊` and the bump edges as nodes.
fn grid(rho_minus: f64, rho_plus: f64, wl: f64, wr: f64) -> Vec<f64> {
    let (lo, hi) = (0.5 * rho_minus, 1.5 * rho_plus);
    let pieces = [
        (lo, rho_minus, 17),
        (rho_minus, 1.0 - wl, 65),
        (1.0 - wl, 1.0, BUMP_NODES),
        (1.0, 1.0 + wr, BUMP_NODES),
        (1.0 + wr, rho_plus, 65),
        (rho_plus, hi, 17),
    ];
    let mut v: Vec<f64> = Vec::new();
    for (a, b, n) in pieces {
        for r in linspace(a, b, n) {
            if v.last().is_none_or(|&l| r > l) {
                v.push(r);
            }
        }
    }
    v
}

fn build(p: &S6Parameters, wl: f64, wr: f64) -> Result<(TabulatedPressure, f64)> {
    let (rm, rp) = (p.rho_minus, p.rho_plus);
    let rho = grid(rm, rp, wl, wr);
    let bl: Vec<f64> = rho.iter().map(|&r| bump((r - (1.0 - 0.5 * wl)) / (0.5 * wl))).collect();
    let br: Vec<f64> = rho.iter().map(|&r| bump((r - (1.0 + 0.5 * wr)) / (0.5 * wr))).collect();
    // The monotone interpolant is homogeneous in the secants, so a floor plus scaled
    // bumps interpolates to the floor plus the scaled bump interpolants.
    let unit_l = TabulatedPressure::new(rho.clone(), bl.clone(), 1.0, 0.0)?.integral_of_fprime(rm, 1.0);
    let unit_r = TabulatedPressure::new(rho.clone(), br.clone(), 1.0, 0.0)?.integral_of_fprime(1.0, rp);
    let peak = (-1.0f64).exp();
    let floor = FLOOR_FRACTION * peak * (p.q_minus / unit_l).min(p.q_plus / unit_r);
    let mut al = (p.q_minus - floor * (1.0 - rm)) / unit_l;
    let mut ar = (p.q_plus - floor * (rp - 1.0)) / unit_r;
    if !(al > 0.0 && ar > 0.0) {
        return Err(Error::Margin(format!("masses {} and {} too small for the floor", p.q_minus, p.q_plus)));
    }
    let make = |al: f64, ar: f64| {
        let f: Vec<f64> = bl.iter().zip(&br).map(|(a, b)| floor + al * a + ar * b).collect();
        TabulatedPressure::new(rho.clone(), f, 1.0, p.q_minus + rm)
    };
    let mut t = make(al, ar)?;
    for _ in 0..3 {
        let ml = t.integral_of_fprime(rm, 1.0);
        let mr = t.integral_of_fprime(1.0, rp);
        if (ml - p.q_minus).abs() <= 1e-13 * p.q_minus && (mr - p.q_plus).abs() <= 1e-13 * p.q_plus {
            break;
        }
        al += (p.q_minus - ml) / unit_l;
        ar += (p.q_plus - mr) / unit_r;
        t = make(al, ar)?;
    }
    Ok((t, floor))
}

/// Builds `p′ = floor + bumps` on `(1 − w₋, 1)` and `(1, 1 + w₊)` with masses `q∓`.
pub fn construct_pressure(p: &S6Parameters, opts: &DesignOptions) -> Result<DesignedPressure> {
    let (rm, rp) = (p.rho_minus, p.rho_plus);
    if !(0.0 < rm && rm < 1.0 && 1.0 < rp) {
        return Err(Error::Domain(format!("need 0 < rho_minus < 1 < rho_plus, got {rm}, {rp}")));
    }
    if !(p.q_minus > 0.0 && p.q_plus > 0.0) {
        return Err(Error::Domain(format!("masses must be positive, got {}, {}", p.q_minus, p.q_plus)));
    }
    let (m_minus, m_plus) = extremal_functionals(p.q_minus, p.q_plus, rm, 1.0, rp)?;
    let (tm, tp) = p.thresholds();
    let gap = (m_minus - tm).min(m_plus - tp);
    if !(gap > 0.0) {
        return Err(Error::Margin(format!(
            "extremal values do not exceed the thresholds: m- = {m_minus} vs {tm}, m+ = {m_plus} vs {tp}"
        )));
    }
    let epsilon = opts.epsilon.unwrap_or(0.05 * gap);
    if !(epsilon > 0.0) || epsilon >= gap {
        return Err(Error::Margin(format!(
            "epsilon = {epsilon} leaves no margin: deficits m- - eps - threshold = {}, m+ - eps - threshold = {}",
            m_minus - epsilon - tm,
            m_plus - epsilon - tp
        )));
    }
    let mut frac = opts.width_fraction.unwrap_or(0.1);
    let mut attempt = 0;
    loop {
        let (wl, wr) = (frac * (1.0 - rm), frac * (rp - 1.0));
        let (t, floor) = build(p, wl, wr)?;
        let (l_minus, l_plus) = functionals(&t, rm, 1.0, rp);
        let good = l_minus >= m_minus - epsilon && l_plus >= m_plus - epsilon;
        if good || opts.width_fraction.is_some() || attempt >= 40 {
            if !good && opts.width_fraction.is_none() {
                return Err(Error::Margin(format!("bumps did not reach m± − eps: L- = {l_minus}, L+ = {l_plus}")));
            }
            let rep = check_hyperbolicity(&PressureLaw::Tabulated(t.clone()), t.domain(), 4001)?;
            if rep.min_dp <= 0.0 {
                return Err(Error::Margin(format!("designed p' is not positive: min {}", rep.min_dp)));
            }
            return Ok(DesignedPressure {
                law: PressureLaw::Tabulated(t),
                rho_minus: rm,
                rho_plus: rp,
                q_minus: p.q_minus,
                q_plus: p.q_plus,
                epsilon,
                m_minus,
                m_plus,
                l_minus,
                l_plus,
                threshold_minus: tm,
                threshold_plus: tp,
                margin_minus: l_minus - tm,
                margin_plus: l_plus - tp,
                bump_left: [1.0 - wl, 1.0],
                bump_right: [1.0, 1.0 + wr],
                floor,
            });
        }
        frac *= 0.5;
        attempt += 1;
    }
}

/// Candidate with `v± = (±1, 0)`, `ρ₁ = 1`, `β = −β̄`, `δ = −δ̄`, `C₁ = 2C̄`, `ν₋ = −ν⁻`.
pub fn assemble_s6_candidate(p: &S6Parameters, dp: &DesignedPressure) -> Result<FanSubsolutionCandidate<f64>> {
    if dp.q_minus != p.q_minus || dp.q_plus != p.q_plus || dp.rho_minus != p.rho_minus || dp.rho_plus != p.rho_plus {
        return Err(Error::Invalid("pressure was designed for different parameters".into()));
    }
    Ok(FanSubsolutionCandidate {
        rho_minus: p.rho_minus,
        rho_plus: p.rho_plus,
        rho_1: 1.0,
        v_minus: [-1.0, 0.0],
        v_plus: [1.0, 0.0],
        alpha: p.alpha,
        beta: -p.beta_bar,
        gamma: p.gamma,
        delta: -p.delta_bar,
        c_1: p.c_1(),
        nu_minus: -p.nu_minus_bar,
        nu_plus: p.nu_plus,
    })
}
