use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::field::PiecewiseFan;
use super::residual::{subsolution_residual, QuadOptions};
use super::testfn::TestFunction;
use crate::error::{Error, Result};
use crate::fanalgebra::evaluate_constraints;
use crate::pressure::PressureLaw;
use crate::state::FanSubsolutionCandidate;

/// Algebraic residuals at or below this are treated as exact zeros.
pub const ALGEBRAIC_ZERO: f64 = 1e-9;

const EXACT_CEILING: f64 = 1e-12;
const VIOLATION_FLOOR: f64 = 1e-7;
const PERTURBABLE: [&str; 12] =
    ["rho_minus", "rho_plus", "rho_1", "v_minus_1", "v_minus_2", "v_plus_1", "v_plus_2", "alpha", "beta", "gamma", "delta", "nu_plus"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomFan {
    pub candidate: FanSubsolutionCandidate<f64>,
    /// Field and additive shift applied after solving the jump conditions.
    pub perturbation: Option<(String, f64)>,
    pub max_algebraic_residual: f64,
}

fn field_mut<'a>(c: &'a mut FanSubsolutionCandidate<f64>, name: &str) -> &'a mut f64 {
    match name {
        "rho_minus" => &mut c.rho_minus,
        "rho_plus" => &mut c.rho_plus,
        "rho_1" => &mut c.rho_1,
        "v_minus_1" => &mut c.v_minus[0],
        "v_minus_2" => &mut c.v_minus[1],
        "v_plus_1" => &mut c.v_plus[0],
        "v_plus_2" => &mut c.v_plus[1],
        "alpha" => &mut c.alpha,
        "beta" => &mut c.beta,
        "gamma" => &mut c.gamma,
        "delta" => &mut c.delta,
        _ => &mut c.nu_plus,
    }
}

/// Fan satisfying all six jump conditions, or `None` when the draw admits no right interface.
fn draw_exact(rng: &mut ChaCha8Rng, law: &PressureLaw) -> Result<Option<FanSubsolutionCandidate<f64>>> {
    let rm = rng.gen_range(0.5..4.0);
    let r1: f64 = rng.gen_range(0.5..4.0);
    let rp = rng.gen_range(0.5..4.0);
    if (rm - r1).abs() < 0.3 || (r1 - rp).abs() < 0.3 {
        return Ok(None);
    }
    let vm = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
    let (al, be): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let c1 = al * al + be * be + rng.gen_range(0.5..3.0);
    let (pm, p1, pp) = (law.p(rm)?, law.p(r1)?, law.p(rp)?);

    let nm = (rm * vm[1] - r1 * be) / (rm - r1);
    let de = (rm * vm[0] * vm[1] - nm * (rm * vm[0] - r1 * al)) / r1;
    let ga = (nm * (rm * vm[1] - r1 * be) - rm * vm[1] * vm[1] - pm + p1 + 0.5 * r1 * c1) / r1;

    let d = r1 - rp;
    let g = -r1 * ga + p1 - pp + 0.5 * r1 * c1;
    let disc = 4.0 * d * r1 * rp * (g - r1 * be * be);
    if disc < 0.0 {
        return Ok(None);
    }
    let (qa, qb) = (d * r1, -2.0 * r1 * be * d);
    let roots = [(-qb + disc.sqrt()) / (2.0 * qa), (-qb - disc.sqrt()) / (2.0 * qa)];
    for np in roots {
        let vp2 = (r1 * be - np * d) / rp;
        if np < nm + 0.2 || (np - vp2).abs() < 0.1 {
            continue;
        }
        let vp1 = (np * r1 * al - r1 * de) / (rp * (np - vp2));
        if vp1.abs() > 10.0 || vp2.abs() > 10.0 || np > 10.0 || nm < -10.0 {
            continue;
        }
        return Ok(Some(FanSubsolutionCandidate {
            rho_minus: rm,
            rho_plus: rp,
            rho_1: r1,
            v_minus: vm,
            v_plus: [vp1, vp2],
            alpha: al,
            beta: be,
            gamma: ga,
            delta: de,
            c_1: c1,
            nu_minus: nm,
            nu_plus: np,
        }));
    }
    Ok(None)
}

/// Seeded fans, every other one with a single field shifted by a log-uniform amount in `[1e-6, 1e-1]`.
///
/// Draws whose largest algebraic residual falls strictly between `1e-12` and `1e-7` are discarded.
pub fn random_fans(count: usize, seed: u64, law: &PressureLaw) -> Result<Vec<RandomFan>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut draws = 0usize;
    while out.len() < count {
        draws += 1;
        if draws > 200 * count + 1000 {
            return Err(Error::Solver(format!("only {} of {count} random fans after {draws} draws", out.len())));
        }
        let Some(mut c) = draw_exact(&mut rng, law)? else { continue };
        let perturbation = if out.len() % 2 == 1 {
            let name = PERTURBABLE[rng.gen_range(0..PERTURBABLE.len())];
            let shift = 10f64.powf(rng.gen_range(-6.0..-1.0)) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            *field_mut(&mut c, name) += shift;
            Some((name.to_string(), shift))
        } else {
            None
        };
        if c.validate().is_err() || c.rho_minus <= 0.0 || c.rho_plus <= 0.0 || c.rho_1 <= 0.0 {
            continue;
        }
        let max = evaluate_constraints(&c, law)?.max_abs_residual();
        if max > EXACT_CEILING && max < VIOLATION_FLOOR {
            continue;
        }
        out.push(RandomFan { candidate: c, perturbation, max_algebraic_residual: max });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceRow {
    pub index: usize,
    pub max_algebraic_residual: f64,
    pub algebraic_zero: bool,
    pub quadrature_zero: bool,
    /// Largest ratio of a mass or momentum residual to its error estimate.
    pub worst_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub rows: Vec<EquivalenceRow>,
    pub disagreements: usize,
}

/// Compares the algebraic zero pattern of each fan with balance of its weak residuals.
pub fn oracle_equivalence(
    fans: &[RandomFan],
    law: &PressureLaw,
    tests_per_fan: usize,
    seed: u64,
    quad: &QuadOptions,
) -> Result<EquivalenceReport> {
    let mut rows = Vec::with_capacity(fans.len());
    for (index, f) in fans.iter().enumerate() {
        let fan = PiecewiseFan::from_candidate(f.candidate.clone())?;
        let tests = TestFunction::straddling(fan.partition.speeds(), tests_per_fan, seed.wrapping_add(index as u64), true);
        let res = subsolution_residual(&fan, law, &tests, quad)?;
        let worst_ratio = res
            .iter()
            .flat_map(|r| {
                let e = r.quad_error_estimate;
                [r.mass.abs() / e[0], r.momentum[0].abs() / e[1], r.momentum[1].abs() / e[2]]
            })
            .fold(0.0, f64::max);
        rows.push(EquivalenceRow {
            index,
            max_algebraic_residual: f.max_algebraic_residual,
            algebraic_zero: f.max_algebraic_residual < ALGEBRAIC_ZERO,
            quadrature_zero: res.iter().all(|r| r.balanced(10.0)),
            worst_ratio,
        });
    }
    let disagreements = rows.iter().filter(|r| r.algebraic_zero != r.quadrature_zero).count();
    Ok(EquivalenceReport { rows, disagreements })
}
