use num_rational::Ratio;
use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::geometry::{find_segment, hull_slacks, strictly_inside, SegmentOptions};
use super::wave::{PlaneWave, SampledWaveField};
use crate::error::{Error, Result};
use crate::state::StatePoint;

/// Parabolic cylinder `B_r(x) × ]t − r, t + r[` with rational data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cylinder {
    pub center: [Ratio<i64>; 3],
    pub radius: Ratio<i64>,
}

impl Cylinder {
    pub fn center_f64(&self) -> [f64; 3] {
        self.center.map(|c| *c.numer() as f64 / *c.denom() as f64)
    }

    pub fn radius_f64(&self) -> f64 {
        *self.radius.numer() as f64 / *self.radius.denom() as f64
    }

    /// Contained in the closed unit cylinder `|x| ≤ 1`, `|t| ≤ 1`.
    pub fn inside_unit_cylinder(&self) -> bool {
        let one = Ratio::from_integer(1);
        let [x1, x2, t] = self.center;
        let room = one - self.radius;
        room >= Ratio::from_integer(0) && x1 * x1 + x2 * x2 <= room * room && t.abs() <= room
    }

    pub fn disjoint(&self, o: &Cylinder) -> bool {
        let d = [self.center[0] - o.center[0], self.center[1] - o.center[1], self.center[2] - o.center[2]];
        let s = self.radius + o.radius;
        d[0] * d[0] + d[1] * d[1] >= s * s || d[2].abs() >= s
    }
}

/// Cylinders of radius `1/k` centred on the lattice `(2/k)ℤ³` inside the unit cylinder.
pub fn pack_cylinders(k: i64) -> Vec<Cylinder> {
    if k < 1 {
        return Vec::new();
    }
    let r = Ratio::new(1, k);
    let mut out = Vec::new();
    for i in -k..=k {
        for l in -k..=k {
            for m in -k..=k {
                let cyl = Cylinder { center: [Ratio::new(2 * i, k), Ratio::new(2 * l, k), Ratio::new(2 * m, k)], radius: r };
                if cyl.inside_unit_cylinder() {
                    out.push(cyl);
                }
            }
        }
    }
    out
}

pub fn pairwise_disjoint(cyls: &[Cylinder]) -> bool {
    cyls.iter().enumerate().all(|(i, a)| cyls[i + 1..].iter().all(|b| a.disjoint(b)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepOptions {
    /// Frequency of the unit-scale waves before rescaling to a cylinder.
    pub frequency: f64,
    pub k_min: i64,
    pub k_max: i64,
    /// Fraction of the maximal segment used at a cylinder centre.
    pub shrink: f64,
    pub max_halvings: usize,
    pub segment: SegmentOptions,
}

impl Default for StepOptions {
    fn default() -> Self {
        StepOptions { frequency: 8.0, k_min: 2, k_max: 4, shrink: 0.9, max_halvings: 40, segment: SegmentOptions::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderUpdate {
    pub center: [f64; 3],
    pub radius: f64,
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub lambda: f64,
    pub sign: f64,
    pub increase: f64,
    /// `C − |ṽ + v|²` at the centre before the step.
    pub centre_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub k: i64,
    pub radius: f64,
    pub cylinders: Vec<CylinderUpdate>,
    pub increase: f64,
    pub deficit_before: f64,
    pub deficit_after: f64,
    /// `increase / deficit_before²`.
    pub beta_step: f64,
    /// `increase / Σ |cylinder| (C − |ṽ + v(x_j)|²)²`.
    pub c_bar_emp: f64,
    pub min_trace_slack: f64,
    pub min_det_slack: f64,
    pub gamma_measure: f64,
    /// Sampled modulus of continuity of `ṽ + v` at the chosen radius, after the step.
    pub modulus_at_radius: f64,
    pub all_inside: bool,
}

struct Candidate {
    updates: Vec<(usize, [f64; 4])>,
    report: CylinderUpdate,
}

fn in_gamma(z: [f64; 3]) -> bool {
    z[0] * z[0] + z[1] * z[1] < 1.0 && z[2].abs() < 1.0
}

fn total(base: &StatePoint, w: [f64; 4]) -> StatePoint {
    StatePoint::new([base.v[0] + w[0], base.v[1] + w[1]], base.u11 + w[2], base.u12 + w[3])
}

fn nodes_in(field: &SampledWaveField, cyl: &Cylinder) -> Vec<usize> {
    let [cx, cy, ct] = cyl.center_f64();
    let r = cyl.radius_f64();
    let h = field.spacing();
    let range = |c: f64| {
        let lo = (((c - r + 1.0) / h) - 0.5).floor().max(0.0) as usize;
        let hi = ((((c + r + 1.0) / h) - 0.5).ceil() as usize).min(field.n - 1);
        lo..=hi
    };
    let mut out = Vec::new();
    for i1 in range(cx) {
        for i2 in range(cy) {
            for it in range(ct) {
                let idx = field.index(i1, i2, it);
                let z = field.node(idx);
                if (z[0] - cx).powi(2) + (z[1] - cy).powi(2) < r * r && (z[2] - ct).abs() < r && in_gamma(z) {
                    out.push(idx);
                }
            }
        }
    }
    out
}

fn nearest_node(field: &SampledWaveField, z: [f64; 3]) -> usize {
    let h = field.spacing();
    let i = |c: f64| ((((c + 1.0) / h) - 0.5).round().max(0.0) as usize).min(field.n - 1);
    field.index(i(z[0]), i(z[1]), i(z[2]))
}

fn perturb_cylinder(
    base: &StatePoint,
    field: &SampledWaveField,
    cyl: &Cylinder,
    c: f64,
    opts: &StepOptions,
) -> Option<Candidate> {
    let centre = cyl.center_f64();
    let r = cyl.radius_f64();
    let z0 = total(base, field.values[nearest_node(field, centre)]);
    let seg = find_segment(&z0, c, &opts.segment).ok()?.segment;
    let wave = PlaneWave::new(&seg.with_lambda(1.0), opts.frequency).ok()?;
    let nodes = nodes_in(field, cyl);
    let unit: Vec<[f64; 4]> = nodes
        .iter()
        .map(|&idx| {
            let z = field.node(idx);
            let p = wave.eval([(z[0] - centre[0]) / r, (z[1] - centre[1]) / r, (z[2] - centre[2]) / r]);
            [p.v[0], p.v[1], p.u11, p.u12]
        })
        .collect();
    let h3 = field.spacing().powi(3);
    let mut best: Option<(f64, f64, f64)> = None;
    for sign in [1.0, -1.0] {
        let mut lambda = opts.shrink * seg.lambda;
        let mut ok = false;
        for _ in 0..=opts.max_halvings {
            ok = nodes.iter().zip(&unit).all(|(&idx, u)| {
                let w = field.values[idx];
                let s = sign * lambda;
                strictly_inside(&total(base, [w[0] + s * u[0], w[1] + s * u[1], w[2] + s * u[2], w[3] + s * u[3]]), c)
            });
            if ok {
                break;
            }
            lambda *= 0.5;
        }
        if !ok {
            continue;
        }
        let s = sign * lambda;
        let inc: f64 = nodes
            .iter()
            .zip(&unit)
            .map(|(&idx, u)| {
                let w = total(base, field.values[idx]).v;
                let (n0, n1) = (w[0] + s * u[0], w[1] + s * u[1]);
                (n0 * n0 + n1 * n1 - w[0] * w[0] - w[1] * w[1]) * h3
            })
            .sum();
        if best.is_none_or(|(b, ..)| inc > b) {
            best = Some((inc, sign, lambda));
        }
    }
    let (increase, sign, lambda) = best?;
    let s = sign * lambda;
    let updates = nodes.iter().zip(&unit).map(|(&idx, u)| (idx, u.map(|x| s * x))).collect();
    Some(Candidate {
        updates,
        report: CylinderUpdate {
            center: centre,
            radius: r,
            a: seg.a,
            b: seg.b,
            lambda,
            sign,
            increase,
            centre_gap: c - z0.v[0] * z0.v[0] - z0.v[1] * z0.v[1],
        },
    })
}

fn energy_on_gamma(base: &StatePoint, field: &SampledWaveField) -> (f64, f64) {
    let h3 = field.spacing().powi(3);
    let (mut e, mut m) = (0.0, 0.0);
    for (idx, w) in field.values.iter().enumerate() {
        if in_gamma(field.node(idx)) {
            let v = total(base, *w).v;
            e += (v[0] * v[0] + v[1] * v[1]) * h3;
            m += h3;
        }
    }
    (e, m)
}

/// Largest change of the total state between nodes at most `r` apart along one axis.
fn modulus_of_continuity(base: &StatePoint, field: &SampledWaveField, r: f64) -> f64 {
    let n = field.n;
    let s = ((r / field.spacing()).floor() as usize).max(1).min(n - 1);
    let mut w = 0.0f64;
    for i1 in 0..n {
        for i2 in 0..n {
            for it in 0..n {
                let idx = field.index(i1, i2, it);
                let p = total(base, field.values[idx]);
                for (j1, j2, jt) in [(i1 + s, i2, it), (i1, i2 + s, it), (i1, i2, it + s)] {
                    if j1 < n && j2 < n && jt < n {
                        let q = total(base, field.values[field.index(j1, j2, jt)]);
                        w = w.max(p.add(&q.scale(-1.0)).norm());
                    }
                }
            }
        }
    }
    w
}

/// Adds rescaled localized waves on packed cylinders; keeps the radius `1/k` with the largest gain.
pub fn perturbation_step(
    base: &StatePoint,
    current: &SampledWaveField,
    c: f64,
    opts: &StepOptions,
) -> Result<(SampledWaveField, StepReport)> {
    if !(c > 0.0) || current.n < 4 {
        return Err(Error::Invalid(format!("need C > 0 and at least 4 nodes per axis, got {c}, {}", current.n)));
    }
    for (idx, w) in current.values.iter().enumerate() {
        if in_gamma(current.node(idx)) && !strictly_inside(&total(base, *w), c) {
            return Err(Error::Domain(format!("current state leaves U at node {idx}")));
        }
    }
    let (energy, gamma) = energy_on_gamma(base, current);
    let deficit_before = c * gamma - energy;
    let mut best: Option<(i64, Vec<Candidate>, f64)> = None;
    for k in opts.k_min.max(1)..=opts.k_max {
        let cyls = pack_cylinders(k);
        if cyls.is_empty() {
            continue;
        }
        debug_assert!(pairwise_disjoint(&cyls));
        let cands: Vec<Candidate> =
            cyls.par_iter().filter_map(|cyl| perturb_cylinder(base, current, cyl, c, opts)).collect();
        let inc: f64 = cands.iter().map(|x| x.report.increase).sum();
        if best.as_ref().is_none_or(|(_, _, b)| inc > *b) {
            best = Some((k, cands, inc));
        }
    }
    let (k, cands, increase) = best.ok_or_else(|| Error::Geometry("packing produced zero cylinders".into()))?;
    if cands.is_empty() {
        return Err(Error::Geometry("no cylinder admitted a perturbation".into()));
    }
    let mut next = current.clone();
    next.meta = None;
    for cand in &cands {
        for (idx, d) in &cand.updates {
            for q in 0..4 {
                next.values[*idx][q] += d[q];
            }
        }
    }
    let (energy_after, _) = energy_on_gamma(base, &next);
    let (mut min_tr, mut min_det, mut all_inside) = (f64::INFINITY, f64::INFINITY, true);
    for (idx, w) in next.values.iter().enumerate() {
        if in_gamma(next.node(idx)) {
            let p = total(base, *w);
            let (tr, det) = hull_slacks(&p, c);
            min_tr = min_tr.min(tr);
            min_det = min_det.min(det);
            all_inside &= strictly_inside(&p, c);
        }
    }
    let radius = 1.0 / k as f64;
    let vol = std::f64::consts::PI * radius.powi(3) * 2.0;
    let riemann: f64 = cands.iter().map(|x| vol * x.report.centre_gap.powi(2)).sum();
    let modulus_at_radius = modulus_of_continuity(base, &next, radius);
    let increase_measured = energy_after - energy;
    let report = StepReport {
        k,
        radius,
        cylinders: cands.into_iter().map(|x| x.report).collect(),
        increase: increase_measured,
        deficit_before,
        deficit_after: c * gamma - energy_after,
        beta_step: increase_measured / deficit_before.powi(2),
        c_bar_emp: increase / riemann,
        min_trace_slack: min_tr,
        min_det_slack: min_det,
        gamma_measure: gamma,
        modulus_at_radius,
        all_inside,
    };
    Ok((next, report))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRun {
    pub steps: Vec<StepReport>,
    /// Largest `β` with `increase_k ≥ β D_k²` for every step.
    pub beta_emp: f64,
    pub deficits: Vec<f64>,
}

/// `iters` consecutive steps from the zero perturbation on an `n³` grid.
pub fn run_steps(base: &StatePoint, c: f64, n: usize, iters: usize, opts: &StepOptions) -> Result<(SampledWaveField, StepRun)> {
    let mut field = SampledWaveField::zeros(n);
    let mut steps = Vec::with_capacity(iters);
    for _ in 0..iters {
        let (next, rep) = perturbation_step(base, &field, c, opts)?;
        field = next;
        steps.push(rep);
    }
    let beta_emp = steps.iter().map(|s| s.beta_step).fold(f64::INFINITY, f64::min);
    let mut deficits: Vec<f64> = steps.iter().map(|s| s.deficit_before).collect();
    if let Some(last) = steps.last() {
        deficits.push(last.deficit_after);
    }
    Ok((field, StepRun { steps, beta_emp: if beta_emp.is_finite() { beta_emp } else { 0.0 }, deficits }))
}
