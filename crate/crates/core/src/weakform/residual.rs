use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::{FieldHandle, LocalState, PiecewiseFan, PreparedField};
use super::testfn::TestFunction;
use crate::error::{Error, Result};
use crate::pressure::PressureLaw;
use crate::quadrature::GaussLegendre;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadOptions {
    /// Gauss–Legendre nodes per panel.
    pub order: usize,
    /// Panels per test radius on the finer of the two compared rules; even.
    pub panels_per_radius: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { order: 20, panels_per_radius: 12 }
    }
}

/// One test's residuals. Energy slack is nonnegative for admissible fields and nonnegative tests.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub test_id: usize,
    pub mass: f64,
    pub momentum: [f64; 2],
    pub energy_slack: f64,
    /// Per component `(mass, momentum₁, momentum₂, energy)`: the larger change under halving the
    /// panels or dropping a quarter of the nodes per panel, plus a rounding floor.
    pub quad_error_estimate: [f64; 4],
}

impl ResidualRow {
    /// Mass and momentum residuals below `factor` times their error estimates.
    pub fn balanced(&self, factor: f64) -> bool {
        let e = &self.quad_error_estimate;
        self.mass.abs() < factor * e[0] && self.momentum[0].abs() < factor * e[1] && self.momentum[1].abs() < factor * e[2]
    }

    pub fn admissible(&self, factor: f64) -> bool {
        self.energy_slack >= -factor * self.quad_error_estimate[3]
    }
}

/// Sorted cut points of `[a, b]`: `panels` equal pieces refined at `splits`, every cell bisected if `halve`.
fn cuts(a: f64, b: f64, panels: usize, splits: &[f64], halve: bool) -> Vec<f64> {
    let mut v: Vec<f64> = (0..=panels).map(|k| a + (b - a) * k as f64 / panels as f64).collect();
    v.extend(splits.iter().copied().filter(|s| *s > a && *s < b));
    v.sort_by(|x, y| x.partial_cmp(y).expect("finite cut"));
    v.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (b - a));
    if halve {
        let mids: Vec<f64> = v.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        v.extend(mids);
        v.sort_by(|x, y| x.partial_cmp(y).expect("finite cut"));
    }
    v
}

fn nodes(gl: &GaussLegendre, cuts: &[f64]) -> Vec<(f64, f64)> {
    cuts.windows(2).flat_map(|w| gl.mapped(w[0], w[1]).collect::<Vec<_>>()).collect()
}

#[derive(Default, Clone, Copy)]
struct Acc {
    val: [f64; 4],
    abs: [f64; 4],
}

impl Acc {
    fn add(&mut self, terms: [[f64; 3]; 4], w: f64) {
        for c in 0..4 {
            let s: f64 = terms[c].iter().sum();
            self.val[c] += w * s;
            self.abs[c] += w.abs() * terms[c].iter().map(|x| x.abs()).sum::<f64>();
        }
    }

    fn merge(mut self, o: Acc) -> Acc {
        for c in 0..4 {
            self.val[c] += o.val[c];
            self.abs[c] += o.abs[c];
        }
        self
    }
}

/// Interior integrand with test data `(ψ, ∂₁ψ, ∂₂ψ, ∂ₜψ)`.
fn interior_terms(s: &LocalState, g: [f64; 4]) -> [[f64; 3]; 4] {
    let m = s.mass_flux();
    let pi = s.momentum_flux();
    let (e, f) = (s.energy(), s.energy_flux());
    [
        [s.rho * g[3], m[0] * g[1], m[1] * g[2]],
        [m[0] * g[3], pi[0][0] * g[1], pi[0][1] * g[2]],
        [m[1] * g[3], pi[1][0] * g[1], pi[1][1] * g[2]],
        [e * g[3], f[0] * g[1], f[1] * g[2]],
    ]
}

fn initial_terms(s: &LocalState, psi: f64) -> [[f64; 3]; 4] {
    let m = s.mass_flux();
    [[s.rho * psi, 0.0, 0.0], [m[0] * psi, 0.0, 0.0], [m[1] * psi, 0.0, 0.0], [s.energy() * psi, 0.0, 0.0]]
}

/// `panels` per radius on the coarse rule; `halve` bisects every cell of it.
fn integrate(field: &PreparedField, test: &TestFunction, gl: &GaussLegendre, panels: usize, halve: bool) -> Result<Acc> {
    let speeds = field.breakpoints();
    let (t0, t1) = test.support(2);
    let t_lo = t0.max(0.0);
    let (x0, x1) = test.support(1);
    let (y0, y1) = test.support(0);
    let mut t_splits = Vec::new();
    for &nu in &speeds {
        if nu != 0.0 {
            t_splits.push(x0 / nu);
            t_splits.push(x1 / nu);
        }
    }
    let t_panels = ((panels as f64) * (t1 - t_lo) / test.radius(2)).ceil().max(1.0) as usize;
    let t_nodes = nodes(gl, &cuts(t_lo, t1, t_panels, &t_splits, halve));
    let x1_nodes = nodes(gl, &cuts(y0, y1, 2 * panels, &[], halve));
    let full = field.depends_on_x1();
    let w1: f64 = x1_nodes.iter().map(|&(y, w)| w * test.factor(0, y).0).sum();
    let x2_nodes_at = |t: f64| {
        let splits: Vec<f64> = speeds.iter().map(|nu| nu * t).collect();
        nodes(gl, &cuts(x0, x1, 2 * panels, &splits, halve))
    };
    let slab = |&(t, wt): &(f64, f64)| -> Result<Acc> {
        let mut acc = Acc::default();
        let (f3, d3) = test.factor(2, t);
        for (x2, w2) in x2_nodes_at(t) {
            let (f2, d2) = test.factor(1, x2);
            if full {
                for &(y, wy) in &x1_nodes {
                    let (f1, d1) = test.factor(0, y);
                    let s = field.state([y, x2, t])?;
                    acc.add(interior_terms(&s, [f1 * f2 * f3, d1 * f2 * f3, f1 * d2 * f3, f1 * f2 * d3]), wt * w2 * wy);
                }
            } else {
                // ∂₁ψ integrates to zero against an x₁-independent field.
                let s = field.state([0.0, x2, t])?;
                acc.add(interior_terms(&s, [f2 * f3, 0.0, d2 * f3, f2 * d3]), wt * w2 * w1);
            }
        }
        Ok(acc)
    };
    let mut acc = t_nodes
        .par_iter()
        .map(slab)
        .collect::<Result<Vec<Acc>>>()?
        .into_iter()
        .fold(Acc::default(), Acc::merge);
    if t0 < 0.0 {
        let f3 = test.factor(2, 0.0).0;
        for (x2, w2) in nodes(gl, &cuts(x0, x1, 2 * panels, &[0.0], halve)) {
            let f2 = test.factor(1, x2).0;
            let s = field.initial(x2)?;
            acc.add(initial_terms(&s, f2 * f3), w2 * w1);
        }
    }
    Ok(acc)
}

fn residual_rows(field: &FieldHandle, law: &PressureLaw, tests: &[TestFunction], quad: &QuadOptions) -> Result<Vec<ResidualRow>> {
    if quad.order * quad.panels_per_radius < 8 || quad.panels_per_radius < 2 || quad.panels_per_radius % 2 == 1 {
        return Err(Error::Invalid("quadrature needs at least 8 nodes and an even panel count per test radius".into()));
    }
    let prepared = PreparedField::new(field, law)?;
    let gl = GaussLegendre::new(quad.order);
    let gl_low = GaussLegendre::new((3 * quad.order / 4).max(2));
    tests
        .iter()
        .enumerate()
        .map(|(test_id, test)| {
            if test.support(2).1 <= 0.0 {
                return Err(Error::Domain(format!("test {test_id} is supported in t < 0")));
            }
            let coarse_panels = quad.panels_per_radius / 2;
            let fine = integrate(&prepared, test, &gl, coarse_panels, true)?;
            let coarse = integrate(&prepared, test, &gl, coarse_panels, false)?;
            let low = integrate(&prepared, test, &gl_low, coarse_panels, true)?;
            let mut err = [0.0; 4];
            for c in 0..4 {
                let change = (fine.val[c] - coarse.val[c]).abs().max((fine.val[c] - low.val[c]).abs());
                err[c] = change + 64.0 * f64::EPSILON * fine.abs[c];
            }
            Ok(ResidualRow {
                test_id,
                mass: fine.val[0],
                momentum: [fine.val[1], fine.val[2]],
                energy_slack: fine.val[3],
                quad_error_estimate: err,
            })
        })
        .collect()
}

/// Weak mass, momentum and energy residuals of `field` against each test, including `t = 0` traces.
pub fn weak_residual(field: &FieldHandle, law: &PressureLaw, tests: &[TestFunction], quad: &QuadOptions) -> Result<Vec<ResidualRow>> {
    residual_rows(field, law, tests, quad)
}

/// Residuals of the relaxed continuity, momentum and energy system of a fan subsolution.
pub fn subsolution_residual(fan: &PiecewiseFan, law: &PressureLaw, tests: &[TestFunction], quad: &QuadOptions) -> Result<Vec<ResidualRow>> {
    residual_rows(&FieldHandle::PiecewiseFan(fan.clone()), law, tests, quad)
}
