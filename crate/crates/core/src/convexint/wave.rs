use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::geometry::StateSegment;
use super::jet::{monomials_of_degree, Jet};
use super::operator::{kernel_direction, potential_operator, PotentialOperator};
use crate::error::{Error, Result};
use crate::state::StatePoint;

const GLUE: f64 = 1.0;

/// `e^{−c/y}` and its first three derivatives, zero once `c/y > 700`.
fn psi(y: f64) -> [f64; 4] {
    let c = GLUE;
    if y * 700.0 < c {
        return [0.0; 4];
    }
    let e = (-c / y).exp();
    let (y2, y3, y4) = (y * y, y * y * y, y * y * y * y);
    [e, c * e / y2, e * (c * c / y4 - 2.0 * c / y3), e * (c * c * c / (y4 * y2) - 6.0 * c * c / (y4 * y) + 6.0 * c / y4)]
}

/// `H(s)` and derivatives: smooth step, 1 for `s ≤ 1/4`, 0 for `s ≥ 1`.
fn step_derivatives(s: f64) -> [f64; 4] {
    if s <= 0.25 {
        return [1.0, 0.0, 0.0, 0.0];
    }
    if s >= 1.0 {
        return [0.0; 4];
    }
    let x = Jet::variable(0, s);
    let p = x.scale(-1.0).add_const(1.0).compose(psi(1.0 - s));
    let q = x.add_const(-0.25).compose(psi(s - 0.25));
    let h = p.mul(&p.add(&q).recip());
    let d = h.derivatives();
    [d[0], d[1], d[4], d[10]]
}

/// Spatial cutoff `χ(|x|)` with `χ = 1` on `|x| ≤ 1/2` and support in `|x| < 1`.
fn space_cutoff(x1: f64, x2: f64) -> Jet {
    let (j1, j2) = (Jet::variable(0, x1), Jet::variable(1, x2));
    let s = j1.mul(&j1).add(&j2.mul(&j2));
    s.compose(step_derivatives(s.value()))
}

fn time_cutoff(t: f64) -> Jet {
    let j = Jet::variable(2, t);
    let s = j.mul(&j);
    s.compose(step_derivatives(s.value()))
}

/// `φ(x, t) = χ(|x|) χ(|t|)`.
pub fn cutoff(x: [f64; 2], t: f64) -> f64 {
    step_derivatives(x[0] * x[0] + x[1] * x[1])[0] * step_derivatives(t * t)[0]
}

/// Plane wave `A(∂)(κφ)` with `κ = −λN⁻³ sin(N η·z)` on the unit cylinder.
#[derive(Clone, Debug)]
pub struct PlaneWave {
    pub segment: StateSegment,
    pub frequency: f64,
    pub eta: [f64; 3],
    pub operator: PotentialOperator,
}

impl PlaneWave {
    pub fn new(segment: &StateSegment, frequency: f64) -> Result<Self> {
        if !(frequency > 0.0 && frequency.is_finite()) {
            return Err(Error::Invalid(format!("frequency must be positive, got {frequency}")));
        }
        Ok(PlaneWave {
            segment: *segment,
            frequency,
            eta: kernel_direction(segment),
            operator: potential_operator(segment)?,
        })
    }

    fn assemble(&self, phi: &Jet, z: [f64; 3]) -> [f64; 4] {
        let n = self.frequency;
        let arg0 = n * (self.eta[0] * z[0] + self.eta[1] * z[1] + self.eta[2] * z[2]);
        let mut arg = Jet::constant(arg0);
        for i in 0..3 {
            arg.0[1 + i] = n * self.eta[i];
        }
        let (s, c) = arg0.sin_cos();
        let kappa = arg.compose([s, c, -s, -c]).scale(-self.segment.lambda / (n * n * n));
        let d = kappa.mul(phi).derivatives();
        let entry = |e: usize| -> f64 { (0..10).map(|k| self.operator.coeffs[e][k] * d[10 + k]).sum() };
        // v = (U_{x₁t}, U_{x₂t}), u₁₁ = U_{x₁x₁}, u₁₂ = U_{x₁x₂}.
        [entry(2), entry(4), entry(0), entry(1)]
    }

    /// Value at a point of the unit cylinder (zero outside the cutoff support).
    pub fn eval(&self, z: [f64; 3]) -> StatePoint {
        let sx = space_cutoff(z[0], z[1]);
        let st = time_cutoff(z[2]);
        if sx.0.iter().all(|c| *c == 0.0) || st.0.iter().all(|c| *c == 0.0) {
            return StatePoint::default();
        }
        let w = self.assemble(&sx.mul(&st), z);
        StatePoint::new([w[0], w[1]], w[2], w[3])
    }

    /// Samples on the cell-centred `n³` grid over `[−1, 1]³`.
    pub fn sample(&self, n: usize) -> SampledWaveField {
        let h = 2.0 / n as f64;
        let c = |i: usize| -1.0 + (i as f64 + 0.5) * h;
        let tj: Vec<Jet> = (0..n).map(|i| time_cutoff(c(i))).collect();
        let mut values = vec![[0.0; 4]; n * n * n];
        values.par_chunks_mut(n).enumerate().for_each(|(row, out)| {
            let (i1, i2) = (row / n, row % n);
            let (x1, x2) = (c(i1), c(i2));
            if x1 * x1 + x2 * x2 >= 1.0 {
                return;
            }
            let sx = space_cutoff(x1, x2);
            for (it, o) in out.iter_mut().enumerate() {
                let t = c(it);
                if t.abs() >= 1.0 {
                    continue;
                }
                *o = self.assemble(&sx.mul(&tj[it]), [x1, x2, t]);
            }
        });
        SampledWaveField { n, values, meta: None }
    }

    /// Sampled-sup bound `S_k` on the terms of `A(∂)(κφ) − φA(∂)κ` of order `N⁻ᵏ`, per unit `λ`.
    pub fn corrector_bounds(&self) -> [f64; 3] {
        corrector_bounds(&self.operator, self.eta)
    }
}

fn binom(n: u8, k: u8) -> f64 {
    [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0], [1.0, 3.0, 3.0, 1.0]][n as usize][k as usize]
}

/// Sampled sups of `|∂^β φ|` for `|β| ≤ 3`, in jet order.
fn cutoff_derivative_sups() -> [f64; 20] {
    let m = 200;
    let mut sx = [0.0f64; 20];
    for i in 0..=m {
        for j in 0..=m {
            let (x1, x2) = (-1.0 + 2.0 * i as f64 / m as f64, -1.0 + 2.0 * j as f64 / m as f64);
            let d = space_cutoff(x1, x2).derivatives();
            for k in 0..20 {
                sx[k] = sx[k].max(d[k].abs());
            }
        }
    }
    let mut st = [0.0f64; 20];
    for i in 0..=4000 {
        let d = time_cutoff(-1.0 + 2.0 * i as f64 / 4000.0).derivatives();
        for k in 0..20 {
            st[k] = st[k].max(d[k].abs());
        }
    }
    let all: Vec<[u8; 3]> = (0..=3).flat_map(monomials_of_degree).collect();
    let mut out = [0.0; 20];
    for (k, b) in all.iter().enumerate() {
        let ix = all.iter().position(|e| *e == [b[0], b[1], 0]).expect("monomial");
        let it = all.iter().position(|e| *e == [0, 0, b[2]]).expect("monomial");
        out[k] = sx[ix] * st[it];
    }
    out
}

fn corrector_bounds(op: &PotentialOperator, eta: [f64; 3]) -> [f64; 3] {
    let sups = cutoff_derivative_sups();
    let all: Vec<[u8; 3]> = (0..=3).flat_map(monomials_of_degree).collect();
    let cubic = monomials_of_degree(3);
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let order = k as u8 + 1;
        let mut entry = [0.0; 6];
        for (e, en) in entry.iter_mut().enumerate() {
            for (ai, a) in cubic.iter().enumerate() {
                let mut s = 0.0;
                for (bi, b) in all.iter().enumerate() {
                    if b.iter().copied().sum::<u8>() != order || (0..3).any(|i| b[i] > a[i]) {
                        continue;
                    }
                    let mut w = sups[bi];
                    for i in 0..3 {
                        w *= binom(a[i], b[i]) * eta[i].abs().powi((a[i] - b[i]) as i32);
                    }
                    s += w;
                }
                *en += op.coeffs[e][ai].abs() * s;
            }
        }
        // Norm weights match `StateSegment::distance`: v entries once, u entries twice.
        *o = (entry[2].powi(2) + entry[4].powi(2) + 2.0 * entry[0].powi(2) + 2.0 * entry[1].powi(2)).sqrt();
    }
    out
}

/// Smallest integer frequency with `Σₖ λN⁻ᵏS_k ≤ ε`.
pub fn minimal_frequency(bounds: [f64; 3], lambda: f64, epsilon: f64) -> f64 {
    let err = |n: f64| (0..3).map(|k| lambda * bounds[k] / n.powi(k as i32 + 1)).sum::<f64>();
    let mut hi = 1.0;
    while err(hi) > epsilon {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    if err(lo) <= epsilon {
        return 1.0;
    }
    while hi - lo > 0.5 {
        let mid = 0.5 * (lo + hi);
        if err(mid) <= epsilon {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut n = lo.floor().max(1.0);
    while err(n) > epsilon {
        n += 1.0;
    }
    n
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveMetadata {
    pub frequency: f64,
    pub eta: [f64; 3],
    pub epsilon: f64,
    pub n_min: f64,
    pub segment: StateSegment,
    /// `[S₁, S₂, S₃]` in the corrector bound.
    pub corrector_bounds: [f64; 3],
}

/// Per-node `(v₁, v₂, u₁₁, u₁₂)` on the cell-centred grid over `[−1, 1]³`, node order `(x₁, x₂, t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledWaveField {
    pub n: usize,
    pub values: Vec<[f64; 4]>,
    pub meta: Option<WaveMetadata>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentMeans {
    /// `∫ w dx dt` per component `(v₁, v₂, u₁₁, u₁₂)`.
    pub means: [f64; 4],
    pub error_estimate: [f64; 4],
}

impl SampledWaveField {
    pub fn zeros(n: usize) -> Self {
        SampledWaveField { n, values: vec![[0.0; 4]; n * n * n], meta: None }
    }

    pub fn spacing(&self) -> f64 {
        2.0 / self.n as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        -1.0 + (i as f64 + 0.5) * self.spacing()
    }

    pub fn index(&self, i1: usize, i2: usize, it: usize) -> usize {
        (i1 * self.n + i2) * self.n + it
    }

    pub fn node(&self, idx: usize) -> [f64; 3] {
        let n = self.n;
        [self.coord(idx / (n * n)), self.coord((idx / n) % n), self.coord(idx % n)]
    }

    pub fn point(&self, idx: usize) -> StatePoint {
        let w = self.values[idx];
        StatePoint::new([w[0], w[1]], w[2], w[3])
    }

    /// Largest central-difference residual of `∂ₜv + div u = 0`, `div v = 0` over interior nodes.
    pub fn fd_residual(&self) -> f64 {
        self.fd_residuals().0
    }

    /// Largest and `L²` central-difference residuals.
    pub fn fd_residuals(&self) -> (f64, f64) {
        let n = self.n;
        let mut sq = 0.0;
        let h2 = 2.0 * self.spacing();
        let f = &self.values;
        let mut worst = 0.0f64;
        for i1 in 1..n - 1 {
            for i2 in 1..n - 1 {
                for it in 1..n - 1 {
                    let d1 = |c: usize| (f[self.index(i1 + 1, i2, it)][c] - f[self.index(i1 - 1, i2, it)][c]) / h2;
                    let d2 = |c: usize| (f[self.index(i1, i2 + 1, it)][c] - f[self.index(i1, i2 - 1, it)][c]) / h2;
                    let dt = |c: usize| (f[self.index(i1, i2, it + 1)][c] - f[self.index(i1, i2, it - 1)][c]) / h2;
                    let r1 = dt(0) + d1(2) + d2(3);
                    let r2 = dt(1) + d1(3) - d2(2);
                    let r3 = d1(0) + d2(1);
                    worst = worst.max(r1.abs()).max(r2.abs()).max(r3.abs());
                    sq += r1 * r1 + r2 * r2 + r3 * r3;
                }
            }
        }
        (worst, (sq * self.spacing().powi(3)).sqrt())
    }

    /// Largest distance of a sampled value from `[−p, p]`.
    pub fn max_segment_distance(&self, seg: &StateSegment) -> f64 {
        (0..self.values.len()).map(|i| seg.distance(&self.point(i))).fold(0.0, f64::max)
    }

    /// Midpoint integrals with error `|Q_h − Q_{2h}|` plus a rounding floor.
    pub fn component_means(&self) -> ComponentMeans {
        let n = self.n;
        let h3 = self.spacing().powi(3);
        let (mut fine, mut coarse, mut abs) = ([0.0; 4], [0.0; 4], [0.0; 4]);
        for (idx, w) in self.values.iter().enumerate() {
            let even = (idx / (n * n)).is_multiple_of(2) && ((idx / n) % n).is_multiple_of(2) && (idx % n).is_multiple_of(2);
            for c in 0..4 {
                fine[c] += w[c] * h3;
                abs[c] += w[c].abs() * h3;
                if even {
                    coarse[c] += 8.0 * w[c] * h3;
                }
            }
        }
        let mut error_estimate = [0.0; 4];
        for c in 0..4 {
            error_estimate[c] = (fine[c] - coarse[c]).abs() + 64.0 * f64::EPSILON * abs[c];
        }
        ComponentMeans { means: fine, error_estimate }
    }

    /// `∫|v| dx dt`.
    pub fn l1_velocity(&self) -> f64 {
        let h3 = self.spacing().powi(3);
        self.values.iter().map(|w| w[0].hypot(w[1]) * h3).sum()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("x1,x2,t,v1,v2,u11,u12\n");
        for (idx, w) in self.values.iter().enumerate() {
            let z = self.node(idx);
            s.push_str(&format!("{:?},{:?},{:?},{:?},{:?},{:?},{:?}\n", z[0], z[1], z[2], w[0], w[1], w[2], w[3]));
        }
        s
    }
}

/// Localized plane wave with all samples within `ε` of the segment, requiring `N ≥ N_min(ε)`.
pub fn localized_wave(seg: &StateSegment, epsilon: f64, frequency: f64, grid: usize) -> Result<SampledWaveField> {
    if !(epsilon > 0.0) || grid < 4 {
        return Err(Error::Invalid(format!("need epsilon > 0 and grid >= 4, got {epsilon}, {grid}")));
    }
    let wave = PlaneWave::new(seg, frequency)?;
    let bounds = wave.corrector_bounds();
    let n_min = minimal_frequency(bounds, seg.lambda, epsilon);
    if frequency < n_min {
        return Err(Error::Resolution(format!("frequency {frequency} below N_min = {n_min} for epsilon = {epsilon}")));
    }
    let mut field = wave.sample(grid);
    field.meta = Some(WaveMetadata { frequency, eta: wave.eta, epsilon, n_min, segment: *seg, corrector_bounds: bounds });
    Ok(field)
}

/// `N_min(ε)` for a segment.
pub fn wave_n_min(seg: &StateSegment, epsilon: f64) -> Result<f64> {
    let wave = PlaneWave::new(seg, 1.0)?;
    Ok(minimal_frequency(wave.corrector_bounds(), seg.lambda, epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg() -> StateSegment {
        StateSegment::new([1.0, 0.0], [0.0, 1.0], 0.1, 1.0).unwrap()
    }

    #[test]
    fn cutoff_plateau_and_support() {
        assert_eq!(cutoff([0.3, 0.3], 0.5), 1.0);
        assert_eq!(cutoff([0.8, 0.7], 0.0), 0.0);
        assert_eq!(cutoff([0.0, 0.0], 1.0), 0.0);
        let v = cutoff([0.7, 0.0], 0.0);
        assert!(v > 0.0 && v < 1.0);
        // Third derivative of H against finite differences.
        let s = 0.6;
        let h = 1e-3;
        let f = |x: f64| step_derivatives(x)[0];
        let fd3 = (f(s + 2.0 * h) - 2.0 * f(s + h) + 2.0 * f(s - h) - f(s - 2.0 * h)) / (2.0 * h * h * h);
        assert!((fd3 - step_derivatives(s)[3]).abs() < 1e-4 * step_derivatives(s)[3].abs().max(1.0));
    }

    #[test]
    fn plateau_value_is_the_plane_wave_up_to_the_corrector() {
        let w = PlaneWave::new(&seg(), 64.0).unwrap();
        let z = [0.1, -0.2, 0.3];
        let got = w.eval(z);
        let phase = 64.0 * (w.eta[0] * z[0] + w.eta[1] * z[1] + w.eta[2] * z[2]);
        let u = seg().jump_matrix();
        let c = 0.1 * phase.cos();
        // Inside the plateau φ ≡ 1, so the corrector terms vanish.
        assert!((got.v[0] - c * u[0][2]).abs() < 1e-12);
        assert!((got.v[1] - c * u[1][2]).abs() < 1e-12);
        assert!((got.u11 - c * u[0][0]).abs() < 1e-12);
        assert!((got.u12 - c * u[0][1]).abs() < 1e-12);
    }

    #[test]
    fn finite_difference_residual_is_second_order() {
        let w = PlaneWave::new(&seg(), 32.0).unwrap();
        let (r1, r2) = (w.sample(64).fd_residual(), w.sample(128).fd_residual());
        assert!(r1 / r2 > 3.5, "{r1} {r2}");
    }

    #[test]
    fn resolution_error_below_n_min() {
        let n_min = wave_n_min(&seg(), 0.02).unwrap();
        assert!(n_min > 1.0);
        assert!(matches!(localized_wave(&seg(), 0.02, n_min - 1.0, 8), Err(Error::Resolution(_))));
        let f = localized_wave(&seg(), 0.02, n_min, 16).unwrap();
        assert!(f.max_segment_distance(&seg()) <= 0.02);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let f = SampledWaveField::zeros(2);
        let csv = f.to_csv();
        assert!(csv.starts_with("x1,x2,t,v1,v2,u11,u12\n"));
        assert_eq!(csv.lines().count(), 9);
    }
}
