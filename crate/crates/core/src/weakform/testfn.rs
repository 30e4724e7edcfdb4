use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `exp(−1/(1 − s²))` and its derivative on `|s| < 1`.
fn bump(s: f64) -> (f64, f64) {
    let q = 1.0 - s * s;
    if q <= 0.0 {
        return (0.0, 0.0);
    }
    let b = (-1.0 / q).exp();
    (b, b * (-2.0 * s / (q * q)))
}

/// `ψ(x, t) = Π_i B(s_i)(1 + a_i s_i)` with `s = (z − center)/radius` per coordinate `(x₁, x₂, t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub center: [f64; 3],
    /// Half-widths in space (both `x₁` and `x₂`) and in time.
    pub radii: [f64; 2],
    /// Linear profile coefficients per coordinate.
    pub profile: [f64; 3],
    pub nonnegative: bool,
}

impl TestFunction {
    pub fn new(center: [f64; 3], radii: [f64; 2], profile: [f64; 3], nonnegative: bool) -> Result<Self> {
        if !(radii[0] > 0.0 && radii[1] > 0.0) || center.iter().chain(&profile).any(|c| !c.is_finite()) {
            return Err(Error::Invalid(format!("bad test function {center:?} {radii:?} {profile:?}")));
        }
        if nonnegative && profile.iter().any(|a| a.abs() > 1.0) {
            return Err(Error::Invalid("nonnegative tests need |profile| <= 1".into()));
        }
        Ok(TestFunction { center, radii, profile, nonnegative })
    }

    pub fn radius(&self, axis: usize) -> f64 {
        if axis < 2 {
            self.radii[0]
        } else {
            self.radii[1]
        }
    }

    /// Support interval along one axis.
    pub fn support(&self, axis: usize) -> (f64, f64) {
        (self.center[axis] - self.radius(axis), self.center[axis] + self.radius(axis))
    }

    /// One-dimensional factor and its derivative along `axis`.
    pub fn factor(&self, axis: usize, z: f64) -> (f64, f64) {
        let r = self.radius(axis);
        let s = (z - self.center[axis]) / r;
        let (b, db) = bump(s);
        let a = self.profile[axis];
        (b * (1.0 + a * s), (db * (1.0 + a * s) + a * b) / r)
    }

    /// `(ψ, ∂₁ψ, ∂₂ψ, ∂ₜψ)`.
    pub fn eval(&self, z: [f64; 3]) -> [f64; 4] {
        let (f1, d1) = self.factor(0, z[0]);
        let (f2, d2) = self.factor(1, z[1]);
        let (f3, d3) = self.factor(2, z[2]);
        [f1 * f2 * f3, d1 * f2 * f3, f1 * d2 * f3, f1 * f2 * d3]
    }

    /// Seeded tests centred on the planes `x₂ = ν t`, a quarter of them reaching `t = 0`.
    pub fn straddling(speeds: &[f64], count: usize, seed: u64, nonnegative: bool) -> Vec<TestFunction> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amp = if nonnegative { 0.9 } else { 2.0 };
        (0..count)
            .map(|k| {
                let nu = if speeds.is_empty() { 0.0 } else { speeds[k % speeds.len()] };
                let rx = rng.gen_range(0.25..0.75);
                let (t, rt) = if k % 4 == 3 {
                    let rt = rng.gen_range(0.3..0.8);
                    (rng.gen_range(0.0..0.5 * rt), rt)
                } else {
                    let t: f64 = rng.gen_range(0.5..2.0);
                    (t, rng.gen_range(0.2..0.45) * t.min(1.0) + 0.05)
                };
                let center = [rng.gen_range(-1.0..1.0), nu * t + rng.gen_range(-0.5..0.5) * rx, t];
                let profile = [rng.gen_range(-amp..amp), rng.gen_range(-amp..amp), rng.gen_range(-amp..amp)];
                TestFunction { center, radii: [rx, rt], profile, nonnegative }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_matches_finite_difference() {
        let t = TestFunction::new([0.1, -0.2, 0.7], [0.5, 0.3], [0.4, -0.6, 0.2], true).unwrap();
        let z = [0.25, -0.05, 0.8];
        let g = t.eval(z);
        let h = 1e-6;
        for a in 0..3 {
            let (mut p, mut m) = (z, z);
            p[a] += h;
            m[a] -= h;
            let fd = (t.eval(p)[0] - t.eval(m)[0]) / (2.0 * h);
            assert!((fd - g[1 + a]).abs() < 1e-7 * g[1 + a].abs().max(1.0), "axis {a}");
        }
        assert_eq!(t.eval([0.7, 0.0, 0.7])[0], 0.0);
    }

    #[test]
    fn nonnegative_family_is_nonnegative() {
        for t in TestFunction::straddling(&[-1.0, 0.5], 16, 3, true) {
            for k in 0..50 {
                let s = -1.0 + 2.0 * k as f64 / 49.0;
                let z = [t.center[0] + s * t.radii[0], t.center[1] - s * t.radii[0], t.center[2] + s * t.radii[1]];
                assert!(t.eval(z)[0] >= 0.0);
            }
        }
        assert!(TestFunction::new([0.0; 3], [1.0, 1.0], [1.5, 0.0, 0.0], true).is_err());
    }
}
