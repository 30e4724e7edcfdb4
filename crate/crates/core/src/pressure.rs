//! Barotropic pressure laws and the internal energy they induce through `p = r² ε′`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Pressure as a function of density.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PressureLaw {
    /// `p = κ ρ^γ`.
    Polytropic { kappa: f64, gamma: f64 },
    /// `p` built from positive samples of `p′`.
    Tabulated(TabulatedPressure),
}

impl PressureLaw {
    pub fn polytropic(kappa: f64, gamma: f64) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::Invalid(format!("kappa must be positive, got {kappa}")));
        }
        if !(gamma > 1.0 && gamma.is_finite()) {
            return Err(Error::Invalid(format!("gamma must exceed 1, got {gamma}")));
        }
        Ok(PressureLaw::Polytropic { kappa, gamma })
    }

    /// `p = ρ²`, the law of the explicit construction.
    pub fn quadratic() -> Self {
        PressureLaw::Polytropic { kappa: 1.0, gamma: 2.0 }
    }

    /// Density interval where the law is defined.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            PressureLaw::Polytropic { .. } => (0.0, f64::INFINITY),
            PressureLaw::Tabulated(t) => t.domain(),
        }
    }

    fn check(&self, rho: f64) -> Result<()> {
        let (lo, hi) = self.domain();
        let ok = match self {
            PressureLaw::Polytropic { .. } => rho > 0.0 && rho.is_finite(),
            PressureLaw::Tabulated(_) => rho >= lo && rho <= hi,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("density {rho} outside [{lo}, {hi}]")))
        }
    }

    pub fn p(&self, rho: f64) -> Result<f64> {
        self.check(rho)?;
        Ok(match self {
            PressureLaw::Polytropic { kappa, gamma } => kappa * rho.powf(*gamma),
            PressureLaw::Tabulated(t) => t.pressure(rho),
        })
    }

    pub fn dp(&self, rho: f64) -> Result<f64> {
        self.check(rho)?;
        Ok(match self {
            PressureLaw::Polytropic { kappa, gamma } => kappa * gamma * rho.powf(gamma - 1.0),
            PressureLaw::Tabulated(t) => t.fprime(rho),
        })
    }

    pub fn d2p(&self, rho: f64) -> Result<f64> {
        self.check(rho)?;
        Ok(match self {
            PressureLaw::Polytropic { kappa, gamma } => {
                kappa * gamma * (gamma - 1.0) * rho.powf(gamma - 2.0)
            }
            PressureLaw::Tabulated(t) => t.fprime_derivative(rho),
        })
    }

    /// Sound speed `√p′`, failing when hyperbolicity is lost.
    pub fn sound_speed(&self, rho: f64) -> Result<f64> {
        let dp = self.dp(rho)?;
        if dp > 0.0 {
            Ok(dp.sqrt())
        } else {
            Err(Error::Hyperbolicity { rho, dp })
        }
    }

    /// Specific internal energy ε with `p = r² ε′`.
    ///
    /// Polytropic laws use `ε = ∫₀^ρ p/r²`; tabulated laws anchor `ε(ρ₁) = p(ρ₁)/ρ₁`
    /// and integrate `p/r²` from the anchor.
    pub fn internal_energy(&self, rho: f64) -> Result<f64> {
        self.check(rho)?;
        match self {
            PressureLaw::Polytropic { kappa, gamma } => Ok(kappa * rho.powf(gamma - 1.0) / (gamma - 1.0)),
            PressureLaw::Tabulated(t) => {
                let base = t.p_at_rho1 / t.rho1;
                Ok(base + t.integrate_cells(t.rho1, rho, |r| t.pressure(r) / (r * r)))
            }
        }
    }
}

/// Outcome of sampling `p′` and `2p′ + r p″` over an interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityReport {
    pub min_dp: f64,
    pub argmin_dp: f64,
    pub min_nonlinearity: f64,
    pub argmin_nonlinearity: f64,
    pub pass: bool,
}

/// Samples `n` evenly spaced densities of `[lo, hi]`.
pub fn check_hyperbolicity(law: &PressureLaw, interval: (f64, f64), n: usize) -> Result<HyperbolicityReport> {
    let (lo, hi) = interval;
    if n < 2 || !(lo < hi) {
        return Err(Error::Invalid(format!("need n >= 2 and lo < hi, got n={n}, [{lo}, {hi}]")));
    }
    let mut rep = HyperbolicityReport {
        min_dp: f64::INFINITY,
        argmin_dp: lo,
        min_nonlinearity: f64::INFINITY,
        argmin_nonlinearity: lo,
        pass: false,
    };
    for i in 0..n {
        let r = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let dp = law.dp(r)?;
        let g = 2.0 * dp + r * law.d2p(r)?;
        if dp < rep.min_dp {
            rep.min_dp = dp;
            rep.argmin_dp = r;
        }
        if g < rep.min_nonlinearity {
            rep.min_nonlinearity = g;
            rep.argmin_nonlinearity = r;
        }
    }
    rep.pass = rep.min_dp > 0.0 && rep.min_nonlinearity > 0.0;
    Ok(rep)
}

/// `p` from a monotone cubic (Fritsch–Carlson) interpolant of `f = p′`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "TabulatedRepr", try_from = "TabulatedRepr")]
pub struct TabulatedPressure {
    rho: Vec<f64>,
    f: Vec<f64>,
    slopes: Vec<f64>,
    /// ∫ f from the first breakpoint to each breakpoint.
    cumulative: Vec<f64>,
    pub rho1: f64,
    pub p_at_rho1: f64,
}

#[derive(Serialize, Deserialize)]
struct TabulatedRepr {
    rho: Vec<f64>,
    fprime: Vec<f64>,
    rho1: f64,
    p_at_rho1: f64,
}

impl From<TabulatedPressure> for TabulatedRepr {
    fn from(t: TabulatedPressure) -> Self {
        TabulatedRepr { rho: t.rho, fprime: t.f, rho1: t.rho1, p_at_rho1: t.p_at_rho1 }
    }
}

impl TryFrom<TabulatedRepr> for TabulatedPressure {
    type Error = Error;
    fn try_from(r: TabulatedRepr) -> Result<Self> {
        TabulatedPressure::new(r.rho, r.fprime, r.rho1, r.p_at_rho1)
    }
}

fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut m = vec![0.0; n];
    if n == 2 {
        m[0] = d[0];
        m[1] = d[0];
        return m;
    }
    for k in 1..n - 1 {
        if d[k - 1] * d[k] > 0.0 {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
        }
    }
    let end = |h0: f64, h1: f64, d0: f64, d1: f64| {
        let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if s * d0 <= 0.0 {
            0.0
        } else if d0 * d1 <= 0.0 && s.abs() > 3.0 * d0.abs() {
            3.0 * d0
        } else {
            s
        }
    };
    m[0] = end(h[0], h[1], d[0], d[1]);
    m[n - 1] = end(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    m
}

impl TabulatedPressure {
    /// Builds the law from breakpoints, nonnegative `p′` samples and the anchor `p(ρ₁)`.
    pub fn new(rho: Vec<f64>, f: Vec<f64>, rho1: f64, p_at_rho1: f64) -> Result<Self> {
        if rho.len() < 2 || rho.len() != f.len() {
            return Err(Error::Invalid("need at least two (rho, fprime) samples of equal length".into()));
        }
        if rho.iter().chain(&f).any(|v| !v.is_finite()) || !rho1.is_finite() || !p_at_rho1.is_finite() {
            return Err(Error::Invalid("non-finite table entry".into()));
        }
        if rho[0] <= 0.0 || rho.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid("densities must be positive and strictly increasing".into()));
        }
        if f.iter().any(|&v| v < 0.0) {
            return Err(Error::Invalid("p' samples must be nonnegative".into()));
        }
        if rho1 < rho[0] || rho1 > rho[rho.len() - 1] {
            return Err(Error::Invalid(format!("anchor density {rho1} outside the table")));
        }
        let slopes = pchip_slopes(&rho, &f);
        let mut t = TabulatedPressure { rho, f, slopes, cumulative: Vec::new(), rho1, p_at_rho1 };
        let mut acc = vec![0.0];
        for i in 0..t.rho.len() - 1 {
            let last = acc[i];
            acc.push(last + t.interval_integral(i, 1.0));
        }
        t.cumulative = acc;
        Ok(t)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.rho
    }

    pub fn samples(&self) -> &[f64] {
        &self.f
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.rho[0], self.rho[self.rho.len() - 1])
    }

    fn locate(&self, r: f64) -> (usize, f64) {
        let n = self.rho.len();
        let i = match self.rho.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        };
        let s = (r - self.rho[i]) / (self.rho[i + 1] - self.rho[i]);
        (i, s)
    }

    /// ∫ of the interpolant over `[ρ_i, ρ_i + s h_i]`.
    fn interval_integral(&self, i: usize, s: f64) -> f64 {
        let h = self.rho[i + 1] - self.rho[i];
        let (s2, s3, s4) = (s * s, s * s * s, s * s * s * s);
        let h00 = s4 / 2.0 - s3 + s;
        let h10 = s4 / 4.0 - 2.0 * s3 / 3.0 + s2 / 2.0;
        let h01 = -s4 / 2.0 + s3;
        let h11 = s4 / 4.0 - s3 / 3.0;
        h * (h00 * self.f[i] + h10 * h * self.slopes[i] + h01 * self.f[i + 1] + h11 * h * self.slopes[i + 1])
    }

    /// Antiderivative of the interpolant, zero at the first breakpoint.
    fn antiderivative(&self, r: f64) -> f64 {
        let (i, s) = self.locate(r);
        self.cumulative[i] + self.interval_integral(i, s)
    }

    pub fn fprime(&self, r: f64) -> f64 {
        let (i, s) = self.locate(r);
        let h = self.rho[i + 1] - self.rho[i];
        let (s2, s3) = (s * s, s * s * s);
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.f[i]
            + (s3 - 2.0 * s2 + s) * h * self.slopes[i]
            + (-2.0 * s3 + 3.0 * s2) * self.f[i + 1]
            + (s3 - s2) * h * self.slopes[i + 1]
    }

    pub fn fprime_derivative(&self, r: f64) -> f64 {
        let (i, s) = self.locate(r);
        let h = self.rho[i + 1] - self.rho[i];
        let s2 = s * s;
        ((6.0 * s2 - 6.0 * s) * self.f[i]
            + (3.0 * s2 - 4.0 * s + 1.0) * h * self.slopes[i]
            + (-6.0 * s2 + 6.0 * s) * self.f[i + 1]
            + (3.0 * s2 - 2.0 * s) * h * self.slopes[i + 1])
            / h
    }

    pub fn pressure(&self, r: f64) -> f64 {
        self.p_at_rho1 + self.antiderivative(r) - self.antiderivative(self.rho1)
    }

    /// `∫_a^b g` by 8-point Gauss–Legendre on every table cell met by `[a, b]`.
    ///
    /// Adaptive rules can step over a narrow feature of the table entirely; splitting at
    /// the breakpoints cannot.
    pub fn integrate_cells<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut g: F) -> f64 {
        if a == b {
            return 0.0;
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let gl = GaussLegendre::new(8);
        let mut cuts = vec![lo];
        cuts.extend(self.rho.iter().copied().filter(|&r| r > lo && r < hi));
        cuts.push(hi);
        sign * cuts.windows(2).map(|c| gl.integrate(c[0], c[1], &mut g)).sum::<f64>()
    }

    /// ∫_a^b p′ computed exactly on the interpolant.
    pub fn integral_of_fprime(&self, a: f64, b: f64) -> f64 {
        self.antiderivative(b) - self.antiderivative(a)
    }

    /// Writes `rho,fprime` CSV plus the `{"rho1", "p_at_rho1"}` sidecar.
    pub fn write_files(&self, csv_path: &Path, sidecar_path: &Path) -> Result<()> {
        let mut s = String::from("rho,fprime\n");
        for (r, f) in self.rho.iter().zip(&self.f) {
            s.push_str(&format!("{r:?},{f:?}\n"));
        }
        std::fs::write(csv_path, s)?;
        let side = serde_json::json!({ "rho1": self.rho1, "p_at_rho1": self.p_at_rho1 });
        std::fs::write(sidecar_path, format!("{side}\n"))?;
        Ok(())
    }

    /// Reads the CSV and sidecar written by [`write_files`](Self::write_files); all `p′` samples must be positive.
    pub fn read_files(csv_path: &Path, sidecar_path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(csv_path)?;
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        match lines.next() {
            Some(h) if h.trim() == "rho,fprime" => {}
            other => return Err(Error::Invalid(format!("expected header rho,fprime, got {other:?}"))),
        }
        let (mut rho, mut f) = (Vec::new(), Vec::new());
        for (k, line) in lines.enumerate() {
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| Error::Invalid(format!("line {}: expected two columns", k + 2)))?;
            let parse = |v: &str| {
                v.trim().parse::<f64>().map_err(|_| Error::Invalid(format!("line {}: bad number {v:?}", k + 2)))
            };
            rho.push(parse(a)?);
            f.push(parse(b)?);
        }
        if f.iter().any(|&v| v <= 0.0) {
            return Err(Error::Invalid("fprime samples must be positive".into()));
        }
        #[derive(Deserialize)]
        struct Side {
            rho1: f64,
            p_at_rho1: f64,
        }
        let side: Side = serde_json::from_str(&std::fs::read_to_string(sidecar_path)?)?;
        TabulatedPressure::new(rho, f, side.rho1, side.p_at_rho1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quadratic_law_closed_forms() {
        let law = PressureLaw::quadratic();
        for i in 1..50 {
            let r = 0.1 * i as f64;
            assert!((law.p(r).unwrap() - r * r).abs() < 1e-14 * r * r);
            assert!((law.dp(r).unwrap() - 2.0 * r).abs() < 1e-14 * r);
            assert!((law.internal_energy(r).unwrap() - r).abs() < 1e-14 * r);
        }
        assert_eq!(law.internal_energy(3.0).unwrap(), 3.0);
        assert_eq!(law.internal_energy(1.0).unwrap(), 1.0);
    }

    #[test]
    fn hyperbolicity_of_quadratic_law() {
        let rep = check_hyperbolicity(&PressureLaw::quadratic(), (0.5, 5.0), 100).unwrap();
        assert!((rep.min_dp - 1.0).abs() < 1e-14);
        assert_eq!(rep.argmin_dp, 0.5);
        assert!((rep.min_nonlinearity - 3.0).abs() < 1e-14);
        assert!(rep.pass);
        let rep = check_hyperbolicity(&PressureLaw::polytropic(1.0, 1.9).unwrap(), (1.0, 4.0), 100).unwrap();
        assert!(rep.pass);
    }

    #[test]
    fn flat_segment_fails_hyperbolicity() {
        let t = TabulatedPressure::new(vec![1.0, 2.0, 3.0, 4.0], vec![1.0, 0.0, 0.0, 1.0], 1.0, 1.0).unwrap();
        let rep = check_hyperbolicity(&PressureLaw::Tabulated(t), (1.0, 4.0), 31).unwrap();
        assert!(!rep.pass);
        assert_eq!(rep.min_dp, 0.0);
        assert!(rep.argmin_dp >= 2.0 && rep.argmin_dp <= 3.0);
    }

    #[test]
    fn tabulated_reproduces_quadratic_law() {
        // p' = 2r is linear, which the monotone cubic reproduces exactly.
        let rho: Vec<f64> = (0..=20).map(|i| 0.5 + 0.25 * i as f64).collect();
        let f: Vec<f64> = rho.iter().map(|r| 2.0 * r).collect();
        let t = TabulatedPressure::new(rho, f, 2.0, 4.0).unwrap();
        let law = PressureLaw::Tabulated(t);
        for r in [0.5, 1.3, 2.0, 3.7, 5.5] {
            assert!((law.p(r).unwrap() - r * r).abs() < 1e-12);
            assert!((law.internal_energy(r).unwrap() - r).abs() < 1e-11);
        }
        assert!(law.p(0.4).is_err());
    }

    #[test]
    fn tabulated_energy_matches_quadrature() {
        let rho: Vec<f64> = (0..=10).map(|i| 0.5 + 0.1 * i as f64).collect();
        let f: Vec<f64> = rho.iter().map(|r| 1.0 + (5.0 * r).sin().powi(2)).collect();
        let t = TabulatedPressure::new(rho, f, 1.0, 1.0).unwrap();
        let law = PressureLaw::Tabulated(t.clone());
        // Composite Simpson on p/r² as an independent check.
        let n = 20_000;
        let (a, b) = (1.0, 1.4);
        let h = (b - a) / n as f64;
        let g = |r: f64| t.pressure(r) / (r * r);
        let mut s = g(a) + g(b);
        for i in 1..n {
            s += g(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let want = 1.0 + s * h / 3.0;
        assert!((law.internal_energy(1.4).unwrap() - want).abs() < 1e-10);
    }

    #[test]
    fn csv_round_trip() {
        let dir = std::env::temp_dir().join(format!("eulerfan-pressure-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let t = TabulatedPressure::new(vec![0.5, 1.0, 2.0], vec![1.0, 3.0, 2.5], 1.0, 7.0).unwrap();
        let (c, s) = (dir.join("p.csv"), dir.join("p.json"));
        t.write_files(&c, &s).unwrap();
        assert_eq!(TabulatedPressure::read_files(&c, &s).unwrap(), t);
        std::fs::remove_dir_all(&dir).ok();
    }

    proptest! {
        #[test]
        fn positive_samples_give_increasing_pressure(
            samples in proptest::collection::vec(1e-3f64..50.0, 3..20),
            gaps in proptest::collection::vec(1e-2f64..1.0, 20),
        ) {
            let mut rho = vec![0.5];
            for g in gaps.iter().take(samples.len() - 1) {
                let last = *rho.last().unwrap();
                rho.push(last + g);
            }
            let t = TabulatedPressure::new(rho.clone(), samples, rho[0], 1.0).unwrap();
            let (lo, hi) = t.domain();
            let mut prev = t.pressure(lo);
            for i in 1..=400 {
                let r = lo + (hi - lo) * i as f64 / 400.0;
                prop_assert!(t.fprime(r) > 0.0);
                let p = t.pressure(r);
                prop_assert!(p > prev);
                prev = p;
            }
        }
    }
}
