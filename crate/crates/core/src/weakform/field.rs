use serde::{Deserialize, Serialize};

use crate::convexint::SampledWaveField;
use crate::error::{Error, Result};
use crate::pressure::PressureLaw;
use crate::riemann1d::SelfSimilarSolution;
use crate::state::{FanPartition, FanSubsolutionCandidate};

/// Density, velocity, trace-free `u` and kinetic constant `c` at a point.
///
/// Fluxes: `m = ρv`, `Π = ρu + (p + ρc/2) Id`, `E = ρε + ρc/2`, `F = (E + p) v`.
/// Euler states use `u = v⊗v − |v|²/2 Id` and `c = |v|²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalState {
    pub rho: f64,
    pub v: [f64; 2],
    pub u: [f64; 2],
    pub c: f64,
    pub p: f64,
    pub eps: f64,
}

impl LocalState {
    pub fn euler(rho: f64, v: [f64; 2], law: &PressureLaw) -> Result<Self> {
        let c = v[0] * v[0] + v[1] * v[1];
        let u = [0.5 * (v[0] * v[0] - v[1] * v[1]), v[0] * v[1]];
        Ok(LocalState { rho, v, u, c, p: law.p(rho)?, eps: law.internal_energy(rho)? })
    }

    pub fn mass_flux(&self) -> [f64; 2] {
        [self.rho * self.v[0], self.rho * self.v[1]]
    }

    /// Rows of `Π`.
    pub fn momentum_flux(&self) -> [[f64; 2]; 2] {
        let q = self.p + 0.5 * self.rho * self.c;
        let r = self.rho;
        [[r * self.u[0] + q, r * self.u[1]], [r * self.u[1], -r * self.u[0] + q]]
    }

    pub fn energy(&self) -> f64 {
        self.rho * self.eps + 0.5 * self.rho * self.c
    }

    pub fn energy_flux(&self) -> [f64; 2] {
        let h = self.energy() + self.p;
        [h * self.v[0], h * self.v[1]]
    }
}

/// Three-region fan subsolution with its partition `x₂ = ν₋ t`, `x₂ = ν₊ t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseFan {
    pub candidate: FanSubsolutionCandidate<f64>,
    pub partition: FanPartition,
}

impl PiecewiseFan {
    pub fn new(candidate: FanSubsolutionCandidate<f64>, partition: FanPartition) -> Result<Self> {
        candidate.validate()?;
        let s = partition.speeds();
        if s.len() != 2 || s[0] != candidate.nu_minus || s[1] != candidate.nu_plus {
            return Err(Error::Invalid(format!("partition {s:?} does not match the candidate speeds")));
        }
        Ok(PiecewiseFan { candidate, partition })
    }

    pub fn from_candidate(candidate: FanSubsolutionCandidate<f64>) -> Result<Self> {
        let partition = FanPartition::new(vec![candidate.nu_minus, candidate.nu_plus])?;
        Self::new(candidate, partition)
    }
}

/// Sampled perturbation placed on `center + radius·[−1, 1]³`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledOverlay {
    pub field: SampledWaveField,
    pub center: [f64; 3],
    pub radius: f64,
}

impl SampledOverlay {
    /// Trilinear interpolation of `(v₁, v₂, u₁₁, u₁₂)`, zero outside the placement box.
    pub fn value(&self, z: [f64; 3]) -> [f64; 4] {
        let f = &self.field;
        let n = f.n;
        let h = f.spacing();
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for a in 0..3 {
            let s = (z[a] - self.center[a]) / self.radius;
            if !(s > -1.0 && s < 1.0) {
                return [0.0; 4];
            }
            let q = ((s + 1.0) / h - 0.5).clamp(0.0, (n - 1) as f64);
            let i = (q.floor() as usize).min(n.saturating_sub(2));
            base[a] = i;
            frac[a] = (q - i as f64).clamp(0.0, 1.0);
        }
        let mut out = [0.0; 4];
        for corner in 0..8 {
            let o = [corner >> 2 & 1, corner >> 1 & 1, corner & 1];
            let w: f64 = (0..3).map(|a| if o[a] == 1 { frac[a] } else { 1.0 - frac[a] }).product();
            if w == 0.0 {
                continue;
            }
            let idx = f.index((base[0] + o[0]).min(n - 1), (base[1] + o[1]).min(n - 1), (base[2] + o[2]).min(n - 1));
            for c in 0..4 {
                out[c] += w * f.values[idx][c];
            }
        }
        out
    }
}

/// Any field the weak-form oracle can evaluate on `t ≥ 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldHandle {
    PiecewiseFan(PiecewiseFan),
    SelfSimilar(SelfSimilarSolution),
    Sampled { overlay: SampledOverlay, background: Box<FieldHandle> },
}

/// Field with per-region constants resolved against a pressure law.
pub(crate) struct PreparedField<'a> {
    handle: &'a FieldHandle,
    law: &'a PressureLaw,
    regions: Vec<LocalState>,
    background: Option<Box<PreparedField<'a>>>,
}

impl<'a> PreparedField<'a> {
    pub fn new(handle: &'a FieldHandle, law: &'a PressureLaw) -> Result<Self> {
        let (regions, background) = match handle {
            FieldHandle::PiecewiseFan(f) => {
                let c = &f.candidate;
                let minus = LocalState::euler(c.rho_minus, c.v_minus, law)?;
                let plus = LocalState::euler(c.rho_plus, c.v_plus, law)?;
                let middle = LocalState {
                    rho: c.rho_1,
                    v: [c.alpha, c.beta],
                    u: [c.gamma, c.delta],
                    c: c.c_1,
                    p: law.p(c.rho_1)?,
                    eps: law.internal_energy(c.rho_1)?,
                };
                (vec![minus, middle, plus], None)
            }
            FieldHandle::SelfSimilar(_) => (Vec::new(), None),
            FieldHandle::Sampled { background, .. } => (Vec::new(), Some(Box::new(PreparedField::new(background, law)?))),
        };
        Ok(PreparedField { handle, law, regions, background })
    }

    /// Speeds `ν` of the planes `x₂ = ν t` across which the field may be non-smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self.handle {
            FieldHandle::PiecewiseFan(f) => f.partition.speeds().to_vec(),
            FieldHandle::SelfSimilar(s) => s.breakpoints(),
            FieldHandle::Sampled { .. } => self.background.as_ref().map(|b| b.breakpoints()).unwrap_or_default(),
        }
    }

    pub fn depends_on_x1(&self) -> bool {
        matches!(self.handle, FieldHandle::Sampled { .. })
    }

    /// State for `t > 0`; on an interface the right limit.
    pub fn state(&self, z: [f64; 3]) -> Result<LocalState> {
        match self.handle {
            FieldHandle::PiecewiseFan(f) => {
                let idx = f.partition.speeds().iter().filter(|&&nu| z[1] >= nu * z[2]).count();
                Ok(self.regions[idx])
            }
            FieldHandle::SelfSimilar(s) => {
                let r = s.eval(z[1] / z[2])?;
                LocalState::euler(r.rho, r.velocity(), self.law)
            }
            FieldHandle::Sampled { overlay, .. } => {
                let mut st = self.background.as_ref().expect("prepared background").state(z)?;
                let w = overlay.value(z);
                st.v = [st.v[0] + w[0], st.v[1] + w[1]];
                st.u = [st.u[0] + w[2], st.u[1] + w[3]];
                Ok(st)
            }
        }
    }

    /// Initial datum at `t = 0`: the outer states on either side of `x₂ = 0`.
    pub fn initial(&self, x2: f64) -> Result<LocalState> {
        match self.handle {
            FieldHandle::PiecewiseFan(_) => Ok(if x2 < 0.0 { self.regions[0] } else { self.regions[2] }),
            FieldHandle::SelfSimilar(s) => {
                let r = if x2 < 0.0 { s.left_state() } else { s.right_state() };
                LocalState::euler(r.rho, r.velocity(), self.law)
            }
            FieldHandle::Sampled { .. } => self.background.as_ref().expect("prepared background").initial(x2),
        }
    }
}
