use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::StatePoint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Inside,
    Boundary,
    Outside,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub membership: Membership,
    /// `tr M` with `M = (C/2) Id − v⊗v + u`.
    pub trace_slack: f64,
    pub det_slack: f64,
}

/// Trace and determinant of `M = (C/2) Id − v⊗v + u`.
pub fn hull_slacks(pt: &StatePoint, c: f64) -> (f64, f64) {
    let [v1, v2] = pt.v;
    let tr = c - v1 * v1 - v2 * v2;
    let det = (0.5 * c - v1 * v1 + pt.u11) * (0.5 * c - v2 * v2 - pt.u11) - (pt.u12 - v1 * v2).powi(2);
    (tr, det)
}

/// Strict membership `v⊗v − u < (C/2) Id` with both slacks above zero.
pub(crate) fn strictly_inside(pt: &StatePoint, c: f64) -> bool {
    let (tr, det) = hull_slacks(pt, c);
    tr > 0.0 && det > 0.0
}

/// Classifies `pt` against the open set `𝒰`; `Boundary` when either slack is within `tol` of zero.
pub fn in_u(pt: &StatePoint, c: f64, tol: f64) -> MembershipReport {
    let (tr, det) = hull_slacks(pt, c);
    let membership = if tr.abs() <= tol || det.abs() <= tol {
        Membership::Boundary
    } else if tr > 0.0 && det > 0.0 {
        Membership::Inside
    } else {
        Membership::Outside
    };
    MembershipReport { membership, trace_slack: tr, det_slack: det }
}

/// `λ[(a, a⊗a) − (b, b⊗b)]` with `|a|² = |b|² = C`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateSegment {
    pub lambda: f64,
    pub a: [f64; 2],
    pub b: [f64; 2],
    pub c: f64,
}

impl StateSegment {
    pub fn new(a: [f64; 2], b: [f64; 2], lambda: f64, c: f64) -> Result<Self> {
        let n = |x: [f64; 2]| x[0] * x[0] + x[1] * x[1];
        if !(c > 0.0 && lambda > 0.0) {
            return Err(Error::Invalid(format!("need C > 0 and lambda > 0, got {c}, {lambda}")));
        }
        if (n(a) - c).abs() > 1e-12 * c || (n(b) - c).abs() > 1e-12 * c {
            return Err(Error::Invalid(format!("|a|^2 and |b|^2 must equal C = {c}")));
        }
        let diff = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        let sum = ((a[0] + b[0]).powi(2) + (a[1] + b[1]).powi(2)).sqrt();
        if diff <= 1e-12 * c.sqrt() || sum <= 1e-12 * c.sqrt() {
            return Err(Error::Invalid("a and b must satisfy a != ±b".into()));
        }
        Ok(StateSegment { lambda, a, b, c })
    }

    /// Direction `p` as a state point.
    pub fn direction(&self) -> StatePoint {
        unit_direction(self.a, self.b).scale(self.lambda)
    }

    /// `λ|a − b|`.
    pub fn length(&self) -> f64 {
        self.lambda * ((self.a[0] - self.b[0]).powi(2) + (self.a[1] - self.b[1]).powi(2)).sqrt()
    }

    pub fn with_lambda(&self, lambda: f64) -> StateSegment {
        StateSegment { lambda, ..*self }
    }

    /// `U_a − U_b` as a symmetric 3×3 matrix in `(x₁, x₂, t)` order.
    pub fn jump_matrix(&self) -> [[f64; 3]; 3] {
        let (a, b) = (self.a, self.b);
        let mut m = [[0.0; 3]; 3];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = a[i] * a[j] - b[i] * b[j];
            }
            m[i][2] = a[i] - b[i];
            m[2][i] = a[i] - b[i];
        }
        m
    }

    /// Euclidean distance in `(v₁, v₂, u₁₁, u₁₂)` with `|u|` the Frobenius norm, from `pt` to `[−p, p]`.
    pub fn distance(&self, pt: &StatePoint) -> f64 {
        let p = self.direction();
        let dot = |x: &StatePoint, y: &StatePoint| {
            x.v[0] * y.v[0] + x.v[1] * y.v[1] + 2.0 * (x.u11 * y.u11 + x.u12 * y.u12)
        };
        let pp = dot(&p, &p);
        let s = if pp > 0.0 { (dot(pt, &p) / pp).clamp(-1.0, 1.0) } else { 0.0 };
        let d = pt.add(&p.scale(-s));
        dot(&d, &d).sqrt()
    }
}

fn unit_direction(a: [f64; 2], b: [f64; 2]) -> StatePoint {
    StatePoint::new([a[0] - b[0], a[1] - b[1]], a[0] * a[0] - b[0] * b[0], a[0] * a[1] - b[0] * b[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentOptions {
    /// Angles sampled on the circle `|v|² = C` for each of `a` and `b`.
    pub angles: usize,
    /// Relative bisection tolerance on `λ`.
    pub tol: f64,
}

impl Default for SegmentOptions {
    fn default() -> Self {
        SegmentOptions { angles: 720, tol: 1e-10 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentReport {
    pub segment: StateSegment,
    /// `λ|a − b|`.
    pub length: f64,
    /// `λ|a − b| / (C − |v|²)`.
    pub ratio: f64,
}

/// Largest `λ` with `pt ± λ d ∈ 𝒰`, by bisection (the set is convex and contains `pt`).
pub(crate) fn max_lambda(pt: &StatePoint, d: &StatePoint, c: f64, tol: f64) -> f64 {
    let ok = |l: f64| strictly_inside(&pt.add(&d.scale(l)), c) && strictly_inside(&pt.add(&d.scale(-l)), c);
    let mut hi = 1.0;
    while ok(hi) {
        hi *= 2.0;
        if hi > 1e12 {
            return hi;
        }
    }
    let mut lo = 0.0;
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Longest segment (in `λ|a − b|`) centered at `pt` inside `𝒰`, over an angle grid for `a` and `b`.
pub fn find_segment(pt: &StatePoint, c: f64, opts: &SegmentOptions) -> Result<SegmentReport> {
    if !(c > 0.0) {
        return Err(Error::Invalid(format!("C must be positive, got {c}")));
    }
    if in_u(pt, c, 0.0).membership != Membership::Inside {
        return Err(Error::Domain("segment search needs a point strictly inside U".into()));
    }
    let n = opts.angles.max(4);
    let r = c.sqrt();
    let circle: Vec<[f64; 2]> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            [r * th.cos(), r * th.sin()]
        })
        .collect();
    let mut best: Option<(f64, usize, usize, f64)> = None;
    for i in 0..n {
        for j in i + 1..n {
            // a = b and a = −b are excluded; (b, a) gives the same segment reversed.
            if 2 * (j - i) == n {
                continue;
            }
            let (a, b) = (circle[i], circle[j]);
            let d = unit_direction(a, b);
            let lam = max_lambda(pt, &d, c, opts.tol);
            let len = lam * ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
            if best.is_none_or(|(l, ..)| len > l) {
                best = Some((len, i, j, lam));
            }
        }
    }
    let (len, i, j, lam) = best.ok_or_else(|| Error::Geometry("empty angle grid".into()))?;
    if !(lam > 0.0) {
        return Err(Error::Geometry("no admissible pair on the angle grid".into()));
    }
    let segment = StateSegment::new(circle[i], circle[j], lam, c)?;
    let p = segment.direction();
    for k in 0..=17 {
        let s = -1.0 + 2.0 * k as f64 / 17.0;
        if !strictly_inside(&pt.add(&p.scale(s)), c) {
            return Err(Error::Geometry(format!("sample {s} of the segment left U")));
        }
    }
    Ok(SegmentReport { segment, length: len, ratio: len / (c - pt.v[0] * pt.v[0] - pt.v[1] * pt.v[1]) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn membership_examples() {
        let r = in_u(&StatePoint::new([0.0, 0.0], 0.0, 0.0), 1.0, 1e-12);
        assert_eq!(r.membership, Membership::Inside);
        assert_eq!((r.trace_slack, r.det_slack), (1.0, 0.25));
        // K point: u = v⊗v − (C/2) Id.
        let r = in_u(&StatePoint::new([1.0, 0.0], 0.5, 0.0), 1.0, 1e-12);
        assert_eq!(r.membership, Membership::Boundary);
        assert_eq!(r.det_slack, 0.0);
        let r = in_u(&StatePoint::new([0.9, 0.0], 0.0, 0.0), 1.0, 1e-12);
        assert_eq!(r.membership, Membership::Outside);
        assert!(r.trace_slack > 0.0 && r.det_slack < 0.0);
    }

    #[test]
    fn origin_segment_reaches_the_antipodal_bound() {
        let rep = find_segment(&StatePoint::new([0.0, 0.0], 0.0, 0.0), 1.0, &SegmentOptions::default()).unwrap();
        assert!(rep.length >= 0.7 && rep.length <= 0.5f64.sqrt() + 1e-9, "{rep:?}");
    }

    #[test]
    fn boundary_point_rejected() {
        let e = find_segment(&StatePoint::new([1.0, 0.0], 0.5, 0.0), 1.0, &SegmentOptions::default());
        assert!(matches!(e, Err(Error::Domain(_))));
    }

    #[test]
    fn segment_validation() {
        assert!(StateSegment::new([1.0, 0.0], [-1.0, 0.0], 0.1, 1.0).is_err());
        assert!(StateSegment::new([1.0, 0.0], [1.0, 0.0], 0.1, 1.0).is_err());
        assert!(StateSegment::new([1.0, 0.0], [0.6, 0.0], 0.1, 1.0).is_err());
        let s = StateSegment::new([1.0, 0.0], [0.0, 1.0], 0.1, 1.0).unwrap();
        assert!((s.length() - 0.1 * 2f64.sqrt()).abs() < 1e-15);
        // Endpoints of K: M vanishes identically.
        for e in [s.a, s.b] {
            let k = StatePoint::new(e, e[0] * e[0] - 0.5, e[0] * e[1]);
            assert!(hull_slacks(&k, 1.0).1.abs() <= 1e-10);
        }
    }

    fn random_inside(rng: &mut ChaCha8Rng) -> StatePoint {
        loop {
            let p = StatePoint::new(
                [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            if in_u(&p, 1.0, 1e-9).membership == Membership::Inside {
                return p;
            }
        }
    }

    #[test]
    fn empirical_geometric_constant_is_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let opts = SegmentOptions { angles: 24, tol: 1e-8 };
        let mut c0 = f64::INFINITY;
        for _ in 0..10_000 {
            let p = random_inside(&mut rng);
            let rep = find_segment(&p, 1.0, &opts).unwrap();
            c0 = c0.min(rep.ratio);
        }
        assert!(c0 > 0.0);
        println!("empirical c0 over 10^4 interior points (24 angles): {c0}");
    }

    proptest! {
        #[test]
        fn rotation_invariant(v1 in -1.0f64..1.0, v2 in -1.0f64..1.0, u11 in -1.0f64..1.0, u12 in -1.0f64..1.0, th in 0.0f64..6.3) {
            let p = StatePoint::new([v1, v2], u11, u12);
            let (c, s) = (th.cos(), th.sin());
            let v = [c * v1 - s * v2, s * v1 + c * v2];
            // R u Rᵀ for u = [[u11, u12], [u12, −u11]].
            let r11 = u11 * (c * c - s * s) - 2.0 * c * s * u12;
            let r12 = 2.0 * c * s * u11 + (c * c - s * s) * u12;
            let q = StatePoint::new(v, r11, r12);
            let (a, b) = (in_u(&p, 1.0, 1e-10), in_u(&q, 1.0, 1e-10));
            prop_assert!((a.trace_slack - b.trace_slack).abs() < 1e-10);
            prop_assert!((a.det_slack - b.det_slack).abs() < 1e-10);
            if a.trace_slack.abs() > 1e-9 && a.det_slack.abs() > 1e-9 {
                prop_assert_eq!(a.membership, b.membership);
            }
        }

        #[test]
        fn segment_endpoints_stay_inside(v1 in -0.5f64..0.5, v2 in -0.5f64..0.5, u11 in -0.2f64..0.2, u12 in -0.2f64..0.2) {
            let p = StatePoint::new([v1, v2], u11, u12);
            prop_assume!(in_u(&p, 1.0, 1e-6).membership == Membership::Inside);
            let rep = find_segment(&p, 1.0, &SegmentOptions { angles: 36, tol: 1e-10 }).unwrap();
            let d = rep.segment.direction();
            prop_assert!(strictly_inside(&p.add(&d), 1.0) && strictly_inside(&p.add(&d.scale(-1.0)), 1.0));
        }
    }
}
