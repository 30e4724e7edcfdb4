//! Third-order potential operator `A(∂)` mapping a scalar to divergence-free,
//! trace-free symmetric 3×3 fields with vanishing time-time entry.
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::geometry::StateSegment;
use super::jet::monomials_of_degree;
use crate::error::{Error, Result};

/// Upper-triangle entries of a symmetric 3×3 matrix, coordinates `(x₁, x₂, t)`.
pub const ENTRIES: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

fn entry_of(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    ENTRIES.iter().position(|&e| e == (i, j)).expect("valid entry")
}

/// Coefficients `A[e][α]` over the cubic monomials in jet order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialOperator {
    pub coeffs: [[f64; 10]; 6],
    /// Residual of the defining linear system at the solution.
    pub residual: f64,
}

impl PotentialOperator {
    /// Symbol `A(ξ)` as a symmetric matrix.
    pub fn symbol(&self, xi: [f64; 3]) -> [[f64; 3]; 3] {
        let cubic = monomials_of_degree(3);
        let mut m = [[0.0; 3]; 3];
        for (e, &(i, j)) in ENTRIES.iter().enumerate() {
            let s: f64 = cubic
                .iter()
                .zip(self.coeffs[e].iter())
                .map(|(a, c)| c * xi[0].powi(a[0] as i32) * xi[1].powi(a[1] as i32) * xi[2].powi(a[2] as i32))
                .sum();
            m[i][j] = s;
            m[j][i] = s;
        }
        m
    }
}

/// Unit kernel direction `η` of `Ū = U_a − U_b`: spatial part normal to `a − b`, time part `−a·η_x`.
pub fn kernel_direction(seg: &StateSegment) -> [f64; 3] {
    let d = [seg.a[0] - seg.b[0], seg.a[1] - seg.b[1]];
    let n = d[0].hypot(d[1]);
    let ex = [-d[1] / n, d[0] / n];
    [ex[0], ex[1], -(seg.a[0] * ex[0] + seg.a[1] * ex[1])]
}

/// Solves for `A` with zero row divergence, zero trace and zero `(t, t)` entry as polynomial
/// identities, and `A(η) = Ū` for the segment's kernel direction.
pub fn potential_operator(seg: &StateSegment) -> Result<PotentialOperator> {
    let cubic = monomials_of_degree(3);
    let quartic = monomials_of_degree(4);
    let eta = kernel_direction(seg);
    let target = seg.jump_matrix();
    let unknowns = 60;
    let rows = 3 * quartic.len() + 2 * cubic.len() + ENTRIES.len();
    let mut m = DMatrix::<f64>::zeros(rows, unknowns);
    let mut rhs = DVector::<f64>::zeros(rows);
    let var = |e: usize, a: usize| e * 10 + a;
    let mut r = 0;
    for i in 0..3 {
        for q in &quartic {
            for j in 0..3 {
                if q[j] == 0 {
                    continue;
                }
                let mut a = *q;
                a[j] -= 1;
                let k = cubic.iter().position(|c| *c == a).expect("cubic monomial");
                m[(r, var(entry_of(i, j), k))] += 1.0;
            }
            r += 1;
        }
    }
    for k in 0..cubic.len() {
        for e in [entry_of(0, 0), entry_of(1, 1), entry_of(2, 2)] {
            m[(r, var(e, k))] = 1.0;
        }
        r += 1;
    }
    for k in 0..cubic.len() {
        m[(r, var(entry_of(2, 2), k))] = 1.0;
        r += 1;
    }
    for (e, &(i, j)) in ENTRIES.iter().enumerate() {
        for (k, a) in cubic.iter().enumerate() {
            m[(r, var(e, k))] = eta[0].powi(a[0] as i32) * eta[1].powi(a[1] as i32) * eta[2].powi(a[2] as i32);
        }
        rhs[r] = target[i][j];
        r += 1;
    }
    let svd = m.clone().svd(true, true);
    let x = svd.solve(&rhs, 1e-12).map_err(|e| Error::Solver(e.to_string()))?;
    let residual = (&m * &x - &rhs).amax();
    let scale = rhs.amax().max(1.0);
    if !(residual <= 1e-10 * scale) {
        return Err(Error::Geometry(format!("no potential operator for this segment (residual {residual:e})")));
    }
    let mut coeffs = [[0.0; 10]; 6];
    for (e, row) in coeffs.iter_mut().enumerate() {
        for (k, c) in row.iter_mut().enumerate() {
            *c = x[var(e, k)];
        }
    }
    Ok(PotentialOperator { coeffs, residual })
}
