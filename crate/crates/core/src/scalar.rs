//! Number types the constraint system can be evaluated in.

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::number::QuadraticNumber;
use crate::pressure::PressureLaw;

/// A real-number model: `f64` for numerics, [`QuadraticNumber`] for exact checks.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    /// True when arithmetic carries no rounding error.
    const EXACT: bool;

    fn from_ratio(n: i64, d: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn try_div(&self, rhs: &Self) -> Result<Self>;
    /// Sign of the value; exact for exact types.
    fn sign(&self) -> Ordering;
    fn pressure(law: &PressureLaw, rho: &Self) -> Result<Self>;
    fn internal_energy(law: &PressureLaw, rho: &Self) -> Result<Self>;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn zero() -> Self {
        Self::from_int(0)
    }

    fn half(&self) -> Self {
        self.clone() * Self::from_ratio(1, 2)
    }

    fn square(&self) -> Self {
        self.clone() * self.clone()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(n: i64, d: i64) -> Self {
        n as f64 / d as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn try_div(&self, rhs: &Self) -> Result<Self> {
        if *rhs == 0.0 {
            return Err(Error::Arithmetic("division by zero".into()));
        }
        Ok(self / rhs)
    }

    fn sign(&self) -> Ordering {
        self.partial_cmp(&0.0).unwrap_or(Ordering::Equal)
    }

    fn pressure(law: &PressureLaw, rho: &Self) -> Result<Self> {
        law.p(*rho)
    }

    fn internal_energy(law: &PressureLaw, rho: &Self) -> Result<Self> {
        law.internal_energy(*rho)
    }
}

/// Integer exponent and rational scale of a polytropic law, if it has them.
fn exact_polytropic(law: &PressureLaw) -> Result<(BigRational, u32)> {
    match law {
        PressureLaw::Polytropic { kappa, gamma } => {
            if gamma.fract() != 0.0 || *gamma < 2.0 || *gamma > 64.0 {
                return Err(Error::UnsupportedPressure(format!(
                    "exact evaluation needs an integer exponent, got {gamma}"
                )));
            }
            let k = BigRational::from_float(*kappa)
                .ok_or_else(|| Error::Invalid(format!("non-finite kappa {kappa}")))?;
            Ok((k, *gamma as u32))
        }
        PressureLaw::Tabulated(_) => Err(Error::UnsupportedPressure(
            "tabulated laws have no exact evaluation".into(),
        )),
    }
}

impl Scalar for QuadraticNumber {
    const EXACT: bool = true;

    fn from_ratio(n: i64, d: i64) -> Self {
        QuadraticNumber::from_ratio(n, d)
    }

    fn to_f64(&self) -> f64 {
        QuadraticNumber::to_f64(self)
    }

    fn try_div(&self, rhs: &Self) -> Result<Self> {
        self.checked_div(rhs)
    }

    fn sign(&self) -> Ordering {
        self.signum()
    }

    fn pressure(law: &PressureLaw, rho: &Self) -> Result<Self> {
        let (k, g) = exact_polytropic(law)?;
        if !rho.is_positive() {
            return Err(Error::Domain(format!("density {rho} is not positive")));
        }
        Ok(QuadraticNumber::from_rational(k) * rho.powi(g))
    }

    fn internal_energy(law: &PressureLaw, rho: &Self) -> Result<Self> {
        let (k, g) = exact_polytropic(law)?;
        if !rho.is_positive() {
            return Err(Error::Domain(format!("density {rho} is not positive")));
        }
        let scale = k / BigRational::from_integer((g as i64 - 1).into());
        Ok(QuadraticNumber::from_rational(scale) * rho.powi(g - 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_and_float_pressure_agree() {
        let law = PressureLaw::polytropic(1.0, 2.0).unwrap();
        let rho = QuadraticNumber::from_ratio(15, 7);
        let p = QuadraticNumber::pressure(&law, &rho).unwrap();
        assert_eq!(p, QuadraticNumber::from_ratio(225, 49));
        let e = QuadraticNumber::internal_energy(&law, &rho).unwrap();
        assert_eq!(e, rho);
        assert!((f64::pressure(&law, &(15.0 / 7.0)).unwrap() - 225.0 / 49.0).abs() < 1e-14);
    }

    #[test]
    fn exact_rejects_fractional_exponent() {
        let law = PressureLaw::polytropic(1.0, 1.9).unwrap();
        assert!(QuadraticNumber::pressure(&law, &QuadraticNumber::from_int(1)).is_err());
    }
}
