//! Exact arithmetic in the quadratic field ℚ(√2).
//!
//! Every quantity of the first-method construction (densities 1, 4, 15/7,
//! velocities with a `2√2` component, the interface speed `-7/(2√2)`) lives
//! in this field, so residuals can be checked for exact vanishing.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Arbitrary-precision rational.
pub type Rational = BigRational;

/// Builds `n/d` as a big rational. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3"`, `"-7/2"`, `"5.0"` or `"1.25e-3"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| Error::Invalid(format!("bad numerator in {s:?}")))?;
        let d: BigInt = d.trim().parse().map_err(|_| Error::Invalid(format!("bad denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Invalid(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = s[i + 1..].parse().map_err(|_| Error::Invalid(format!("bad exponent in {s:?}")))?;
            (&s[..i], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Invalid(format!("not a number: {s:?}")));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::Invalid(format!("not a number: {s:?}")));
    }
    let all: BigInt = format!("0{int_part}{frac_part}").parse().expect("digits only");
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        Rational::from_integer(all * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(all, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Exact square root of a rational, if it is the square of a rational.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(Rational::new(n, d))
    } else {
        None
    }
}

fn rational_to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fallback for ratios whose parts overflow f64 individually.
        let shift = r.numer().bits().max(r.denom().bits()) as i64 - 900;
        if shift <= 0 {
            return f64::NAN;
        }
        let n = r.numer() >> shift as usize;
        let d = r.denom() >> shift as usize;
        n.to_f64().unwrap_or(f64::NAN) / d.to_f64().unwrap_or(f64::NAN)
    })
}

/// An element `a + b√2` of ℚ(√2).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct QuadraticNumber {
    a: Rational,
    b: Rational,
}

impl QuadraticNumber {
    pub fn new(a: Rational, b: Rational) -> Self {
        QuadraticNumber { a, b }
    }

    pub fn from_rational(a: Rational) -> Self {
        QuadraticNumber { a, b: Rational::zero() }
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Self::from_rational(rat(n, d))
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    /// `√2` itself.
    pub fn sqrt2() -> Self {
        QuadraticNumber { a: Rational::zero(), b: Rational::one() }
    }

    /// Rational part `a`.
    pub fn rational_part(&self) -> &Rational {
        &self.a
    }

    /// Coefficient `b` of `√2`.
    pub fn sqrt2_part(&self) -> &Rational {
        &self.b
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// Field norm `a² − 2b²`; zero only for the zero element.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - Rational::from_integer(BigInt::from(2)) * &self.b * &self.b
    }

    pub fn conjugate(&self) -> Self {
        QuadraticNumber { a: self.a.clone(), b: -self.b.clone() }
    }

    /// Multiplicative inverse `(a − b√2)/(a² − 2b²)`.
    pub fn invert(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::Arithmetic("division by zero in Q(sqrt 2)".into()));
        }
        Ok(QuadraticNumber { a: &self.a / &n, b: -(&self.b / &n) })
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self> {
        Ok(self * &rhs.invert()?)
    }

    /// Exact sign of the real number `a + b√2`.
    pub fn signum(&self) -> Ordering {
        let sa = self.a.cmp(&Rational::zero());
        let sb = self.b.cmp(&Rational::zero());
        match (sa, sb) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (s1, s2) if s1 == s2 => s1,
            // Mixed signs: the larger of a² and 2b² decides.
            (sa, _) => {
                let n = self.norm();
                match n.cmp(&Rational::zero()) {
                    Ordering::Greater => sa,
                    Ordering::Less => sa.reverse(),
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.a) + rational_to_f64(&self.b) * std::f64::consts::SQRT_2
    }

    /// Integer power.
    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Self::from_int(1);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Square root of a rational that is either a perfect square or twice a perfect square.
    pub fn sqrt_of_rational(r: &Rational) -> Result<Self> {
        if let Some(s) = rational_sqrt(r) {
            return Ok(Self::from_rational(s));
        }
        let half = r / Rational::from_integer(BigInt::from(2));
        if let Some(s) = rational_sqrt(&half) {
            return Ok(QuadraticNumber { a: Rational::zero(), b: s });
        }
        Err(Error::Arithmetic(format!("sqrt({r}) is not in Q(sqrt 2)")))
    }
}

impl PartialOrd for QuadraticNumber {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadraticNumber {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum()
    }
}

impl fmt::Display for QuadraticNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "{}*sqrt(2)", self.b),
            (false, false) => {
                if self.b.is_negative() {
                    write!(f, "{} - {}*sqrt(2)", self.a, -self.b.clone())
                } else {
                    write!(f, "{} + {}*sqrt(2)", self.a, self.b)
                }
            }
        }
    }
}

impl FromStr for QuadraticNumber {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(Self::from_rational(parse_rational(s)?))
    }
}

impl Zero for QuadraticNumber {
    fn zero() -> Self {
        Self::from_int(0)
    }
    fn is_zero(&self) -> bool {
        QuadraticNumber::is_zero(self)
    }
}

impl One for QuadraticNumber {
    fn one() -> Self {
        Self::from_int(1)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<'a, 'b> $tr<&'b QuadraticNumber> for &'a QuadraticNumber {
            type Output = QuadraticNumber;
            fn $m(self, rhs: &'b QuadraticNumber) -> QuadraticNumber {
                let f: fn(&QuadraticNumber, &QuadraticNumber) -> QuadraticNumber = $body;
                f(self, rhs)
            }
        }
        impl $tr<QuadraticNumber> for QuadraticNumber {
            type Output = QuadraticNumber;
            fn $m(self, rhs: QuadraticNumber) -> QuadraticNumber {
                (&self).$m(&rhs)
            }
        }
        impl<'b> $tr<&'b QuadraticNumber> for QuadraticNumber {
            type Output = QuadraticNumber;
            fn $m(self, rhs: &'b QuadraticNumber) -> QuadraticNumber {
                (&self).$m(rhs)
            }
        }
        impl<'a> $tr<QuadraticNumber> for &'a QuadraticNumber {
            type Output = QuadraticNumber;
            fn $m(self, rhs: QuadraticNumber) -> QuadraticNumber {
                self.$m(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, |x, y| QuadraticNumber { a: &x.a + &y.a, b: &x.b + &y.b });
forward_binop!(Sub, sub, |x, y| QuadraticNumber { a: &x.a - &y.a, b: &x.b - &y.b });
forward_binop!(Mul, mul, |x, y| {
    let two = Rational::from_integer(BigInt::from(2));
    QuadraticNumber { a: &x.a * &y.a + two * &x.b * &y.b, b: &x.a * &y.b + &x.b * &y.a }
});
// Panics on division by zero, like the rational division it wraps.
forward_binop!(Div, div, |x, y| x.checked_div(y).expect("division by zero in Q(sqrt 2)"));

impl Neg for QuadraticNumber {
    type Output = QuadraticNumber;
    fn neg(self) -> QuadraticNumber {
        QuadraticNumber { a: -self.a, b: -self.b }
    }
}

impl Neg for &QuadraticNumber {
    type Output = QuadraticNumber;
    fn neg(self) -> QuadraticNumber {
        QuadraticNumber { a: -self.a.clone(), b: -self.b.clone() }
    }
}

/// Wire form: `{num, den, sqrt2_num, sqrt2_den}` with integers as decimal strings.
#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct QuadraticRepr {
    pub num: String,
    pub den: String,
    pub sqrt2_num: String,
    pub sqrt2_den: String,
}

impl From<&QuadraticNumber> for QuadraticRepr {
    fn from(q: &QuadraticNumber) -> Self {
        QuadraticRepr {
            num: q.a.numer().to_string(),
            den: q.a.denom().to_string(),
            sqrt2_num: q.b.numer().to_string(),
            sqrt2_den: q.b.denom().to_string(),
        }
    }
}

impl TryFrom<&QuadraticRepr> for QuadraticNumber {
    type Error = Error;

    fn try_from(r: &QuadraticRepr) -> Result<Self> {
        let big = |s: &str| -> Result<BigInt> {
            s.trim().parse().map_err(|_| Error::Invalid(format!("bad integer {s:?}")))
        };
        let (n, d, sn, sd) = (big(&r.num)?, big(&r.den)?, big(&r.sqrt2_num)?, big(&r.sqrt2_den)?);
        if d.is_zero() || sd.is_zero() {
            return Err(Error::Invalid("zero denominator".into()));
        }
        Ok(QuadraticNumber::new(Rational::new(n, d), Rational::new(sn, sd)))
    }
}

impl Serialize for QuadraticNumber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QuadraticRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuadraticNumber {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = QuadraticRepr::deserialize(d)?;
        QuadraticNumber::try_from(&r).map_err(serde::de::Error::custom)
    }
}

/// Least common multiple of denominators, used to keep printed fractions short.
pub fn common_denominator(values: &[&Rational]) -> BigInt {
    values.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(a: (i64, i64), b: (i64, i64)) -> QuadraticNumber {
        QuadraticNumber::new(rat(a.0, a.1), rat(b.0, b.1))
    }

    #[test]
    fn sign_of_mixed_terms() {
        // 3 - 2√2 ≈ 0.17 > 0, 1 - √2 < 0, -3 + 2√2 < 0
        assert_eq!(q((3, 1), (-2, 1)).signum(), Ordering::Greater);
        assert_eq!(q((1, 1), (-1, 1)).signum(), Ordering::Less);
        assert_eq!(q((-3, 1), (2, 1)).signum(), Ordering::Less);
        assert_eq!(QuadraticNumber::zero().signum(), Ordering::Equal);
    }

    #[test]
    fn invert_zero_fails() {
        assert!(QuadraticNumber::zero().invert().is_err());
    }

    #[test]
    fn interface_speed_identity() {
        // -7/(2√2) = -7√2/4
        let two_sqrt2 = QuadraticNumber::sqrt2() * QuadraticNumber::from_int(2);
        let nu = QuadraticNumber::from_int(-7) / two_sqrt2;
        assert_eq!(nu, q((0, 1), (-7, 4)));
    }

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("5.0").unwrap(), rat(5, 1));
        assert_eq!(parse_rational("-1.25e-1").unwrap(), rat(-1, 8));
        assert_eq!(parse_rational("10273/1680").unwrap(), rat(10273, 1680));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn sqrt_of_rationals() {
        assert_eq!(QuadraticNumber::sqrt_of_rational(&rat(16, 9)).unwrap(), QuadraticNumber::from_ratio(4, 3));
        assert_eq!(QuadraticNumber::sqrt_of_rational(&rat(8, 1)).unwrap(), q((0, 1), (2, 1)));
        assert!(QuadraticNumber::sqrt_of_rational(&rat(3, 1)).is_err());
    }

    #[test]
    fn serde_round_trip() {
        let x = q((10273, 1680), (-7, 4));
        let s = serde_json::to_string(&x).unwrap();
        let y: QuadraticNumber = serde_json::from_str(&s).unwrap();
        assert_eq!(x, y);
    }

    fn operand() -> impl Strategy<Value = QuadraticNumber> {
        (-1000i64..=1000, 1i64..=1_000_000, -1000i64..=1000, 1i64..=1_000_000)
            .prop_map(|(an, ad, bn, bd)| q((an, ad), (bn, bd)))
    }

    proptest! {
        #[test]
        fn arithmetic_matches_floats(x in operand(), y in operand()) {
            let (xf, yf) = (x.to_f64(), y.to_f64());
            let scale = (xf.abs() + 1e-300) * (yf.abs() + 1e-300);
            let mag = |v: &QuadraticNumber| {
                rational_to_f64(&v.a).abs() + rational_to_f64(&v.b).abs() * 1.5
            };
            let tol = 1e-12;
            let s = &x + &y;
            prop_assert!((s.to_f64() - (xf + yf)).abs() <= tol * (mag(&x) + mag(&y)).max(1e-300));
            let p = &x * &y;
            prop_assert!((p.to_f64() - xf * yf).abs() <= tol * (mag(&x) * mag(&y)).max(scale));
            if !y.is_zero() && yf.abs() > 1e-9 {
                let d = &x / &y;
                let rel = (d.to_f64() - xf / yf).abs() / (xf / yf).abs().max(1e-300);
                prop_assert!(rel <= 1e-9 || (d.to_f64() - xf / yf).abs() < 1e-12);
            }
        }

        #[test]
        fn inverse_is_exact(x in operand()) {
            prop_assume!(!x.is_zero());
            prop_assert_eq!(&x * &x.invert().unwrap(), QuadraticNumber::one());
        }

        #[test]
        fn ordering_matches_floats(x in operand(), y in operand()) {
            let d = x.to_f64() - y.to_f64();
            if d.abs() > 1e-9 {
                prop_assert_eq!(x.cmp(&y), d.partial_cmp(&0.0).unwrap());
            }
        }
    }
}
