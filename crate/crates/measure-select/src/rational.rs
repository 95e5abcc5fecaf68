//! Exact rational scalar used throughout the crate.
//!
//! All constraint coefficients, measure weights and polytope vertices are
//! `Rational` values, so set membership, containment and equality are
//! decidable. Entropy is the single place a floating-point number appears.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Arbitrary-precision rational number. Wraps `BigRational` and serializes
/// as a human-readable string (`"3/5"`, `"-2"`).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `n / d`. Panics if `d == 0`.
    pub fn new(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn from_big(n: BigInt, d: BigInt) -> Self {
        assert!(!d.is_zero(), "zero denominator");
        Rational(BigRational::new(n, d))
    }

    /// Exact conversion from a finite `f64` (the float's binary value, not a
    /// decimal rounding of it).
    pub fn from_f64_exact(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Rational)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        Rational(self.0.recip())
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// Denominator as u64 when it fits.
    pub fn denom_u64(&self) -> Option<u64> {
        self.0.denom().to_u64()
    }

    /// True when the value is an integer.
    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Best rational approximation of `x` with denominator at most `max_denom`,
    /// via continued-fraction convergents and semiconvergents.
    pub fn approximate_f64(x: f64, max_denom: u64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        let exact = Rational::from_f64_exact(x)?;
        Some(exact.limit_denominator(max_denom))
    }

    /// Best approximation to `self` with denominator at most `max_denom`.
    pub fn limit_denominator(&self, max_denom: u64) -> Self {
        let cap = BigInt::from(max_denom);
        if *self.denom() <= cap {
            return self.clone();
        }
        // Stern-Brocot walk: track the two final convergents.
        let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
        let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
        let mut n = self.numer().clone();
        let mut d = self.denom().clone();
        loop {
            let a = &n / &d;
            let q2 = &q0 + &a * &q1;
            if q2 > cap {
                // Semiconvergent with the largest admissible coefficient.
                let k = (&cap - &q0) / &q1;
                let semi_p = &p0 + &k * &p1;
                let semi_q = &q0 + &k * &q1;
                let c1 = Rational::from_big(p1.clone(), q1.clone());
                let c2 = Rational::from_big(semi_p, semi_q);
                let e1 = (&c1 - self).abs();
                let e2 = (&c2 - self).abs();
                return if e2 <= e1 { c2 } else { c1 };
            }
            let p2 = &p0 + &a * &p1;
            (p0, q0, p1, q1) = (p1, q1, p2, q2);
            let r = &n - &a * &d;
            if r.is_zero() {
                return Rational::from_big(p1, q1);
            }
            (n, d) = (d, r);
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parse error for rational literals.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal `{0}`")]
pub struct ParseRationalError(pub String);

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Accepts `a/b`, integers, and decimal literals (`0.6` parses as exactly
    /// 3/5).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let err = || ParseRationalError(s.to_string());
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| err())?;
            let d: BigInt = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            return Ok(Rational(BigRational::new(n, d)));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let neg = int.trim_start().starts_with('-');
            let int = if int.is_empty() || int == "-" { "0" } else { int };
            let int: BigInt = int.parse().map_err(|_| err())?;
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            let num: BigInt = frac.parse().map_err(|_| err())?;
            let den = BigInt::from(10u8).pow(frac.len() as u32);
            let frac_part = BigRational::new(num, den);
            let whole = BigRational::from_integer(int);
            let v = if neg { whole - frac_part } else { whole + frac_part };
            return Ok(Rational(v));
        }
        let n: BigInt = s.parse().map_err(|_| err())?;
        Ok(Rational(BigRational::from_integer(n)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational((&self.0).$method(rhs.0))
            }
        }
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational((&self.0).$method(&rhs.0))
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);

impl Div for Rational {
    type Output = Rational;
    fn div(self, rhs: Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(self.0 / rhs.0)
    }
}

impl Div<&Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(&self.0 / &rhs.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        self.0 *= &rhs.0;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |a, b| a + b)
    }
}

impl PartialOrd<i64> for Rational {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.partial_cmp(&Rational::from_int(*other))
    }
}

impl PartialEq<i64> for Rational {
    fn eq(&self, other: &i64) -> bool {
        *self == Rational::from_int(*other)
    }
}

/// Shorthand for `Rational::new(n, d)`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// Lexicographic comparison of coordinate vectors.
pub fn lex_cmp(a: &[Rational], b: &[Rational]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            ord => return ord,
        }
    }
    a.len().cmp(&b.len())
}
