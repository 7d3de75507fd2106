//! Probabilities with an exact rational backend and a float fallback.
//!
//! Built-in oracles are uniform, so their probabilities are exact rationals and
//! equality tests (strong commutativity, regenerating equation) are exact. User
//! models may supply floats; mixing the two degrades to float.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Tolerance used when checking that a float distribution sums to one.
pub const SUM_TOLERANCE: f64 = 1e-9;
/// Tolerance used when comparing products of float probabilities.
pub const PRODUCT_TOLERANCE: f64 = 1e-12;

/// Exact values whose denominator grows past this many bits are demoted to
/// floats. Only very long recorded walks ever reach it.
const EXACT_BIT_LIMIT: u64 = 4096;

#[derive(Clone, Debug)]
pub enum Prob {
    Exact(BigRational),
    Float(f64),
}

impl Prob {
    pub fn zero() -> Self {
        Prob::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Prob::Exact(BigRational::one())
    }

    /// The exact rational `num/den`. Panics if `den == 0`.
    pub fn ratio(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        Prob::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(num: BigInt, den: BigInt) -> Self {
        Prob::Exact(BigRational::new(num, den))
    }

    pub fn float(x: f64) -> Self {
        Prob::Float(x)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Prob::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Prob::Exact(r) => r.to_f64().unwrap_or_else(|| {
                // Far outside f64 range: the value is either tiny or huge.
                if r.numer().bits() < r.denom().bits() {
                    0.0
                } else {
                    f64::INFINITY
                }
            }),
            Prob::Float(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Prob::Exact(r) => r.is_zero(),
            Prob::Float(x) => *x == 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            Prob::Exact(r) => r.is_positive(),
            Prob::Float(x) => *x > 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            Prob::Exact(r) => r.is_negative(),
            Prob::Float(x) => *x < 0.0,
        }
    }

    /// Equality: exact when both sides are exact, otherwise within `tol`.
    pub fn approx_eq(&self, other: &Prob, tol: f64) -> bool {
        match (self, other) {
            (Prob::Exact(a), Prob::Exact(b)) => a == b,
            _ => (self.to_f64() - other.to_f64()).abs() <= tol,
        }
    }

    /// Ordering: exact when both sides are exact, otherwise by float value.
    pub fn cmp_value(&self, other: &Prob) -> Ordering {
        match (self, other) {
            (Prob::Exact(a), Prob::Exact(b)) => a.cmp(b),
            _ => self
                .to_f64()
                .partial_cmp(&other.to_f64())
                .unwrap_or(Ordering::Equal),
        }
    }

    pub fn max(self, other: Prob) -> Prob {
        if other.cmp_value(&self) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    pub fn recip(&self) -> Prob {
        match self {
            Prob::Exact(r) => Prob::Exact(r.recip()),
            Prob::Float(x) => Prob::Float(1.0 / x),
        }
    }

    fn compact(self) -> Prob {
        match self {
            Prob::Exact(r) if r.denom().bits() > EXACT_BIT_LIMIT => {
                Prob::Float(Prob::Exact(r).to_f64())
            }
            p => p,
        }
    }

    fn parse(s: &str) -> Option<Prob> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                return None;
            }
            Some(Prob::Exact(BigRational::new(n, d)))
        } else if let Ok(n) = s.parse::<BigInt>() {
            Some(Prob::Exact(BigRational::from_integer(n)))
        } else {
            s.parse::<f64>().ok().map(Prob::Float)
        }
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&Prob> for &Prob {
            type Output = Prob;
            fn $method(self, rhs: &Prob) -> Prob {
                match (self, rhs) {
                    (Prob::Exact(a), Prob::Exact(b)) => Prob::Exact(a $op b).compact(),
                    _ => Prob::Float(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
        impl $trait<Prob> for Prob {
            type Output = Prob;
            fn $method(self, rhs: Prob) -> Prob {
                &self $op &rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl std::iter::Sum for Prob {
    fn sum<I: Iterator<Item = Prob>>(iter: I) -> Prob {
        iter.fold(Prob::zero(), |acc, p| acc + p)
    }
}

impl std::iter::Product for Prob {
    fn product<I: Iterator<Item = Prob>>(iter: I) -> Prob {
        iter.fold(Prob::one(), |acc, p| acc * p)
    }
}

impl PartialEq for Prob {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, 0.0)
    }
}

impl fmt::Display for Prob {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Prob::Exact(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Prob::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Prob::Float(x) => write!(f, "{x}"),
        }
    }
}

impl Serialize for Prob {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Prob::Exact(_) => s.serialize_str(&self.to_string()),
            Prob::Float(x) => s.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Prob {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Prob, D::Error> {
        struct ProbVisitor;
        impl Visitor<'_> for ProbVisitor {
            type Value = Prob;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or a rational string such as \"1/3\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Prob, E> {
                Ok(Prob::Float(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Prob, E> {
                Ok(Prob::Exact(BigRational::from_integer(v.into())))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Prob, E> {
                Ok(Prob::Exact(BigRational::from_integer(v.into())))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Prob, E> {
                Prob::parse(v).ok_or_else(|| E::custom(format!("bad probability {v:?}")))
            }
        }
        d.deserialize_any(ProbVisitor)
    }
}
