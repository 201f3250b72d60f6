//! Exact max-plus scalars over the rationals extended with `-inf`.
//!
//! Finite values are kept in lowest terms with a positive denominator, so
//! structural equality coincides with numeric equality. Values that fit in
//! machine words stay unboxed; anything larger is promoted to a
//! [`BigRational`] and demoted again as soon as it fits.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// An exact rational number.
#[derive(Clone)]
pub struct Rational(Repr);

#[derive(Clone)]
enum Repr {
    // den > 0, gcd(|num|, den) = 1, num != i64::MIN
    Small { num: i64, den: i64 },
    // never representable as `Small`
    Big(BigRational),
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small { num: 0, den: 1 })
    }

    pub fn from_integer(v: i64) -> Self {
        Self::from_i128(v as i128, 1)
    }

    /// `num / den`; panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let (mut num, mut den) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = num.gcd(&den);
        if g > 1 {
            num /= g;
            den /= g;
        }
        match (i64::try_from(num), i64::try_from(den)) {
            (Ok(n), Ok(d)) if n != i64::MIN => Rational(Repr::Small { num: n, den: d }),
            _ => Rational(Repr::Big(BigRational::new(BigInt::from(num), BigInt::from(den)))),
        }
    }

    pub fn from_big(r: BigRational) -> Self {
        // BigRational::new already reduces and fixes the sign.
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if n != i64::MIN {
                return Rational(Repr::Small { num: n, den: d });
            }
        }
        Rational(Repr::Big(r))
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small { num, den } => BigRational::new_raw(BigInt::from(*num), BigInt::from(*den)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small { num, .. } => BigInt::from(*num),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small { den, .. } => BigInt::from(*den),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small { num: 0, .. })
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small { num, .. } => *num < 0,
            Repr::Big(r) => r.is_negative(),
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.0 {
            Repr::Small { num, .. } => *num > 0,
            Repr::Big(r) => r.is_positive(),
        }
    }

    /// `k * self`.
    pub fn mul_int(&self, k: i64) -> Self {
        match &self.0 {
            Repr::Small { num, den } => Self::from_i128(*num as i128 * k as i128, *den as i128),
            Repr::Big(r) => Self::from_big(r * BigRational::from_integer(BigInt::from(k))),
        }
    }

    /// `self / k`; panics if `k == 0`.
    pub fn div_int(&self, k: i64) -> Self {
        assert!(k != 0, "division by zero");
        match &self.0 {
            Repr::Small { num, den } => Self::from_i128(*num as i128, *den as i128 * k as i128),
            Repr::Big(r) => Self::from_big(r / BigRational::from_integer(BigInt::from(k))),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Add for &Rational {
    type Output = Rational;

    fn add(self, rhs: &Rational) -> Rational {
        if let (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) = (&self.0, &rhs.0) {
            let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
            if b == d {
                return Rational::from_i128(a + c, b);
            }
            // |a*d|, |c*b| < 2^126, so the sum cannot overflow.
            return Rational::from_i128(a * d + c * b, b * d);
        }
        Rational::from_big(self.to_big() + rhs.to_big())
    }
}

impl Add for Rational {
    type Output = Rational;
    fn add(self, rhs: Rational) -> Rational {
        &self + &rhs
    }
}

impl Sub for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        self + &(-rhs.clone())
    }
}

impl Sub for Rational {
    type Output = Rational;
    fn sub(self, rhs: Rational) -> Rational {
        &self - &rhs
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self.0 {
            // num != i64::MIN, so -num is in range.
            Repr::Small { num, den } => Rational(Repr::Small { num: -num, den }),
            Repr::Big(r) => Rational::from_big(-r),
        }
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small { num, den } => {
                0u8.hash(state);
                num.hash(state);
                den.hash(state);
            }
            Repr::Big(r) => {
                1u8.hash(state);
                r.hash(state);
            }
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Rational::from_integer(v)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { num, den: 1 } => write!(f, "{num}"),
            Repr::Small { num, den } => write!(f, "{num}/{den}"),
            Repr::Big(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("invalid rational `{s}`"));
        let (num, den) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s.trim(), "1"),
        };
        let num: BigInt = num.parse().map_err(|_| bad())?;
        let den: BigInt = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        Ok(Rational::from_big(BigRational::new(num, den)))
    }
}

/// An element of the max-plus semiring: `-inf` or an exact rational.
///
/// The derived order puts `Bottom` strictly below every finite value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MaxPlus {
    Bottom,
    Finite(Rational),
}

impl MaxPlus {
    /// The semiring zero, `-inf`.
    pub fn zero() -> Self {
        MaxPlus::Bottom
    }

    /// The semiring unit, `0`.
    pub fn one() -> Self {
        MaxPlus::Finite(Rational::zero())
    }

    pub fn int(v: i64) -> Self {
        MaxPlus::Finite(Rational::from_integer(v))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        MaxPlus::Finite(Rational::new(num, den))
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, MaxPlus::Bottom)
    }

    pub fn is_finite(&self) -> bool {
        !self.is_bottom()
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            MaxPlus::Finite(r) => Some(r),
            MaxPlus::Bottom => None,
        }
    }

    /// `max(a, b)`.
    pub fn oplus(&self, other: &MaxPlus) -> MaxPlus {
        if self >= other {
            self.clone()
        } else {
            other.clone()
        }
    }

    /// `a + b`, absorbing at `-inf`.
    pub fn otimes(&self, other: &MaxPlus) -> MaxPlus {
        match (self, other) {
            (MaxPlus::Finite(a), MaxPlus::Finite(b)) => MaxPlus::Finite(a + b),
            _ => MaxPlus::Bottom,
        }
    }

    /// `t * a`; the empty product `a^0` is the unit even for `-inf`.
    pub fn power(&self, t: u64) -> MaxPlus {
        if t == 0 {
            return MaxPlus::one();
        }
        match self {
            MaxPlus::Finite(a) => MaxPlus::Finite(a.mul_int(t as i64)),
            MaxPlus::Bottom => MaxPlus::Bottom,
        }
    }

    /// Multiplicative inverse `-a`; `None` for `-inf`.
    pub fn inverse(&self) -> Option<MaxPlus> {
        self.finite().map(|a| MaxPlus::Finite(-a.clone()))
    }

    /// In-place `self = max(self, other)`.
    pub fn oplus_assign(&mut self, other: MaxPlus) {
        if other > *self {
            *self = other;
        }
    }
}

impl From<Rational> for MaxPlus {
    fn from(r: Rational) -> Self {
        MaxPlus::Finite(r)
    }
}

impl fmt::Display for MaxPlus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MaxPlus::Bottom => f.write_str("-inf"),
            MaxPlus::Finite(r) => fmt::Display::fmt(r, f),
        }
    }
}

impl fmt::Debug for MaxPlus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for MaxPlus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "-inf" | "*" => Ok(MaxPlus::Bottom),
            tok => tok.parse().map(MaxPlus::Finite),
        }
    }
}

impl serde::Serialize for MaxPlus {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}
