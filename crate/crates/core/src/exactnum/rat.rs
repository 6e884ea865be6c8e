use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational number with arbitrary-precision numerator and denominator.
///
/// Always stored in lowest terms with a positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    /// Builds `num/den`. Panics when `den` is zero.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Rat(BigRational::new(num.into(), den.into()))
    }

    pub fn try_new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let den = den.into();
        if den.is_zero() {
            return Err(Error::input("zero denominator"));
        }
        Ok(Rat::new(num, den))
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        Rat(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    /// `2^-bits`.
    pub fn dyadic(num: impl Into<BigInt>, bits: u32) -> Self {
        Rat::new(num, BigInt::one() << bits)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_big_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn signum(&self) -> i32 {
        match self.numer().sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Rat(self.0.recip())
    }

    pub fn pow(&self, e: i32) -> Self {
        Rat(num_traits::Pow::pow(&self.0, e))
    }

    pub fn floor(&self) -> BigInt {
        self.numer().div_floor(self.denom())
    }

    pub fn ceil(&self) -> BigInt {
        -((-self.numer()).div_floor(self.denom()))
    }

    /// Nearest integer, halves rounded up.
    pub fn round_half_up(&self) -> BigInt {
        (self + &Rat::new(1, 2)).floor()
    }

    /// Fractional part in `[0, 1)`.
    pub fn frac(&self) -> Self {
        self - &Rat::from_int(self.floor())
    }

    /// Distance to the nearest integer, in `[0, 1/2]`.
    pub fn dist_to_int(&self) -> Self {
        let f = self.frac();
        let g = Rat::one() - &f;
        if f <= g {
            f
        } else {
            g
        }
    }

    pub fn to_f64(&self) -> f64 {
        // BigRational::to_f64 handles huge numerators and denominators
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    /// Largest multiple of `2^-bits` not above `self`.
    pub fn floor_dyadic(&self, bits: u32) -> Self {
        let scaled = self * &Rat::from_int(BigInt::one() << bits);
        Rat::dyadic(scaled.floor(), bits)
    }

    /// Smallest multiple of `2^-bits` not below `self`.
    pub fn ceil_dyadic(&self, bits: u32) -> Self {
        let scaled = self * &Rat::from_int(BigInt::one() << bits);
        Rat::dyadic(scaled.ceil(), bits)
    }

    /// Decimal rendering with `sig` significant digits (round half up).
    ///
    /// Computed from the exact value, so it never disagrees with the fraction
    /// beyond the last printed digit.
    pub fn to_decimal(&self, sig: usize) -> String {
        assert!(sig >= 1);
        if self.is_zero() {
            return "0".to_string();
        }
        let neg = self.is_negative();
        let n = self.numer().abs();
        let d = self.denom().clone();
        let len10 = |x: &BigInt| x.to_string().len() as i64;
        let mut e = len10(&n) - len10(&d);
        let ten = BigInt::from(10u32);
        let pow10 = |k: i64| -> BigInt { num_traits::pow(ten.clone(), k as usize) };
        // 10^e <= n/d
        let below = |e: i64| -> bool {
            if e >= 0 {
                n < &d * pow10(e)
            } else {
                &n * pow10(-e) < d
            }
        };
        if below(e) {
            e -= 1;
        }
        let shift = sig as i64 - 1 - e;
        let digits_of = |shift: i64| -> BigInt {
            let (num, den) = if shift >= 0 {
                (&n * pow10(shift), d.clone())
            } else {
                (n.clone(), &d * pow10(-shift))
            };
            (num * 2u32 + &den).div_floor(&(den * 2u32))
        };
        let mut digits = digits_of(shift);
        if digits.to_string().len() > sig {
            e += 1;
            digits = digits_of(sig as i64 - 1 - e);
        }
        let mut s = digits.to_string();
        while s.len() < sig {
            s.push('0');
        }
        let body = if (-5..sig as i64).contains(&e) {
            if e >= 0 {
                let (int, frac) = s.split_at(e as usize + 1);
                let frac = frac.trim_end_matches('0');
                if frac.is_empty() {
                    int.to_string()
                } else {
                    format!("{int}.{frac}")
                }
            } else {
                let zeros = "0".repeat((-e - 1) as usize);
                format!("0.{}{}", zeros, s.trim_end_matches('0'))
            }
        } else {
            let (lead, rest) = s.split_at(1);
            let rest = rest.trim_end_matches('0');
            if rest.is_empty() {
                format!("{lead}e{e}")
            } else {
                format!("{lead}.{rest}e{e}")
            }
        };
        if neg {
            format!("-{body}")
        } else {
            body
        }
    }

    /// Mixed-number form such as `4+142/105`.
    pub fn to_mixed(&self) -> String {
        if self.is_integer() || self.is_negative() {
            return self.to_string();
        }
        let whole = self.floor();
        if whole.is_zero() {
            return self.to_string();
        }
        let rest = self - &Rat::from_int(whole.clone());
        format!("{whole}+{rest}")
    }

    /// Authoritative fraction followed by a 12-significant-digit decimal.
    pub fn display_with_decimal(&self) -> String {
        format!("{} ({})", self, self.to_decimal(12))
    }
}

/// `‖x‖`, the distance from `x` to the nearest integer.
pub fn nearest_int_distance(x: &Rat) -> Rat {
    x.dist_to_int()
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.numer())
        } else {
            write!(f, "{}/{}", self.numer(), self.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn parse_int(s: &str) -> Result<BigInt> {
    let body = s.strip_prefix('+').unwrap_or(s);
    if body.is_empty() || !body.trim_start_matches('-').chars().all(|c| c.is_ascii_digit()) {
        return Err(Error::input(format!("not an integer: {s:?}")));
    }
    BigInt::from_str(body).map_err(|_| Error::input(format!("not an integer: {s:?}")))
}

impl FromStr for Rat {
    type Err = Error;

    /// Accepts `p`, `p/q`, and decimal strings such as `-0.125` or `1e-3`.
    /// Decimals convert exactly to a power-of-ten denominator.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            return Rat::try_new(parse_int(p.trim())?, parse_int(q.trim())?);
        }
        let (mantissa, exp) = match s.find(['e', 'E']) {
            Some(i) => {
                let e: i64 = s[i + 1..]
                    .strip_prefix('+')
                    .unwrap_or(&s[i + 1..])
                    .parse()
                    .map_err(|_| Error::input(format!("bad exponent in {s:?}")))?;
                (&s[..i], e)
            }
            None => (s, 0),
        };
        let (neg, mantissa) = match mantissa.strip_prefix('-') {
            Some(m) => (true, m),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(Error::input(format!("not a number: {s:?}")));
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(Error::input(format!("not a number: {s:?}")));
        }
        if exp.abs() > 10_000 {
            return Err(Error::input(format!("exponent out of range in {s:?}")));
        }
        let digits = format!("{int_part}{frac_part}");
        let mut num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits })
            .map_err(|_| Error::input(format!("not a number: {s:?}")))?;
        if neg {
            num = -num;
        }
        let scale = exp - frac_part.len() as i64;
        let ten = BigInt::from(10u32);
        Ok(if scale >= 0 {
            Rat::from_int(num * num_traits::pow(ten, scale as usize))
        } else {
            Rat::new(num, num_traits::pow(ten, (-scale) as usize))
        })
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! from_prim {
    ($($t:ty),*) => {$(
        impl From<$t> for Rat {
            fn from(v: $t) -> Self {
                Rat::from_int(v)
            }
        }
    )*};
}
from_prim!(i32, i64, u32, u64, i128, u128, usize);

impl From<BigInt> for Rat {
    fn from(v: BigInt) -> Self {
        Rat::from_int(v)
    }
}

impl From<BigUint> for Rat {
    fn from(v: BigUint) -> Self {
        Rat::from_int(BigInt::from(v))
    }
}

impl From<BigRational> for Rat {
    fn from(v: BigRational) -> Self {
        Rat(v)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
        impl $trait<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat(self.0.$method(&rhs.0))
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
    };
}
binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl AddAssign<&Rat> for Rat {
    fn add_assign(&mut self, rhs: &Rat) {
        self.0 += &rhs.0;
    }
}

impl AddAssign<Rat> for Rat {
    fn add_assign(&mut self, rhs: Rat) {
        self.0 += rhs.0;
    }
}

impl SubAssign<&Rat> for Rat {
    fn sub_assign(&mut self, rhs: &Rat) {
        self.0 -= &rhs.0;
    }
}

impl MulAssign<&Rat> for Rat {
    fn mul_assign(&mut self, rhs: &Rat) {
        self.0 *= &rhs.0;
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a Rat> for Rat {
    fn sum<I: Iterator<Item = &'a Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

impl Product for Rat {
    fn product<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::one(), |acc, x| acc * x)
    }
}

impl PartialEq<i64> for Rat {
    fn eq(&self, other: &i64) -> bool {
        self.is_integer() && *self.numer() == BigInt::from(*other)
    }
}

impl PartialOrd<i64> for Rat {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.cmp(&Rat::from(*other)))
    }
}
