//! Residues `a mod D` for entries with common denominator `D`.
//!
//! `‖a/D‖ = min(a, D − a)/D`, so every comparison of distances to the nearest
//! integer becomes an integer comparison of residues. Three backends cover
//! dyadic denominators up to `2^128`, general denominators below `2^127`, and
//! everything else.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::exactnum::Rat;

pub trait Residues: Send + Sync {
    type R: Clone + Ord + Send + Sync + std::fmt::Debug;

    fn zero(&self) -> Self::R;
    fn add(&self, a: &Self::R, b: &Self::R) -> Self::R;
    fn neg(&self, a: &Self::R) -> Self::R;
    fn mul_i64(&self, a: &Self::R, k: i64) -> Self::R;
    /// `min(a, D − a)`.
    fn dist(&self, a: &Self::R) -> Self::R;
    /// Residue of an integer below the modulus.
    fn residue_of(&self, x: &BigUint) -> Self::R;
    fn to_big(&self, a: &Self::R) -> BigUint;
    fn modulus(&self) -> BigUint;

    fn sub(&self, a: &Self::R, b: &Self::R) -> Self::R {
        self.add(a, &self.neg(b))
    }

    /// Residue of `x·D`; `x` must have a denominator dividing `D`.
    fn residue_of_rat(&self, x: &Rat) -> Self::R {
        let d = BigInt::from(self.modulus());
        let scaled = x.numer() * (&d / x.denom());
        debug_assert!((&d % x.denom()).is_zero());
        self.residue_of(&scaled.mod_floor(&d).to_biguint().unwrap())
    }

    fn dist_rat(&self, a: &Self::R) -> Rat {
        Rat::new(BigInt::from(self.to_big(a)), BigInt::from(self.modulus()))
    }

    /// Largest distance numerator `r` with `r/D <= bound`, capped at `D/2`.
    fn dist_threshold(&self, bound: &Rat) -> Self::R {
        let d = self.modulus();
        let half = &d >> 1usize;
        if bound.is_negative() {
            // no distance qualifies; the caller handles this case separately
            return self.zero();
        }
        let t = (bound * &Rat::from(d)).floor().to_biguint().unwrap();
        self.residue_of(&t.min(half))
    }
}

/// Dyadic denominator `2^bits`, `bits <= 128`.
#[derive(Clone, Debug)]
pub struct Pow2Ring {
    bits: u32,
    mask: u128,
}

impl Pow2Ring {
    pub fn new(bits: u32) -> Self {
        assert!(bits <= 128);
        let mask = if bits == 128 { u128::MAX } else { (1u128 << bits) - 1 };
        Pow2Ring { bits, mask }
    }
}

impl Residues for Pow2Ring {
    type R = u128;

    #[inline]
    fn zero(&self) -> u128 {
        0
    }
    #[inline]
    fn add(&self, a: &u128, b: &u128) -> u128 {
        a.wrapping_add(*b) & self.mask
    }
    #[inline]
    fn neg(&self, a: &u128) -> u128 {
        a.wrapping_neg() & self.mask
    }
    fn mul_i64(&self, a: &u128, k: i64) -> u128 {
        let p = a.wrapping_mul(k.unsigned_abs() as u128) & self.mask;
        if k < 0 {
            self.neg(&p)
        } else {
            p
        }
    }
    #[inline]
    fn dist(&self, a: &u128) -> u128 {
        (*a).min(self.neg(a))
    }
    fn residue_of(&self, x: &BigUint) -> u128 {
        let digits = x.to_u64_digits();
        let lo = digits.first().copied().unwrap_or(0) as u128;
        let hi = digits.get(1).copied().unwrap_or(0) as u128;
        (lo | (hi << 64)) & self.mask
    }
    fn to_big(&self, a: &u128) -> BigUint {
        BigUint::from(*a)
    }
    fn modulus(&self) -> BigUint {
        BigUint::one() << self.bits as usize
    }
}

/// General modulus below `2^127`.
#[derive(Clone, Debug)]
pub struct Mod128Ring {
    d: u128,
}

impl Mod128Ring {
    pub fn new(d: u128) -> Self {
        assert!((1..1u128 << 127).contains(&d));
        Mod128Ring { d }
    }
}

impl Residues for Mod128Ring {
    type R = u128;

    #[inline]
    fn zero(&self) -> u128 {
        0
    }
    #[inline]
    fn add(&self, a: &u128, b: &u128) -> u128 {
        let s = a + b;
        if s >= self.d {
            s - self.d
        } else {
            s
        }
    }
    #[inline]
    fn neg(&self, a: &u128) -> u128 {
        if *a == 0 {
            0
        } else {
            self.d - a
        }
    }
    fn mul_i64(&self, a: &u128, k: i64) -> u128 {
        let mut acc = 0u128;
        let mut base = *a;
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            e >>= 1;
        }
        if k < 0 {
            self.neg(&acc)
        } else {
            acc
        }
    }
    #[inline]
    fn dist(&self, a: &u128) -> u128 {
        (*a).min(self.d - a)
    }
    fn residue_of(&self, x: &BigUint) -> u128 {
        (x % self.d).to_u128().unwrap()
    }
    fn to_big(&self, a: &u128) -> BigUint {
        BigUint::from(*a)
    }
    fn modulus(&self) -> BigUint {
        BigUint::from(self.d)
    }
}

/// Arbitrary modulus.
#[derive(Clone, Debug)]
pub struct BigRing {
    d: BigUint,
}

impl BigRing {
    pub fn new(d: BigUint) -> Self {
        assert!(!d.is_zero());
        BigRing { d }
    }
}

impl Residues for BigRing {
    type R = BigUint;

    fn zero(&self) -> BigUint {
        BigUint::zero()
    }
    fn add(&self, a: &BigUint, b: &BigUint) -> BigUint {
        let s = a + b;
        if s >= self.d {
            s - &self.d
        } else {
            s
        }
    }
    fn neg(&self, a: &BigUint) -> BigUint {
        if a.is_zero() {
            BigUint::zero()
        } else {
            &self.d - a
        }
    }
    fn mul_i64(&self, a: &BigUint, k: i64) -> BigUint {
        let p = (a * k.unsigned_abs()) % &self.d;
        if k < 0 {
            self.neg(&p)
        } else {
            p
        }
    }
    fn dist(&self, a: &BigUint) -> BigUint {
        let b = &self.d - a;
        if *a <= b {
            a.clone()
        } else {
            b
        }
    }
    fn residue_of(&self, x: &BigUint) -> BigUint {
        x % &self.d
    }
    fn to_big(&self, a: &BigUint) -> BigUint {
        a.clone()
    }
    fn modulus(&self) -> BigUint {
        self.d.clone()
    }
}

/// Backend chosen for a given common denominator.
#[derive(Clone, Debug)]
pub enum AnyRing {
    Pow2(Pow2Ring),
    Mod128(Mod128Ring),
    Big(BigRing),
}

impl AnyRing {
    pub fn for_denominator(d: &BigUint) -> Self {
        let bits = d.bits();
        if d.count_ones() == 1 && bits <= 129 {
            return AnyRing::Pow2(Pow2Ring::new(bits as u32 - 1));
        }
        if bits <= 127 {
            return AnyRing::Mod128(Mod128Ring::new(d.to_u128().unwrap()));
        }
        AnyRing::Big(BigRing::new(d.clone()))
    }

    /// Ring for the least common denominator of `entries`.
    pub fn for_entries<'a>(entries: impl IntoIterator<Item = &'a Rat>) -> Self {
        let mut d = BigInt::one();
        for e in entries {
            d = d.lcm(e.denom());
        }
        AnyRing::for_denominator(&d.to_biguint().unwrap())
    }
}

/// Runs `$body` with `$rg` bound to the concrete backend of `$ring`.
macro_rules! with_ring {
    ($ring:expr, |$rg:ident| $body:expr) => {
        match $ring {
            $crate::psi::residue::AnyRing::Pow2($rg) => $body,
            $crate::psi::residue::AnyRing::Mod128($rg) => $body,
            $crate::psi::residue::AnyRing::Big($rg) => $body,
        }
    };
}
pub(crate) use with_ring;
