//! Rational brackets around irrational quantities (square roots, m-th roots,
//! logarithms) and a sign oracle that refines them until a comparison is
//! decided.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};

use num_traits::One;
use serde::{Deserialize, Serialize};

use super::Rat;
use crate::error::{Error, Result};

/// `lo <= x <= hi` for some real `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bracket {
    pub lo: Rat,
    pub hi: Rat,
}

impl Bracket {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        debug_assert!(lo <= hi);
        Bracket { lo, hi }
    }

    pub fn exact(x: Rat) -> Self {
        Bracket { lo: x.clone(), hi: x }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn add(&self, o: &Bracket) -> Bracket {
        Bracket {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }

    pub fn sub(&self, o: &Bracket) -> Bracket {
        Bracket {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }

    pub fn neg(&self) -> Bracket {
        Bracket {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn scale(&self, c: &Rat) -> Bracket {
        if c.is_negative() {
            Bracket {
                lo: &self.hi * c,
                hi: &self.lo * c,
            }
        } else {
            Bracket {
                lo: &self.lo * c,
                hi: &self.hi * c,
            }
        }
    }

    pub fn shift(&self, c: &Rat) -> Bracket {
        Bracket {
            lo: &self.lo + c,
            hi: &self.hi + c,
        }
    }

    pub fn mul(&self, o: &Bracket) -> Bracket {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Bracket { lo, hi }
    }

    /// Reciprocal of a bracket that excludes zero.
    pub fn recip(&self) -> Result<Bracket> {
        if self.lo.signum() * self.hi.signum() <= 0 {
            return Err(Error::domain("reciprocal of a bracket containing zero"));
        }
        Ok(Bracket {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        })
    }

    pub fn div(&self, o: &Bracket) -> Result<Bracket> {
        Ok(self.mul(&o.recip()?))
    }

    /// Sign of the bracketed value if the bracket decides it.
    pub fn sign(&self) -> Option<Ordering> {
        if self.lo.is_positive() {
            Some(Ordering::Greater)
        } else if self.hi.is_negative() {
            Some(Ordering::Less)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Widens the endpoints outward onto the `2^-bits` grid.
    pub fn round_out(&self, bits: u32) -> Bracket {
        Bracket {
            lo: self.lo.floor_dyadic(bits),
            hi: self.hi.ceil_dyadic(bits),
        }
    }
}

/// Refines `f(bits)` with doubling precision until its sign is decided.
///
/// Fails with a resource error once `max_bits` is exceeded; for the sums of
/// square roots used in this crate that only happens for genuine ties, which
/// are then reported exactly by an exact bracket.
pub fn decide_sign(mut f: impl FnMut(u32) -> Result<Bracket>, max_bits: u32) -> Result<Ordering> {
    let mut bits = 32;
    loop {
        let b = f(bits)?;
        if let Some(o) = b.sign() {
            return Ok(o);
        }
        if bits >= max_bits {
            return Err(Error::resource(format!("sign undecided at {bits} bits")));
        }
        bits *= 2;
    }
}

fn to_biguint(x: &BigInt) -> BigUint {
    x.to_biguint().expect("non-negative")
}

pub fn iroot_floor(n: &BigUint, m: u32) -> BigUint {
    n.nth_root(m)
}

pub fn iroot_ceil(n: &BigUint, m: u32) -> BigUint {
    let r = n.nth_root(m);
    if num_traits::pow(r.clone(), m as usize) == *n {
        r
    } else {
        r + 1u32
    }
}

/// `floor(x^(1/m))` for a non-negative rational, exactly.
pub fn floor_root_rat(x: &Rat, m: u32) -> Result<BigInt> {
    if x.is_negative() {
        return Err(Error::domain("root of a negative number"));
    }
    // floor(x^(1/m)) = floor(floor(x)^(1/m))
    Ok(BigInt::from(iroot_floor(&to_biguint(&x.floor()), m)))
}

/// Bracket of `x^(1/m)` of width at most `2^-bits / denominator`; exact when
/// the root is rational.
pub fn root_bracket(x: &Rat, m: u32, bits: u32) -> Result<Bracket> {
    if m == 0 {
        return Err(Error::domain("zeroth root"));
    }
    if x.is_negative() {
        return Err(Error::domain("root of a negative number"));
    }
    if m == 1 {
        return Ok(Bracket::exact(x.clone()));
    }
    let n = to_biguint(x.numer());
    let d = to_biguint(x.denom());
    // x^(1/m) = (n d^(m-1))^(1/m) / d
    let radicand = (&n * num_traits::pow(d.clone(), (m - 1) as usize)) << (bits as usize * m as usize);
    let r = radicand.nth_root(m);
    let scale = BigInt::from(d) << bits as usize;
    let lo = Rat::new(BigInt::from(r.clone()), scale.clone());
    if num_traits::pow(r.clone(), m as usize) == radicand {
        Ok(Bracket::exact(lo))
    } else {
        Ok(Bracket::new(lo, Rat::new(BigInt::from(r + 1u32), scale)))
    }
}

pub fn sqrt_bracket(x: &Rat, bits: u32) -> Result<Bracket> {
    root_bracket(x, 2, bits)
}

/// Bracket of `atanh(z)` for `0 <= z <= 1/3`, width below `2^-bits`.
fn atanh_bracket(z: &Rat, bits: u32) -> Bracket {
    debug_assert!(!z.is_negative() && *z <= Rat::new(1, 3));
    if z.is_zero() {
        return Bracket::exact(Rat::zero());
    }
    let z2 = z * z;
    let eps = Rat::dyadic(1, bits + 2);
    let mut sum = Rat::zero();
    let mut power = z.clone();
    let mut i: u64 = 0;
    loop {
        sum += &power / &Rat::from(2 * i + 1);
        power = &power * &z2;
        i += 1;
        // remaining terms are bounded by a geometric series with ratio z^2 <= 1/9
        let tail = &power / &Rat::from(2 * i + 1) * Rat::new(9, 8);
        if tail <= eps {
            let work = bits + 4;
            return Bracket::new(sum.floor_dyadic(work), (&sum + &tail).ceil_dyadic(work));
        }
    }
}

/// Bracket of `ln 2`, width below `2^-bits`.
pub fn ln2_bracket(bits: u32) -> Bracket {
    atanh_bracket(&Rat::new(1, 3), bits + 1).scale(&Rat::from(2))
}

/// Bracket of the natural logarithm of a positive rational, width below
/// `2^-bits` (times a small factor growing with the binary exponent of `x`).
pub fn ln_bracket(x: &Rat, bits: u32) -> Result<Bracket> {
    if !x.is_positive() {
        return Err(Error::domain("logarithm of a non-positive number"));
    }
    if *x == Rat::one() {
        return Ok(Bracket::exact(Rat::zero()));
    }
    if *x < Rat::one() {
        return Ok(ln_bracket(&x.recip(), bits)?.neg());
    }
    // x = 2^e * y with 1 <= y < 2
    let mut e = x.numer().bits() as i64 - x.denom().bits() as i64;
    let two_pow = |e: i64| -> Rat {
        if e >= 0 {
            Rat::from_int(BigInt::one() << e as usize)
        } else {
            Rat::dyadic(1, (-e) as u32)
        }
    };
    let mut y = x / &two_pow(e);
    if y < Rat::one() {
        e -= 1;
        y = x / &two_pow(e);
    }
    debug_assert!(y >= Rat::one() && y < Rat::from(2));
    let z = (&y - &Rat::one()) / (&y + &Rat::one());
    let extra = 64 - (e.unsigned_abs().max(1)).leading_zeros();
    let l2 = ln2_bracket(bits + extra);
    let at = atanh_bracket(&z, bits + 2).scale(&Rat::from(2));
    Ok(l2.scale(&Rat::from(e)).add(&at))
}

/// Sign of `x` as an `Ordering` against zero.
pub fn sign_of(x: &BigInt) -> Ordering {
    match x.sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

/// Compares `sum_i c_i * sqrt(r_i)` (with `c_i >= 0`) against a rational.
pub fn compare_sqrt_sum(terms: &[(Rat, Rat)], rhs: &Rat) -> Result<Ordering> {
    decide_sign(
        |bits| {
            let mut acc = Bracket::exact(-rhs);
            for (c, r) in terms {
                acc = acc.add(&sqrt_bracket(r, bits)?.scale(c));
            }
            Ok(acc)
        },
        1 << 14,
    )
}

/// `abs` helper for brackets of possibly negative values.
pub fn abs_upper(b: &Bracket) -> Rat {
    b.lo.abs().max(b.hi.abs())
}
