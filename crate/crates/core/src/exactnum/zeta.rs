use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::certified::{iroot_ceil, Bracket};
use super::Rat;
use crate::error::{Error, Result};

/// Certified bracket of the Riemann zeta value at an integer `s >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaConst {
    pub s: u32,
    pub value_lo: Rat,
    pub value_hi: Rat,
}

impl ZetaConst {
    pub fn bracket(&self) -> Bracket {
        Bracket::new(self.value_lo.clone(), self.value_hi.clone())
    }

    pub fn width(&self) -> Rat {
        &self.value_hi - &self.value_lo
    }
}

const MAX_LEVEL: u32 = 200;

/// Bracket at dyadic level `l` (width at most `2^-l`).
///
/// Partial sum to `P` plus the integral bounds
/// `(P+1)^(1-s)/(s-1) <= sum_{p>P} p^-s <= P^(1-s)/(s-1)`,
/// with per-term outward rounding on a fixed-point grid.
fn level_bracket(s: u32, l: u32) -> (Rat, Rat) {
    // P^-s <= 2^-(l+1) makes the tail gap at most 2^-(l+1)
    let p_max = iroot_ceil(&(BigUint::one() << (l + 1) as usize), s);
    let p_max: u64 = p_max.try_into().expect("level too deep");
    let w = l + 3 + (64 - p_max.leading_zeros());
    let one_w = BigUint::one() << w as usize;
    let mut lo = BigUint::zero();
    let mut hi = BigUint::zero();
    for p in 1..=p_max {
        let ps = num_traits::pow(BigUint::from(p), s as usize);
        let q = &one_w / &ps;
        let exact = (&q * &ps) == one_w;
        hi += if exact { q.clone() } else { &q + 1u32 };
        lo += q;
    }
    let grid = |x: BigUint| Rat::dyadic(num_bigint::BigInt::from(x), w);
    let s1 = Rat::from(s as u64 - 1);
    let pw = |p: u64| Rat::from_int(num_traits::pow(BigUint::from(p), (s - 1) as usize));
    let tail_lo = (s1.clone() * pw(p_max + 1)).recip();
    let tail_hi = (s1 * pw(p_max)).recip();
    (grid(lo) + tail_lo.floor_dyadic(w), grid(hi) + tail_hi.ceil_dyadic(w))
}

/// Certified bracket of `zeta(s)` of width at most `tol`.
///
/// Brackets for successive tolerances are nested: each request intersects the
/// brackets of every coarser dyadic level.
pub fn zeta(s: u32, tol: &Rat) -> Result<ZetaConst> {
    if s < 2 {
        return Err(Error::domain(format!("zeta(s) needs s >= 2, got {s}")));
    }
    if !tol.is_positive() {
        return Err(Error::domain("tolerance must be positive"));
    }
    let mut level = 0;
    while Rat::dyadic(1, level) > *tol {
        level += 1;
        if level > MAX_LEVEL {
            return Err(Error::resource("zeta tolerance too small"));
        }
    }
    let (mut lo, mut hi) = level_bracket(s, 0);
    for l in 1..=level {
        let (a, b) = level_bracket(s, l);
        lo = lo.max(a);
        hi = hi.min(b);
    }
    Ok(ZetaConst {
        s,
        value_lo: lo,
        value_hi: hi,
    })
}
