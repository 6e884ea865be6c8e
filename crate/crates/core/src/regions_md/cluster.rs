//! Cube clusters `A(q)`: cubes of side `2ε/(q·k^{1/m})` centered at the
//! points `p/q`, `pᵢ ∈ {0, …, q}`.
//!
//! The half-side `r = ε/(q·k^{1/m})` is usually irrational, so measures are
//! kept exactly as polynomials in `r` reduced by `r^m = ε^m/(q^m k)`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{check_params, Cube};
use crate::error::{Error, Result};
use crate::exactnum::certified::{decide_sign, floor_root_rat, root_bracket, Bracket};
use crate::exactnum::Rat;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CubeCluster {
    pub q: u64,
    pub m: usize,
    pub eps: Rat,
    pub k: u64,
}

/// `Σ_{j<m} coeffs[j]·r^j` with `r > 0`, `r^m = r_pow_m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterMeasure {
    pub m: usize,
    pub r_pow_m: Rat,
    pub coeffs: Vec<Rat>,
}

/// `r` exactly, when `r^m` is the `m`-th power of a rational.
fn rational_root(x: &Rat, m: usize) -> Option<Rat> {
    let n = floor_root_rat(&Rat::from_int(x.numer().clone()), m as u32).ok()?;
    let d = floor_root_rat(&Rat::from_int(x.denom().clone()), m as u32).ok()?;
    let r = Rat::new(n, d);
    (r.pow(m as i32) == *x).then_some(r)
}

impl ClusterMeasure {
    /// The exact value when it is rational.
    pub fn exact(&self) -> Option<Rat> {
        if self.coeffs.iter().skip(1).all(Rat::is_zero) {
            return Some(self.coeffs[0].clone());
        }
        let r = rational_root(&self.r_pow_m, self.m)?;
        Some(self.coeffs.iter().rev().fold(Rat::zero(), |acc, c| acc * &r + c))
    }

    pub fn bracket(&self, bits: u32) -> Result<Bracket> {
        if let Some(v) = self.exact() {
            return Ok(Bracket::exact(v));
        }
        let r = root_bracket(&self.r_pow_m, self.m as u32, bits)?;
        let mut acc = Bracket::exact(Rat::zero());
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&r).shift(c);
        }
        Ok(acc)
    }

    /// Exact comparison with a rational.
    pub fn compare(&self, x: &Rat) -> Result<Ordering> {
        if let Some(v) = self.exact() {
            return Ok(v.cmp(x));
        }
        decide_sign(|bits| Ok(self.bracket(bits)?.shift(&-x)), 1 << 14)
    }
}

/// `c + n·r`.
#[derive(Clone, Debug)]
struct Lin {
    c: Rat,
    n: i64,
}

impl CubeCluster {
    /// Requires disjoint cubes, `2ε < k^{1/m}`.
    pub fn new(q: u64, m: usize, eps: Rat, k: u64) -> Result<Self> {
        check_params(m, k, &eps)?;
        if q < 1 {
            return Err(Error::domain("q must be positive"));
        }
        if !eps.is_positive() {
            return Err(Error::domain("eps must be positive"));
        }
        if (Rat::from(2) * &eps).pow(m as i32) >= Rat::from(k) {
            return Err(Error::unsupported(format!(
                "cubes overlap: (2 eps)^m = {} >= k = {k}",
                (Rat::from(2) * &eps).pow(m as i32)
            )));
        }
        Ok(CubeCluster { q, m, eps, k })
    }

    /// `r^m = ε^m/(q^m·k)`.
    pub fn r_pow_m(&self) -> Rat {
        self.eps.pow(self.m as i32) / (Rat::from(self.q).pow(self.m as i32) * Rat::from(self.k))
    }

    /// `r` against `t`, decided through `m`-th powers.
    fn r_cmp(&self, t: &Rat) -> Ordering {
        if t.is_negative() {
            return Ordering::Greater;
        }
        self.r_pow_m().cmp(&t.pow(self.m as i32))
    }

    fn r_le(&self, t: &Rat) -> bool {
        self.r_cmp(t) != Ordering::Greater
    }

    /// `c + n·r > 0`.
    fn positive(&self, l: &Lin) -> bool {
        match l.n.signum() {
            0 => l.c.is_positive(),
            1 => self.r_cmp(&(-&l.c / Rat::from(l.n))) == Ordering::Greater,
            _ => self.r_cmp(&(&l.c / Rat::from(-l.n))) == Ordering::Less,
        }
    }

    /// Length of the projection of `A(q)` on one axis inside `[a, b]`.
    fn axis_length(&self, a: &Rat, b: &Rat) -> Lin {
        let q = Rat::from(self.q);
        let mut total = Lin { c: Rat::zero(), n: 0 };
        let lo_p = ((a * &q).floor() - 1u8).max(0.into());
        let hi_p = ((b * &q).ceil() + 1u8).min(self.q.into());
        let mut p = lo_p;
        while p <= hi_p {
            let center = Rat::from_int(p.clone()) / &q;
            // lower end: center − r or a; upper end: center + r or b
            let lo = if self.r_le(&(&center - a)) {
                Lin {
                    c: center.clone(),
                    n: -1,
                }
            } else {
                Lin { c: a.clone(), n: 0 }
            };
            let hi = if self.r_le(&(b - &center)) {
                Lin {
                    c: center.clone(),
                    n: 1,
                }
            } else {
                Lin { c: b.clone(), n: 0 }
            };
            let len = Lin {
                c: &hi.c - &lo.c,
                n: hi.n - lo.n,
            };
            if self.positive(&len) {
                total.c += len.c;
                total.n += len.n;
            }
            p += 1u8;
        }
        total
    }

    /// `μ(box ∩ A(q))` exactly.
    pub fn measure(&self, cube: &Cube) -> Result<ClusterMeasure> {
        if cube.dim() != self.m {
            return Err(Error::input(format!(
                "box dimension {} differs from m = {}",
                cube.dim(),
                self.m
            )));
        }
        let r_pow_m = self.r_pow_m();
        // product of the per-axis linear forms, reduced modulo r^m = R
        let mut poly = vec![Rat::zero(); self.m];
        poly[0] = Rat::one();
        for i in 0..self.m {
            let (a, b) = cube.window(i);
            let l = self.axis_length(&a, &b);
            let mut next = vec![Rat::zero(); self.m];
            for (j, c) in poly.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                next[j] += c * &l.c;
                let t = c * &Rat::from(l.n);
                if j + 1 < self.m {
                    next[j + 1] += t;
                } else {
                    next[0] += t * &r_pow_m;
                }
            }
            poly = next;
        }
        Ok(ClusterMeasure {
            m: self.m,
            r_pow_m,
            coeffs: poly,
        })
    }

    /// `(λq + 2)^m (2ε)^m/(k q^m)` for a cube of side `λ`.
    pub fn lemma5_proof_bound(&self, side: &Rat) -> Rat {
        let q = Rat::from(self.q);
        let m = self.m as i32;
        (side * &q + Rat::from(2)).pow(m) * (Rat::from(2) * &self.eps).pow(m) / (Rat::from(self.k) * q.pow(m))
    }
}
