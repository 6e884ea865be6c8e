//! The strip `D = {(p₁, p₂) : |q₂p₁ − q₁p₂| ≤ a}` around the line `l₀`
//! through `(q₁, q₂)`, with `a = d·⌊ε(q₁ + q₂)/(d·k^{1/m})⌋` and
//! `d = gcd(q₁, q₂)`, and its integer points inside rectangles.
//!
//! Integer points lie on the lines `l_q : q₂p₁ − q₁p₂ = q` with `d | q`, and
//! on each such line they form a progression with step `(q₁, q₂)/d`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::check_params;
use crate::error::{Error, Result};
use crate::exactnum::Rat;
use crate::regions2d::fiber::{ceil_div, floor_div, Frame};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripD {
    pub q1: u64,
    pub q2: u64,
    pub d: u64,
    pub eps: Rat,
    pub k: u64,
    pub m: usize,
    /// `⌊ε(q₁ + q₂)/(d·k^{1/m})⌋`, so `a = n·d`.
    pub n: u64,
    pub a: u64,
}

/// Largest integer `n ≥ 0` with `n^m ≤ x` for rational `x ≥ 0`.
pub(crate) fn floor_root(x: &Rat, m: usize) -> u64 {
    let guess = x.to_f64().powf(1.0 / m as f64).floor().max(0.0) as u64;
    let ok = |n: u64| Rat::from(n).pow(m as i32) <= *x;
    let mut n = guess;
    while n > 0 && !ok(n) {
        n -= 1;
    }
    while ok(n + 1) {
        n += 1;
    }
    n
}

impl StripD {
    pub fn new(q1: u64, q2: u64, eps: Rat, k: u64, m: usize) -> Result<Self> {
        check_params(m, k, &eps)?;
        if q1 < 1 || q2 < 1 {
            return Err(Error::domain("q1 and q2 must be positive"));
        }
        let d = q1.gcd(&q2);
        // n^m ≤ ε^m (q₁+q₂)^m / (d^m k)
        let x = (&eps * &Rat::from(q1 + q2) / Rat::from(d)).pow(m as i32) / Rat::from(k);
        let n = floor_root(&x, m);
        Ok(StripD {
            q1,
            q2,
            d,
            eps,
            k,
            m,
            n,
            a: n * d,
        })
    }

    /// Lines `l_q` in `D` that carry integer points.
    pub fn line_count(&self) -> u64 {
        2 * self.n + 1
    }

    /// `D = l₀`.
    pub fn is_single_line(&self) -> bool {
        self.a == 0
    }

    /// Width `h = 2n·d/√(q₁² + q₂²)` against `2√2·ε·k^{−1/m}`, compared as
    /// `(h²/8)^m ≤ ε^{2m}/k²`.
    pub fn width_within_bound(&self) -> bool {
        let m = self.m as i32;
        let nd = Rat::from(self.n * self.d);
        let h2 = Rat::from(4) * &nd * &nd / Rat::from(self.q1 * self.q1 + self.q2 * self.q2);
        (h2 / Rat::from(8)).pow(m) <= self.eps.pow(2 * m) / Rat::from(self.k * self.k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RectKind {
    /// Sides `(1+δ)λq₁ × (1+δ)λq₂` at an arbitrary position.
    C,
    /// `[0, (1+δ)λq₁/2] × [0, (1+δ)λq₂/2]`.
    C0,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectC {
    pub kind: RectKind,
    pub x: (Rat, Rat),
    pub y: (Rat, Rat),
}

impl RectC {
    pub fn c0(q1: u64, q2: u64, lam: &Rat, delta: &Rat) -> Self {
        let s = (Rat::one() + delta) * lam * Rat::new(1, 2);
        RectC {
            kind: RectKind::C0,
            x: (Rat::zero(), &s * &Rat::from(q1)),
            y: (Rat::zero(), &s * &Rat::from(q2)),
        }
    }

    pub fn c(q1: u64, q2: u64, lam: &Rat, delta: &Rat, corner: (Rat, Rat)) -> Self {
        let s = (Rat::one() + delta) * lam;
        let x = (corner.0.clone(), &corner.0 + &(&s * &Rat::from(q1)));
        let y = (corner.1.clone(), &corner.1 + &(&s * &Rat::from(q2)));
        RectC {
            kind: RectKind::C,
            x,
            y,
        }
    }

    pub fn contains(&self, p: (i64, i64)) -> bool {
        let (a, b) = (Rat::from(p.0), Rat::from(p.1));
        self.x.0 <= a && a <= self.x.1 && self.y.0 <= b && b <= self.y.1
    }
}

/// `(s, t)` with `a·s + b·t = gcd(a, b)`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, s, t) = ext_gcd(b, a.rem_euclid(b));
        (g, t, s - a.div_euclid(b) * t)
    }
}

/// Walks the lines `l_{jd}`, `|j| ≤ n`, calling `f(j, t_lo, t_hi, base, step)`
/// for the parameter range of points `base + t·step` inside the rectangle.
fn for_each_line(
    strip: &StripD,
    rect: &RectC,
    mut f: impl FnMut(i128, i128, i128, (i128, i128), (i128, i128)),
) -> Result<()> {
    let frame = Frame::new([&rect.x.0, &rect.x.1, &rect.y.0, &rect.y.1]);
    let sc = |x: &Rat| -> Result<i128> {
        frame
            .scale_i128(x)
            .ok_or_else(|| Error::resource("rectangle coordinates exceed 128 bits"))
    };
    let l = frame
        .l
        .to_i128()
        .ok_or_else(|| Error::resource("rectangle grid too fine"))?;
    let (x0, x1, y0, y1) = (sc(&rect.x.0)?, sc(&rect.x.1)?, sc(&rect.y.0)?, sc(&rect.y.1)?);
    let (q1, q2, d) = (strip.q1 as i128, strip.q2 as i128, strip.d as i128);
    let step = (q1 / d, q2 / d);
    // q₂u − q₁v = d
    let (_, s, t) = ext_gcd(q2, q1);
    let (u, v) = (s, -t);
    let n = strip.n as i128;
    for j in -n..=n {
        let base = (j * u, j * v);
        // x₀ ≤ (base₁ + t·step₁)·L ≤ x₁, same for the second coordinate
        let t_lo = ceil_div(x0 - base.0 * l, step.0 * l).max(ceil_div(y0 - base.1 * l, step.1 * l));
        let t_hi = floor_div(x1 - base.0 * l, step.0 * l).min(floor_div(y1 - base.1 * l, step.1 * l));
        if t_lo <= t_hi {
            f(j, t_lo, t_hi, base, step);
        }
    }
    Ok(())
}

/// Integer points of `D ∩ rect`, line by line.
pub fn d_region_points(strip: &StripD, rect: &RectC) -> Result<Vec<(i64, i64)>> {
    let mut pts = Vec::new();
    let mut overflow = false;
    for_each_line(strip, rect, |_, lo, hi, base, step| {
        for t in lo..=hi {
            let p = (base.0 + t * step.0, base.1 + t * step.1);
            match (i64::try_from(p.0), i64::try_from(p.1)) {
                (Ok(a), Ok(b)) => pts.push((a, b)),
                _ => overflow = true,
            }
        }
    })?;
    if overflow {
        return Err(Error::resource("point coordinates exceed i64"));
    }
    Ok(pts)
}

/// `#(D ∩ rect ∩ ℤ²)`.
pub fn d_region_count(strip: &StripD, rect: &RectC) -> Result<u64> {
    let mut c = 0u64;
    for_each_line(strip, rect, |_, lo, hi, _, _| c += (hi - lo + 1) as u64)?;
    Ok(c)
}

/// Points per line of `D ∩ rect`, indexed by `j` in `l_{jd}`.
pub fn d_region_line_counts(strip: &StripD, rect: &RectC) -> Result<Vec<(i64, u64)>> {
    let mut out = Vec::new();
    for_each_line(strip, rect, |j, lo, hi, _, _| {
        out.push((j as i64, (hi - lo + 1) as u64))
    })?;
    Ok(out)
}

/// `#(D ∩ C ∩ ℤ²)^m` against
/// `(32ελ)^m k^{m−1} + (16ε/d)^m k^{m−1} + (8λd)^m + 4^m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma11Report {
    pub q1: u64,
    pub q2: u64,
    pub count: u64,
    /// The right-hand side raised to the power `m`.
    pub bound_pow_m: Rat,
    pub ok: bool,
}

pub fn lemma11_check(strip: &StripD, lam: &Rat, rect: &RectC) -> Result<Lemma11Report> {
    let count = d_region_count(strip, rect)?;
    let m = strip.m as i32;
    let km1 = Rat::from_int(BigInt::from(strip.k).pow(strip.m as u32 - 1));
    let e = &strip.eps;
    let d = Rat::from(strip.d);
    let bound_pow_m = (Rat::from(32) * e * lam).pow(m) * &km1
        + (Rat::from(16) * e / &d).pow(m) * &km1
        + (Rat::from(8) * lam * &d).pow(m)
        + Rat::from(4).pow(m);
    let ok = Rat::from(count).pow(m) <= bound_pow_m;
    Ok(Lemma11Report {
        q1: strip.q1,
        q2: strip.q2,
        count,
        bound_pow_m,
        ok,
    })
}
