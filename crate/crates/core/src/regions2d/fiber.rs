//! Fibers `{α : (α, β) ∈ M̄ₖ}` at fixed `β`.
//!
//! For `x₁ > 0` the strip `|x₁α + x₂β − q| ≤ η` meets the fiber in the
//! interval `[(q − x₂β − η)/x₁, (q − x₂β + η)/x₁]`; rows with `x₁ = 0` cover
//! the whole fiber or none of it.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::exactnum::{Interval, IntervalSet, Rat};

/// Rationals scaled to one integer grid `1/L`.
pub(crate) struct Frame {
    pub l: BigInt,
}

impl Frame {
    pub fn new<'a>(xs: impl IntoIterator<Item = &'a Rat>) -> Self {
        let mut l = BigInt::one();
        for x in xs {
            l = l.lcm(x.denom());
        }
        Frame { l }
    }

    pub fn scale(&self, x: &Rat) -> BigInt {
        x.numer() * (&self.l / x.denom())
    }

    pub fn scale_i128(&self, x: &Rat) -> Option<i128> {
        self.scale(x).to_i128()
    }
}

pub(crate) fn ceil_div(a: i128, b: i128) -> i128 {
    Integer::div_ceil(&a, &b)
}

pub(crate) fn floor_div(a: i128, b: i128) -> i128 {
    Integer::div_floor(&a, &b)
}

/// `num / (den · L)` with `den > 0`.
#[derive(Clone, Copy, Debug)]
struct Frac {
    num: i128,
    den: i128,
}

impl Frac {
    fn cmp(&self, o: &Frac) -> Ordering {
        (self.num * o.den).cmp(&(o.num * self.den))
    }
}

fn max_frac(a: Frac, b: Frac) -> Frac {
    if a.cmp(&b) == Ordering::Less {
        b
    } else {
        a
    }
}

fn min_frac(a: Frac, b: Frac) -> Frac {
    if a.cmp(&b) == Ordering::Greater {
        b
    } else {
        a
    }
}

fn validate(k: u64, eta: &Rat, window: &(Rat, Rat)) -> Result<()> {
    if k < 1 {
        return Err(Error::domain("k must be positive"));
    }
    if eta.is_negative() {
        return Err(Error::domain("negative strip half-width"));
    }
    if window.0 > window.1 {
        return Err(Error::input("empty alpha window"));
    }
    Ok(())
}

/// Whether some row `(0, x₂)`, `1 ≤ x₂ ≤ k`, has `‖x₂β‖ ≤ η`.
fn horizontal_hit(beta: &Rat, k: u64, eta: &Rat) -> bool {
    (1..=k).any(|x2| (beta * &Rat::from(x2)).dist_to_int() <= *eta)
}

/// Exact length of the fiber of the union of strips `|x₁α + x₂β − q| ≤ η`
/// over `1 ≤ max(|x₁|, |x₂|) ≤ k` inside `window`.
///
/// Uses 128-bit integer arithmetic on the common grid of `β`, `η` and the
/// window; falls back to [`fiber_set_reference`] when that grid is too fine.
pub fn fiber_length(beta: &Rat, k: u64, eta: &Rat, window: &(Rat, Rat)) -> Result<Rat> {
    validate(k, eta, window)?;
    let win_len = &window.1 - &window.0;
    if horizontal_hit(beta, k, eta) {
        return Ok(win_len);
    }
    let frame = Frame::new([beta, eta, &window.0, &window.1]);
    if frame.l.bits() > 80 || k > (1 << 20) {
        return Ok(fiber_set_reference(beta, k, eta, window)?.total_length());
    }
    let (l, b, h) = (
        frame.scale_i128(&Rat::one()).unwrap(),
        frame.scale_i128(beta).unwrap(),
        frame.scale_i128(eta).unwrap(),
    );
    let (a0, a1) = (
        frame.scale_i128(&window.0).unwrap(),
        frame.scale_i128(&window.1).unwrap(),
    );
    let k = k as i128;
    let width = to_f64(a1 - a0).max(1.0);
    let expected: f64 = (1..=k)
        .map(|x1| (2 * k + 1) as f64 * (width * x1 as f64 / to_f64(l) + 1.0))
        .sum();
    let slabs = ((expected / SLAB_SIZE) as usize).clamp(1, 1 << 16);
    let (origin, scale) = (to_f64(a0), slabs as f64 / width);
    // position of the left end (c − H)/x₁ in slab units
    let pos = |c: i128, x1: i128| (to_f64(c - h) / x1 as i64 as f64 - origin) * scale;
    let mut slab: Vec<Vec<(i128, i128)>> = vec![Vec::new(); slabs];
    for x1 in 1..=k {
        for x2 in -k..=k {
            let shift = x2 * b;
            // interval meets the window: q·L − x₂B + H ≥ A₀x₁ and q·L − x₂B − H ≤ A₁x₁
            let q_lo = ceil_div(a0 * x1 + shift - h, l);
            let q_hi = floor_div(a1 * x1 + shift + h, l);
            for q in q_lo..=q_hi {
                let c = q * l - shift;
                let s = (pos(c, x1).max(0.0) as usize).min(slabs - 1);
                slab[s].push((c, x1));
            }
        }
    }
    let mut sorted = Vec::with_capacity(slab.iter().map(Vec::len).sum());
    for (s, items) in slab.into_iter().enumerate() {
        bucket_sort(items, |c, x1| pos(c, x1) - s as f64, &mut sorted);
    }
    // floating-point positions may misplace nearly equal ends
    let left = |e: &(i128, i128)| Frac { num: e.0 - h, den: e.1 };
    for i in 1..sorted.len() {
        let mut j = i;
        while j > 0 && left(&sorted[j - 1]).cmp(&left(&sorted[j])) == Ordering::Greater {
            sorted.swap(j - 1, j);
            j -= 1;
        }
    }
    let ends = sorted
        .into_iter()
        .map(|(c, x1)| (Frac { num: c - h, den: x1 }, Frac { num: c + h, den: x1 }));
    Ok(union_length(ends, k as usize, a0, a1) / Rat::from_int(frame.l.clone()))
}

/// Intervals per slab of the α-window.
const SLAB_SIZE: f64 = 2048.0;

fn to_f64(x: i128) -> f64 {
    match i64::try_from(x) {
        Ok(v) => v as f64,
        Err(_) => x as f64,
    }
}

/// Appends `items` to `out` ordered by `pos`, which maps into `[0, 1)` up
/// to rounding.
fn bucket_sort(items: Vec<(i128, i128)>, pos: impl Fn(i128, i128) -> f64, out: &mut Vec<(i128, i128)>) {
    let n = items.len();
    if n < 2 {
        out.extend(items);
        return;
    }
    let bucket: Vec<u32> = items
        .iter()
        .map(|&(c, x1)| ((pos(c, x1) * n as f64).max(0.0) as usize).min(n - 1) as u32)
        .collect();
    let mut start = vec![0u32; n + 1];
    for &b in &bucket {
        start[b as usize + 1] += 1;
    }
    for i in 0..n {
        start[i + 1] += start[i];
    }
    let base = out.len();
    out.resize(base + n, (0, 1));
    for (e, &b) in items.into_iter().zip(&bucket) {
        out[base + start[b as usize] as usize] = e;
        start[b as usize] += 1;
    }
}

/// Length of the part in `[w0, w1]` of a union of intervals sorted by left
/// end, whose ends have denominators `1..=k`.
fn union_length(mut iv: impl Iterator<Item = (Frac, Frac)>, k: usize, w0: i128, w1: i128) -> Rat {
    let (w0, w1) = (Frac { num: w0, den: 1 }, Frac { num: w1, den: 1 });
    let mut acc = vec![0i128; k + 1];
    let mut close = |lo: Frac, hi: Frac| {
        let (lo, hi) = (max_frac(lo, w0), min_frac(hi, w1));
        if lo.cmp(&hi) == Ordering::Less {
            acc[hi.den as usize] += hi.num;
            acc[lo.den as usize] -= lo.num;
        }
    };
    let Some((mut lo, mut hi)) = iv.next() else {
        return Rat::zero();
    };
    for (a, b) in iv {
        if a.cmp(&hi) != Ordering::Greater {
            if b.cmp(&hi) == Ordering::Greater {
                hi = b;
            }
        } else {
            close(lo, hi);
            lo = a;
            hi = b;
        }
    }
    close(lo, hi);
    acc.iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &a)| a != 0)
        .map(|(d, &a)| Rat::new(a, d as i64))
        .sum()
}

/// The fiber as an exact interval set, computed with rational arithmetic only.
pub fn fiber_set_reference(beta: &Rat, k: u64, eta: &Rat, window: &(Rat, Rat)) -> Result<IntervalSet> {
    validate(k, eta, window)?;
    let win = Interval::new(window.0.clone(), window.1.clone())?;
    if horizontal_hit(beta, k, eta) {
        return Ok(IntervalSet::from_intervals(vec![win]));
    }
    let k = k as i64;
    let mut raw = Vec::new();
    for x1 in 1..=k {
        let x1r = Rat::from(x1);
        for x2 in -k..=k {
            let shift = beta * &Rat::from(x2);
            let q_lo = (&window.0 * &x1r + &shift - eta).ceil();
            let q_hi = (&window.1 * &x1r + &shift + eta).floor();
            let mut q = q_lo;
            while q <= q_hi {
                let c = Rat::from_int(q.clone()) - &shift;
                let iv = Interval::new((&c - eta) / &x1r, (&c + eta) / &x1r)?;
                if let Some(clipped) = iv.intersect(&win) {
                    raw.push(clipped);
                }
                q += 1;
            }
        }
    }
    Ok(IntervalSet::from_intervals(raw))
}
