//! Exact area of `M̄ₖ` inside an axis-parallel rectangle.
//!
//! The fiber length `L(β)` is a sum over the union's components of
//! `hi − lo`, clipped to the α-window. Every component end is a strip
//! boundary line `α = (c − x₂β)/x₁` at parameters `β` where no other strip
//! covers it, or a window edge at parameters where some strip covers it. So
//! `∫ L(β) dβ` splits into one-dimensional integrals along each boundary line
//! over its exposed (or, for window edges, covered) β-set, and each of those
//! sets is an interval union computed exactly.

use std::cmp::Ordering;

use rayon::prelude::*;

use super::fiber::{ceil_div, floor_div, Frame};
use crate::error::{Error, Result};
use crate::exactnum::Rat;

/// `num / (den · L)` with `den > 0`.
#[derive(Clone, Copy, Debug)]
struct Frac {
    num: i128,
    den: i128,
}

impl Frac {
    fn int(num: i128) -> Self {
        Frac { num, den: 1 }
    }

    fn new(num: i128, den: i128) -> Self {
        if den < 0 {
            Frac { num: -num, den: -den }
        } else {
            Frac { num, den }
        }
    }

    fn cmp(&self, o: &Frac) -> Ordering {
        (self.num * o.den).cmp(&(o.num * self.den))
    }

    fn to_rat(self, l: &Rat) -> Rat {
        Rat::new(self.num, self.den) / l
    }
}

fn fmax(a: Frac, b: Frac) -> Frac {
    if a.cmp(&b) == Ordering::Less {
        b
    } else {
        a
    }
}

fn fmin(a: Frac, b: Frac) -> Frac {
    if a.cmp(&b) == Ordering::Greater {
        b
    } else {
        a
    }
}

/// Boundary line `x₁α + x₂β = c/L`.
#[derive(Clone, Copy, Debug)]
struct Line {
    x1: i128,
    x2: i128,
    c: i128,
    /// `+1` for an upper end, `−1` for a lower end.
    sign: i128,
    /// Own strip `(x₁, x₂, q)`, excluded from the covering set.
    own_q: Option<i128>,
    /// Window edges contribute where covered instead of where exposed.
    edge: bool,
}

struct Setup {
    k: i128,
    l: i128,
    h: i128,
    a0: i128,
    a1: i128,
    b0: i128,
    b1: i128,
    dirs: Vec<(i128, i128)>,
}

impl Setup {
    fn domain(&self, ln: &Line) -> Option<(Frac, Frac)> {
        let mut lo = Frac::int(self.b0);
        let mut hi = Frac::int(self.b1);
        if !ln.edge {
            let (x1, x2, c) = (ln.x1, ln.x2, ln.c);
            // α ≥ α₀ ⇔ x₂β ≤ (c − x₁A₀)/L ; α ≤ α₁ ⇔ x₂β ≥ (c − x₁A₁)/L
            let up = c - x1 * self.a0;
            let down = c - x1 * self.a1;
            match x2.signum() {
                0 => {
                    if up < 0 || down > 0 {
                        return None;
                    }
                }
                1 => {
                    hi = fmin(hi, Frac::new(up, x2));
                    lo = fmax(lo, Frac::new(down, x2));
                }
                _ => {
                    lo = fmax(lo, Frac::new(up, x2));
                    hi = fmin(hi, Frac::new(down, x2));
                }
            }
        }
        (lo.cmp(&hi) != Ordering::Greater).then_some((lo, hi))
    }

    /// Union of β-intervals on which the line lies in some strip.
    fn covered(&self, ln: &Line, dom: (Frac, Frac)) -> Vec<(Frac, Frac)> {
        let (x1, x2, c) = (ln.x1, ln.x2, ln.c);
        let (l, h) = (self.l, self.h);
        let mut iv: Vec<(Frac, Frac)> = Vec::new();
        for &(y1, y2) in &self.dirs {
            let delta = x1 * y2 - x2 * y1;
            if delta == 0 {
                // y·p is constant (= y₁c/(x₁L)) along the line
                let num = y1 * c;
                let den = x1 * l;
                let q_lo = ceil_div(num - h * x1, den);
                let q_hi = floor_div(num + h * x1, den);
                let own = if (y1, y2) == (x1, x2) { ln.own_q } else { None };
                if (q_lo..=q_hi).any(|q| Some(q) != own) {
                    return vec![dom];
                }
                continue;
            }
            // g(β) = (y₁c/L + βΔ)/x₁ at the domain ends, with β = n/(dL)
            let g = |f: Frac| -> (i128, i128) { (y1 * c * f.den + delta * f.num, x1 * f.den * l) };
            let (ga, da) = g(dom.0);
            let (gb, db) = g(dom.1);
            let (glo, dlo, ghi, dhi) = if delta > 0 { (ga, da, gb, db) } else { (gb, db, ga, da) };
            let q_lo = ceil_div(glo - h * dlo / l, dlo);
            let q_hi = floor_div(ghi + h * dhi / l, dhi);
            for q in q_lo..=q_hi {
                let e1 = x1 * (q * l - h) - y1 * c;
                let e2 = x1 * (q * l + h) - y1 * c;
                let (lo, hi) = if delta > 0 {
                    (Frac::new(e1, delta), Frac::new(e2, delta))
                } else {
                    (Frac::new(e2, delta), Frac::new(e1, delta))
                };
                let lo = fmax(lo, dom.0);
                let hi = fmin(hi, dom.1);
                if lo.cmp(&hi) == Ordering::Less {
                    iv.push((lo, hi));
                }
            }
        }
        iv.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Frac, Frac)> = Vec::new();
        for (a, b) in iv {
            match out.last_mut() {
                Some(last) if a.cmp(&last.1) != Ordering::Greater => {
                    if b.cmp(&last.1) == Ordering::Greater {
                        last.1 = b;
                    }
                }
                _ => out.push((a, b)),
            }
        }
        out
    }

    fn contribution(&self, ln: &Line) -> Rat {
        let Some(dom) = self.domain(ln) else {
            return Rat::zero();
        };
        let lr = Rat::from(self.l);
        let cov = self.covered(ln, dom);
        let sign = Rat::from(ln.sign);
        if ln.edge {
            let alpha = Rat::new(ln.c, self.l);
            let len: Rat = cov.iter().map(|(a, b)| b.to_rat(&lr) - a.to_rat(&lr)).sum();
            return sign * alpha * len;
        }
        // gaps of the domain not covered by other strips
        let mut gaps = Vec::new();
        let mut cur = dom.0;
        for (a, b) in &cov {
            if cur.cmp(a) == Ordering::Less {
                gaps.push((cur, *a));
            }
            cur = fmax(cur, *b);
        }
        if cur.cmp(&dom.1) == Ordering::Less {
            gaps.push((cur, dom.1));
        }
        // ∫ (c/L − x₂β)/x₁ dβ
        let c = Rat::new(ln.c, self.l);
        let x2 = Rat::from(ln.x2);
        let mut total = Rat::zero();
        for (u, v) in gaps {
            let (u, v) = (u.to_rat(&lr), v.to_rat(&lr));
            let lin = &c * &(&v - &u);
            let quad = &x2 * &(&v * &v - &u * &u) * Rat::new(1, 2);
            total += lin - quad;
        }
        sign * total / Rat::from(ln.x1)
    }
}

/// Exact area of the union of strips `|x₁α + x₂β − q| ≤ η` over the given
/// directions (canonical, i.e. first nonzero coordinate positive) inside
/// `[α₀, α₁] × [β₀, β₁]`.
pub fn union_area(directions: &[(i64, i64)], eta: &Rat, alpha: &(Rat, Rat), beta: &(Rat, Rat)) -> Result<Rat> {
    if alpha.0 > alpha.1 || beta.0 > beta.1 {
        return Err(Error::input("empty rectangle"));
    }
    if eta.is_negative() {
        return Err(Error::domain("negative strip half-width"));
    }
    for &(x1, x2) in directions {
        if !(x1 > 0 || (x1 == 0 && x2 > 0)) {
            return Err(Error::input(format!("direction ({x1}, {x2}) is not canonical")));
        }
    }
    let frame = Frame::new([eta, &alpha.0, &alpha.1, &beta.0, &beta.1]);
    let kmax = directions.iter().map(|&(a, b)| a.abs().max(b.abs())).max().unwrap_or(1) as i128;
    if frame.l.bits() > 40 || kmax > 64 {
        return Err(Error::resource(
            "exact area needs a coarse rational grid and small directions",
        ));
    }
    let sc = |x: &Rat| frame.scale_i128(x).unwrap();
    let setup = Setup {
        k: kmax,
        l: sc(&Rat::one()),
        h: sc(eta),
        a0: sc(&alpha.0),
        a1: sc(&alpha.1),
        b0: sc(&beta.0),
        b1: sc(&beta.1),
        dirs: directions.iter().map(|&(a, b)| (a as i128, b as i128)).collect(),
    };
    let _ = setup.k;
    let mut lines = vec![
        Line {
            x1: 1,
            x2: 0,
            c: setup.a1,
            sign: 1,
            own_q: None,
            edge: true,
        },
        Line {
            x1: 1,
            x2: 0,
            c: setup.a0,
            sign: -1,
            own_q: None,
            edge: true,
        },
    ];
    for &(x1, x2) in &setup.dirs {
        if x1 == 0 {
            continue;
        }
        let (bmin, bmax) = if x2 >= 0 {
            (setup.b0, setup.b1)
        } else {
            (setup.b1, setup.b0)
        };
        let q_lo = ceil_div(x1 * setup.a0 + x2 * bmin - setup.h, setup.l);
        let q_hi = floor_div(x1 * setup.a1 + x2 * bmax + setup.h, setup.l);
        for q in q_lo..=q_hi {
            for sign in [1, -1] {
                let c = q * setup.l + sign * setup.h;
                lines.push(Line {
                    x1,
                    x2,
                    c,
                    sign,
                    own_q: Some(q),
                    edge: false,
                });
            }
        }
    }
    Ok(lines.par_iter().map(|ln| setup.contribution(ln)).sum())
}

/// Canonical directions `x` with `1 ≤ max|xᵢ| ≤ k`.
pub fn all_directions(k: u64) -> Vec<(i64, i64)> {
    let k = k as i64;
    let mut out: Vec<(i64, i64)> = (1..=k).map(|x2| (0, x2)).collect();
    for x1 in 1..=k {
        for x2 in -k..=k {
            out.push((x1, x2));
        }
    }
    out
}
