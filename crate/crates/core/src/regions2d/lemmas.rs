//! Counting and measure estimates of the linear-form regime, checked exactly.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CenterLattice, MeasureEstimate, PrimitivePairSet, Square};
use crate::error::{Error, Result};
use crate::exactnum::certified::{ln_bracket, sqrt_bracket, Bracket};
use crate::exactnum::{zeta, Rat};
use crate::geometry::ConvexPolygon;

/// Lattice points of `Λ` in `S` against
/// `λ²Δ + 2λ√(x₁² + y₁²) + 2λ√(x₂² + y₂²)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub count: u64,
    pub bound: Bracket,
    pub ok: bool,
}

pub fn lemma1_count_check(lattice: &CenterLattice, square: &Square) -> Result<Lemma1Report> {
    let lam = &square.side;
    let (x, y) = (lattice.x, lattice.y);
    for v in [x.0, x.1, y.0, y.1] {
        if Rat::from(v) * lam <= Rat::one() {
            return Err(Error::precondition(format!(
                "entry {v} of ({}, {}), ({}, {}) is not above 1/lambda = {}",
                x.0,
                x.1,
                y.0,
                y.1,
                lam.recip()
            )));
        }
    }
    let count = lattice.count_in_square(square)?;
    let sq = |a: i64, b: i64| Rat::from(a as i128 * a as i128 + b as i128 * b as i128);
    let two_lam = Rat::from(2) * lam;
    let base = lam * lam * Rat::from(lattice.delta);
    let terms = [(two_lam.clone(), sq(x.0, y.0)), (two_lam.clone(), sq(x.1, y.1))];
    let rhs = Rat::from(count) - &base;
    let ok = crate::exactnum::certified::compare_sqrt_sum(&terms, &rhs)? == Ordering::Greater;
    let mut bound = Bracket::exact(base);
    for (c, r) in &terms {
        bound = bound.add(&sqrt_bracket(r, 64)?.scale(c));
    }
    Ok(Lemma1Report { count, bound, ok })
}

/// Integer points `N`, area `P` and perimeter `L` of a convex region, with
/// `ok = (P − L < N < P + L)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JarnikReport {
    pub n: u64,
    pub area: Rat,
    pub perimeter: Bracket,
    pub ok: bool,
}

pub fn jarnik_check(polygon: &ConvexPolygon) -> Result<JarnikReport> {
    if polygon.compare_perimeter(&Rat::one())? == Ordering::Less {
        return Err(Error::precondition("perimeter below 1"));
    }
    let n = polygon.lattice_point_count()?;
    let area = polygon.area();
    // both inequalities together say L > |N − P|
    let gap = (Rat::from(n) - &area).abs();
    let ok = polygon.compare_perimeter(&gap)? == Ordering::Greater;
    let mut perimeter = Bracket::exact(Rat::zero());
    for e in polygon.squared_edges() {
        perimeter = perimeter.add(&sqrt_bracket(&e, 64)?);
    }
    Ok(JarnikReport { n, area, perimeter, ok })
}

/// `Σ 1/Δ` over ordered pairs of distinct elements of `E_k`, split into the
/// number of pairs with `Δ = 1` and the remaining sum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma2Report {
    pub k: u64,
    pub sum: Rat,
    pub unit_terms: u64,
    pub rest: Rat,
    /// `9k² ln k`.
    pub bound: Bracket,
    pub bound_ok: bool,
}

impl Lemma2Report {
    /// `"<unit_terms>+<rest>"`, e.g. `4+142/105` at `k = 4`.
    pub fn split_display(&self) -> String {
        if self.rest.is_zero() {
            self.unit_terms.to_string()
        } else {
            format!("{}+{}", self.unit_terms, self.rest)
        }
    }
}

pub fn lemma2_sum(k: u64) -> Result<Lemma2Report> {
    if k < 4 {
        return Err(Error::domain(format!("k = {k} must be at least 4")));
    }
    if k > 1 << 12 {
        return Err(Error::resource("k above 4096"));
    }
    let e = PrimitivePairSet::e_k(k).pairs;
    let dmax = (k * k) as usize;
    let counts = e
        .par_iter()
        .map(|&(x1, x2)| {
            let mut c = vec![0u64; dmax + 1];
            for &(y1, y2) in &e {
                if (x1, x2) != (y1, y2) {
                    c[(x1 * y2 - x2 * y1).unsigned_abs() as usize] += 1;
                }
            }
            c
        })
        .reduce(
            || vec![0u64; dmax + 1],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    debug_assert_eq!(counts[0], 0, "distinct primitive vectors are independent");
    let unit_terms = counts[1];
    let rest: Rat = counts
        .iter()
        .enumerate()
        .skip(2)
        .filter(|(_, &c)| c > 0)
        .map(|(d, &c)| Rat::new(c, d as u64))
        .sum();
    let sum = Rat::from(unit_terms) + &rest;
    let nine_k2 = Rat::from(9 * k * k);
    let mut bits = 64;
    let (bound, bound_ok) = loop {
        let b = ln_bracket(&Rat::from(k), bits)?.scale(&nine_k2);
        if sum <= b.lo {
            break (b, true);
        }
        if sum > b.hi {
            break (b, false);
        }
        bits *= 2;
    };
    Ok(Lemma2Report {
        k,
        sum,
        unit_terms,
        rest,
        bound,
        bound_ok,
    })
}

/// A measure estimate of `M̄ₖ ∩ S` against the bands
/// `λ²(ε/(3ζ(2)) − 37ε²/ζ(2)²) ≤ μ ≤ 5ελ²`, and the complement
/// `μ(M̲ₖ ∩ S) = λ² − μ(M̄ₖ ∩ S)` against `λ²(1 − 5ε)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandReport {
    pub k: u64,
    pub eps: Rat,
    pub lam: Rat,
    pub value: Rat,
    pub ci_halfwidth: Rat,
    pub lower_band: Bracket,
    pub upper_band: Rat,
    /// The lower band is not positive, so it says nothing.
    pub vacuous_lower: bool,
    /// `value − lower_band.hi`.
    pub lower_margin: Rat,
    /// `upper_band − value`.
    pub upper_margin: Rat,
    pub lower_ok: bool,
    pub upper_ok: bool,
    pub complement: Rat,
    pub complement_bound: Rat,
    pub complement_ok: bool,
}

/// `λ²(ε/(3ζ(2)) − 37ε²/ζ(2)²)`.
pub fn lemma3_lower_band(eps: &Rat, lam: &Rat) -> Result<Bracket> {
    let z = zeta(2, &Rat::dyadic(1, 32))?.bracket();
    let first = Bracket::exact(eps.clone()).div(&z.scale(&Rat::from(3)))?;
    let second = Bracket::exact(Rat::from(37) * eps * eps).div(&z.mul(&z))?;
    Ok(first.sub(&second).scale(&(lam * lam)))
}

/// `5ελ²`.
pub fn lemma3_upper_band(eps: &Rat, lam: &Rat) -> Rat {
    Rat::from(5) * eps * lam * lam
}

pub fn lemma3_lemma4_band(k: u64, eps: &Rat, square: &Square, estimate: &MeasureEstimate) -> Result<BandReport> {
    if estimate.k != k || estimate.eps != *eps || estimate.square != *square {
        return Err(Error::input("estimate was produced for different (k, eps, S)"));
    }
    let lam = square.side.clone();
    let lower_band = lemma3_lower_band(eps, &lam)?;
    let upper_band = lemma3_upper_band(eps, &lam);
    let value = estimate.value.clone();
    let ci = estimate.ci_halfwidth.clone();
    let lam2 = &lam * &lam;
    let complement = &lam2 - &value;
    let complement_bound = &lam2 * &(Rat::one() - Rat::from(5) * eps);
    Ok(BandReport {
        k,
        eps: eps.clone(),
        vacuous_lower: !lower_band.hi.is_positive(),
        lower_margin: &value - &lower_band.hi,
        upper_margin: &upper_band - &value,
        lower_ok: estimate.upper() >= lower_band.hi,
        upper_ok: estimate.lower() <= upper_band,
        complement_ok: &complement + &ci >= complement_bound,
        lam,
        value,
        ci_halfwidth: ci,
        lower_band,
        upper_band,
        complement,
        complement_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regions2d::{measure_mbar_2d, Method};
    use num_integer::Integer;
    use proptest::prelude::*;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    /// Independent oracle: unordered pairs, doubled, summed as plain fractions.
    fn lemma2_oracle(k: i64) -> Rat {
        let mut e = vec![];
        for a in 1..=k {
            for b in 1..=k {
                if 2 * a >= k && 2 * b >= k && a.gcd(&b) == 1 {
                    e.push((a, b));
                }
            }
        }
        let mut s = Rat::zero();
        for i in 0..e.len() {
            for j in i + 1..e.len() {
                let d = (e[i].0 * e[j].1 - e[i].1 * e[j].0).abs();
                s += Rat::new(2, d);
            }
        }
        s
    }

    #[test]
    fn lemma2_small_k() {
        let rep = lemma2_sum(4).unwrap();
        assert_eq!(rep.sum, r("562/105"));
        assert_eq!(rep.split_display(), "4+142/105");
        assert!(rep.bound_ok);
        assert!((rep.bound.lo.to_f64() - 199.6).abs() < 0.1);
        for k in [5, 9, 16, 33] {
            let rep = lemma2_sum(k).unwrap();
            assert_eq!(rep.sum, lemma2_oracle(k as i64), "k={k}");
            assert!(rep.bound_ok);
        }
        assert!(lemma2_sum(3).is_err());
    }

    #[test]
    fn jarnik_examples() {
        let sq = ConvexPolygon::from_i64(&[(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap();
        let rep = jarnik_check(&sq).unwrap();
        assert_eq!((rep.n, rep.area.clone()), (4, Rat::one()));
        assert!(rep.ok);
        let tri = ConvexPolygon::from_i64(&[(0, 0), (10, 0), (0, 10)]).unwrap();
        let rep = jarnik_check(&tri).unwrap();
        assert_eq!((rep.n, rep.area.clone()), (66, Rat::from(50)));
        assert!(rep.ok);
        assert!((rep.perimeter.lo.to_f64() - 34.142).abs() < 1e-3);
    }

    #[test]
    fn lemma1_examples() {
        let lat = CenterLattice::new((2, 1), (1, 1)).unwrap();
        let s = Square::new((r("0"), r("0")), r("10")).unwrap();
        let rep = lemma1_count_check(&lat, &s).unwrap();
        assert!(rep.ok);
        assert_eq!(rep.count, 121);
        let small = Square::new((r("1/3"), r("1/7")), r("1/100")).unwrap();
        let lat = CenterLattice::new((200, 301), (150, 101)).unwrap();
        let rep = lemma1_count_check(&lat, &small).unwrap();
        assert!(rep.ok);
        let bad = CenterLattice::new((2, 1), (1, 1)).unwrap();
        let err = lemma1_count_check(&bad, &Square::new((r("0"), r("0")), r("1/2")).unwrap());
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn lower_band_value() {
        let b = lemma3_lower_band(&r("1/100"), &Rat::one()).unwrap();
        // ε/(3ζ(2)) − 37ε²/ζ(2)² at ε = 1/100, ζ(2) = π²/6
        let z = std::f64::consts::PI.powi(2) / 6.0;
        let v = 0.01 / (3.0 * z) - 37.0 * 1e-4 / (z * z);
        assert!(b.lo.to_f64() <= v + 1e-15 && v - 1e-15 <= b.hi.to_f64());
        assert!(b.lo.is_positive());
        // vanishes near ε = ζ(2)/111
        assert!(!lemma3_lower_band(&r("1/60"), &Rat::one()).unwrap().hi.is_positive());
    }

    #[test]
    fn band_report_consistency() {
        let s = Square::centered(r("1/2")).unwrap();
        let eps = r("1/100");
        let est = measure_mbar_2d(8, &eps, &s, Method::ExactFiberIntegration, 0, 0).unwrap();
        let rep = lemma3_lemma4_band(8, &eps, &s, &est).unwrap();
        assert_eq!(rep.upper_band, r("1/80"));
        assert_eq!(&rep.complement + &rep.value, r("1/4"));
        assert_eq!(rep.upper_ok, rep.complement_ok);
        assert!(lemma3_lemma4_band(9, &eps, &s, &est).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn jarnik_on_random_lattice_polygons(pts in prop::collection::vec((-30i64..30, -30i64..30), 3..12)) {
            let hull = crate::geometry::convex_hull(&pts);
            prop_assume!(hull.len() >= 3);
            let poly = ConvexPolygon::from_i64(&hull).unwrap();
            prop_assume!(poly.compare_perimeter(&Rat::one()).unwrap() != Ordering::Less);
            prop_assert!(jarnik_check(&poly).unwrap().ok);
        }

        #[test]
        fn lemma1_on_admissible_configurations(x1 in 3i64..40, x2 in 3i64..40, y1 in 3i64..40, y2 in 3i64..40,
                                               a in 0i64..100, b in 0i64..100, l in 3i64..16) {
            prop_assume!(x1 * y2 != x2 * y1);
            let lat = CenterLattice::new((x1, x2), (y1, y2)).unwrap();
            let s = Square::new((Rat::new(a, 100), Rat::new(b, 100)), Rat::new(l, 8)).unwrap();
            let rep = lemma1_count_check(&lat, &s).unwrap();
            prop_assert!(rep.ok);
        }
    }
}
