//! The linear-form regime `m = 1, n = 2`: strips `A(x₁, x₂, q)`, their
//! intersection parallelograms and center lattices, the sets
//! `M̄ₖ = {(α, β) : ψ_{(α β)}(k) ≤ ε/k²}` and `M̲ₖ = [0,1]² ∖ M̄ₖ`, and checks
//! of the counting and measure estimates.

pub mod area;
pub mod fiber;
pub mod lemmas;
pub mod measure;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::Rat;
use crate::geometry::{ConvexPolygon, HalfPlane, Point};
use crate::psi::{psi_at, MatrixTheta, PsiRecord};

pub use area::{all_directions, union_area};
pub use fiber::{fiber_length, fiber_set_reference};
pub use lemmas::{
    jarnik_check, lemma1_count_check, lemma2_sum, lemma3_lemma4_band, BandReport, JarnikReport, Lemma1Report,
    Lemma2Report,
};
pub use measure::{fiber_measure_mbar, measure_mbar_2d, MeasureEstimate, Method};

/// Strip half-width `ε/k²`.
pub fn strip_eta(eps: &Rat, k: u64) -> Rat {
    eps / &Rat::from(k * k)
}

fn check_k_eps(k: u64, eps: &Rat) -> Result<()> {
    if k < 2 {
        return Err(Error::domain(format!("k = {k} must be at least 2")));
    }
    if !eps.is_positive() {
        return Err(Error::domain(format!("eps = {eps} must be positive")));
    }
    Ok(())
}

/// The family `A(x₁, x₂) = ⋃_q {(α, β) : |x₁α + x₂β − q| ≤ ε/k²}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripFamily {
    pub x1: i64,
    pub x2: i64,
    pub eps: Rat,
    pub k: u64,
}

impl StripFamily {
    pub fn new(x1: i64, x2: i64, eps: Rat, k: u64) -> Result<Self> {
        if x1 == 0 && x2 == 0 {
            return Err(Error::input("strip direction (0, 0)"));
        }
        if !eps.is_positive() || eps >= Rat::one() {
            return Err(Error::domain(format!("eps = {eps} outside (0, 1)")));
        }
        if k < 2 {
            return Err(Error::domain(format!("k = {k} must be at least 2")));
        }
        Ok(StripFamily { x1, x2, eps, k })
    }

    pub fn eta(&self) -> Rat {
        strip_eta(&self.eps, self.k)
    }

    /// Direction with first nonzero coordinate positive; `A(x) = A(−x)`.
    pub fn canonical(&self) -> (i64, i64) {
        if self.x1 < 0 || (self.x1 == 0 && self.x2 < 0) {
            (-self.x1, -self.x2)
        } else {
            (self.x1, self.x2)
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        let v = &p.0 * &Rat::from(self.x1) + &p.1 * &Rat::from(self.x2);
        v.dist_to_int() <= self.eta()
    }

    /// Exact area of `A(x₁, x₂) ∩ [0,1]²`.
    pub fn measure_in_unit_square(&self) -> Result<Rat> {
        let unit = (Rat::zero(), Rat::one());
        union_area(&[self.canonical()], &self.eta(), &unit, &unit)
    }
}

/// Closed axis-parallel square `[a, a + λ] × [b, b + λ]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Square {
    pub corner: (Rat, Rat),
    pub side: Rat,
}

impl Square {
    pub fn new(corner: (Rat, Rat), side: Rat) -> Result<Self> {
        if !side.is_positive() {
            return Err(Error::domain(format!("side = {side} must be positive")));
        }
        Ok(Square { corner, side })
    }

    pub fn unit() -> Self {
        Square {
            corner: (Rat::zero(), Rat::zero()),
            side: Rat::one(),
        }
    }

    /// Square of side `λ` centered at `(1/2, 1/2)`.
    pub fn centered(side: Rat) -> Result<Self> {
        let c = (Rat::one() - &side) * Rat::new(1, 2);
        Square::new((c.clone(), c), side)
    }

    pub fn alpha_window(&self) -> (Rat, Rat) {
        (self.corner.0.clone(), &self.corner.0 + &self.side)
    }

    pub fn beta_window(&self) -> (Rat, Rat) {
        (self.corner.1.clone(), &self.corner.1 + &self.side)
    }

    pub fn area(&self) -> Rat {
        &self.side * &self.side
    }

    pub fn contains(&self, p: &Point) -> bool {
        let (a, b) = (self.alpha_window(), self.beta_window());
        a.0 <= p.0 && p.0 <= a.1 && b.0 <= p.1 && p.1 <= b.1
    }

    pub fn inside_unit(&self) -> bool {
        let (a, b) = (self.alpha_window(), self.beta_window());
        !a.0.is_negative() && !b.0.is_negative() && a.1 <= Rat::one() && b.1 <= Rat::one()
    }

    pub fn polygon(&self) -> ConvexPolygon {
        let (a, b) = (self.alpha_window(), self.beta_window());
        ConvexPolygon::rect(&a.0, &b.0, &a.1, &b.1).expect("positive side")
    }
}

/// Lattice of the centers of `A(x, q₁) ∩ A(y, q₂)`: the points
/// `M⁻¹(q₁, q₂)` with `M = [[x₁, x₂], [y₁, y₂]]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenterLattice {
    pub x: (i64, i64),
    pub y: (i64, i64),
    /// `|det M|`.
    pub delta: u64,
    /// Columns of `M⁻¹`: `(y₂, −y₁)/det` and `(−x₂, x₁)/det`.
    pub basis: [Point; 2],
}

impl CenterLattice {
    pub fn new(x: (i64, i64), y: (i64, i64)) -> Result<Self> {
        let det = x.0 as i128 * y.1 as i128 - x.1 as i128 * y.0 as i128;
        if det == 0 {
            return Err(Error::input(format!("directions {x:?} and {y:?} are parallel")));
        }
        let d = Rat::from(det);
        let basis = [
            (Rat::from(y.1) / &d, Rat::from(-y.0) / &d),
            (Rat::from(-x.1) / &d, Rat::from(x.0) / &d),
        ];
        let delta = u64::try_from(det.unsigned_abs()).map_err(|_| Error::resource("determinant exceeds u64"))?;
        Ok(CenterLattice { x, y, delta, basis })
    }

    /// Center of the parallelogram with indices `(q₁, q₂)`.
    pub fn center(&self, q1: i64, q2: i64) -> Point {
        let (a, b) = (Rat::from(q1), Rat::from(q2));
        (
            &a * &self.basis[0].0 + &b * &self.basis[1].0,
            &a * &self.basis[0].1 + &b * &self.basis[1].1,
        )
    }

    /// Whether `p` is a lattice point.
    pub fn is_node(&self, p: &Point) -> bool {
        let q1 = &p.0 * &Rat::from(self.x.0) + &p.1 * &Rat::from(self.x.1);
        let q2 = &p.0 * &Rat::from(self.y.0) + &p.1 * &Rat::from(self.y.1);
        q1.is_integer() && q2.is_integer()
    }

    /// Image of the square under `M`; lattice points in the square are the
    /// integer points of this parallelogram.
    pub fn image_of_square(&self, s: &Square) -> ConvexPolygon {
        let (a, b) = (s.alpha_window(), s.beta_window());
        let m = |p: (&Rat, &Rat)| -> Point {
            (
                p.0 * &Rat::from(self.x.0) + p.1 * &Rat::from(self.x.1),
                p.0 * &Rat::from(self.y.0) + p.1 * &Rat::from(self.y.1),
            )
        };
        ConvexPolygon::new(vec![m((&a.0, &b.0)), m((&a.1, &b.0)), m((&a.1, &b.1)), m((&a.0, &b.1))])
            .expect("nonsingular image of a square")
    }

    /// Number of lattice points in the closed square.
    pub fn count_in_square(&self, s: &Square) -> Result<u64> {
        self.image_of_square(s).lattice_point_count()
    }
}

/// `A(x, q₁) ∩ A(y, q₂)`, computed by clipping a bounding box with the four
/// strip half-planes.
pub fn parallelogram(x: (i64, i64), y: (i64, i64), q1: i64, q2: i64, eta: &Rat) -> Result<ConvexPolygon> {
    let lat = CenterLattice::new(x, y)?;
    if !eta.is_positive() {
        return Err(Error::domain("strip half-width must be positive"));
    }
    let c = lat.center(q1, q2);
    let spread = Rat::from(x.0.abs() + x.1.abs() + y.0.abs() + y.1.abs()) * eta + Rat::one();
    let mut poly = ConvexPolygon::rect(
        &(&c.0 - &spread),
        &(&c.1 - &spread),
        &(&c.0 + &spread),
        &(&c.1 + &spread),
    )?;
    for (v, q) in [(x, q1), (y, q2)] {
        let (a, b) = (Rat::from(v.0), Rat::from(v.1));
        for (s, bound) in [(1, Rat::from(q) + eta), (-1, -(Rat::from(q) - eta))] {
            let h = HalfPlane::new(&a * &Rat::from(s), &b * &Rat::from(s), bound);
            poly = poly.clip(&h).ok_or_else(|| Error::input("degenerate parallelogram"))?;
        }
    }
    Ok(poly)
}

/// Primitive-pair sets used by the counting estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairVariant {
    /// `gcd(x₁, x₂) = 1`, `k/2 ≤ x₁, x₂ ≤ k`.
    E,
    /// `1 ≤ x₁ ≤ k`, `1 ≤ |x₂| ≤ k`.
    EStar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitivePairSet {
    pub k: u64,
    pub variant: PairVariant,
    pub pairs: Vec<(i64, i64)>,
}

impl PrimitivePairSet {
    pub fn e_k(k: u64) -> Self {
        let k = k as i64;
        let lo = (k + 1) / 2;
        let pairs = (lo..=k)
            .flat_map(|a| (lo..=k).map(move |b| (a, b)))
            .filter(|&(a, b)| a.gcd(&b) == 1)
            .collect();
        PrimitivePairSet {
            k: k as u64,
            variant: PairVariant::E,
            pairs,
        }
    }

    pub fn e_star_k(k: u64) -> Self {
        let k = k as i64;
        let pairs = (1..=k)
            .flat_map(|a| (-k..=k).filter(|&b| b != 0).map(move |b| (a, b)))
            .collect();
        PrimitivePairSet {
            k: k as u64,
            variant: PairVariant::EStar,
            pairs,
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Membership of `(α, β)` in `M̄ₖ` together with `ψ_{(α β)}(k)` and its witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Membership {
    pub member: bool,
    pub threshold: Rat,
    pub psi: PsiRecord,
}

/// `ψ_{(α β)}(k) ≤ ε/k²`, decided exactly.
pub fn membership_mbar_2d(alpha: &Rat, beta: &Rat, k: u64, eps: &Rat) -> Result<Membership> {
    check_k_eps(k, eps)?;
    let theta = MatrixTheta::linear_form(alpha.clone(), beta.clone())?;
    let psi = psi_at(&theta, k)?;
    let threshold = strip_eta(eps, k);
    Ok(Membership {
        member: psi.value <= threshold,
        threshold,
        psi,
    })
}

/// `⌊η · 2⁶⁴⌋`, capped at `2⁶³`: the largest residue distance allowed for
/// points on the `2⁻⁶⁴` grid.
pub fn threshold_u64(eta: &Rat) -> u64 {
    let t = (eta * &Rat::from(1u128 << 64)).floor();
    let cap = num_bigint::BigInt::from(1u64 << 63);
    u64::try_from(t.min(cap)).expect("capped")
}

/// Membership of `(a/2⁶⁴, b/2⁶⁴)` in `M̄ₖ`: some `1 ≤ max|xᵢ| ≤ k` has
/// `‖(x₁a + x₂b)/2⁶⁴‖ ≤ tau/2⁶⁴`.
pub fn hit_u64(a: u64, b: u64, k: u64, tau: u64) -> bool {
    let near = |r: u64| r.min(r.wrapping_neg()) <= tau;
    let mut r = 0u64;
    for _ in 0..k {
        r = r.wrapping_add(b);
        if near(r) {
            return true;
        }
    }
    let kb = b.wrapping_mul(k);
    let mut row = 0u64;
    for _ in 0..k {
        row = row.wrapping_add(a);
        let mut r = row.wrapping_sub(kb);
        for _ in 0..=2 * k {
            if near(r) {
                return true;
            }
            r = r.wrapping_add(b);
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psi::psi_naive;
    use proptest::prelude::*;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    #[test]
    fn membership_examples() {
        let m = membership_mbar_2d(&r("1/3"), &r("1/3"), 2, &r("1/1000")).unwrap();
        assert!(m.member);
        assert_eq!(m.psi.value, Rat::zero());
        let m = membership_mbar_2d(&r("1/3"), &r("1/4"), 2, &r("0.2")).unwrap();
        assert!(!m.member);
        assert_eq!(m.psi.value, r("1/12"));
        assert!(membership_mbar_2d(&r("1/3"), &r("1/4"), 1, &r("0.2")).is_err());
    }

    #[test]
    fn strip_family_measure_is_two_eta() {
        for (x1, x2) in [(1, 0), (0, 1), (1, 1), (3, -2), (-2, 5), (7, 4)] {
            let f = StripFamily::new(x1, x2, r("1/10"), 4).unwrap();
            assert_eq!(f.measure_in_unit_square().unwrap(), Rat::from(2) * f.eta(), "{x1},{x2}");
        }
    }

    #[test]
    fn pair_sets_match_brute_force() {
        let e4 = PrimitivePairSet::e_k(4);
        assert_eq!(e4.pairs, vec![(2, 3), (3, 2), (3, 4), (4, 3)]);
        for k in 2..20u64 {
            let brute = (1..=k as i64)
                .flat_map(|a| (1..=k as i64).map(move |b| (a, b)))
                .filter(|&(a, b)| 2 * a >= k as i64 && 2 * b >= k as i64 && a.gcd(&b) == 1)
                .count();
            assert_eq!(PrimitivePairSet::e_k(k).len(), brute);
            assert_eq!(PrimitivePairSet::e_star_k(k).len(), (2 * k * k) as usize);
        }
    }

    #[test]
    fn lattice_counts_by_brute_force() {
        let lat = CenterLattice::new((2, 1), (1, 1)).unwrap();
        let s = Square::new((r("0"), r("0")), r("10")).unwrap();
        let brute = (-40..=40i64)
            .flat_map(|a| (-40..=40i64).map(move |b| (a, b)))
            .filter(|&(q1, q2)| s.contains(&lat.center(q1, q2)))
            .count() as u64;
        assert_eq!(lat.count_in_square(&s).unwrap(), brute);
        assert_eq!(brute, 121);
    }

    #[test]
    fn u64_hits_match_exact_membership() {
        let eps = r("1/10");
        for (a, b) in [
            (0u64, 0u64),
            (1 << 63, 1 << 62),
            (0x5555_5555_5555_5555, 0x1234_5678_9abc_def0),
        ] {
            for k in [2u64, 3, 8] {
                let (al, be) = (Rat::dyadic(a, 64), Rat::dyadic(b, 64));
                let exact = membership_mbar_2d(&al, &be, k, &eps).unwrap().member;
                assert_eq!(hit_u64(a, b, k, threshold_u64(&strip_eta(&eps, k))), exact);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn membership_is_union_of_strips(a in any::<u64>(), b in any::<u64>(), k in 2u64..6, e in 1i64..100) {
            let (al, be) = (Rat::dyadic(a, 64), Rat::dyadic(b, 64));
            let eps = Rat::new(e, 100);
            let m = membership_mbar_2d(&al, &be, k, &eps).unwrap();
            let union = all_directions(k).into_iter().any(|(x1, x2)| {
                StripFamily::new(x1, x2, eps.clone(), k).unwrap().contains(&(al.clone(), be.clone()))
            });
            prop_assert_eq!(m.member, union);
            prop_assert_eq!(hit_u64(a, b, k, threshold_u64(&m.threshold)), union);
            let naive = psi_naive(&MatrixTheta::linear_form(al, be).unwrap(), k).unwrap();
            prop_assert_eq!(m.psi.value, naive.value);
        }

        #[test]
        fn dirichlet_oracle(a in any::<u64>(), b in any::<u64>(), k in 2u64..12) {
            let (al, be) = (Rat::dyadic(a, 64), Rat::dyadic(b, 64));
            let m = membership_mbar_2d(&al, &be, k, &Rat::one()).unwrap();
            prop_assert!(m.member);
            prop_assert!(m.psi.value <= Rat::new(1, k * k + 2 * k));
        }

        #[test]
        fn parallelogram_area_center_and_diameter(x1 in -9i64..10, x2 in -9i64..10, y1 in -9i64..10,
                                                  y2 in -9i64..10, q1 in -20i64..20, q2 in -20i64..20,
                                                  e in 1i64..50, k in 9u64..30) {
            let det = x1 * y2 - x2 * y1;
            prop_assume!(det != 0);
            let eps = Rat::new(e, 100);
            let eta = strip_eta(&eps, k);
            let p = parallelogram((x1, x2), (y1, y2), q1, q2, &eta).unwrap();
            let delta = Rat::from(det.abs());
            prop_assert_eq!(p.area(), Rat::from(4) * &eta * &eta / &delta);
            let lat = CenterLattice::new((x1, x2), (y1, y2)).unwrap();
            let c = p.centroid();
            prop_assert!(lat.is_node(&c));
            prop_assert_eq!(&c, &lat.center(q1, q2));
            // entries are at most k: diam² ≤ 32ε²/(k²Δ²), within (4ε/k)² once Δ ≥ 2
            let bound = Rat::from(32) * &eps * &eps / (Rat::from(k * k) * &delta * &delta);
            prop_assert!(p.diameter_sq() <= bound);
            if det.abs() >= 2 {
                prop_assert!(p.diameter_sq() <= Rat::from(16) * &eps * &eps / Rat::from(k * k));
            }
        }
    }
}
