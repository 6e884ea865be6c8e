//! Classification of the pairs `Tr_k = {⌈k/2⌉ ≤ q₁ < q₂ ≤ k}` into the
//! high-gcd set `J₀`, the high-count set `J₁` and the sector union `V`.
//!
//! All angle tests use integer cross products and squared lengths.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::check_params;
use super::dregion::{d_region_count, d_region_points, floor_root, RectC, StripD};
use crate::error::{Error, Result};
use crate::exactnum::Rat;
use crate::mc;

/// Largest `|Tr_k|` enumerated in full mode.
pub const FULL_PAIR_BUDGET: u64 = 4_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassifyMode {
    Full,
    Sampled { n: u64, seed: u64 },
}

/// One pair of `Tr_k` with its flags. For pairs of `J₁` the points of
/// `D ∩ C₀` are checked for collinearity, and their step `γ = |g|` along the
/// primitive direction `g` against `γ ≤ k^{1/m}/(4ε)` and
/// `sin ω ≤ 1/(2kλγ)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub q1: u64,
    pub q2: u64,
    pub d: u64,
    pub count0: u64,
    pub in_j0: bool,
    pub in_j1: bool,
    pub in_v: bool,
    pub collinear: Option<bool>,
    pub direction: Option<(i64, i64)>,
    /// `γ²`.
    pub step_sq: Option<u64>,
    pub step_ok: Option<bool>,
    pub sine_ok: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Violation {
    /// A pair of `J₀` outside `J₁`.
    J0NotInJ1,
    /// A pair of `J₁` outside `V`.
    J1NotInV,
    /// The points of `D ∩ C₀` of a `J₁` pair are not collinear.
    NotCollinear,
    /// `γ > k^{1/m}/(4ε)`.
    StepTooLong,
    /// `sin ω > 1/(2kλγ)`.
    SineTooLarge,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairClassification {
    pub k: u64,
    pub m: usize,
    pub eps: Rat,
    pub lam: Rat,
    pub delta: Rat,
    pub mode: ClassifyMode,
    /// `N₀ = 8(1+δ)ελk^{1−1/m} + 6`, to 12 significant digits.
    pub n0_approx: f64,
    /// `d₀ = 9εk^{1−1/m}`, to 12 significant digits.
    pub d0_approx: f64,
    /// `(1+δ)ελk^{1−1/m} > 6`.
    pub regime_ok: bool,
    /// `|Tr_k|`.
    pub tr_size: u64,
    pub pairs_checked: u64,
    pub pr_size: u64,
    pub j0: u64,
    pub j1: u64,
    pub v: u64,
    pub violations: Vec<(u64, u64, Violation)>,
    /// Records of every pair in `J₀ ∪ J₁`.
    pub records: Vec<PairRecord>,
    /// `2k^{1+3/(2m)}/(λε²)`, to 12 significant digits.
    pub lemma13_bound_approx: f64,
    pub lemma13_j1_ok: bool,
    pub lemma13_v_ok: bool,
    /// The bound is at least `|Tr_k|`.
    pub lemma13_trivial: bool,
    /// `#J₁ / bound`.
    pub lemma13_ratio: f64,
}

impl PairClassification {
    pub fn ok(&self) -> bool {
        self.violations.is_empty() && self.lemma13_j1_ok && self.lemma13_v_ok
    }
}

/// Shared parameters in exact form.
struct Params {
    k: u64,
    m: usize,
    eps: Rat,
    lam: Rat,
    delta: Rat,
    /// `k^{m−1}`.
    km1: Rat,
    /// `(8(1+δ)ελ)^m k^{m−1}`, the `m`-th power of `N₀ − 6`.
    n0m6_pow: Rat,
    /// `9^m ε^m k^{m−1}`, the `m`-th power of `d₀`.
    d0_pow: Rat,
    /// Largest coordinate of `Pr_k`: `⌊k^{1/m}/(4ε)⌋`.
    pr_bound: u64,
    pr: Vec<(u64, u64)>,
    /// `k²λ²` as a reduced fraction `num/den`.
    kl2: (BigInt, BigInt),
    kl2_i128: Option<(i128, i128)>,
}

impl Params {
    fn new(k: u64, m: usize, eps: &Rat, lam: &Rat, delta: &Rat) -> Result<Self> {
        check_params(m, k, eps)?;
        if !eps.is_positive() || !lam.is_positive() || delta.is_negative() {
            return Err(Error::domain("eps and lam must be positive, delta non-negative"));
        }
        let mi = m as i32;
        let km1 = Rat::from_int(BigInt::from(k).pow(m as u32 - 1));
        let n0m6_pow = (Rat::from(8) * (Rat::one() + delta) * eps * lam).pow(mi) * &km1;
        let d0_pow = (Rat::from(9) * eps).pow(mi) * &km1;
        // p ≤ k^{1/m}/(4ε) ⇔ (4εp)^m ≤ k
        let pr_bound = floor_root(&(Rat::from(k) / (Rat::from(4) * eps).pow(mi)), m);
        let mut pr = Vec::new();
        for p1 in 1..=pr_bound {
            for p2 in p1..=(2 * p1).min(pr_bound) {
                if p1.gcd(&p2) == 1 {
                    pr.push((p1, p2));
                }
            }
        }
        let kl = lam * &Rat::from(k);
        let kl2 = kl.pow(2);
        Ok(Params {
            k,
            m,
            eps: eps.clone(),
            lam: lam.clone(),
            delta: delta.clone(),
            km1,
            n0m6_pow,
            d0_pow,
            pr_bound,
            pr,
            kl2_i128: kl2.numer().to_i128().zip(kl2.denom().to_i128()),
            kl2: (kl2.numer().clone(), kl2.denom().clone()),
        })
    }

    fn in_j0(&self, d: u64) -> bool {
        Rat::from(d).pow(self.m as i32) > self.d0_pow
    }

    /// `count ≥ N₀/2 ⇔ 2·count − 6 ≥ 0 ∧ (2·count − 6)^m ≥ (N₀ − 6)^m`.
    fn in_j1(&self, count: u64) -> bool {
        let t = 2 * count as i64 - 6;
        t >= 0 && Rat::from(t).pow(self.m as i32) >= self.n0m6_pow
    }

    /// `u` lies in the sector of angle `φ`, `sin φ = 1/(kλ|g|)`, bisected by `g`:
    /// with `r = sin²∠(u, g)` and `s = sin φ`, `1 − 2r ≥ √(1 − s²)`.
    fn in_sector(&self, u: (u64, u64), g: (u64, u64)) -> bool {
        let (u1, u2, g1, g2) = (u.0 as i128, u.1 as i128, g.0 as i128, g.1 as i128);
        let cross = u1 * g2 - u2 * g1;
        let gg = g1 * g1 + g2 * g2;
        let big_u = (u1 * u1 + u2 * u2) * gg;
        // 1 − 2r = (U − 2c²)/U, 1 − s² = (k²λ²γ² − 1)/(k²λ²γ²)
        let a = big_u - 2 * cross * cross;
        if a < 0 {
            return false;
        }
        // (U − 2c²)²·k²λ²γ² ≥ U²·(k²λ²γ² − 1), with k²λ² = N/D:
        // a²·N·γ² ≥ U²·(N·γ² − D)
        if let Some(ok) = self.sector_i128(a, big_u, gg) {
            return ok;
        }
        let (n, d) = (&self.kl2.0, &self.kl2.1);
        let a = BigInt::from(a);
        let uu = BigInt::from(big_u);
        let ng = n * BigInt::from(gg);
        &a * &a * &ng >= &uu * &uu * (&ng - d)
    }

    /// The final comparison of [`Params::in_sector`] in `i128`, if nothing overflows.
    fn sector_i128(&self, a: i128, big_u: i128, gg: i128) -> Option<bool> {
        let (n, d) = self.kl2_i128?;
        let ng = n.checked_mul(gg)?;
        let lhs = a.checked_mul(a)?.checked_mul(ng)?;
        let rhs = big_u.checked_mul(big_u)?.checked_mul(ng - d)?;
        Some(lhs >= rhs)
    }

    /// `V` membership, testing the sectors whose direction can be close enough.
    fn in_v(&self, q1: u64, q2: u64) -> bool {
        // when kλ > 3 the sector around (p₁, p₂) only contains u with
        // |p₂ − p₁q₂/q₁| < 1
        if self.lam.clone() * Rat::from(self.k) > Rat::from(3) {
            for p1 in 1..=self.pr_bound {
                let lo = p1 * q2 / q1;
                for p2 in [lo, lo + 1] {
                    if p2 >= p1
                        && p2 <= 2 * p1
                        && p2 <= self.pr_bound
                        && p1.gcd(&p2) == 1
                        && self.in_sector((q1, q2), (p1, p2))
                    {
                        return true;
                    }
                }
            }
            false
        } else {
            self.pr.iter().any(|&g| self.in_sector((q1, q2), g))
        }
    }

    fn classify(&self, q1: u64, q2: u64) -> Result<(PairRecord, Vec<Violation>)> {
        let strip = StripD::new(q1, q2, self.eps.clone(), self.k, self.m)?;
        let c0 = RectC::c0(q1, q2, &self.lam, &self.delta);
        let count0 = d_region_count(&strip, &c0)?;
        let in_j0 = self.in_j0(strip.d);
        let in_j1 = self.in_j1(count0);
        let in_v = self.in_v(q1, q2);
        let mut rec = PairRecord {
            q1,
            q2,
            d: strip.d,
            count0,
            in_j0,
            in_j1,
            in_v,
            collinear: None,
            direction: None,
            step_sq: None,
            step_ok: None,
            sine_ok: None,
        };
        let mut viol = Vec::new();
        if in_j0 && !in_j1 {
            viol.push(Violation::J0NotInJ1);
        }
        if in_j1 {
            if !in_v {
                viol.push(Violation::J1NotInV);
            }
            let pts = d_region_points(&strip, &c0)?;
            let line = collinear_direction(&pts);
            rec.collinear = Some(line.is_some());
            match line {
                None => viol.push(Violation::NotCollinear),
                Some(g) => {
                    let gg = (g.0 as i128 * g.0 as i128 + g.1 as i128 * g.1 as i128) as u64;
                    rec.direction = Some(g);
                    rec.step_sq = Some(gg);
                    // γ ≤ k^{1/m}/(4ε) ⇔ ((4ε)²γ²)^m ≤ k²
                    let step_ok = ((Rat::from(4) * &self.eps).pow(2) * Rat::from(gg)).pow(self.m as i32)
                        <= Rat::from(self.k).pow(2);
                    // sin ω ≤ 1/(2kλγ) ⇔ 4k²λ²·cross(g, u)² ≤ |u|²
                    let cross = g.0 as i128 * q2 as i128 - g.1 as i128 * q1 as i128;
                    let uu = Rat::from_int(BigInt::from(q1 as i128 * q1 as i128 + q2 as i128 * q2 as i128));
                    let kl2 = Rat::new(self.kl2.0.clone(), self.kl2.1.clone());
                    let sine_ok = Rat::from(4) * kl2 * Rat::from_int(BigInt::from(cross * cross)) <= uu;
                    rec.step_ok = Some(step_ok);
                    rec.sine_ok = Some(sine_ok);
                    if !step_ok {
                        viol.push(Violation::StepTooLong);
                    }
                    if !sine_ok {
                        viol.push(Violation::SineTooLarge);
                    }
                }
            }
        }
        Ok((rec, viol))
    }
}

/// The primitive direction of a line through all points, or `None` when the
/// points are not collinear. Fewer than two points lie on the direction `(1, 0)`.
fn collinear_direction(pts: &[(i64, i64)]) -> Option<(i64, i64)> {
    let p0 = *pts.first()?;
    let far = pts.iter().copied().find(|&p| p != p0);
    let Some(p1) = far else {
        return Some((1, 0));
    };
    let (dx, dy) = (p1.0 - p0.0, p1.1 - p0.1);
    for &p in pts {
        if dx as i128 * (p.1 - p0.1) as i128 - dy as i128 * (p.0 - p0.0) as i128 != 0 {
            return None;
        }
    }
    let g = dx.gcd(&dy);
    let (mut a, mut b) = (dx / g, dy / g);
    if a < 0 || (a == 0 && b < 0) {
        a = -a;
        b = -b;
    }
    Some((a, b))
}

/// `|Tr_k|`.
pub fn tr_size(k: u64) -> u64 {
    let lo = k.div_ceil(2);
    let n = k - lo + 1;
    n * (n - 1) / 2
}

/// Pair `i` of `Tr_k` in row-major order.
fn tr_pair(k: u64, mut i: u64) -> (u64, u64) {
    let mut q1 = k.div_ceil(2);
    loop {
        let row = k - q1;
        if i < row {
            return (q1, q1 + 1 + i);
        }
        i -= row;
        q1 += 1;
    }
}

/// Classifies all pairs of `Tr_k`, or `n` uniformly drawn ones, and checks
/// `J₀ ⊆ J₁ ⊆ V ∩ Tr_k`, the collinearity, step and sine statements for
/// `J₁`, and `#J₁, #(V ∩ Tr_k) ≤ 2k^{1+3/(2m)}/(λε²)`.
pub fn classify_pairs(
    k: u64,
    m: usize,
    eps: &Rat,
    lam: &Rat,
    delta: &Rat,
    mode: ClassifyMode,
) -> Result<PairClassification> {
    let p = Params::new(k, m, eps, lam, delta)?;
    let total = tr_size(k);
    if total == 0 {
        return Err(Error::domain(format!("Tr_k is empty for k = {k}")));
    }
    let pairs: Vec<(u64, u64)> = match mode {
        ClassifyMode::Full => {
            if total > FULL_PAIR_BUDGET {
                return Err(Error::resource(format!(
                    "|Tr_k| = {total} exceeds the full-enumeration budget {FULL_PAIR_BUDGET}; use sampled mode"
                )));
            }
            let mut v = Vec::with_capacity(total as usize);
            for q1 in k.div_ceil(2)..=k {
                for q2 in q1 + 1..=k {
                    v.push((q1, q2));
                }
            }
            v
        }
        ClassifyMode::Sampled { n, seed } => {
            if n == 0 {
                return Err(Error::input("sampled mode needs n >= 1"));
            }
            let seed = mc::derive_seed(seed, "classify-pairs");
            mc::map_chunks(n, |c, _, len| {
                let mut rng = mc::stream(seed, c);
                (0..len)
                    .map(|_| tr_pair(k, rng.random_range(0..total)))
                    .collect::<Vec<_>>()
            })
            .into_iter()
            .flatten()
            .collect()
        }
    };
    let n = pairs.len() as u64;
    let chunks = mc::map_chunks(n, |_, start, len| -> Result<_> {
        let mut out = Vec::new();
        for &(q1, q2) in &pairs[start as usize..(start + len) as usize] {
            out.push(p.classify(q1, q2)?);
        }
        Ok(out)
    });
    let (mut j0, mut j1, mut v) = (0u64, 0u64, 0u64);
    let mut violations = Vec::new();
    let mut records = Vec::new();
    for ch in chunks {
        for (rec, viol) in ch? {
            j0 += rec.in_j0 as u64;
            j1 += rec.in_j1 as u64;
            v += rec.in_v as u64;
            violations.extend(viol.into_iter().map(|x| (rec.q1, rec.q2, x)));
            if rec.in_j0 || rec.in_j1 {
                records.push(rec);
            }
        }
    }
    // (c·λε²/2)^{2m} ≤ k^{2m+3}
    let lemma13_ok = |c: u64| {
        (Rat::from(c) * lam * eps.pow(2) / Rat::from(2)).pow(2 * m as i32)
            <= Rat::from_int(BigInt::from(k).pow(2 * m as u32 + 3))
    };
    let kf = k as f64;
    let bound = 2.0 * kf.powf(1.0 + 1.5 / m as f64) / (lam.to_f64() * eps.to_f64().powi(2));
    let root = kf.powf(1.0 - 1.0 / m as f64);
    let regime = ((Rat::one() + delta) * eps * lam).pow(m as i32) * &p.km1 > Rat::from(6).pow(m as i32);
    Ok(PairClassification {
        k,
        m,
        eps: eps.clone(),
        lam: lam.clone(),
        delta: delta.clone(),
        mode,
        n0_approx: 8.0 * (1.0 + delta.to_f64()) * eps.to_f64() * lam.to_f64() * root + 6.0,
        d0_approx: 9.0 * eps.to_f64() * root,
        regime_ok: regime,
        tr_size: total,
        pairs_checked: n,
        pr_size: p.pr.len() as u64,
        j0,
        j1,
        v,
        violations,
        records,
        lemma13_bound_approx: bound,
        lemma13_j1_ok: lemma13_ok(j1),
        lemma13_v_ok: lemma13_ok(v),
        lemma13_trivial: lemma13_ok(total),
        lemma13_ratio: j1 as f64 / bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    /// Sector test in floating point, far from the boundary.
    fn sector_f64(u: (u64, u64), g: (u64, u64), kl: f64) -> Option<bool> {
        let (u1, u2, g1, g2) = (u.0 as f64, u.1 as f64, g.0 as f64, g.1 as f64);
        let theta = (u2.atan2(u1) - g2.atan2(g1)).abs();
        let half = (1.0 / (kl * (g1 * g1 + g2 * g2).sqrt())).asin() / 2.0;
        ((theta - half).abs() > 1e-9).then_some(theta <= half)
    }

    #[test]
    fn tr_indexing() {
        for k in [4u64, 5, 17, 30] {
            let all: Vec<_> = (0..tr_size(k)).map(|i| tr_pair(k, i)).collect();
            let mut expect = vec![];
            for q1 in k.div_ceil(2)..=k {
                for q2 in q1 + 1..=k {
                    expect.push((q1, q2));
                }
            }
            assert_eq!(all, expect);
        }
    }

    #[test]
    fn collinearity() {
        assert_eq!(collinear_direction(&[(0, 0), (2, 4), (1, 2), (3, 6)]), Some((1, 2)));
        assert_eq!(collinear_direction(&[(0, 0), (2, 4), (1, 3)]), None);
        assert_eq!(collinear_direction(&[(5, 5)]), Some((1, 0)));
    }

    #[test]
    fn sector_pruning_matches_full_scan() {
        let p = Params::new(300, 2, &r("1/5"), &r("1/2"), &r("1/10")).unwrap();
        for q1 in 150..=300u64 {
            for q2 in (q1 + 1..=300).step_by(7) {
                let full = p.pr.iter().any(|&g| p.in_sector((q1, q2), g));
                assert_eq!(p.in_v(q1, q2), full, "({q1}, {q2})");
            }
        }
    }

    #[test]
    fn below_regime_only_first_inclusion_breaks() {
        // (1+δ)ελ√k ≈ 3.1 < 6 at k = 200
        let c = classify_pairs(200, 2, &r("1/5"), &Rat::one(), &r("1/10"), ClassifyMode::Full).unwrap();
        assert!(!c.regime_ok);
        assert_eq!(c.pairs_checked, tr_size(200));
        assert!(c.lemma13_trivial);
        assert!(c.violations.iter().all(|v| v.2 == Violation::J0NotInJ1));
        assert!(c
            .records
            .iter()
            .filter(|r| r.in_j1)
            .all(|r| r.collinear == Some(true) && r.in_v));
    }

    #[test]
    fn inclusions_hold_in_regime() {
        let c = classify_pairs(
            1000,
            2,
            &r("1/5"),
            &Rat::one(),
            &r("1/10"),
            ClassifyMode::Sampled { n: 20_000, seed: 1 },
        )
        .unwrap();
        assert!(c.regime_ok);
        assert!(c.ok(), "{:?}", &c.violations[..c.violations.len().min(5)]);
        assert!(c.j0 <= c.j1 && c.j1 <= c.v && c.j1 > 0);
    }

    #[test]
    fn sampled_is_deterministic() {
        let run = || {
            classify_pairs(
                400,
                2,
                &r("1/5"),
                &Rat::one(),
                &r("1/10"),
                ClassifyMode::Sampled { n: 3000, seed: 9 },
            )
            .unwrap()
        };
        assert_eq!(
            mc::with_threads(Some(1), run).unwrap(),
            mc::with_threads(Some(2), run).unwrap()
        );
    }

    #[test]
    fn budget() {
        let e = classify_pairs(10_000, 2, &r("1/5"), &Rat::one(), &r("1/10"), ClassifyMode::Full);
        assert!(matches!(e, Err(Error::Resource(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]
        #[test]
        fn sector_matches_trig(u1 in 1u64..2000, u2 in 1u64..2000, g1 in 1u64..40, g2 in 1u64..40, kl in 2u64..500) {
            let p = Params::new(kl, 2, &r("1/5"), &Rat::one(), &r("1/10")).unwrap();
            if let Some(expect) = sector_f64((u1, u2), (g1, g2), kl as f64) {
                prop_assert_eq!(p.in_sector((u1, u2), (g1, g2)), expect);
            }
        }

        #[test]
        fn j1_threshold(c in 0u64..200, k in 100u64..5000) {
            let p = Params::new(k, 2, &r("1/5"), &Rat::one(), &r("1/10")).unwrap();
            let n0 = 8.0 * 1.1 * 0.2 * (k as f64).sqrt() + 6.0;
            let gap = (c as f64 - n0 / 2.0).abs();
            prop_assume!(gap > 1e-9);
            prop_assert_eq!(p.in_j1(c), c as f64 >= n0 / 2.0);
        }
    }
}
