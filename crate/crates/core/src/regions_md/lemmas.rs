//! Measure bands, gcd sums, the totient series and the Pick bound of the
//! simultaneous regime.

use num_bigint::BigInt;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::{check_params, ClusterMeasure, Cube, CubeCluster, MdEstimate};
use crate::error::{Error, Result};
use crate::exactnum::certified::Bracket;
use crate::exactnum::{zeta, Rat};
use crate::geometry::{convex_hull, has_noncollinear_triple, ConvexPolygon};

/// Largest `P` accepted by [`totient_series_check`].
pub const TOTIENT_MAX: u64 = 1_000_000;

/// Fractional bits of the partial sums in [`totient_series_check`].
pub const TOTIENT_BITS: u32 = 64;

/// `μ(S ∩ M̄ₖ)` against the lower band `(2λε)^m/6 − (68λε²)^m/4` and the
/// upper band `2(4λε)^m`, the latter equivalent to
/// `μ(S ∖ M̄ₖ) ≥ λ^m − 2(4λε)^m`. Both tests widen the estimate by its
/// confidence half-width.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandsMd {
    pub k: u64,
    pub m: usize,
    pub eps: Rat,
    pub lam: Rat,
    pub value: Rat,
    pub ci_halfwidth: Rat,
    pub lower_band: Rat,
    pub upper_band: Rat,
    pub vacuous_lower: bool,
    /// `value − lower_band`.
    pub lower_margin: Rat,
    /// `upper_band − value`.
    pub upper_margin: Rat,
    pub lower_ok: bool,
    pub upper_ok: bool,
    /// `λ^m − value`.
    pub complement: Rat,
    /// `λ^m − 2(4λε)^m`.
    pub complement_bound: Rat,
    pub complement_ok: bool,
}

impl BandsMd {
    pub fn ok(&self) -> bool {
        self.lower_ok && self.upper_ok && self.complement_ok
    }
}

/// `(2λε)^m/6 − (68λε²)^m/4`.
pub fn lemma14_lower_band(eps: &Rat, lam: &Rat, m: usize) -> Rat {
    let m = m as i32;
    (Rat::from(2) * lam * eps).pow(m) / Rat::from(6) - (Rat::from(68) * lam * eps * eps).pow(m) / Rat::from(4)
}

/// `2(4λε)^m`.
pub fn lemma5_upper_band(eps: &Rat, lam: &Rat, m: usize) -> Rat {
    Rat::from(2) * (Rat::from(4) * lam * eps).pow(m as i32)
}

pub fn lemma5_lemma14_check(k: u64, eps: &Rat, m: usize, cube: &Cube, estimate: &MdEstimate) -> Result<BandsMd> {
    check_params(m, k, eps)?;
    if estimate.k != k || estimate.eps != *eps || estimate.m != m || estimate.cube != *cube {
        return Err(Error::input("estimate was produced for different (k, eps, m, S)"));
    }
    let lam = cube.side.clone();
    let lower_band = lemma14_lower_band(eps, &lam, m);
    let upper_band = lemma5_upper_band(eps, &lam, m);
    let value = estimate.value.clone();
    let ci = estimate.ci_halfwidth.clone();
    let vol = cube.volume();
    let complement = &vol - &value;
    let complement_bound = &vol - &upper_band;
    Ok(BandsMd {
        k,
        m,
        eps: eps.clone(),
        vacuous_lower: !lower_band.is_positive(),
        lower_margin: &value - &lower_band,
        upper_margin: &upper_band - &value,
        lower_ok: &value + &ci >= lower_band,
        upper_ok: &value - &ci <= upper_band,
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

/// `Σ gcd(q₁, q₂)^m / q₂^m` over `Tr_k` against `2k/5`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma6Report {
    pub k: u64,
    pub m: usize,
    pub sum: Rat,
    pub bound: Rat,
    pub ok: bool,
}

pub fn lemma6_sum(k: u64, m: usize) -> Result<Lemma6Report> {
    check_params(m, k, &Rat::zero())?;
    if k < 4 {
        return Err(Error::domain(format!("k = {k} must be at least 4")));
    }
    let mut sum = Rat::zero();
    for q2 in k.div_ceil(2) + 1..=k {
        let mut row = BigInt::from(0u8);
        for q1 in k.div_ceil(2)..q2 {
            row += BigInt::from(q1.gcd(&q2)).pow(m as u32);
        }
        sum += Rat::new(row, BigInt::from(q2).pow(m as u32));
    }
    let bound = Rat::new(2 * k, 5u64);
    Ok(Lemma6Report {
        k,
        m,
        ok: sum <= bound,
        sum,
        bound,
    })
}

/// `Σ_{p ≤ P} φ(p)/p^m` against `ζ(m−1)/ζ(m)`, allowing the tail
/// `Σ_{p > P} p^{1−m} ≤ P^{2−m}/(m−2)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TotientReport {
    pub m: usize,
    pub p_max: u64,
    /// The partial sum, enclosed on the `2^-64` grid.
    pub partial: Bracket,
    pub target: Bracket,
    pub tail: Rat,
    /// `target − partial`, enclosed.
    pub gap: Bracket,
    pub ok: bool,
}

/// Euler's totient of `0..=n`.
pub fn totients(n: usize) -> Vec<u32> {
    let mut phi: Vec<u32> = (0..=n as u32).collect();
    for p in 2..=n {
        if phi[p] == p as u32 {
            for j in (p..=n).step_by(p) {
                phi[j] -= phi[j] / p as u32;
            }
        }
    }
    phi
}

pub fn totient_series_check(m: usize, p_max: u64) -> Result<TotientReport> {
    if m < 3 {
        return Err(Error::domain(format!("m = {m} must be at least 3")));
    }
    if p_max < 10 {
        return Err(Error::domain(format!("P = {p_max} must be at least 10")));
    }
    if p_max > TOTIENT_MAX {
        return Err(Error::resource(format!(
            "P = {p_max} exceeds the sieve limit {TOTIENT_MAX}"
        )));
    }
    let phi = totients(p_max as usize);
    let (mut lo, mut hi) = (0u128, 0u128);
    for p in 1..=p_max {
        match (p as u128).checked_pow(m as u32) {
            Some(pm) => {
                let num = (phi[p as usize] as u128) << TOTIENT_BITS;
                lo += num / pm;
                hi += num.div_ceil(pm);
            }
            // φ(p)/p^m < 2^-64 here
            None => hi += 1,
        }
    }
    let partial = Bracket::new(Rat::dyadic(lo, TOTIENT_BITS), Rat::dyadic(hi, TOTIENT_BITS));
    let tol = Rat::dyadic(1, 40);
    let num = zeta(m as u32 - 1, &tol)?.bracket();
    let den = zeta(m as u32, &tol)?.bracket();
    let target = num.div(&den)?;
    let tail = Rat::from(p_max).pow(2 - m as i32) / Rat::from(m as u64 - 2);
    let gap = target.sub(&partial);
    let ok = partial.hi >= &target.lo - &tail && partial.lo <= target.hi;
    Ok(TotientReport {
        m,
        p_max,
        partial,
        target,
        tail,
        gap,
        ok,
    })
}

/// `N ≤ 2μ + 2` for the integer points of a convex region, with `μ` the area
/// of their convex hull, `Γ` its boundary points and `B` its interior points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PickReport {
    pub n: u64,
    pub hull_area: Rat,
    pub region_area: Rat,
    pub boundary: u64,
    pub interior: u64,
    pub ok: bool,
}

pub fn pick_bound_check(region: &ConvexPolygon) -> Result<PickReport> {
    let pts = region.lattice_points()?;
    if !has_noncollinear_triple(&pts) {
        return Err(Error::precondition("fewer than three non-collinear integer points"));
    }
    let hull = convex_hull(&pts);
    let mut twice = 0i128;
    let mut boundary = 0u64;
    for i in 0..hull.len() {
        let (a, b) = (hull[i], hull[(i + 1) % hull.len()]);
        twice += a.0 as i128 * b.1 as i128 - a.1 as i128 * b.0 as i128;
        boundary += (b.0 - a.0).unsigned_abs().gcd(&(b.1 - a.1).unsigned_abs());
    }
    let hull_area = Rat::new(twice.abs(), 2);
    // Pick: μ = B + Γ/2 − 1
    let interior_rat = &hull_area - &Rat::new(boundary, 2u64) + Rat::one();
    let interior = interior_rat
        .floor()
        .try_into()
        .map_err(|_| Error::input("negative interior count"))?;
    let n = pts.len() as u64;
    if n != interior + boundary {
        return Err(Error::input(format!(
            "Pick count mismatch: {n} != {interior} + {boundary}"
        )));
    }
    let ok = Rat::from(n) <= Rat::from(2) * &hull_area + Rat::from(2);
    Ok(PickReport {
        n,
        region_area: region.area(),
        hull_area,
        boundary,
        interior,
        ok,
    })
}

/// `Σ_{q=⌈k/2⌉}^k μ(S ∩ A(q)) ≥ (1−δ)^m(2λε)^m/2`, valid when `δλk ≥ 4`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FirstSumReport {
    pub k: u64,
    pub m: usize,
    pub delta: Rat,
    /// The sum as a polynomial in `ε·k^{−1/m}`.
    pub sum: ClusterMeasure,
    pub sum_bracket: Bracket,
    pub bound: Rat,
    pub precondition: bool,
    pub ok: bool,
}

pub fn lemma14_first_sum_check(k: u64, eps: &Rat, m: usize, cube: &Cube, delta: &Rat) -> Result<FirstSumReport> {
    check_params(m, k, eps)?;
    if cube.dim() != m {
        return Err(Error::input(format!(
            "box dimension {} differs from m = {m}",
            cube.dim()
        )));
    }
    let mi = m as i32;
    // r_q = ρ/q with ρ^m = ε^m/k, so every A(q) lives in one ring Q(ρ)
    let mut coeffs = vec![Rat::zero(); m];
    for q in k.div_ceil(2)..=k {
        let c = CubeCluster::new(q, m, eps.clone(), k)?.measure(cube)?;
        let qr = Rat::from(q);
        for (j, a) in c.coeffs.iter().enumerate() {
            coeffs[j] += a / &qr.pow(j as i32);
        }
    }
    let sum = ClusterMeasure {
        m,
        r_pow_m: eps.pow(mi) / Rat::from(k),
        coeffs,
    };
    let lam = &cube.side;
    let bound = (Rat::one() - delta).pow(mi) * (Rat::from(2) * lam * eps).pow(mi) / Rat::from(2);
    let ok = sum.compare(&bound)? != std::cmp::Ordering::Less;
    Ok(FirstSumReport {
        k,
        m,
        delta: delta.clone(),
        sum_bracket: sum.bracket(64)?,
        sum,
        bound,
        precondition: delta * lam * &Rat::from(k) >= Rat::from(4),
        ok,
    })
}
