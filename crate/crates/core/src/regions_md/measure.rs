//! `μ(S ∩ M̄ₖ)` for boxes in `[0,1]^m` by sampling points of the `2^-64`
//! grid. Membership of a grid point is decided exactly in `u64` arithmetic.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_params, Cube};
use crate::error::{Error, Result};
use crate::exactnum::certified::iroot_floor;
use crate::exactnum::Rat;
use crate::mc;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MdEstimate {
    pub value: Rat,
    pub ci_halfwidth: Rat,
    pub bernstein_halfwidth: Rat,
    pub samples: u64,
    pub k: u64,
    pub eps: Rat,
    pub m: usize,
    pub cube: Cube,
    pub delta: Rat,
}

impl MdEstimate {
    pub fn lower(&self) -> Rat {
        &self.value - &self.ci_halfwidth
    }

    pub fn upper(&self) -> Rat {
        &self.value + &self.ci_halfwidth
    }
}

/// Largest `τ` with `(τ/2^64)^m ≤ ε^m/k`, capped at `2^63`.
pub fn threshold_u64_md(eps: &Rat, k: u64, m: usize) -> u64 {
    let x = eps.pow(m as i32) * Rat::from_int(BigInt::from(1u8) << (64 * m)) / Rat::from(k);
    let f = x.floor().to_biguint().expect("non-negative");
    let t = iroot_floor(&f, m as u32);
    t.to_u64().map_or(1 << 63, |t| t.min(1 << 63))
}

/// `∃q ≤ k : ‖qαᵢ‖ ≤ τ/2^64` for all `i`, with `αᵢ = a[i]/2^64`.
pub fn hit_u64_md(a: &[u64], k: u64, tau: u64) -> bool {
    if tau >= 1 << 63 {
        return true;
    }
    let two_tau = tau.wrapping_mul(2);
    let mut x = a.to_vec();
    for _ in 1..=k {
        // x ∈ [−τ, τ] mod 2^64
        if x.iter().all(|&v| v.wrapping_add(tau) <= two_tau) {
            return true;
        }
        for (xi, &ai) in x.iter_mut().zip(a) {
            *xi = xi.wrapping_add(ai);
        }
    }
    false
}

/// Two-dimensional fast path of [`hit_u64_md`].
fn hit_u64_2(a: u64, b: u64, k: u64, tau: u64) -> bool {
    if tau >= 1 << 63 {
        return true;
    }
    let two_tau = tau.wrapping_mul(2);
    let (mut x, mut y) = (a, b);
    for _ in 1..=k {
        if x.wrapping_add(tau) <= two_tau && y.wrapping_add(tau) <= two_tau {
            return true;
        }
        x = x.wrapping_add(a);
        y = y.wrapping_add(b);
    }
    false
}

/// `μ(S ∩ M̄ₖ)` from `samples` uniform grid points of `S`, with Hoeffding and
/// empirical-Bernstein half-widths. The result depends only on
/// `(seed, samples)`.
pub fn measure_mbar_md(k: u64, eps: &Rat, m: usize, cube: &Cube, samples: u64, seed: u64) -> Result<MdEstimate> {
    check_params(m, k, eps)?;
    if cube.dim() != m {
        return Err(Error::input(format!(
            "box dimension {} differs from m = {m}",
            cube.dim()
        )));
    }
    if !cube.inside_unit() {
        return Err(Error::input("box must lie in [0, 1]^m"));
    }
    if samples < 2 {
        return Err(Error::input("at least two samples are needed"));
    }
    let mut ranges = Vec::with_capacity(m);
    for i in 0..m {
        let (lo, hi) = cube.window(i);
        let (a, b) = mc::dyadic_range(&lo, &hi, 64)?;
        ranges.push((a.to_u128().expect("in [0, 2^64]"), b.to_u128().expect("in [0, 2^64]")));
    }
    let tau = threshold_u64_md(eps, k, m);
    let seed = mc::derive_seed(seed, "point-mc-md");
    let hits: u64 = mc::map_chunks(samples, |c, _, len| {
        let mut rng = mc::stream(seed, c);
        let mut h = 0u64;
        let mut a = vec![0u64; m];
        for _ in 0..len {
            // 2^64 wraps to 0, the same point of the torus
            for (ai, r) in a.iter_mut().zip(&ranges) {
                *ai = rng.random_range(r.0..=r.1) as u64;
            }
            let hit = if m == 2 {
                hit_u64_2(a[0], a[1], k, tau)
            } else {
                hit_u64_md(&a, k, tau)
            };
            h += hit as u64;
        }
        h
    })
    .into_iter()
    .sum();
    let vol = cube.volume();
    let delta = mc::default_delta();
    let var = mc::bernoulli_variance(hits, samples);
    Ok(MdEstimate {
        value: Rat::new(hits, samples) * &vol,
        ci_halfwidth: mc::hoeffding_halfwidth(samples, &vol, &delta)?,
        bernstein_halfwidth: mc::bernstein_halfwidth(samples, &var, &Rat::one(), &delta)? * &vol,
        samples,
        k,
        eps: eps.clone(),
        m,
        cube: cube.clone(),
        delta,
    })
}
