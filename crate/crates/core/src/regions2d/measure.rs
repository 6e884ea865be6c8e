//! `μ(M̄ₖ ∩ S)` by exact integration, by averaging exact fibers over random
//! `β`, or by sampling points.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{area, check_k_eps, fiber, hit_u64, strip_eta, threshold_u64, Square};
use crate::error::{Error, Result};
use crate::exactnum::Rat;
use crate::mc;

/// Largest `k` accepted by [`Method::ExactFiberIntegration`].
pub const EXACT_K_MAX: u64 = 10;

/// Bits of the grid on which fiber-MC draws `β`.
pub const FIBER_GRID_BITS: u32 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactFiberIntegration,
    FiberMc,
    PointMc,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact-fiber-integration" => Ok(Method::ExactFiberIntegration),
            "fiber-mc" => Ok(Method::FiberMc),
            "point-mc" => Ok(Method::PointMc),
            _ => Err(Error::input(format!("unknown strategy {s:?}"))),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::ExactFiberIntegration => "exact-fiber-integration",
            Method::FiberMc => "fiber-mc",
            Method::PointMc => "point-mc",
        })
    }
}

/// A measure with its Hoeffding half-width at confidence `1 − δ` (zero when
/// exact) and, for Monte-Carlo, an empirical-Bernstein half-width.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureEstimate {
    pub value: Rat,
    pub ci_halfwidth: Rat,
    pub bernstein_halfwidth: Option<Rat>,
    pub method: Method,
    pub samples: u64,
    pub k: u64,
    pub eps: Rat,
    pub square: Square,
    pub delta: Rat,
}

impl MeasureEstimate {
    pub fn lower(&self) -> Rat {
        &self.value - &self.ci_halfwidth
    }

    pub fn upper(&self) -> Rat {
        &self.value + &self.ci_halfwidth
    }
}

/// Exact length of the fiber of `M̄ₖ` at `β` inside the α-window.
pub fn fiber_measure_mbar(beta: &Rat, k: u64, eps: &Rat, alpha_window: &(Rat, Rat)) -> Result<Rat> {
    check_k_eps(k, eps)?;
    if alpha_window.0.is_negative() || alpha_window.1 > Rat::one() {
        return Err(Error::input("alpha window must lie in [0, 1]"));
    }
    fiber::fiber_length(beta, k, &strip_eta(eps, k), alpha_window)
}

/// `μ(M̄ₖ ∩ S)`.
///
/// `samples` is the number of fibers (fiber-MC) or points (point-MC) and is
/// ignored by the exact strategy. Monte-Carlo results depend only on
/// `(seed, samples)`, and the random `β` of fiber-MC do not depend on `k`,
/// so runs at different `k` use common random numbers.
pub fn measure_mbar_2d(
    k: u64,
    eps: &Rat,
    square: &Square,
    method: Method,
    samples: u64,
    seed: u64,
) -> Result<MeasureEstimate> {
    check_k_eps(k, eps)?;
    if !square.inside_unit() {
        return Err(Error::input("square must lie in [0, 1]^2"));
    }
    let eta = strip_eta(eps, k);
    let (aw, bw) = (square.alpha_window(), square.beta_window());
    let delta = mc::default_delta();
    let mut est = MeasureEstimate {
        value: Rat::zero(),
        ci_halfwidth: Rat::zero(),
        bernstein_halfwidth: None,
        method,
        samples,
        k,
        eps: eps.clone(),
        square: square.clone(),
        delta: delta.clone(),
    };
    match method {
        Method::ExactFiberIntegration => {
            if k > EXACT_K_MAX {
                return Err(Error::resource(format!(
                    "exact integration is limited to k <= {EXACT_K_MAX}; use fiber-mc or point-mc"
                )));
            }
            est.value = area::union_area(&area::all_directions(k), &eta, &aw, &bw)?;
            est.samples = 0;
        }
        Method::FiberMc => {
            if samples < 2 {
                return Err(Error::input("fiber-mc needs at least two fibers"));
            }
            let (lo, hi) = mc::dyadic_range(&bw.0, &bw.1, FIBER_GRID_BITS)?;
            let (lo, hi): (u128, u128) = (
                lo.try_into().map_err(|_| Error::input("beta window"))?,
                hi.try_into().map_err(|_| Error::input("beta window"))?,
            );
            let seed = mc::derive_seed(seed, "fiber-mc");
            let chunks = mc::map_chunks(samples, |c, _, len| -> Result<(Rat, Rat)> {
                let mut rng = mc::stream(seed, c);
                let (mut s, mut s2) = (Rat::zero(), Rat::zero());
                for _ in 0..len {
                    let b = Rat::dyadic(rng.random_range(lo..=hi), FIBER_GRID_BITS);
                    let f = fiber::fiber_length(&b, k, &eta, &aw)?;
                    s2 += &f * &f;
                    s += f;
                }
                Ok((s, s2))
            });
            let (mut s, mut s2) = (Rat::zero(), Rat::zero());
            for ch in chunks {
                let (a, b) = ch?;
                s += a;
                s2 += b;
            }
            let n = Rat::from(samples);
            let mean = &s / &n;
            let var = (&s2 - &(&s * &mean)) / Rat::from(samples - 1);
            let wa = &aw.1 - &aw.0;
            let wb = &bw.1 - &bw.0;
            est.value = &mean * &wb;
            est.ci_halfwidth = mc::hoeffding_halfwidth(samples, &wa, &delta)? * &wb;
            est.bernstein_halfwidth = Some(mc::bernstein_halfwidth(samples, &var, &wa, &delta)? * &wb);
        }
        Method::PointMc => {
            if samples < 2 {
                return Err(Error::input("point-mc needs at least two points"));
            }
            let grid = |w: &(Rat, Rat)| -> Result<(u128, u128)> {
                let (lo, hi) = mc::dyadic_range(&w.0, &w.1, 64)?;
                Ok((
                    lo.try_into().expect("in [0, 2^64]"),
                    hi.try_into().expect("in [0, 2^64]"),
                ))
            };
            let (ga, gb) = (grid(&aw)?, grid(&bw)?);
            let tau = threshold_u64(&eta);
            let seed = mc::derive_seed(seed, "point-mc-2d");
            let hits: u64 = mc::map_chunks(samples, |c, _, len| {
                let mut rng = mc::stream(seed, c);
                let mut h = 0u64;
                for _ in 0..len {
                    // 2^64 wraps to 0, the same point of the torus
                    let a = rng.random_range(ga.0..=ga.1) as u64;
                    let b = rng.random_range(gb.0..=gb.1) as u64;
                    h += hit_u64(a, b, k, tau) as u64;
                }
                h
            })
            .into_iter()
            .sum();
            let area = square.area();
            est.value = Rat::new(hits, samples) * &area;
            est.ci_halfwidth = mc::hoeffding_halfwidth(samples, &area, &delta)?;
            let var = mc::bernoulli_variance(hits, samples);
            est.bernstein_halfwidth = Some(mc::bernstein_halfwidth(samples, &var, &Rat::one(), &delta)? * &area);
        }
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    #[test]
    fn exact_is_monotone_in_eps() {
        let s = Square::unit();
        let mut prev = Rat::zero();
        for e in ["1/40", "1/20", "1/10", "1/5"] {
            let v = measure_mbar_2d(3, &r(e), &s, Method::ExactFiberIntegration, 0, 0)
                .unwrap()
                .value;
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn exact_rejects_large_k() {
        let err = measure_mbar_2d(11, &r("1/10"), &Square::unit(), Method::ExactFiberIntegration, 0, 0);
        assert!(matches!(err, Err(Error::Resource(_))));
    }

    #[test]
    fn monte_carlo_brackets_exact_value() {
        let s = Square::centered(r("1/2")).unwrap();
        let eps = r("1/10");
        let exact = measure_mbar_2d(4, &eps, &s, Method::ExactFiberIntegration, 0, 0)
            .unwrap()
            .value;
        for m in [Method::FiberMc, Method::PointMc] {
            let est = measure_mbar_2d(4, &eps, &s, m, 20_000, 11).unwrap();
            assert!(est.lower() <= exact && exact <= est.upper(), "{m}");
        }
    }

    #[test]
    fn deterministic_across_threads() {
        let s = Square::unit();
        let run = || measure_mbar_2d(5, &r("1/10"), &s, Method::FiberMc, 5000, 3).unwrap();
        assert_eq!(
            mc::with_threads(Some(1), run).unwrap(),
            mc::with_threads(Some(3), run).unwrap()
        );
    }
}
