//! Monte-Carlo plumbing: counter-based random streams, dyadic sampling, and
//! confidence half-widths.
//!
//! Sample `i` always draws from the stream of chunk `i / CHUNK`, so results
//! depend only on the seed and sample count, never on the worker count.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::certified::{ln_bracket, sqrt_bracket};
use crate::exactnum::Rat;

/// Samples per random stream.
pub const CHUNK: u64 = 4096;

/// Default failure probability of every confidence interval.
pub fn default_delta() -> Rat {
    Rat::new(1, 1_000_000)
}

/// Independent stream `index` of the generator seeded by `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Domain-separated seed, so unrelated experiments with one user seed do not
/// share random numbers.
pub fn derive_seed(seed: u64, tag: &str) -> u64 {
    // FNV-1a over the tag, mixed with the seed
    let mut h: u64 = 0xcbf2_9ce4_8422_2325 ^ seed;
    for b in tag.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

/// Uniform `u128` below `2^bits`.
pub fn uniform_bits<R: Rng>(rng: &mut R, bits: u32) -> u128 {
    let x: u128 = rng.random();
    if bits >= 128 {
        x
    } else {
        x & ((1u128 << bits) - 1)
    }
}

/// Integers `j` with `j / 2^bits ∈ [lo, hi]`.
pub fn dyadic_range(lo: &Rat, hi: &Rat, bits: u32) -> Result<(BigInt, BigInt)> {
    let scale = Rat::from_int(BigInt::from(1u8) << bits);
    let a = (lo * &scale).ceil();
    let b = (hi * &scale).floor();
    if a > b {
        return Err(Error::input(format!("no 2^-{bits} grid point in [{lo}, {hi}]")));
    }
    Ok((a, b))
}

/// Uniform integer in `[a, b]` for ranges narrower than `2^127`.
pub fn uniform_in<R: Rng>(rng: &mut R, a: &BigInt, b: &BigInt) -> BigInt {
    let width: u128 = (b - a).try_into().expect("range below 2^127");
    let off = if width == u128::MAX {
        rng.random()
    } else {
        rng.random_range(0..=width)
    };
    a + BigInt::from(off)
}

/// Runs `f(chunk_index, first_sample, sample_count)` over all chunks of `n`
/// samples in parallel and returns the per-chunk results in chunk order.
pub fn map_chunks<T: Send>(n: u64, f: impl Fn(u64, u64, u64) -> T + Sync + Send) -> Vec<T> {
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let len = CHUNK.min(n - start);
            f(c, start, len)
        })
        .collect()
}

/// Runs `f` on a pool with the given worker count (`None` keeps the global pool).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::resource(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Hoeffding half-width `range·sqrt(ln(2/δ)/(2n))`, rounded up to a rational.
pub fn hoeffding_halfwidth(n: u64, range: &Rat, delta: &Rat) -> Result<Rat> {
    if n == 0 {
        return Err(Error::input("no samples"));
    }
    let l = ln_bracket(&(Rat::from(2) / delta), 64)?.hi;
    let inner = l / Rat::from(2 * n);
    Ok(sqrt_bracket(&inner, 64)?.hi * range)
}

/// Empirical-Bernstein half-width (Maurer–Pontil) for samples in an interval
/// of width `range` with unbiased sample variance `var`.
pub fn bernstein_halfwidth(n: u64, var: &Rat, range: &Rat, delta: &Rat) -> Result<Rat> {
    if n < 2 {
        return Err(Error::input("empirical Bernstein needs two samples"));
    }
    let l = ln_bracket(&(Rat::from(4) / delta), 64)?.hi;
    let a = sqrt_bracket(&(Rat::from(2) * var * &l / Rat::from(n)), 64)?.hi;
    let b = Rat::from(7) * range * &l / Rat::from(3 * (n - 1));
    Ok(a + b)
}

/// Unbiased sample variance of a Bernoulli sample with `hits` successes.
pub fn bernoulli_variance(hits: u64, n: u64) -> Rat {
    if n < 2 {
        return Rat::zero();
    }
    let p = Rat::new(hits, n);
    &p * &(Rat::one() - &p) * Rat::new(n, n - 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halfwidths() {
        let h = hoeffding_halfwidth(1_000_000, &Rat::one(), &default_delta()).unwrap();
        let expect = ((2e6f64).ln() / 2e6).sqrt();
        assert!(h.to_f64() >= expect && h.to_f64() < expect * (1.0 + 1e-9));
        let b = bernstein_halfwidth(1_000_000, &Rat::new(1, 1000), &Rat::one(), &default_delta()).unwrap();
        assert!(b < h);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = stream(7, 3).random();
        let b: u64 = stream(7, 3).random();
        let c: u64 = stream(7, 4).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(derive_seed(1, "x"), derive_seed(1, "y"));
    }

    #[test]
    fn chunk_results_independent_of_pool() {
        let run = || -> Vec<u64> {
            map_chunks(10_000, |c, _, len| {
                let mut rng = stream(99, c);
                (0..len).map(|_| rng.random::<u64>() % 7).sum()
            })
        };
        let one = with_threads(Some(1), run).unwrap();
        let four = with_threads(Some(4), run).unwrap();
        assert_eq!(one, four);
        assert_eq!(one.len(), 3);
    }

    #[test]
    fn dyadic_ranges() {
        let (a, b) = dyadic_range(&Rat::new(1, 4), &Rat::new(3, 4), 4).unwrap();
        assert_eq!((a, b), (BigInt::from(4), BigInt::from(12)));
        assert!(dyadic_range(&Rat::new(1, 3), &Rat::new(1, 3), 2).is_err());
    }
}
