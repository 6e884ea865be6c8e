//! Experiments on random pairs `(Θ, Θ′)`: sign changes of `ψ_Θ − ψ_Θ′`,
//! hits of `Ψₖ = M̲ₖ × M̄ₖ` and `Φₖ = M̄ₖ × M̲ₖ` along a ladder of `k`, and
//! the density of `Ψₖ` against the product of the measure bands.

pub mod density;
pub mod experiment;

use num_bigint::BigInt;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::Rat;
use crate::mc;
use crate::psi::{MatrixTheta, Regime, DEFAULT_BUDGET};

pub use density::{density_sweep, DensityReport};
pub use experiment::{bc_hits, run_experiment, run_sign_experiment, HitRecord, PairReport, Report, Summary};

/// Matrix shapes supported by the experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LabRegime {
    /// `m = 1, n = 2`, threshold `ε/k²`.
    LinearForm,
    /// `m ≥ 2, n = 1`, threshold `ε·k^{−1/m}`.
    Simultaneous(usize),
}

impl LabRegime {
    pub fn label(&self) -> String {
        match self {
            LabRegime::LinearForm => "1x2".into(),
            LabRegime::Simultaneous(m) => format!("{m}x1"),
        }
    }

    /// Entries per matrix.
    pub fn entries(&self) -> usize {
        match self {
            LabRegime::LinearForm => 2,
            LabRegime::Simultaneous(m) => *m,
        }
    }

    /// `e` in the threshold `ε·k^{−e}`.
    pub fn default_exponent(&self) -> Rat {
        match self {
            LabRegime::LinearForm => Rat::from(2),
            LabRegime::Simultaneous(m) => Rat::new(1, *m as u64),
        }
    }

    pub fn matrix(&self, entries: Vec<Rat>) -> Result<MatrixTheta> {
        match self {
            LabRegime::LinearForm => MatrixTheta::new(1, 2, entries),
            LabRegime::Simultaneous(_) => MatrixTheta::simultaneous(entries),
        }
    }

    /// Powers of two `2⁴…2¹⁴` (simultaneous) or `2⁴…2⁹` (linear form).
    pub fn default_ladder(&self) -> Vec<u64> {
        let top = match self {
            LabRegime::LinearForm => 9,
            LabRegime::Simultaneous(_) => 14,
        };
        (4..=top).map(|e| 1u64 << e).collect()
    }
}

impl std::fmt::Display for LabRegime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

impl std::str::FromStr for LabRegime {
    type Err = Error;

    /// `1x2`, or `mx1` with `m ≥ 2`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::input(format!("unknown regime {s:?}; expected 1x2 or mx1 with m >= 2"));
        let (a, b) = s.split_once('x').ok_or_else(bad)?;
        match (a.parse::<usize>(), b.parse::<usize>()) {
            (Ok(1), Ok(2)) => Ok(LabRegime::LinearForm),
            (Ok(m), Ok(1)) if m >= 2 => Ok(LabRegime::Simultaneous(m)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for LabRegime {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

impl<'de> Deserialize<'de> for LabRegime {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

fn default_bits() -> u32 {
    128
}

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

/// Parameters of an experiment. `exponent` replaces the default decay rate of
/// the threshold `ε·k^{−e}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub regime: LabRegime,
    pub eps: Rat,
    pub lam: Rat,
    pub delta: Rat,
    pub k_ladder: Vec<u64>,
    pub t_max: u64,
    pub pair_count: u64,
    #[serde(default = "default_bits")]
    pub denom_bits: u32,
    pub seed: u64,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default)]
    pub exponent: Option<Rat>,
}

impl ExperimentConfig {
    pub fn new(regime: LabRegime, eps: Rat, t_max: u64, pair_count: u64, seed: u64) -> Self {
        ExperimentConfig {
            regime,
            eps,
            lam: Rat::one(),
            delta: Rat::new(1, 10),
            k_ladder: regime.default_ladder(),
            t_max,
            pair_count,
            denom_bits: default_bits(),
            seed,
            budget: default_budget(),
            exponent: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, x: &Rat| -> Result<()> {
            if !x.is_positive() || *x >= Rat::one() {
                return Err(Error::input(format!("{name} = {x} must lie in (0, 1)")));
            }
            Ok(())
        };
        unit("eps", &self.eps)?;
        unit("delta", &self.delta)?;
        if !self.lam.is_positive() || self.lam > Rat::one() {
            return Err(Error::input(format!("lam = {} must lie in (0, 1]", self.lam)));
        }
        if self.k_ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::input("k_ladder must be strictly increasing"));
        }
        if self.k_ladder.first().is_some_and(|&k| k < 1) {
            return Err(Error::input("k_ladder entries must be positive"));
        }
        if self.denom_bits == 0 || self.denom_bits > 4096 {
            return Err(Error::input(format!(
                "denom_bits = {} must lie in 1..=4096",
                self.denom_bits
            )));
        }
        if let Some(e) = &self.exponent {
            if !e.is_positive() {
                return Err(Error::input(format!("exponent = {e} must be positive")));
            }
        }
        Ok(())
    }

    pub fn exponent(&self) -> Rat {
        self.exponent.clone().unwrap_or_else(|| self.regime.default_exponent())
    }

    pub fn k_max(&self) -> u64 {
        self.k_ladder.last().copied().unwrap_or(0)
    }
}

/// A random pair, reproducible from `(seed, id)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSample {
    pub id: u64,
    pub seed: u64,
    pub theta: MatrixTheta,
    pub theta2: MatrixTheta,
}

/// Uniform integer in `[0, 2^bits]`.
fn uniform_upto_pow2<R: Rng>(rng: &mut R, bits: u32) -> BigInt {
    let top = BigInt::from(1u8) << bits;
    loop {
        let mut x = BigInt::from(0u8);
        let mut left = bits + 1;
        while left > 0 {
            let take = left.min(64);
            x = (x << take) + BigInt::from(mc::uniform_bits(rng, take));
            left -= take;
        }
        if x <= top {
            return x;
        }
    }
}

/// Pair `id` of the stream of `config.seed`.
pub fn sample_pair(config: &ExperimentConfig, id: u64) -> Result<PairSample> {
    let mut rng = mc::stream(mc::derive_seed(config.seed, "lab-pairs"), id);
    let n = config.regime.entries();
    let mut draw = || -> Vec<Rat> {
        (0..n)
            .map(|_| Rat::dyadic(uniform_upto_pow2(&mut rng, config.denom_bits), config.denom_bits))
            .collect()
    };
    let (a, b) = (draw(), draw());
    Ok(PairSample {
        id,
        seed: config.seed,
        theta: config.regime.matrix(a)?,
        theta2: config.regime.matrix(b)?,
    })
}

pub fn sample_pairs(config: &ExperimentConfig) -> Result<Vec<PairSample>> {
    config.validate()?;
    (0..config.pair_count).map(|i| sample_pair(config, i)).collect()
}

/// `ψ ≤ ε·k^{−e}` for `e = a/b`, decided as `ψ^b·k^a ≤ ε^b`.
pub fn below_threshold(psi: &Rat, k: u64, eps: &Rat, exponent: &Rat) -> bool {
    let a: u32 = exponent.numer().try_into().expect("small exponent numerator");
    let b: i32 = exponent.denom().try_into().expect("small exponent denominator");
    psi.pow(b) * Rat::from_int(BigInt::from(k).pow(a)) <= eps.pow(b)
}

pub(crate) fn regime_of(theta: &MatrixTheta) -> Option<LabRegime> {
    match theta.regime() {
        Regime::LinearForm => Some(LabRegime::LinearForm),
        Regime::Simultaneous(m) => Some(LabRegime::Simultaneous(m)),
        _ => None,
    }
}
