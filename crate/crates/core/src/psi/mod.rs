//! The irrationality measure function `ψ_Θ(t)`.
//!
//! `ψ_Θ(t) = min max_j ‖θ_j · x‖` over integer `x ∈ ℤⁿ` with
//! `1 ≤ max|x_i| ≤ t`. Since `x` and `−x` give the same value, all searches
//! run over canonical representatives (first nonzero coordinate positive),
//! shell by shell (`max|x_i| = 1, 2, …`) and in lexicographic order inside a
//! shell. Witnesses change only on strict improvement, so every routine
//! reports the first minimizer in that order.

mod cf;
mod naive;
pub mod residue;
mod signs;
mod sweep;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::Rat;

pub use cf::{convergents, psi_cf_1d};
pub use naive::{psi_naive, psi_naive_with_budget};
pub use signs::{count_changes, sign_sequence, sign_sequence_with_budget, SignSeq};
pub use sweep::{psi_at, psi_form2_sweep, psi_simul_sweep, psi_sweep, psi_sweep_with_budget, psi_values};

/// Default cap on the number of evaluated integer vectors per call.
pub const DEFAULT_BUDGET: u64 = 1_000_000_000;

/// Which algorithm family applies to a matrix shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `m = n = 1`: one number.
    Single,
    /// `m = 1, n = 2`: one linear form in two variables.
    LinearForm,
    /// `m ≥ 2, n = 1`: simultaneous approximation of `m` numbers.
    Simultaneous(usize),
    /// Anything else; only the naive oracle applies.
    General,
}

impl Regime {
    pub fn label(&self) -> String {
        match self {
            Regime::Single => "1x1".into(),
            Regime::LinearForm => "1x2".into(),
            Regime::Simultaneous(m) => format!("{m}x1"),
            Regime::General => "general".into(),
        }
    }
}

/// Real `m × n` matrix with rational entries in `[0, 1]`; row `j` is the
/// linear form `θ_j · x = Σ_i θ_j^i x_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatrixTheta {
    m: usize,
    n: usize,
    entries: Vec<Rat>,
}

impl MatrixTheta {
    /// Row-major entries: `entries[j * n + i] = θ_j^i`.
    pub fn new(m: usize, n: usize, entries: Vec<Rat>) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::input("matrix dimensions must be positive"));
        }
        if entries.len() != m * n {
            return Err(Error::input(format!(
                "expected {} entries for a {m}x{n} matrix, got {}",
                m * n,
                entries.len()
            )));
        }
        let (zero, one) = (Rat::zero(), Rat::one());
        if let Some(bad) = entries.iter().find(|e| **e < zero || **e > one) {
            return Err(Error::input(format!("entry {bad} outside [0, 1]")));
        }
        Ok(MatrixTheta { m, n, entries })
    }

    pub fn single(alpha: Rat) -> Result<Self> {
        MatrixTheta::new(1, 1, vec![alpha])
    }

    /// The form `x₁α + x₂β`.
    pub fn linear_form(alpha: Rat, beta: Rat) -> Result<Self> {
        MatrixTheta::new(1, 2, vec![alpha, beta])
    }

    /// The column `(α₁, …, α_m)ᵀ`.
    pub fn simultaneous(alphas: Vec<Rat>) -> Result<Self> {
        MatrixTheta::new(alphas.len(), 1, alphas)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Rat] {
        &self.entries
    }

    pub fn entry(&self, j: usize, i: usize) -> &Rat {
        &self.entries[j * self.n + i]
    }

    pub fn row(&self, j: usize) -> &[Rat] {
        &self.entries[j * self.n..(j + 1) * self.n]
    }

    pub fn regime(&self) -> Regime {
        match (self.m, self.n) {
            (1, 1) => Regime::Single,
            (1, 2) => Regime::LinearForm,
            (m, 1) => Regime::Simultaneous(m),
            _ => Regime::General,
        }
    }

    /// Entries replaced by `1 − θ`; `ψ` is unchanged.
    pub fn reflect(&self) -> MatrixTheta {
        MatrixTheta {
            m: self.m,
            n: self.n,
            entries: self.entries.iter().map(|e| Rat::one() - e).collect(),
        }
    }

    /// `max_j ‖θ_j · x‖` evaluated exactly.
    pub fn eval(&self, x: &[i64]) -> Rat {
        (0..self.m)
            .map(|j| self.form(j, x).dist_to_int())
            .max()
            .unwrap_or_else(Rat::zero)
    }

    fn form(&self, j: usize, x: &[i64]) -> Rat {
        self.row(j).iter().zip(x).map(|(a, &xi)| a * &Rat::from(xi)).sum()
    }

    /// Nearest integers `p_j` to the forms at `x`.
    pub fn nearest(&self, x: &[i64]) -> Vec<i64> {
        (0..self.m)
            .map(|j| self.form(j, x).round_half_up().to_i64().unwrap_or(i64::MAX))
            .collect()
    }
}

/// One value `ψ_Θ(t)` together with its minimizing vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiRecord {
    pub t: u64,
    pub value: Rat,
    pub witness_x: Vec<i64>,
    pub witness_p: Vec<i64>,
}

impl PsiRecord {
    pub(crate) fn build(theta: &MatrixTheta, t: u64, value: Rat, x: Vec<i64>) -> Self {
        let p = theta.nearest(&x);
        PsiRecord {
            t,
            value,
            witness_x: x,
            witness_p: p,
        }
    }
}

pub(crate) fn check_t(t: u64) -> Result<()> {
    if t < 1 {
        return Err(Error::domain("t must be at least 1"));
    }
    Ok(())
}

pub(crate) fn bigint_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("fits in i64")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    #[test]
    fn matrix_validation() {
        assert!(MatrixTheta::new(1, 2, vec![r("1/3")]).is_err());
        assert!(MatrixTheta::linear_form(r("3/2"), r("0")).is_err());
        assert!(MatrixTheta::new(0, 1, vec![]).is_err());
        let th = MatrixTheta::simultaneous(vec![r("1/3"), r("1/4")]).unwrap();
        assert_eq!(th.regime(), Regime::Simultaneous(2));
        assert_eq!(th.eval(&[3]), r("1/4"));
        assert_eq!(th.nearest(&[3]), vec![1, 1]);
    }
}
