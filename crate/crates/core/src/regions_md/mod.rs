//! The simultaneous regime `m ≥ 2, n = 1`: cube clusters `A(q)`, the strip
//! region `D` and its lines `l_q`, the classification of denominator pairs,
//! gcd sums, and the measure estimates for
//! `M̄ₖ = {α ∈ [0,1]^m : ψ_α(k) ≤ ε·k^{−1/m}}`.

pub mod classify;
pub mod cluster;
pub mod dregion;
pub mod lemmas;
pub mod measure;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::Rat;
use crate::psi::{psi_at, MatrixTheta, PsiRecord};

pub use classify::{classify_pairs, ClassifyMode, PairClassification, PairRecord, Violation};
pub use cluster::{ClusterMeasure, CubeCluster};
pub use dregion::{d_region_count, d_region_points, lemma11_check, Lemma11Report, RectC, RectKind, StripD};
pub use lemmas::{
    lemma14_first_sum_check, lemma5_lemma14_check, lemma6_sum, pick_bound_check, totient_series_check, BandsMd,
    FirstSumReport, Lemma6Report, PickReport, TotientReport,
};
pub use measure::{measure_mbar_md, MdEstimate};

/// Axis-parallel cube `corner + [0, side]^m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cube {
    pub corner: Vec<Rat>,
    pub side: Rat,
}

impl Cube {
    pub fn new(corner: Vec<Rat>, side: Rat) -> Result<Self> {
        if corner.is_empty() {
            return Err(Error::input("cube of dimension 0"));
        }
        if !side.is_positive() {
            return Err(Error::domain(format!("side = {side} must be positive")));
        }
        Ok(Cube { corner, side })
    }

    pub fn unit(m: usize) -> Self {
        Cube {
            corner: vec![Rat::zero(); m],
            side: Rat::one(),
        }
    }

    /// Cube of side `λ` centered at `(1/2, …, 1/2)`.
    pub fn centered(m: usize, side: Rat) -> Result<Self> {
        let c = (Rat::one() - &side) * Rat::new(1, 2);
        Cube::new(vec![c; m], side)
    }

    pub fn dim(&self) -> usize {
        self.corner.len()
    }

    pub fn window(&self, i: usize) -> (Rat, Rat) {
        (self.corner[i].clone(), &self.corner[i] + &self.side)
    }

    pub fn volume(&self) -> Rat {
        self.side.pow(self.dim() as i32)
    }

    pub fn inside_unit(&self) -> bool {
        (0..self.dim()).all(|i| {
            let (a, b) = self.window(i);
            !a.is_negative() && b <= Rat::one()
        })
    }
}

pub(crate) fn check_params(m: usize, k: u64, eps: &Rat) -> Result<()> {
    if m < 2 {
        return Err(Error::domain(format!("m = {m} must be at least 2")));
    }
    if k < 2 {
        return Err(Error::domain(format!("k = {k} must be at least 2")));
    }
    if eps.is_negative() {
        return Err(Error::domain(format!("eps = {eps} must be non-negative")));
    }
    Ok(())
}

/// `(ε·k^{−1/m})^m = ε^m/k`.
pub fn threshold_pow(eps: &Rat, k: u64, m: usize) -> Rat {
    eps.pow(m as i32) / Rat::from(k)
}

/// Membership of `α` in `M̄ₖ` together with `ψ_α(k)` and its witness `q`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MdMembership {
    pub member: bool,
    pub psi: PsiRecord,
}

impl MdMembership {
    pub fn witness_q(&self) -> i64 {
        self.psi.witness_x[0]
    }
}

/// `ψ_α(k) ≤ ε·k^{−1/m}`, decided exactly as `ψ^m·k ≤ ε^m`.
pub fn membership_mbar_md(alphas: &[Rat], k: u64, eps: &Rat) -> Result<MdMembership> {
    check_params(alphas.len(), k, eps)?;
    let theta = MatrixTheta::simultaneous(alphas.to_vec())?;
    let psi = psi_at(&theta, k)?;
    let member = psi.value.pow(alphas.len() as i32) <= threshold_pow(eps, k, alphas.len());
    Ok(MdMembership { member, psi })
}
