use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::sweep::psi_values;
use super::{MatrixTheta, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::exactnum::Rat;

/// `ψ_Θ(t) − ψ_Θ′(t)` for `t = 1..T` and the places where its strict sign flips.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignSeq {
    pub t_max: u64,
    pub values: Vec<(u64, Rat)>,
    pub change_positions: Vec<u64>,
}

impl SignSeq {
    pub fn changes(&self) -> usize {
        self.change_positions.len()
    }

    /// Number of changes at or before `t`.
    pub fn changes_up_to(&self, t: u64) -> usize {
        self.change_positions.partition_point(|&c| c <= t)
    }

    pub fn is_identically_zero(&self) -> bool {
        self.values.iter().all(|(_, d)| d.is_zero())
    }
}

/// Positions where the strict sign of `diffs` (indexed from `t = 1`) flips;
/// zeros are skipped, and a change is dated at the `t` where the new sign
/// first appears.
pub fn count_changes<'a>(diffs: impl IntoIterator<Item = (u64, &'a Rat)>) -> Vec<u64> {
    let mut last = Ordering::Equal;
    let mut out = Vec::new();
    for (t, d) in diffs {
        let s = d.cmp(&Rat::zero());
        if s == Ordering::Equal {
            continue;
        }
        if last != Ordering::Equal && s != last {
            out.push(t);
        }
        last = s;
    }
    out
}

pub fn sign_sequence(theta: &MatrixTheta, theta2: &MatrixTheta, t_max: u64) -> Result<SignSeq> {
    sign_sequence_with_budget(theta, theta2, t_max, DEFAULT_BUDGET)
}

pub fn sign_sequence_with_budget(
    theta: &MatrixTheta,
    theta2: &MatrixTheta,
    t_max: u64,
    budget: u64,
) -> Result<SignSeq> {
    if theta.regime() != theta2.regime() {
        return Err(Error::input(format!(
            "matrices have different regimes ({} vs {})",
            theta.regime().label(),
            theta2.regime().label()
        )));
    }
    let a = psi_values(theta, t_max, budget)?;
    let b = psi_values(theta2, t_max, budget)?;
    let values: Vec<(u64, Rat)> = a
        .iter()
        .zip(&b)
        .enumerate()
        .map(|(i, (x, y))| (i as u64 + 1, x - y))
        .collect();
    let change_positions = count_changes(values.iter().map(|(t, d)| (*t, d)));
    Ok(SignSeq {
        t_max,
        values,
        change_positions,
    })
}
