use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{bigint_i64, check_t, MatrixTheta, PsiRecord};
use crate::error::{Error, Result};
use crate::exactnum::Rat;

/// Convergents `p_ν/q_ν` of the continued fraction of `x`, in order.
pub fn convergents(x: &Rat) -> Vec<(BigInt, BigInt)> {
    let (mut num, mut den) = (x.numer().clone(), x.denom().clone());
    let (mut p0, mut q0) = (BigInt::zero(), BigInt::one());
    let (mut p1, mut q1) = (BigInt::one(), BigInt::zero());
    let mut out = Vec::new();
    while !den.is_zero() {
        let (a, r) = num.div_mod_floor(&den);
        let p2 = &a * &p1 + &p0;
        let q2 = &a * &q1 + &q0;
        out.push((p2.clone(), q2.clone()));
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        (num, den) = (den, r);
    }
    out
}

/// `ψ_α(t) = min_{1 ≤ q ≤ t} ‖qα‖` from the continued-fraction ladder.
///
/// The convergent denominators are exactly the places where `‖qα‖` hits a new
/// minimum, so the answer is `|q_ν α − p_ν|` for the largest `q_ν ≤ t`.
pub fn psi_cf_1d(alpha: &Rat, t: u64) -> Result<PsiRecord> {
    check_t(t)?;
    if *alpha < Rat::zero() || *alpha > Rat::one() {
        return Err(Error::input(format!("alpha = {alpha} outside [0, 1]")));
    }
    let tb = BigInt::from(t);
    let (p, q) = convergents(alpha)
        .into_iter()
        .rev()
        .find(|(_, q)| *q <= tb)
        .expect("q_0 = 1");
    let value = (alpha * &Rat::from_int(q.clone()) - Rat::from_int(p.clone())).abs();
    let theta = MatrixTheta::single(alpha.clone())?;
    let mut rec = PsiRecord::build(&theta, t, value, vec![bigint_i64(&q)]);
    rec.witness_p = vec![bigint_i64(&p)];
    Ok(rec)
}
