use super::{check_t, MatrixTheta, PsiRecord, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::exactnum::Rat;

/// Calls `f` on every canonical `x` with `max|x_i| = s`, in lexicographic order.
fn for_each_in_shell(n: usize, s: i64, mut f: impl FnMut(&[i64])) {
    let mut x = vec![-s; n];
    loop {
        let first_nonzero = x.iter().find(|&&v| v != 0);
        let canonical = matches!(first_nonzero, Some(&v) if v > 0);
        if canonical && x.iter().any(|v| v.abs() == s) {
            f(&x);
        }
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if x[i] < s {
                x[i] += 1;
                break;
            }
            x[i] = -s;
        }
    }
}

/// `ψ_Θ(t)` by exhaustive enumeration with exact rational arithmetic.
///
/// This is the reference oracle for every faster routine.
pub fn psi_naive(theta: &MatrixTheta, t: u64) -> Result<PsiRecord> {
    psi_naive_with_budget(theta, t, DEFAULT_BUDGET)
}

pub fn psi_naive_with_budget(theta: &MatrixTheta, t: u64, budget: u64) -> Result<PsiRecord> {
    check_t(t)?;
    let side = 2u128 * t as u128 + 1;
    let total = (0..theta.n()).try_fold(1u128, |acc, _| acc.checked_mul(side));
    match total {
        Some(total) if (total - 1) / 2 <= budget as u128 => {}
        _ => {
            return Err(Error::resource(format!(
                "naive enumeration of ({side})^{} points exceeds the budget of {budget}",
                theta.n()
            )))
        }
    }
    let mut best: Option<(Rat, Vec<i64>)> = None;
    for s in 1..=t as i64 {
        for_each_in_shell(theta.n(), s, |x| {
            let v = theta.eval(x);
            if best.as_ref().is_none_or(|(b, _)| v < *b) {
                best = Some((v, x.to_vec()));
            }
        });
    }
    let (value, x) = best.expect("shell 1 is never empty");
    Ok(PsiRecord::build(theta, t, value, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    #[test]
    fn shells_are_canonical_and_complete() {
        for n in 1..=3 {
            for s in 1..=3i64 {
                let mut pts = Vec::new();
                for_each_in_shell(n, s, |x| pts.push(x.to_vec()));
                let full = (2 * s + 1).pow(n as u32) - (2 * s - 1).pow(n as u32);
                assert_eq!(pts.len() as i64, full / 2);
                let mut sorted = pts.clone();
                sorted.sort();
                assert_eq!(sorted, pts);
            }
        }
        let mut pts = Vec::new();
        for_each_in_shell(2, 2, |x| pts.push((x[0], x[1])));
        assert_eq!(
            pts,
            vec![(0, 2), (1, -2), (1, 2), (2, -2), (2, -1), (2, 0), (2, 1), (2, 2)]
        );
    }

    #[test]
    fn examples() {
        let rec = psi_naive(&MatrixTheta::single(r("1/2")).unwrap(), 2).unwrap();
        assert_eq!(rec.value, Rat::zero());
        assert_eq!(rec.witness_x, vec![2]);

        let rec = psi_naive(&MatrixTheta::linear_form(r("1/3"), r("1/4")).unwrap(), 1).unwrap();
        assert_eq!(rec.value, r("1/12"));
        assert_eq!(rec.witness_x, vec![1, -1]);
        assert_eq!(rec.witness_p, vec![0]);

        let rec = psi_naive(&MatrixTheta::simultaneous(vec![r("1/3"), r("1/4")]).unwrap(), 3).unwrap();
        assert_eq!(rec.value, r("1/4"));
        assert_eq!(rec.witness_x, vec![3]);
    }

    #[test]
    fn errors() {
        let th = MatrixTheta::linear_form(r("1/3"), r("1/4")).unwrap();
        assert!(matches!(psi_naive(&th, 0), Err(Error::Domain(_))));
        assert!(matches!(psi_naive_with_budget(&th, 100, 1000), Err(Error::Resource(_))));
    }
}
