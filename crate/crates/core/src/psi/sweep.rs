use super::naive::psi_naive_with_budget;
use super::residue::{with_ring, AnyRing, Residues};
use super::{check_t, MatrixTheta, PsiRecord, Regime, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::exactnum::Rat;

/// Incremental sweep for `x₁α + x₂β`.
///
/// Shell `t` holds `4t` canonical points, visited in lexicographic order:
/// `(0, t)`, then `(x₁, −t), (x₁, t)` for `x₁ = 1..t−1`, then `(t, x₂)` for
/// `x₂ = −t..t`. Calls `on_t` with the running minimum after each shell.
pub(crate) fn form2_raw<G: Residues>(
    rg: &G,
    a: &G::R,
    b: &G::R,
    t_max: u64,
    mut on_t: impl FnMut(u64, &G::R, (i64, i64)),
) {
    let mut tb = rg.zero();
    let mut ta = rg.zero();
    let mut best: Option<(G::R, (i64, i64))> = None;
    for t in 1..=t_max as i64 {
        tb = rg.add(&tb, b);
        ta = rg.add(&ta, a);
        let (mut cur, mut w) = match best.take() {
            Some(bw) => bw,
            None => (rg.dist(&tb), (0, t)),
        };
        let d = rg.dist(&tb);
        if d < cur {
            cur = d;
            w = (0, t);
        }
        let neg_tb = rg.neg(&tb);
        let mut xa = rg.zero();
        for x1 in 1..t {
            xa = rg.add(&xa, a);
            let d = rg.dist(&rg.add(&xa, &neg_tb));
            if d < cur {
                cur = d;
                w = (x1, -t);
            }
            let d = rg.dist(&rg.add(&xa, &tb));
            if d < cur {
                cur = d;
                w = (x1, t);
            }
        }
        let mut r = rg.add(&ta, &neg_tb);
        for x2 in -t..=t {
            let d = rg.dist(&r);
            if d < cur {
                cur = d;
                w = (t, x2);
            }
            r = rg.add(&r, b);
        }
        on_t(t as u64, &cur, w);
        best = Some((cur, w));
    }
}

/// Running minimum of `max_i ‖q α_i‖` over `q = 1..t_max`.
pub(crate) fn simul_raw<G: Residues>(rg: &G, alphas: &[G::R], t_max: u64, mut on_t: impl FnMut(u64, &G::R, i64)) {
    let mut r: Vec<G::R> = vec![rg.zero(); alphas.len()];
    let mut best: Option<(G::R, i64)> = None;
    for q in 1..=t_max as i64 {
        let mut worst = rg.zero();
        for (ri, ai) in r.iter_mut().zip(alphas) {
            *ri = rg.add(ri, ai);
            let d = rg.dist(ri);
            if d > worst {
                worst = d;
            }
        }
        match &best {
            Some((b, _)) if worst >= *b => {}
            _ => best = Some((worst, q)),
        }
        let (b, w) = best.as_ref().unwrap();
        on_t(q as u64, b, *w);
    }
}

fn points_needed(theta: &MatrixTheta, t_max: u64) -> Option<u128> {
    let t = t_max as u128;
    match theta.regime() {
        Regime::LinearForm => Some(2 * t * (t + 1)),
        Regime::Single | Regime::Simultaneous(_) => Some(t * theta.m() as u128),
        Regime::General => None,
    }
}

fn check_budget(theta: &MatrixTheta, t_max: u64, budget: u64) -> Result<()> {
    if let Some(p) = points_needed(theta, t_max) {
        if p > budget as u128 {
            return Err(Error::resource(format!(
                "sweep to T = {t_max} needs {p} evaluations, budget is {budget}"
            )));
        }
    }
    Ok(())
}

/// Visits `(t, value, witness)` for `t = 1..t_max` without materializing records.
pub(crate) fn sweep_visit(
    theta: &MatrixTheta,
    t_max: u64,
    budget: u64,
    mut on_t: impl FnMut(u64, &Rat, Vec<i64>),
) -> Result<()> {
    check_t(t_max)?;
    check_budget(theta, t_max, budget)?;
    let ring = AnyRing::for_entries(theta.entries());
    match theta.regime() {
        Regime::LinearForm => with_ring!(&ring, |rg| {
            let a = rg.residue_of_rat(theta.entry(0, 0));
            let b = rg.residue_of_rat(theta.entry(0, 1));
            let mut last: Option<(_, Rat)> = None;
            form2_raw(rg, &a, &b, t_max, |t, d, w| {
                let value = cached_rat(rg, &mut last, d);
                on_t(t, &value, vec![w.0, w.1]);
            });
        }),
        Regime::Single | Regime::Simultaneous(_) => with_ring!(&ring, |rg| {
            let alphas: Vec<_> = theta.entries().iter().map(|e| rg.residue_of_rat(e)).collect();
            let mut last: Option<(_, Rat)> = None;
            simul_raw(rg, &alphas, t_max, |t, d, q| {
                let value = cached_rat(rg, &mut last, d);
                on_t(t, &value, vec![q]);
            });
        }),
        Regime::General => {
            for t in 1..=t_max {
                let rec = psi_naive_with_budget(theta, t, budget)?;
                on_t(t, &rec.value, rec.witness_x);
            }
        }
    }
    Ok(())
}

fn cached_rat<G: Residues>(rg: &G, last: &mut Option<(G::R, Rat)>, d: &G::R) -> Rat {
    match last {
        Some((ld, lv)) if ld == d => lv.clone(),
        _ => {
            let v = rg.dist_rat(d);
            *last = Some((d.clone(), v.clone()));
            v
        }
    }
}

/// `ψ_Θ(t)` for every `t = 1..t_max`, dispatching on the regime.
pub fn psi_sweep(theta: &MatrixTheta, t_max: u64) -> Result<Vec<PsiRecord>> {
    psi_sweep_with_budget(theta, t_max, DEFAULT_BUDGET)
}

pub fn psi_sweep_with_budget(theta: &MatrixTheta, t_max: u64, budget: u64) -> Result<Vec<PsiRecord>> {
    let mut out = Vec::with_capacity(t_max as usize);
    let mut prev: Option<PsiRecord> = None;
    sweep_visit(theta, t_max, budget, |t, v, x| {
        let rec = match &prev {
            Some(p) if p.witness_x == x => PsiRecord { t, ..p.clone() },
            _ => PsiRecord::build(theta, t, v.clone(), x),
        };
        prev = Some(rec.clone());
        out.push(rec);
    })?;
    Ok(out)
}

/// Values `ψ_Θ(1), …, ψ_Θ(t_max)` only.
pub fn psi_values(theta: &MatrixTheta, t_max: u64, budget: u64) -> Result<Vec<Rat>> {
    let mut out = Vec::with_capacity(t_max as usize);
    sweep_visit(theta, t_max, budget, |_, v, _| out.push(v.clone()))?;
    Ok(out)
}

/// `ψ_Θ(t)` at a single `t` via the fastest applicable sweep.
pub fn psi_at(theta: &MatrixTheta, t: u64) -> Result<PsiRecord> {
    if theta.regime() == Regime::General {
        return psi_naive_with_budget(theta, t, DEFAULT_BUDGET);
    }
    let mut last = None;
    sweep_visit(theta, t, DEFAULT_BUDGET, |tt, v, x| {
        if tt == t {
            last = Some((v.clone(), x));
        }
    })?;
    let (v, x) = last.expect("t >= 1");
    Ok(PsiRecord::build(theta, t, v, x))
}

/// Linear form `x₁α + x₂β`: `ψ(1), …, ψ(T)` in one pass over `Θ(T²)` points.
pub fn psi_form2_sweep(alpha: &Rat, beta: &Rat, t_max: u64) -> Result<Vec<PsiRecord>> {
    psi_sweep(&MatrixTheta::linear_form(alpha.clone(), beta.clone())?, t_max)
}

/// Simultaneous approximation of `alphas` (at least two numbers).
pub fn psi_simul_sweep(alphas: &[Rat], t_max: u64) -> Result<Vec<PsiRecord>> {
    if alphas.len() < 2 {
        return Err(Error::input("simultaneous sweep needs at least two numbers"));
    }
    psi_sweep(&MatrixTheta::simultaneous(alphas.to_vec())?, t_max)
}
