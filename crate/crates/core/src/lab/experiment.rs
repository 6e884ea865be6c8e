//! Sign changes of `ψ_Θ − ψ_Θ′` and hits of `Ψₖ`, `Φₖ`, with a JSON report
//! and its flat CSV rendering.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{below_threshold, regime_of, sample_pair, ExperimentConfig, PairSample};
use crate::error::{Error, Result};
use crate::exactnum::Rat;
use crate::psi::{count_changes, psi_values};

/// `ψ_Θ(k)`, `ψ_Θ′(k)` and the membership of the pair in `Ψₖ` and `Φₖ`.
/// `sign_ok` records that a hit of `Ψₖ` (`Φₖ`) has `ψ_Θ(k) − ψ_Θ′(k)`
/// strictly positive (negative).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HitRecord {
    pub k: u64,
    pub psi1: Rat,
    pub psi2: Rat,
    #[serde(rename = "in_Psi")]
    pub in_psi: bool,
    #[serde(rename = "in_Phi")]
    pub in_phi: bool,
    pub sign_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairReport {
    pub id: u64,
    pub sign_changes: u64,
    /// Changes up to `T/10`.
    pub changes_at_tenth: u64,
    pub change_positions: Vec<u64>,
    /// `ψ_Θ = ψ_Θ′` on `1..T`.
    pub degenerate: bool,
    pub budget_exceeded: bool,
    pub hits: Vec<HitRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pairs: u64,
    pub degenerate: u64,
    pub budget_exceeded: u64,
    pub min_changes: u64,
    pub median_changes: Rat,
    pub max_changes: u64,
    pub median_changes_at_tenth: Rat,
    /// Non-degenerate pairs without a sign change.
    pub without_change: u64,
    pub psi_hits: u64,
    pub phi_hits: u64,
    pub pairs_with_psi_hit: u64,
    pub pairs_with_phi_hit: u64,
    /// Hits whose difference has the wrong sign.
    pub sign_violations: u64,
    /// `(pair, k)` in both `Ψₖ` and `Φₖ`.
    pub overlap_violations: u64,
}

impl Summary {
    /// No sign or overlap violation, and every non-degenerate pair changes sign.
    pub fn ok(&self) -> bool {
        self.sign_violations == 0 && self.overlap_violations == 0 && self.without_change == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub per_pair: Vec<PairReport>,
    pub summary: Summary,
}

/// One row per `(pair, k)`; pairs without ladder entries get one row with
/// empty `k` fields.
#[derive(Serialize)]
struct HitRow<'a> {
    id: u64,
    sign_changes: u64,
    k: Option<u64>,
    psi1: Option<&'a Rat>,
    psi2: Option<&'a Rat>,
    #[serde(rename = "in_Psi")]
    in_psi: Option<bool>,
    #[serde(rename = "in_Phi")]
    in_phi: Option<bool>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::input(format!("report JSON: {e}")))
    }

    /// Hits table.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for p in &self.per_pair {
            let base = HitRow {
                id: p.id,
                sign_changes: p.sign_changes,
                k: None,
                psi1: None,
                psi2: None,
                in_psi: None,
                in_phi: None,
            };
            if p.hits.is_empty() {
                w.serialize(&base).expect("csv row");
            }
            for h in &p.hits {
                w.serialize(HitRow {
                    k: Some(h.k),
                    psi1: Some(&h.psi1),
                    psi2: Some(&h.psi2),
                    in_psi: Some(h.in_psi),
                    in_phi: Some(h.in_phi),
                    ..base
                })
                .expect("csv row");
            }
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }

    /// Sign-change table, one row per `(pair, t)`.
    pub fn changes_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "t"]).expect("csv header");
        for p in &self.per_pair {
            for t in &p.change_positions {
                w.write_record([p.id.to_string(), t.to_string()]).expect("csv row");
            }
        }
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

fn hit_at(k: u64, psi1: &Rat, psi2: &Rat, eps: &Rat, exponent: &Rat) -> HitRecord {
    let low1 = below_threshold(psi1, k, eps, exponent);
    let low2 = below_threshold(psi2, k, eps, exponent);
    let in_psi = !low1 && low2;
    let in_phi = low1 && !low2;
    let sign_ok = (!in_psi || psi1 > psi2) && (!in_phi || psi1 < psi2);
    HitRecord {
        k,
        psi1: psi1.clone(),
        psi2: psi2.clone(),
        in_psi,
        in_phi,
        sign_ok,
    }
}

/// Membership of the pair in `Ψₖ` and `Φₖ` at each `k` of the ladder, with
/// the threshold `ε·k^{−e}`.
pub fn bc_hits(pair: &PairSample, ladder: &[u64], eps: &Rat, exponent: &Rat, budget: u64) -> Result<Vec<HitRecord>> {
    let Some(&top) = ladder.last() else {
        return Ok(Vec::new());
    };
    if regime_of(&pair.theta).is_none() || pair.theta.regime() != pair.theta2.regime() {
        return Err(Error::input("pair must share a linear-form or simultaneous regime"));
    }
    let a = psi_values(&pair.theta, top, budget)?;
    let b = psi_values(&pair.theta2, top, budget)?;
    Ok(ladder
        .iter()
        .map(|&k| hit_at(k, &a[k as usize - 1], &b[k as usize - 1], eps, exponent))
        .collect())
}

fn run_pair(config: &ExperimentConfig, id: u64) -> Result<PairReport> {
    let pair = sample_pair(config, id)?;
    let top = config.t_max.max(config.k_max());
    let mut rep = PairReport {
        id,
        sign_changes: 0,
        changes_at_tenth: 0,
        change_positions: Vec::new(),
        degenerate: false,
        budget_exceeded: false,
        hits: Vec::new(),
    };
    if top == 0 {
        return Ok(rep);
    }
    let values = psi_values(&pair.theta, top, config.budget)
        .and_then(|a| Ok((a, psi_values(&pair.theta2, top, config.budget)?)));
    let (a, b) = match values {
        Ok(v) => v,
        Err(Error::Resource(_)) => {
            rep.budget_exceeded = true;
            return Ok(rep);
        }
        Err(e) => return Err(e),
    };
    let diffs: Vec<Rat> = a
        .iter()
        .zip(&b)
        .take(config.t_max as usize)
        .map(|(x, y)| x - y)
        .collect();
    rep.change_positions = count_changes(diffs.iter().enumerate().map(|(i, d)| (i as u64 + 1, d)));
    rep.sign_changes = rep.change_positions.len() as u64;
    rep.changes_at_tenth = rep.change_positions.partition_point(|&t| t <= config.t_max / 10) as u64;
    rep.degenerate = config.t_max > 0 && diffs.iter().all(Rat::is_zero);
    let exponent = config.exponent();
    rep.hits = config
        .k_ladder
        .iter()
        .map(|&k| hit_at(k, &a[k as usize - 1], &b[k as usize - 1], &config.eps, &exponent))
        .collect();
    Ok(rep)
}

fn median(mut xs: Vec<u64>) -> Rat {
    if xs.is_empty() {
        return Rat::zero();
    }
    xs.sort_unstable();
    let n = xs.len();
    Rat::new(xs[(n - 1) / 2] + xs[n / 2], 2u64)
}

fn summarize(per_pair: &[PairReport]) -> Summary {
    let live: Vec<&PairReport> = per_pair.iter().filter(|p| !p.budget_exceeded).collect();
    let counted: Vec<&PairReport> = live.iter().copied().filter(|p| !p.degenerate).collect();
    let changes: Vec<u64> = counted.iter().map(|p| p.sign_changes).collect();
    let hits = || live.iter().flat_map(|p| p.hits.iter());
    Summary {
        pairs: per_pair.len() as u64,
        degenerate: live.iter().filter(|p| p.degenerate).count() as u64,
        budget_exceeded: (per_pair.len() - live.len()) as u64,
        min_changes: changes.iter().copied().min().unwrap_or(0),
        max_changes: changes.iter().copied().max().unwrap_or(0),
        median_changes: median(changes.clone()),
        median_changes_at_tenth: median(counted.iter().map(|p| p.changes_at_tenth).collect()),
        without_change: changes.iter().filter(|&&c| c == 0).count() as u64,
        psi_hits: hits().filter(|h| h.in_psi).count() as u64,
        phi_hits: hits().filter(|h| h.in_phi).count() as u64,
        pairs_with_psi_hit: live.iter().filter(|p| p.hits.iter().any(|h| h.in_psi)).count() as u64,
        pairs_with_phi_hit: live.iter().filter(|p| p.hits.iter().any(|h| h.in_phi)).count() as u64,
        sign_violations: hits().filter(|h| !h.sign_ok).count() as u64,
        overlap_violations: hits().filter(|h| h.in_psi && h.in_phi).count() as u64,
    }
}

/// Sign sequences up to `T` and ladder hits for every sampled pair.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    config.validate()?;
    let per_pair = (0..config.pair_count)
        .into_par_iter()
        .map(|id| run_pair(config, id))
        .collect::<Result<Vec<_>>>()?;
    let summary = summarize(&per_pair);
    Ok(Report {
        config: config.clone(),
        per_pair,
        summary,
    })
}

/// [`run_experiment`] without the ladder.
pub fn run_sign_experiment(config: &ExperimentConfig) -> Result<Report> {
    let mut c = config.clone();
    c.k_ladder.clear();
    run_experiment(&c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::LabRegime;
    use crate::mc;
    use crate::psi::{psi_naive, MatrixTheta};

    fn r(s: &str) -> Rat {
        s.parse().unwrap()
    }

    #[test]
    fn identical_matrices_are_degenerate() {
        let th = MatrixTheta::simultaneous(vec![r("1/3"), r("2/7")]).unwrap();
        let pair = PairSample {
            id: 0,
            seed: 0,
            theta: th.clone(),
            theta2: th,
        };
        let hits = bc_hits(&pair, &[4, 8, 16], &r("1/10"), &r("1/2"), u64::MAX).unwrap();
        assert!(hits.iter().all(|h| !h.in_psi && !h.in_phi && h.sign_ok));
    }

    #[test]
    fn one_dimensional_hand_oracle() {
        // ψ for 2/7 and 1/3 at t = 1, 2, 3: (2/7, 1/7, 1/7) and (1/3, 1/3, 0)
        let a = MatrixTheta::single(r("2/7")).unwrap();
        let b = MatrixTheta::single(r("1/3")).unwrap();
        let s = crate::psi::sign_sequence(&a, &b, 10).unwrap();
        let mut hand = vec![];
        let mut last = 0i32;
        for t in 1..=10u64 {
            let d = psi_naive(&a, t).unwrap().value - psi_naive(&b, t).unwrap().value;
            let sg = d.signum();
            if sg != 0 {
                if last != 0 && sg != last {
                    hand.push(t);
                }
                last = sg;
            }
        }
        assert_eq!(s.change_positions, hand);
        assert_eq!(s.change_positions.first(), Some(&3));
    }

    #[test]
    fn hits_respect_sign_and_threshold() {
        let mut c = ExperimentConfig::new(LabRegime::Simultaneous(2), r("1/2"), 200, 10, 5);
        c.k_ladder = (16..=400).collect();
        let rep = run_experiment(&c).unwrap();
        assert_eq!(rep.summary.sign_violations, 0);
        assert_eq!(rep.summary.overlap_violations, 0);
        for p in &rep.per_pair {
            let pair = sample_pair(&c, p.id).unwrap();
            for h in p.hits.iter().step_by(37) {
                let direct = psi_naive(&pair.theta, h.k).unwrap().value;
                assert_eq!(direct, h.psi1);
                let m1 = crate::regions_md::membership_mbar_md(pair.theta.entries(), h.k, &c.eps)
                    .unwrap()
                    .member;
                let m2 = crate::regions_md::membership_mbar_md(pair.theta2.entries(), h.k, &c.eps)
                    .unwrap()
                    .member;
                assert_eq!(h.in_psi, !m1 && m2);
                assert_eq!(h.in_phi, m1 && !m2);
            }
        }
    }

    #[test]
    fn prefix_property_and_linear_form() {
        let mut c = ExperimentConfig::new(LabRegime::LinearForm, r("1/2"), 300, 6, 11);
        c.k_ladder = vec![16, 32, 64];
        let rep = run_experiment(&c).unwrap();
        for p in &rep.per_pair {
            assert!(p.changes_at_tenth <= p.sign_changes);
            assert!(p.change_positions.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(p.hits.len(), 3);
        }
        let rep2 = run_sign_experiment(&c).unwrap();
        assert!(rep2.per_pair.iter().all(|p| p.hits.is_empty()));
        assert_eq!(rep2.per_pair[0].change_positions, rep.per_pair[0].change_positions);
    }

    #[test]
    fn report_round_trip_and_determinism() {
        let mut c = ExperimentConfig::new(LabRegime::Simultaneous(2), r("1/3"), 150, 8, 99);
        c.k_ladder = vec![16, 32, 64, 128];
        let run = || run_experiment(&c).unwrap();
        let a = mc::with_threads(Some(1), run).unwrap();
        let b = mc::with_threads(Some(3), run).unwrap();
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(a.to_csv(), b.to_csv());
        let back = Report::from_json(&a.to_json()).unwrap();
        assert_eq!(back, a);
        assert_eq!(back.to_csv(), a.to_csv());
        assert!(a.to_csv().starts_with("id,sign_changes,k,psi1,psi2,in_Psi,in_Phi\n"));
        assert!(a.changes_csv().starts_with("id,t\n"));
    }

    #[test]
    fn median_values() {
        assert_eq!(median(vec![3, 1, 2]), Rat::from(2));
        assert_eq!(median(vec![4, 1, 2, 3]), r("5/2"));
        assert_eq!(median(vec![]), Rat::zero());
    }
}
