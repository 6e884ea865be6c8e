use std::path::{Path, PathBuf};

use psiosc::exactnum::Bracket;
use psiosc::geometry::ConvexPolygon;
use psiosc::lab::{self, density_sweep, ExperimentConfig, Report};
use psiosc::psi::{psi_at, psi_sweep_with_budget, sign_sequence_with_budget, MatrixTheta, DEFAULT_BUDGET};
use psiosc::regions2d::{
    jarnik_check, lemma1_count_check, lemma2_sum, lemma3_lemma4_band, measure_mbar_2d, CenterLattice, Square,
};
use psiosc::regions_md::{
    classify_pairs, lemma11_check, lemma14_first_sum_check, lemma5_lemma14_check, lemma6_sum, measure_mbar_md,
    pick_bound_check, totient_series_check, ClassifyMode, Cube, RectC, StripD,
};
use psiosc::{Error, Rat, Result};
use serde::Serialize;
use serde_json::Value;

use crate::args::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// The check says nothing at these parameters.
    Vacuous,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 2,
            Status::Vacuous => 3,
        }
    }

    fn verdict(self) -> &'static str {
        match self {
            Status::Pass => "OK",
            Status::Fail => "FAIL",
            Status::Vacuous => "VACUOUS",
        }
    }

    fn of(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// Text lines, the JSON form of the same result and files to write.
pub struct Outcome {
    pub status: Status,
    pub lines: Vec<String>,
    pub json: Value,
    pub files: Vec<(PathBuf, String)>,
}

impl Outcome {
    fn new(status: Status, lines: Vec<String>, report: &impl Serialize) -> Self {
        let json = serde_json::to_value(report).expect("reports serialize");
        Outcome {
            status,
            lines,
            json,
            files: vec![],
        }
    }

    fn with_verdict(mut self) -> Self {
        self.lines.push(self.status.verdict().to_string());
        self
    }

    fn file(mut self, dir: &Option<PathBuf>, name: String, body: String) -> Self {
        if let Some(d) = dir {
            self.files.push((d.join(name), body));
        }
        self
    }
}

fn show(x: &Rat) -> String {
    x.display_with_decimal()
}

fn show_bracket(b: &Bracket) -> String {
    if b.is_exact() {
        show(&b.lo)
    } else {
        format!("[{}, {}]", b.lo.to_decimal(12), b.hi.to_decimal(12))
    }
}

/// `<command>-<seed>-<k>.csv`.
fn file_name(command: &str, seed: u64, k: u64, ext: &str) -> String {
    format!("{command}-{seed}-{k}.{ext}")
}

fn need<T: Clone>(v: &Option<T>, name: &str, id: &str) -> Result<T> {
    v.clone()
        .ok_or_else(|| Error::Input(format!("lemma {id} needs --{name}")))
}

pub fn run(cmd: &Command, verbose: bool) -> Result<Outcome> {
    match cmd {
        Command::Psi(a) => psi(a),
        Command::Signs(a) => signs(a, verbose),
        Command::Measure2d(a) => measure2d(a),
        Command::MeasureMd(a) => measure_md(a),
        Command::Lemma(a) => lemma(a, verbose),
        Command::Experiment(a) => experiment(a),
        Command::Report(a) => report(a),
    }
}

fn build_theta(a: &ThetaArgs) -> Result<MatrixTheta> {
    let Shape { m, n } = a.regime;
    let entries = match (&a.entries, &a.alpha, &a.beta) {
        (Some(e), None, None) => e.clone(),
        (None, Some(al), be) => std::iter::once(al.clone()).chain(be.clone()).collect(),
        (None, None, _) => return Err(Error::Input("give --alpha (and --beta) or --entries".into())),
        _ => return Err(Error::Input("--entries excludes --alpha and --beta".into())),
    };
    if entries.len() != m * n {
        return Err(Error::Input(format!(
            "regime {m}x{n} needs {} entries, got {}",
            m * n,
            entries.len()
        )));
    }
    MatrixTheta::new(m, n, entries)
}

fn psi(a: &PsiArgs) -> Result<Outcome> {
    let theta = build_theta(&a.theta)?;
    if a.sweep {
        let mut recs = psi_sweep_with_budget(&theta, a.t, a.budget.unwrap_or(DEFAULT_BUDGET))?;
        recs.dedup_by(|later, earlier| later.value == earlier.value);
        let lines = recs
            .iter()
            .map(|r| format!("t = {}: {}  x = {:?}", r.t, show(&r.value), r.witness_x))
            .collect();
        let mut csv = String::from("t,value,witness_x\n");
        for r in &recs {
            let x: Vec<String> = r.witness_x.iter().map(|v| v.to_string()).collect();
            csv.push_str(&format!("{},{},{}\n", r.t, r.value, x.join(" ")));
        }
        return Ok(Outcome::new(Status::Pass, lines, &recs).file(&a.out_dir, file_name("psi", 0, a.t, "csv"), csv));
    }
    let rec = psi_at(&theta, a.t)?;
    let lines = vec![
        show(&rec.value),
        format!("x = {:?}, p = {:?}", rec.witness_x, rec.witness_p),
    ];
    Ok(Outcome::new(Status::Pass, lines, &rec))
}

fn signs(a: &SignsArgs, verbose: bool) -> Result<Outcome> {
    let Shape { m, n } = a.regime;
    let th = MatrixTheta::new(m, n, a.theta.clone())?;
    let th2 = MatrixTheta::new(m, n, a.theta2.clone())?;
    let seq = sign_sequence_with_budget(&th, &th2, a.t, a.budget.unwrap_or(DEFAULT_BUDGET))?;
    let degenerate = seq.is_identically_zero();
    let mut lines = vec![
        format!("sign changes up to t = {}: {}", a.t, seq.changes()),
        format!("at t = {}: {}", a.t / 10, seq.changes_up_to(a.t / 10)),
        format!("positions: {:?}", seq.change_positions),
    ];
    if degenerate {
        lines.push("psi_theta - psi_theta' vanishes identically".into());
    }
    if verbose {
        lines.extend(seq.values.iter().map(|(t, d)| format!("{t}: {}", show(d))));
    }
    let mut csv = String::from("t,diff\n");
    for (t, d) in &seq.values {
        csv.push_str(&format!("{t},{d}\n"));
    }
    let status = if degenerate { Status::Vacuous } else { Status::Pass };
    Ok(Outcome::new(status, lines, &seq).file(&a.out_dir, file_name("signs", 0, a.t, "csv"), csv))
}

fn square(side: &Rat, corner: &Option<Vec<Rat>>) -> Result<Square> {
    match corner {
        None => Square::centered(side.clone()),
        Some(c) if c.len() == 2 => Square::new((c[0].clone(), c[1].clone()), side.clone()),
        Some(c) => Err(Error::Input(format!("--corner needs 2 coordinates, got {}", c.len()))),
    }
}

fn cube(m: usize, side: &Rat, corner: &Option<Vec<Rat>>) -> Result<Cube> {
    match corner {
        None => Cube::centered(m, side.clone()),
        Some(c) if c.len() == m => Cube::new(c.clone(), side.clone()),
        Some(c) => Err(Error::Input(format!("--corner needs {m} coordinates, got {}", c.len()))),
    }
}

fn estimate_lines(value: &Rat, ci: &Rat, samples: u64) -> Vec<String> {
    vec![
        format!("measure = {}", show(value)),
        format!("ci halfwidth = {}", show(ci)),
        format!("samples = {samples}"),
    ]
}

fn measure2d(a: &Measure2dArgs) -> Result<Outcome> {
    let s = square(&a.side, &a.corner)?;
    let est = measure_mbar_2d(a.k, &a.eps, &s, a.method, a.samples, a.seed)?;
    let csv = format!(
        "k,eps,method,samples,value,ci_halfwidth\n{},{},{},{},{},{}\n",
        a.k, a.eps, est.method, est.samples, est.value, est.ci_halfwidth
    );
    let lines = estimate_lines(&est.value, &est.ci_halfwidth, est.samples);
    Ok(Outcome::new(Status::Pass, lines, &est).file(&a.out_dir, file_name("measure2d", a.seed, a.k, "csv"), csv))
}

fn measure_md(a: &MeasureMdArgs) -> Result<Outcome> {
    let c = cube(a.m, &a.side, &a.corner)?;
    let est = measure_mbar_md(a.k, &a.eps, a.m, &c, a.samples, a.seed)?;
    let csv = format!(
        "k,eps,m,samples,value,ci_halfwidth,bernstein_halfwidth\n{},{},{},{},{},{},{}\n",
        a.k, a.eps, a.m, est.samples, est.value, est.ci_halfwidth, est.bernstein_halfwidth
    );
    let lines = estimate_lines(&est.value, &est.ci_halfwidth, est.samples);
    Ok(Outcome::new(Status::Pass, lines, &est).file(&a.out_dir, file_name("measure-md", a.seed, a.k, "csv"), csv))
}

fn polygon(a: &LemmaArgs) -> Result<ConvexPolygon> {
    ConvexPolygon::new(need(&a.vertices, "vertices", &a.id)?)
}

fn lemma(a: &LemmaArgs, verbose: bool) -> Result<Outcome> {
    let id = a.id.as_str();
    let out = match id {
        "1" => {
            let lattice = CenterLattice::new(need(&a.x, "x", id)?, need(&a.y, "y", id)?)?;
            let s = square(&need(&a.lam, "lam", id)?, &a.corner)?;
            let rep = lemma1_count_check(&lattice, &s)?;
            let lines = vec![
                format!("delta = {}", lattice.delta),
                format!("lattice points in S: {}", rep.count),
                format!("bound: {}", show_bracket(&rep.bound)),
            ];
            Outcome::new(Status::of(rep.ok), lines, &rep)
        }
        "2" => {
            let rep = lemma2_sum(need(&a.k, "k", id)?)?;
            let lines = vec![
                format!("sum = {} = {}", rep.split_display(), show(&rep.sum)),
                format!("9 k^2 ln k in {}", show_bracket(&rep.bound)),
            ];
            Outcome::new(Status::of(rep.bound_ok), lines, &rep)
        }
        "3" | "4" => {
            let (k, eps) = (need(&a.k, "k", id)?, need(&a.eps, "eps", id)?);
            let s = square(&need(&a.lam, "lam", id)?, &a.corner)?;
            let est = measure_mbar_2d(k, &eps, &s, a.method, a.samples, a.seed)?;
            let rep = lemma3_lemma4_band(k, &eps, &s, &est)?;
            let mut lines = estimate_lines(&rep.value, &rep.ci_halfwidth, est.samples);
            let status = if id == "3" {
                lines.push(format!("lower band {}", show_bracket(&rep.lower_band)));
                lines.push(format!("upper band {}", show(&rep.upper_band)));
                lines.push(format!("lower margin {}", rep.lower_margin.to_decimal(12)));
                lines.push(format!("upper margin {}", rep.upper_margin.to_decimal(12)));
                match (rep.upper_ok, rep.lower_ok && !rep.vacuous_lower) {
                    (false, _) => Status::Fail,
                    (true, true) => Status::Pass,
                    // the lower band only holds beyond an unspecified K₀
                    (true, false) => Status::Vacuous,
                }
            } else {
                lines.push(format!("complement = {}", show(&rep.complement)));
                lines.push(format!("complement bound = {}", show(&rep.complement_bound)));
                Status::of(rep.complement_ok)
            };
            Outcome::new(status, lines, &rep)
        }
        "5" | "14" => {
            let (k, eps) = (need(&a.k, "k", id)?, need(&a.eps, "eps", id)?);
            let m = a.m.unwrap_or(2);
            let c = cube(m, &a.lam.clone().unwrap_or_else(Rat::one), &a.corner)?;
            let est = measure_mbar_md(k, &eps, m, &c, a.samples, a.seed)?;
            let rep = lemma5_lemma14_check(k, &eps, m, &c, &est)?;
            let mut lines = estimate_lines(&rep.value, &rep.ci_halfwidth, est.samples);
            if id == "5" {
                lines.push(format!("upper band {}", show(&rep.upper_band)));
                lines.push(format!("complement = {}", show(&rep.complement)));
                lines.push(format!("complement bound = {}", show(&rep.complement_bound)));
                let status = Status::of(rep.upper_ok && rep.complement_ok);
                Outcome::new(status, lines, &rep)
            } else {
                lines.push(format!("lower band {}", show(&rep.lower_band)));
                lines.push(format!("lower margin {}", rep.lower_margin.to_decimal(12)));
                let mut status = match (rep.vacuous_lower, rep.lower_ok) {
                    (true, _) => Status::Vacuous,
                    (false, ok) => Status::of(ok),
                };
                let mut json = serde_json::json!({ "bands": rep });
                if a.first_sum {
                    let delta = a.delta.clone().unwrap_or_else(|| Rat::new(1, 10));
                    let fs = lemma14_first_sum_check(k, &eps, m, &c, &delta)?;
                    lines.push(format!("first sum {}", show_bracket(&fs.sum_bracket)));
                    lines.push(format!("first sum bound {}", show(&fs.bound)));
                    if !fs.precondition {
                        lines.push("delta lam k < 4: first sum bound not applicable".into());
                    } else if !fs.ok {
                        status = Status::Fail;
                    }
                    json["first_sum"] = serde_json::to_value(&fs).expect("reports serialize");
                }
                Outcome {
                    status,
                    lines,
                    json,
                    files: vec![],
                }
            }
        }
        "6" => {
            let rep = lemma6_sum(need(&a.k, "k", id)?, need(&a.m, "m", id)?)?;
            let lines = vec![
                format!("sum = {}", show(&rep.sum)),
                format!("bound 2k/5 = {}", show(&rep.bound)),
            ];
            Outcome::new(Status::of(rep.ok), lines, &rep)
        }
        "7" | "pick" => {
            let rep = pick_bound_check(&polygon(a)?)?;
            let lines = if id == "7" {
                vec![
                    format!("integer points N = {}", rep.n),
                    format!("area = {}", show(&rep.region_area)),
                    format!(
                        "2 * hull area + 2 = {}",
                        show(&(Rat::from(2) * &rep.hull_area + Rat::from(2)))
                    ),
                ]
            } else {
                vec![
                    format!("hull area = {}", show(&rep.hull_area)),
                    format!("interior I = {}, boundary B = {}", rep.interior, rep.boundary),
                    format!(
                        "I + B/2 - 1 = {}",
                        show(&(Rat::from(rep.interior) + Rat::new(rep.boundary, 2u64) - Rat::one()))
                    ),
                ]
            };
            Outcome::new(Status::of(rep.ok), lines, &rep)
        }
        "jarnik" => {
            let rep = jarnik_check(&polygon(a)?)?;
            let lines = vec![
                format!("N = {}", rep.n),
                format!("P = {}", show(&rep.area)),
                format!("L in {}", show_bracket(&rep.perimeter)),
            ];
            Outcome::new(Status::of(rep.ok), lines, &rep)
        }
        "11" => {
            let (q1, q2) = (need(&a.q1, "q1", id)?, need(&a.q2, "q2", id)?);
            let (k, eps, m) = (need(&a.k, "k", id)?, need(&a.eps, "eps", id)?, a.m.unwrap_or(2));
            let lam = a.lam.clone().unwrap_or_else(Rat::one);
            let delta = a.delta.clone().unwrap_or_else(|| Rat::new(1, 10));
            let strip = StripD::new(q1, q2, eps, k, m)?;
            let rep = lemma11_check(&strip, &lam, &RectC::c0(q1, q2, &lam, &delta))?;
            let lines = vec![
                format!("d = {}", strip.d),
                format!("#(D ∩ C0)^m = {}", Rat::from(rep.count).pow(m as i32)),
                format!("bound^m = {}", show(&rep.bound_pow_m)),
            ];
            Outcome::new(Status::of(rep.ok), lines, &rep)
        }
        "12" | "13" => {
            let (k, eps) = (need(&a.k, "k", id)?, need(&a.eps, "eps", id)?);
            let lam = a.lam.clone().unwrap_or_else(Rat::one);
            let delta = a.delta.clone().unwrap_or_else(|| Rat::new(1, 10));
            let mode = match a.sample {
                Some(n) => ClassifyMode::Sampled { n, seed: a.seed },
                None => ClassifyMode::Full,
            };
            let rep = classify_pairs(k, a.m.unwrap_or(2), &eps, &lam, &delta, mode)?;
            let mut lines = vec![
                format!("|Tr_k| = {}, checked {}", rep.tr_size, rep.pairs_checked),
                format!("J0 = {}, J1 = {}, V = {}", rep.j0, rep.j1, rep.v),
                format!("regime gate (1+delta) eps lam k^(1-1/m) > 6: {}", rep.regime_ok),
            ];
            let status = if id == "12" {
                lines.push(format!("violations: {}", rep.violations.len()));
                if verbose {
                    lines.extend(
                        rep.violations
                            .iter()
                            .map(|(q1, q2, v)| format!("  ({q1}, {q2}): {v:?}")),
                    );
                }
                match (rep.violations.is_empty(), rep.regime_ok) {
                    (true, _) => Status::Pass,
                    (false, true) => Status::Fail,
                    (false, false) => Status::Vacuous,
                }
            } else {
                lines.push(format!(
                    "bound 2k^(1+3/(2m))/(lam eps^2) ~ {:.6e}",
                    rep.lemma13_bound_approx
                ));
                lines.push(format!("#J1 / bound ~ {:.6e}", rep.lemma13_ratio));
                if rep.lemma13_trivial {
                    lines.push("bound exceeds |Tr_k|".into());
                }
                Status::of(rep.lemma13_j1_ok && rep.lemma13_v_ok)
            };
            Outcome::new(status, lines, &rep)
        }
        "totient" => {
            let rep = totient_series_check(need(&a.m, "m", id)?, need(&a.p, "p", id)?)?;
            let lines = vec![
                format!("partial sum in {}", show_bracket(&rep.partial)),
                format!("zeta(m-1)/zeta(m) in {}", show_bracket(&rep.target)),
                format!("tail bound {}", show(&rep.tail)),
            ];
            Outcome::new(Status::of(rep.ok), lines, &rep)
        }
        other => {
            return Err(Error::Input(format!(
                "unknown lemma {other:?}; expected one of 1, 2, 3, 4, 5, 6, 7, 11, 12, 13, 14, jarnik, pick, totient"
            )))
        }
    };
    Ok(out.with_verdict())
}

fn experiment_config(a: &ExperimentArgs) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig::new(a.regime, a.eps.clone(), a.t, a.pairs, a.seed);
    c.lam = a.lam.clone();
    c.delta = a.delta.clone();
    c.denom_bits = a.denom_bits;
    c.exponent = a.exponent.clone();
    if let Some(b) = a.budget {
        c.budget = b;
    }
    if let Some(l) = &a.ladder {
        c.k_ladder = l.clone();
    }
    c.validate()?;
    Ok(c)
}

fn summary_lines(rep: &Report) -> Vec<String> {
    let s = &rep.summary;
    vec![
        format!(
            "pairs {} (degenerate {}, over budget {})",
            s.pairs, s.degenerate, s.budget_exceeded
        ),
        format!(
            "sign changes up to t = {}: min {}, median {}, max {}",
            rep.config.t_max, s.min_changes, s.median_changes, s.max_changes
        ),
        format!("median at t = {}: {}", rep.config.t_max / 10, s.median_changes_at_tenth),
        format!("pairs without a change: {}", s.without_change),
        format!(
            "Psi hits {} on {} pairs, Phi hits {} on {} pairs",
            s.psi_hits, s.pairs_with_psi_hit, s.phi_hits, s.pairs_with_phi_hit
        ),
        format!(
            "sign violations {}, overlap violations {}",
            s.sign_violations, s.overlap_violations
        ),
    ]
}

fn experiment(a: &ExperimentArgs) -> Result<Outcome> {
    let config = experiment_config(a)?;
    if a.mode == Mode::Density {
        let rep = density_sweep(&config, a.k, a.samples)?;
        let lines = vec![
            format!(
                "P(Psi) = {} ({} of {})",
                rep.p_psi.to_decimal(12),
                rep.psi_count,
                rep.samples
            ),
            format!(
                "P(Phi) = {} ({} of {})",
                rep.p_phi.to_decimal(12),
                rep.phi_count,
                rep.samples
            ),
            format!("bernstein halfwidth {}", rep.bernstein_psi.to_decimal(12)),
            format!("hoeffding halfwidth {}", rep.hoeffding_halfwidth.to_decimal(12)),
            format!("band {}", show(&rep.band)),
            format!("margin {}", rep.margin.to_decimal(12)),
            format!("symmetric within CI: {}", rep.symmetric),
        ];
        let status = if rep.vacuous {
            Status::Vacuous
        } else {
            Status::of(rep.ok)
        };
        let json = serde_json::to_string_pretty(&rep).expect("reports serialize") + "\n";
        return Ok(Outcome::new(status, lines, &rep)
            .file(&a.out_dir, file_name("density", a.seed, a.k, "json"), json)
            .with_verdict());
    }
    let rep = match a.mode {
        Mode::Signs => lab::run_sign_experiment(&config)?,
        _ => lab::run_experiment(&config)?,
    };
    let k = rep.config.k_ladder.last().copied().unwrap_or(rep.config.t_max);
    let out = Outcome::new(Status::of(rep.summary.ok()), summary_lines(&rep), &rep)
        .file(&a.out_dir, file_name("experiment", a.seed, k, "json"), rep.to_json())
        .file(&a.out_dir, file_name("experiment", a.seed, k, "csv"), rep.to_csv())
        .file(
            &a.out_dir,
            format!("experiment-{}-{k}-changes.csv", a.seed),
            rep.changes_csv(),
        );
    Ok(out.with_verdict())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn report(a: &ReportArgs) -> Result<Outcome> {
    let rep = Report::from_json(&read(&a.input)?)?;
    let csv = if a.changes { rep.changes_csv() } else { rep.to_csv() };
    let mut out = Outcome {
        status: Status::Pass,
        lines: vec![],
        json: Value::Null,
        files: vec![],
    };
    match &a.out {
        Some(p) => out.files.push((p.clone(), csv)),
        None => out.lines.push(csv.trim_end_matches('\n').to_string()),
    }
    Ok(out)
}
