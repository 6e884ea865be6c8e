//! Acceptance run. Every criterion runs at its pinned tolerance and prints one
//! `PASS`/`FAIL` line; the process fails if any criterion fails or overruns
//! its time budget.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_integer::Integer;
use psiosc::geometry::{convex_hull, ConvexPolygon};
use psiosc::lab::{
    bc_hits, density_sweep, run_experiment, sample_pair, ExperimentConfig, HitRecord, LabRegime, Report,
};
use psiosc::mc::{stream, with_threads};
use psiosc::psi::{psi_cf_1d, psi_form2_sweep, psi_naive, psi_simul_sweep, psi_values, MatrixTheta, DEFAULT_BUDGET};
use psiosc::regions2d::{
    jarnik_check, lemma1_count_check, lemma2_sum, lemma3_lemma4_band, measure_mbar_2d, CenterLattice, Method, Square,
};
use psiosc::regions_md::{
    classify_pairs, lemma11_check, lemma5_lemma14_check, lemma6_sum, measure_mbar_md, pick_bound_check, ClassifyMode,
    Cube, RectC, StripD,
};
use psiosc::{nearest_int_distance, Error, Rat};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<Vec<String>, String>;

/// Name, check and time budget in seconds.
type Criterion = (&'static str, fn() -> Outcome, u64);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn r(s: &str) -> Rat {
    s.parse().unwrap()
}

fn rng(tag: u64) -> ChaCha8Rng {
    stream(0xacce_97ed, tag)
}

/// `p/q` with `q` uniform in `1..2^64` and `p` uniform in `0..=q`.
fn rat64(g: &mut ChaCha8Rng) -> Rat {
    let q: u64 = g.random_range(1..=u64::MAX);
    Rat::new(g.random_range(0..=q), q)
}

fn secs(d: Duration) -> String {
    format!("{:.1} s", d.as_secs_f64())
}

/// `ψ_Θ(1), …, ψ_Θ(t_max)` from one pass over the box `max|xᵢ| ≤ t_max`.
fn brute_force(theta: &MatrixTheta, t_max: u64) -> Vec<Rat> {
    let n = theta.n();
    let t = t_max as i64;
    let mut best: Vec<Option<Rat>> = vec![None; t_max as usize + 1];
    let mut x = vec![-t; n];
    loop {
        let level = x.iter().map(|v| v.unsigned_abs()).max().unwrap() as usize;
        if level > 0 {
            let v = (0..theta.m())
                .map(|j| {
                    let dot: Rat = theta.row(j).iter().zip(&x).map(|(a, &xi)| a * &Rat::from(xi)).sum();
                    nearest_int_distance(&dot)
                })
                .reduce(Rat::max)
                .unwrap();
            if best[level].as_ref().is_none_or(|b| v < *b) {
                best[level] = Some(v);
            }
        }
        let Some(i) = x.iter().position(|&v| v < t) else { break };
        x[i] += 1;
        x[..i].iter_mut().for_each(|v| *v = -t);
    }
    let mut out = Vec::with_capacity(t_max as usize);
    let mut run: Option<Rat> = None;
    for b in best.into_iter().skip(1) {
        run = match (run, b) {
            (Some(r), Some(b)) => Some(r.min(b)),
            (r, b) => r.or(b),
        };
        out.push(run.clone().unwrap());
    }
    out
}

/// Oracle equivalence of the fast ψ algorithms with brute force.
fn criterion1() -> Outcome {
    let mut g = rng(1);
    for i in 0..1000 {
        let a = rat64(&mut g);
        let t = if i % 10 == 0 { 1000 } else { g.random_range(1..=1000) };
        let fast = psi_cf_1d(&a, t).map_err(|e| e.to_string())?;
        let slow = psi_naive(&MatrixTheta::single(a.clone()).unwrap(), t).unwrap();
        ensure!(
            fast.value == slow.value,
            "cf {} != naive {} at alpha = {a}, t = {t}",
            fast.value,
            slow.value
        );
    }
    for i in 0..100 {
        let (a, b) = (rat64(&mut g), rat64(&mut g));
        let sweep = psi_form2_sweep(&a, &b, 30).unwrap();
        let theta = MatrixTheta::linear_form(a.clone(), b.clone()).unwrap();
        let oracle = brute_force(&theta, 30);
        ensure!(sweep.len() == 30, "form2 sweep has {} records", sweep.len());
        for (rec, want) in sweep.iter().zip(&oracle) {
            ensure!(rec.value == *want, "form2 sweep differs at ({a}, {b}), t = {}", rec.t);
        }
        ensure!(
            psi_naive(&theta, 30).unwrap().value == oracle[29],
            "psi_naive differs at ({a}, {b})"
        );
        let alphas: Vec<Rat> = (0..2 + i % 2).map(|_| rat64(&mut g)).collect();
        let sweep = psi_simul_sweep(&alphas, 30).unwrap();
        let theta = MatrixTheta::simultaneous(alphas.clone()).unwrap();
        ensure!(sweep.len() == 30, "simultaneous sweep has {} records", sweep.len());
        for rec in &sweep {
            let slow = psi_naive(&theta, rec.t).unwrap();
            ensure!(
                rec.value == slow.value,
                "simultaneous sweep differs at {alphas:?}, t = {}",
                rec.t
            );
        }
    }
    Ok(vec![
        "1000 continued-fraction values and 200 sweeps of length 30 agree with brute force".into(),
    ])
}

/// Dirichlet's pigeonhole bounds.
fn criterion2() -> Outcome {
    let mut g = rng(2);
    for _ in 0..1000 {
        let theta = MatrixTheta::linear_form(rat64(&mut g), rat64(&mut g)).unwrap();
        let v = psi_values(&theta, 100, DEFAULT_BUDGET).unwrap();
        for (i, psi) in v.iter().enumerate() {
            let t = i as u64 + 1;
            ensure!(
                *psi <= Rat::new(1, t * t + 2 * t),
                "psi({t}) = {psi} above 1/(t^2+2t) for {:?}",
                theta.entries()
            );
        }
    }
    for i in 0..1000 {
        let (m, q_max) = if i % 2 == 0 { (2u32, 30u64) } else { (3, 10) };
        let theta = MatrixTheta::simultaneous((0..m).map(|_| rat64(&mut g)).collect()).unwrap();
        let v = psi_values(&theta, q_max.pow(m), DEFAULT_BUDGET).unwrap();
        for q in 1..=q_max {
            let psi = &v[q.pow(m) as usize - 1];
            ensure!(
                *psi <= Rat::new(1, q),
                "psi(Q^m) = {psi} above 1/{q} for {:?}",
                theta.entries()
            );
        }
    }
    Ok(vec![
        "1000 linear forms up to t = 100 and 1000 simultaneous matrices: no violation".into(),
    ])
}

/// Σ 1/Δ over ordered pairs of distinct primitive vectors of `[k/2, k]²`.
fn lemma2_oracle(k: i64) -> Rat {
    let e: Vec<(i64, i64)> = (1..=k)
        .flat_map(|a| (1..=k).map(move |b| (a, b)))
        .filter(|&(a, b)| 2 * a >= k && 2 * b >= k && a.gcd(&b) == 1)
        .collect();
    let mut sum = Rat::zero();
    for (i, x) in e.iter().enumerate() {
        for y in &e[i + 1..] {
            sum += Rat::new(2, (x.0 * y.1 - x.1 * y.0).abs());
        }
    }
    sum
}

/// Σ gcd(q₁, q₂)^m / q₂^m over `⌈k/2⌉ ≤ q₁ < q₂ ≤ k`.
fn lemma6_oracle(k: u64, m: u32) -> Rat {
    let mut sum = Rat::zero();
    for q2 in k.div_ceil(2)..=k {
        let row: u128 = (k.div_ceil(2)..q2).map(|q1| (q1.gcd(&q2) as u128).pow(m)).sum();
        sum += Rat::new(row, (q2 as u128).pow(m));
    }
    sum
}

/// Exact sums against their bounds.
fn criterion3() -> Outcome {
    let mut lines = vec![];
    for k in [4u64, 16, 64, 128] {
        let rep = lemma2_sum(k).unwrap();
        ensure!(rep.bound_ok, "lemma 2 sum {} exceeds 9k^2 ln k at k = {k}", rep.sum);
        if k <= 16 {
            ensure!(
                rep.sum == lemma2_oracle(k as i64),
                "lemma 2 sum {} differs from the oracle at k = {k}",
                rep.sum
            );
        }
        let bound = 9.0 * (k * k) as f64 * (k as f64).ln();
        lines.push(format!("lemma 2, k = {k}: {} <= {bound:.1}", rep.sum.to_decimal(8)));
    }
    let four = lemma2_sum(4).unwrap();
    ensure!(
        four.sum == r("562/105") && four.split_display() == "4+142/105",
        "k = 4 gives {}",
        four.split_display()
    );
    for m in [2usize, 3] {
        for k in [4u64, 100, 500] {
            let rep = lemma6_sum(k, m).unwrap();
            ensure!(
                rep.ok && rep.sum <= Rat::new(2 * k, 5u64),
                "lemma 6 sum {} exceeds 2k/5 at m = {m}, k = {k}",
                rep.sum
            );
            ensure!(
                rep.sum == lemma6_oracle(k, m as u32),
                "lemma 6 sum differs from the oracle at m = {m}, k = {k}"
            );
            lines.push(format!(
                "lemma 6, m = {m}, k = {k}: {} <= {}",
                rep.sum.to_decimal(8),
                rep.bound
            ));
        }
    }
    ensure!(
        lemma6_sum(4, 2).unwrap().sum == r("61/144"),
        "lemma 6 at m = 2, k = 4 is not 61/144"
    );
    Ok(lines)
}

/// Integer points of the convex polygon with counter-clockwise vertices
/// `v/den`, by direct enumeration.
fn lattice_count(v: &[(i64, i64)], den: i64) -> u64 {
    let (x0, x1) = (
        v.iter().map(|p| p.0).min().unwrap(),
        v.iter().map(|p| p.0).max().unwrap(),
    );
    let (y0, y1) = (
        v.iter().map(|p| p.1).min().unwrap(),
        v.iter().map(|p| p.1).max().unwrap(),
    );
    let mut n = 0;
    for x in x0.div_euclid(den)..=-(-x1).div_euclid(den) {
        for y in y0.div_euclid(den)..=-(-y1).div_euclid(den) {
            let (px, py) = (x as i128 * den as i128, y as i128 * den as i128);
            let inside = (0..v.len()).all(|i| {
                let (a, b) = (v[i], v[(i + 1) % v.len()]);
                let (ax, ay) = (a.0 as i128, a.1 as i128);
                (b.0 as i128 - ax) * (py - ay) - (b.1 as i128 - ay) * (px - ax) >= 0
            });
            n += inside as u64;
        }
    }
    n
}

/// Twice the area of a counter-clockwise polygon.
fn twice_area(v: &[(i64, i64)]) -> i128 {
    (0..v.len())
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % v.len()]);
            a.0 as i128 * b.1 as i128 - a.1 as i128 * b.0 as i128
        })
        .sum()
}

fn random_hull(g: &mut ChaCha8Rng, range: i64) -> Vec<(i64, i64)> {
    loop {
        let n = g.random_range(3..=9);
        let pts: Vec<(i64, i64)> = (0..n)
            .map(|_| (g.random_range(-range..=range), g.random_range(-range..=range)))
            .collect();
        let hull = convex_hull(&pts);
        if hull.len() >= 3 {
            return hull;
        }
    }
}

/// Lattice centers in the square, counted by enumerating `q = M·p`.
fn lemma1_oracle(x: (i64, i64), y: (i64, i64), corner: &(Rat, Rat), side: &Rat) -> u64 {
    let det = x.0 * y.1 - x.1 * y.0;
    let corners = [
        corner.clone(),
        (&corner.0 + side, corner.1.clone()),
        (corner.0.clone(), &corner.1 + side),
        (&corner.0 + side, &corner.1 + side),
    ];
    let image = |row: (i64, i64)| -> (i64, i64) {
        let vals: Vec<Rat> = corners
            .iter()
            .map(|c| Rat::from(row.0) * &c.0 + Rat::from(row.1) * &c.1)
            .collect();
        let lo = vals.iter().cloned().reduce(Rat::min).unwrap().floor();
        let hi = vals.iter().cloned().reduce(Rat::max).unwrap().ceil();
        (lo.try_into().unwrap(), hi.try_into().unwrap())
    };
    let ((a0, a1), (b0, b1)) = (image(x), image(y));
    let inside = |v: &Rat, lo: &Rat| lo <= v && *v <= lo + side;
    let mut n = 0;
    for q1 in a0..=a1 {
        for q2 in b0..=b1 {
            let alpha = Rat::new(y.1 * q1 - x.1 * q2, det);
            let beta = Rat::new(x.0 * q2 - y.0 * q1, det);
            n += (inside(&alpha, &corner.0) && inside(&beta, &corner.1)) as u64;
        }
    }
    n
}

/// Counting estimates on random configurations.
fn criterion4() -> Outcome {
    let mut g = rng(4);
    for _ in 0..1000 {
        let hull = random_hull(&mut g, 25);
        let rep = jarnik_check(&ConvexPolygon::from_i64(&hull).unwrap()).unwrap();
        ensure!(
            rep.n == lattice_count(&hull, 1),
            "Jarnik point count {} wrong for {hull:?}",
            rep.n
        );
        ensure!(
            rep.area == Rat::new(twice_area(&hull), 2),
            "Jarnik area wrong for {hull:?}"
        );
        ensure!(rep.ok, "P - L < N < P + L fails for {hull:?}");
    }
    let (mut pick, mut skipped) = (0, 0);
    while pick < 10_000 {
        let den = g.random_range(1..=6);
        let hull = random_hull(&mut g, 6 * den);
        let verts = hull
            .iter()
            .map(|&(a, b)| (Rat::new(a, den), Rat::new(b, den)))
            .collect();
        let n = lattice_count(&hull, den);
        match pick_bound_check(&ConvexPolygon::new(verts).unwrap()) {
            Ok(rep) => {
                ensure!(rep.n == n, "Pick count {} != {n} for {hull:?}/{den}", rep.n);
                let mu = Rat::new(twice_area(&hull), 2 * den * den);
                ensure!(
                    rep.ok && Rat::from(n) <= Rat::from(2) * mu + Rat::from(2),
                    "N <= 2mu + 2 fails for {hull:?}/{den}"
                );
                pick += 1;
            }
            Err(Error::Precondition(_)) => skipped += 1,
            Err(e) => return Err(format!("Pick check failed on {hull:?}/{den}: {e}")),
        }
    }
    let mut lemma1 = 0;
    while lemma1 < 1000 {
        let j: i64 = g.random_range(2..=5);
        let lam = Rat::new(1, j);
        let mut entry = || g.random_range(j + 1..=j + 30);
        let (x, y) = ((entry(), entry()), (entry(), entry()));
        if x.0 * y.1 == x.1 * y.0 {
            continue;
        }
        let room = 100 - 100 / j;
        let corner = (
            Rat::new(g.random_range(0..=room), 100),
            Rat::new(g.random_range(0..=room), 100),
        );
        let square = Square::new(corner.clone(), lam.clone()).unwrap();
        let rep = lemma1_count_check(&CenterLattice::new(x, y).unwrap(), &square).unwrap();
        let n = lemma1_oracle(x, y, &corner, &lam);
        ensure!(rep.count == n, "lemma 1 count {} != {n} for {x:?}, {y:?}", rep.count);
        ensure!(rep.ok, "lemma 1 bound fails for {x:?}, {y:?}, lambda = {lam}");
        lemma1 += 1;
    }
    let (k, eps, lam, delta) = (1000u64, r("1/5"), Rat::one(), r("1/10"));
    for _ in 0..1000 {
        let q1 = g.random_range(k / 2..k);
        let q2 = g.random_range(q1 + 1..=k);
        let strip = StripD::new(q1, q2, eps.clone(), k, 2).unwrap();
        let rep = lemma11_check(&strip, &lam, &RectC::c0(q1, q2, &lam, &delta)).unwrap();
        ensure!(rep.ok, "lemma 11 count {} exceeds its bound at ({q1}, {q2})", rep.count);
    }
    Ok(vec![
        "Jarnik: 1000 lattice polygons".into(),
        format!("Pick: 10000 rational polygons ({skipped} without three non-collinear integer points skipped)"),
        "lemma 1: 1000 configurations; lemma 11: 1000 pairs of Tr_1000".into(),
    ])
}

/// Exact fiber integration against point Monte Carlo.
fn criterion5() -> Outcome {
    let (k, eps, n) = (8, r("1/10"), 1_000_000u64);
    let unit = Square::unit();
    let exact = measure_mbar_2d(k, &eps, &unit, Method::ExactFiberIntegration, 0, 0).unwrap();
    let mc = measure_mbar_2d(k, &eps, &unit, Method::PointMc, n, 5).unwrap();
    let diff = &exact.value - &mc.value;
    // |diff| ≤ 4σ/√n with σ ≤ 1/2
    ensure!(
        &diff * &diff * Rat::from(n) <= Rat::from(4),
        "exact {} vs MC {}",
        exact.value,
        mc.value
    );
    Ok(vec![
        format!("exact {}", exact.value.to_decimal(10)),
        format!(
            "point MC {} (|diff| = {}, 4 sigma = 0.002)",
            mc.value.to_decimal(10),
            diff.abs().to_decimal(4)
        ),
    ])
}

/// Upper band, lower-band trend and complement in the linear-form regime.
fn criterion6() -> Outcome {
    let (eps, lam) = (r("1/100"), r("1/2"));
    let s = Square::centered(lam.clone()).unwrap();
    let upper = Rat::from(5) * &eps * &lam * &lam;
    let mut lines = vec![];
    let mut margins = vec![];
    for k in [50u64, 100] {
        let est = measure_mbar_2d(k, &eps, &s, Method::FiberMc, 2000, 6).unwrap();
        let rep = lemma3_lemma4_band(k, &eps, &s, &est).unwrap();
        ensure!(
            rep.upper_band == upper,
            "upper band {} is not 5 eps lambda^2",
            rep.upper_band
        );
        ensure!(
            &rep.value - &rep.ci_halfwidth <= upper,
            "k = {k}: estimate - CI above {upper}"
        );
        ensure!(
            rep.complement_ok,
            "k = {k}: complement {} below {}",
            rep.complement,
            rep.complement_bound
        );
        lines.push(format!(
            "k = {k}: estimate {} +- {}, lower margin {}, lower band met: {}",
            rep.value.to_decimal(6),
            rep.ci_halfwidth.to_decimal(3),
            rep.lower_margin.to_decimal(4),
            rep.lower_ok
        ));
        margins.push((rep.lower_margin, rep.ci_halfwidth));
    }
    let ((m50, c50), (m100, c100)) = (&margins[0], &margins[1]);
    ensure!(m100 + c100 + c50 >= *m50, "lower margin degrades from {m50} to {m100}");
    Ok(lines)
}

/// Bands of the simultaneous regime with m = 2.
fn criterion7() -> Outcome {
    let (k, eps, n) = (1000, r("1/100"), 10_000_000u64);
    let cube = Cube::unit(2);
    let est = measure_mbar_md(k, &eps, 2, &cube, n, 7).unwrap();
    let rep = lemma5_lemma14_check(k, &eps, 2, &cube, &est).unwrap();
    // (2ε)²/6 − (68ε²)²/4 and 2(4ε)²
    let lower = Rat::from(4) * &eps * &eps / Rat::from(6) - (Rat::from(68) * &eps * &eps).pow(2) / Rat::from(4);
    let upper = Rat::from(32) * &eps * &eps;
    ensure!(
        lower == r("4133/75000000") && upper == r("2/625"),
        "oracle bands {lower}, {upper}"
    );
    ensure!(
        rep.lower_band == lower && rep.upper_band == upper,
        "bands {} and {}",
        rep.lower_band,
        rep.upper_band
    );
    let ci = &est.ci_halfwidth;
    ensure!(&est.value + ci >= lower, "estimate {} + CI below {lower}", est.value);
    ensure!(&est.value - ci <= upper, "estimate {} - CI above {upper}", est.value);
    ensure!(
        rep.complement_ok,
        "complement {} below {}",
        rep.complement,
        rep.complement_bound
    );
    Ok(vec![format!(
        "estimate {} +- {} in [{}, {}]",
        est.value.to_decimal(6),
        ci.to_decimal(3),
        lower.to_decimal(4),
        upper.to_decimal(3)
    )])
}

/// Full classification of Tr_1000.
fn criterion8() -> Outcome {
    let (k, eps, lam, delta) = (1000u64, r("1/5"), Rat::one(), r("1/10"));
    let gate = (Rat::one() + &delta) * &eps * &lam;
    ensure!(&gate * &gate * Rat::from(k) > Rat::from(36), "regime gate fails");
    let rep = classify_pairs(k, 2, &eps, &lam, &delta, ClassifyMode::Full).unwrap();
    ensure!(rep.regime_ok, "classification reports the regime gate as failing");
    ensure!(
        rep.pairs_checked == rep.tr_size,
        "checked {} of {} pairs",
        rep.pairs_checked,
        rep.tr_size
    );
    ensure!(
        rep.violations.is_empty(),
        "{} violations, first {:?}",
        rep.violations.len(),
        rep.violations[0]
    );
    ensure!(
        rep.lemma13_j1_ok && rep.lemma13_v_ok,
        "#J1 = {} or #V = {} exceeds the counting bound",
        rep.j1,
        rep.v
    );
    ensure!(
        rep.j0 <= rep.j1 && rep.j1 <= rep.v,
        "J0 = {}, J1 = {}, V = {}",
        rep.j0,
        rep.j1,
        rep.v
    );
    Ok(vec![
        format!(
            "|Tr_k| = {}, J0 = {}, J1 = {}, V = {}",
            rep.tr_size, rep.j0, rep.j1, rep.v
        ),
        format!("#J1 / bound = {:.3e}", rep.lemma13_ratio),
    ])
}

/// `ψ ≤ ε/k²` (linear form) or `ψ²k ≤ ε²` (m = 2), decided directly.
fn low(regime: LabRegime, psi: &Rat, k: u64, eps: &Rat) -> bool {
    match regime {
        LabRegime::LinearForm => psi * &Rat::from(k * k) <= *eps,
        LabRegime::Simultaneous(_) => psi * psi * Rat::from(k) <= eps * eps,
    }
}

fn check_hit(regime: LabRegime, h: &HitRecord, eps: &Rat) -> Result<(), String> {
    let (low1, low2) = (low(regime, &h.psi1, h.k, eps), low(regime, &h.psi2, h.k, eps));
    ensure!(
        h.in_psi == (!low1 && low2) && h.in_phi == (low1 && !low2),
        "membership wrong at k = {}",
        h.k
    );
    ensure!(
        !h.in_psi || h.psi1 > h.psi2,
        "Psi hit without psi1 > psi2 at k = {}",
        h.k
    );
    ensure!(
        !h.in_phi || h.psi1 < h.psi2,
        "Phi hit without psi1 < psi2 at k = {}",
        h.k
    );
    Ok(())
}

/// Sign changes and Borel–Cantelli hits of random pairs.
fn criterion9() -> Outcome {
    let mut lines = vec![];
    let eps = r("1/2");
    for regime in [LabRegime::LinearForm, LabRegime::Simultaneous(2)] {
        let config = ExperimentConfig::new(regime, eps.clone(), 5000, 100, 9);
        let rep = run_experiment(&config).unwrap();
        let s = &rep.summary;
        ensure!(
            s.budget_exceeded == 0,
            "{regime}: {} pairs over budget",
            s.budget_exceeded
        );
        for p in rep.per_pair.iter().filter(|p| !p.degenerate) {
            ensure!(p.sign_changes >= 1, "{regime}: pair {} never changes sign", p.id);
            for h in &p.hits {
                check_hit(regime, h, &eps).map_err(|e| format!("{regime}, pair {}: {e}", p.id))?;
            }
        }
        ensure!(
            s.median_changes > s.median_changes_at_tenth,
            "{regime}: median does not grow"
        );
        ensure!(
            s.sign_violations == 0 && s.overlap_violations == 0,
            "{regime}: sign violations"
        );
        lines.push(format!(
            "{regime}: median changes {} at T = 5000, {} at T = 500, min {}, degenerate {}",
            s.median_changes, s.median_changes_at_tenth, s.min_changes, s.degenerate
        ));
    }
    let regime = LabRegime::Simultaneous(2);
    let config = ExperimentConfig::new(regime, eps.clone(), 0, 50, 9);
    let ladder: Vec<u64> = (16..=1 << 14).collect();
    let exponent = regime.default_exponent();
    let (mut psi_hits, mut phi_hits, mut both) = (0, 0, 0);
    for id in 0..50 {
        let hits = bc_hits(
            &sample_pair(&config, id).unwrap(),
            &ladder,
            &eps,
            &exponent,
            DEFAULT_BUDGET,
        )
        .unwrap();
        for h in &hits {
            check_hit(regime, h, &eps).map_err(|e| format!("ladder, pair {id}: {e}"))?;
        }
        let (ps, ph) = (
            hits.iter().filter(|h| h.in_psi).count(),
            hits.iter().filter(|h| h.in_phi).count(),
        );
        psi_hits += ps;
        phi_hits += ph;
        if ps > 0 && ph > 0 {
            both += 1;
            continue;
        }
        let pinned = |f: fn(&HitRecord) -> &Rat| {
            let lows = hits.iter().filter(|h| low(regime, f(h), h.k, &eps)).count();
            match lows {
                0 => "never below the threshold",
                n if n == hits.len() => "below the threshold at every k",
                _ => "mixed",
            }
        };
        lines.push(format!(
            "ladder pair {id}: {ps} Psi hits, {ph} Phi hits; theta {}, theta' {}",
            pinned(|h| &h.psi1),
            pinned(|h| &h.psi2)
        ));
    }
    lines.push(format!(
        "ladder k = 16..16384, 50 pairs: {both} with hits of both kinds, {psi_hits} Psi hits, {phi_hits} Phi hits"
    ));
    Ok(lines)
}

/// Empirical density of Ψₖ for m = 2.
fn criterion10() -> Outcome {
    let config = ExperimentConfig::new(LabRegime::Simultaneous(2), r("1/100"), 0, 0, 10);
    let rep = density_sweep(&config, 1000, 10_000_000).unwrap();
    let band = (Rat::one() - r("2/625")) * r("4133/75000000");
    ensure!(rep.band == band, "band {} differs from {band}", rep.band);
    ensure!(!rep.vacuous, "band reported vacuous");
    ensure!(
        &rep.p_psi - &rep.bernstein_psi >= band,
        "P(Psi) = {} minus CI below {band}",
        rep.p_psi
    );
    ensure!(rep.ok, "density check reports failure");
    Ok(vec![
        format!(
            "P(Psi) = {} +- {} (Bernstein) >= {}",
            rep.p_psi.to_decimal(6),
            rep.bernstein_psi.to_decimal(3),
            band.to_decimal(4)
        ),
        format!(
            "Hoeffding half-width {} also clears the band: {}",
            rep.hoeffding_halfwidth.to_decimal(3),
            rep.ok_hoeffding
        ),
    ])
}

fn json(v: &impl serde::Serialize) -> String {
    serde_json::to_string(v).unwrap()
}

fn outputs(threads: usize) -> Vec<String> {
    with_threads(Some(threads), || {
        let mut out = vec![];
        for (regime, t) in [(LabRegime::LinearForm, 300), (LabRegime::Simultaneous(2), 2000)] {
            let rep: Report = run_experiment(&ExperimentConfig::new(regime, r("1/4"), t, 12, 11)).unwrap();
            out.extend([rep.to_json(), rep.to_csv(), rep.changes_csv()]);
        }
        let config = ExperimentConfig::new(LabRegime::Simultaneous(2), r("1/100"), 0, 0, 11);
        out.push(json(&density_sweep(&config, 300, 200_000).unwrap()));
        let s = Square::centered(r("1/2")).unwrap();
        out.push(json(
            &measure_mbar_2d(20, &r("1/10"), &s, Method::PointMc, 100_000, 11).unwrap(),
        ));
        out.push(json(
            &measure_mbar_2d(20, &r("1/10"), &s, Method::FiberMc, 64, 11).unwrap(),
        ));
        out.push(json(
            &measure_mbar_md(100, &r("1/10"), 3, &Cube::unit(3), 100_000, 11).unwrap(),
        ));
        let mode = ClassifyMode::Sampled { n: 2000, seed: 11 };
        out.push(json(
            &classify_pairs(1000, 2, &r("1/5"), &Rat::one(), &r("1/10"), mode).unwrap(),
        ));
        out
    })
    .unwrap()
}

/// Identical bytes for every thread count.
fn criterion11() -> Outcome {
    let one = outputs(1);
    let three = outputs(3);
    ensure!(one.len() == three.len(), "different numbers of outputs");
    for (i, (a, b)) in one.iter().zip(&three).enumerate() {
        ensure!(a == b, "output {i} differs between 1 and 3 threads");
    }
    Ok(vec![format!(
        "{} outputs byte-identical with 1 and 3 threads",
        one.len()
    )])
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("oracle equivalence", criterion1, 120),
        ("Dirichlet invariants", criterion2, 120),
        ("exact sums", criterion3, 60),
        ("counting oracles", criterion4, 300),
        ("2D measure cross-validation", criterion5, 300),
        ("lemma 3 and 4 bands", criterion6, 600),
        ("lemma 5 and 14 bands", criterion7, 600),
        ("classification inclusions", criterion8, 600),
        ("oscillation experiment", criterion9, 900),
        ("Borel-Cantelli density", criterion10, 900),
        ("determinism", criterion11, 600),
    ];
    let only: Option<usize> = std::env::var("ACCEPTANCE_ONLY").ok().and_then(|s| s.parse().ok());
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let id = i + 1;
        if only.is_some_and(|o| o != id) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(_) if elapsed > Duration::from_secs(budget) => Err(format!("over the {budget} s budget")),
            other => other,
        };
        match result {
            Ok(lines) => {
                println!("criterion {id:>2} {name}: PASS ({})", secs(elapsed));
                lines.iter().for_each(|l| println!("    {l}"));
            }
            Err(e) => {
                failed += 1;
                println!("criterion {id:>2} {name}: FAIL ({})", secs(elapsed));
                println!("    {e}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
