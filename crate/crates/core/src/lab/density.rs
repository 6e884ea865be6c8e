//! Empirical density of `Ψₖ` and `Φₖ` on the `2^-64` grid against the
//! product of the lower measure bands of `M̲ₖ` and `M̄ₖ` (unit box).

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{ExperimentConfig, LabRegime};
use crate::error::{Error, Result};
use crate::exactnum::Rat;
use crate::mc;
use crate::regions2d::lemmas::{lemma3_lower_band, lemma3_upper_band};
use crate::regions2d::{hit_u64, strip_eta, threshold_u64};
use crate::regions_md::lemmas::{lemma14_lower_band, lemma5_upper_band};
use crate::regions_md::measure::{hit_u64_md, threshold_u64_md};

/// `P(Ψₖ)` and `P(Φₖ)` with their confidence half-widths. The check passes
/// when `P(Ψₖ)` minus its empirical-Bernstein half-width reaches
/// `band = P_lower(M̲ₖ)·P_lower(M̄ₖ)`. A band with a non-positive factor is
/// vacuous and set to zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityReport {
    pub regime: LabRegime,
    pub k: u64,
    pub eps: Rat,
    pub samples: u64,
    pub seed: u64,
    pub psi_count: u64,
    pub phi_count: u64,
    pub p_psi: Rat,
    pub p_phi: Rat,
    pub hoeffding_halfwidth: Rat,
    pub bernstein_psi: Rat,
    pub bernstein_phi: Rat,
    pub delta: Rat,
    pub band: Rat,
    pub vacuous: bool,
    /// `p_psi − bernstein_psi − band`.
    pub margin: Rat,
    pub ok: bool,
    /// The same test with the Hoeffding half-width.
    pub ok_hoeffding: bool,
    /// `|p_psi − p_phi| ≤ bernstein_psi + bernstein_phi`.
    pub symmetric: bool,
}

/// Lower bands `(P_lower(M̲ₖ), P_lower(M̄ₖ))` on the unit box.
pub fn lower_bands(regime: LabRegime, eps: &Rat) -> Result<(Rat, Rat)> {
    let one = Rat::one();
    Ok(match regime {
        LabRegime::Simultaneous(m) => (
            &one - &lemma5_upper_band(eps, &one, m),
            lemma14_lower_band(eps, &one, m),
        ),
        LabRegime::LinearForm => (&one - &lemma3_upper_band(eps, &one), lemma3_lower_band(eps, &one)?.lo),
    })
}

type Membership = dyn Fn(&[u64]) -> bool + Sync;

pub fn density_sweep(config: &ExperimentConfig, k: u64, samples: u64) -> Result<DensityReport> {
    config.validate()?;
    if config.exponent.is_some() {
        return Err(Error::unsupported(
            "density bands exist only for the default thresholds",
        ));
    }
    if k < 2 {
        return Err(Error::domain(format!("k = {k} must be at least 2")));
    }
    if samples < 2 {
        return Err(Error::input("at least two samples are needed"));
    }
    let regime = config.regime;
    let eps = &config.eps;
    let n = regime.entries();
    let member: Box<Membership> = match regime {
        LabRegime::Simultaneous(m) => {
            let tau = threshold_u64_md(eps, k, m);
            Box::new(move |a| hit_u64_md(a, k, tau))
        }
        LabRegime::LinearForm => {
            let tau = threshold_u64(&strip_eta(eps, k));
            Box::new(move |a| hit_u64(a[0], a[1], k, tau))
        }
    };
    let seed = mc::derive_seed(config.seed, "density");
    let (psi_count, phi_count) = mc::map_chunks(samples, |c, _, len| {
        let mut rng = mc::stream(seed, c);
        let (mut a, mut b) = (vec![0u64; n], vec![0u64; n]);
        let (mut ps, mut ph) = (0u64, 0u64);
        for _ in 0..len {
            a.iter_mut().chain(b.iter_mut()).for_each(|x| *x = rng.random());
            let (ma, mb) = (member(&a), member(&b));
            ps += (!ma && mb) as u64;
            ph += (ma && !mb) as u64;
        }
        (ps, ph)
    })
    .into_iter()
    .fold((0, 0), |acc, x| (acc.0 + x.0, acc.1 + x.1));
    let delta = mc::default_delta();
    let one = Rat::one();
    let hoeffding = mc::hoeffding_halfwidth(samples, &one, &delta)?;
    let bern = |c: u64| mc::bernstein_halfwidth(samples, &mc::bernoulli_variance(c, samples), &one, &delta);
    let (bernstein_psi, bernstein_phi) = (bern(psi_count)?, bern(phi_count)?);
    let (lo_under, lo_over) = lower_bands(regime, eps)?;
    let vacuous = !lo_under.is_positive() || !lo_over.is_positive();
    let band = if vacuous { Rat::zero() } else { lo_under * &lo_over };
    let (p_psi, p_phi) = (Rat::new(psi_count, samples), Rat::new(phi_count, samples));
    let margin = &p_psi - &bernstein_psi - &band;
    Ok(DensityReport {
        regime,
        k,
        eps: eps.clone(),
        samples,
        seed: config.seed,
        psi_count,
        phi_count,
        vacuous,
        ok: vacuous || !margin.is_negative(),
        ok_hoeffding: vacuous || &p_psi - &hoeffding >= band,
        symmetric: (&p_psi - &p_phi).abs() <= &bernstein_psi + &bernstein_phi,
        p_psi,
        p_phi,
        hoeffding_halfwidth: hoeffding,
        bernstein_psi,
        bernstein_phi,
        delta,
        band,
        margin,
    })
}
