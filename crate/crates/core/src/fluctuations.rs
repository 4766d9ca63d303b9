//! Forecast-error sampling for loads and renewables.
//!
//! Each ensemble member is the reference day at one instant with every load
//! and renewable output independently perturbed: truncated normal errors for
//! load and PV, and for wind either a truncated normal error or a Weibull
//! draw whose mean equals the reference output.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::grid::{GridScenario, ResKind};
use crate::rng::{element, RngStream};

/// Below this acceptance probability rejection sampling is replaced by
/// inverse-CDF sampling.
const MIN_ACCEPTANCE: f64 = 0.01;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindModel {
    #[default]
    Gaussian,
    Weibull,
}

/// Relative forecast-error widths and the wind error model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FluctuationSpec {
    pub sigma_l: f64,
    pub sigma_pv: f64,
    pub sigma_w: f64,
    pub wind_model: WindModel,
    pub weibull_shape: f64,
}

impl Default for FluctuationSpec {
    fn default() -> Self {
        Self {
            sigma_l: 0.1,
            sigma_pv: 0.08,
            sigma_w: 0.1,
            wind_model: WindModel::Gaussian,
            weibull_shape: 2.0,
        }
    }
}

impl FluctuationSpec {
    pub fn zero() -> Self {
        Self {
            sigma_l: 0.0,
            sigma_pv: 0.0,
            sigma_w: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, s) in [
            ("sigma_l", self.sigma_l),
            ("sigma_pv", self.sigma_pv),
            ("sigma_w", self.sigma_w),
        ] {
            if !(s >= 0.0 && s.is_finite()) {
                return Err(Error::validation("fluctuations", format!("{name} must be >= 0")));
            }
        }
        if !(self.weibull_shape > 0.0 && self.weibull_shape.is_finite()) {
            return Err(Error::validation("fluctuations", "weibull_shape must be > 0"));
        }
        Ok(())
    }
}

/// One ensemble member at one instant.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbedState {
    pub t: usize,
    pub member: usize,
    /// Realized demand per load point, MW, in scenario order.
    pub load: Vec<f64>,
    /// Realized output per renewable generator, MW, in scenario order.
    pub res: Vec<f64>,
}

impl PerturbedState {
    /// The unperturbed reference at `t`.
    pub fn reference(scenario: &GridScenario, t: usize) -> Self {
        Self {
            t,
            member: 0,
            load: (0..scenario.loads.len()).map(|i| scenario.load_expectation(i, t)).collect(),
            res: (0..scenario.res_generators.len())
                .map(|i| scenario.res_expectation(i, t))
                .collect(),
        }
    }
}

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

/// Draws from `Normal(mean, (sigma_rel * mean)^2)` conditioned on `[lo, hi]`.
///
/// Uses plain rejection while the window holds at least 1% of the mass, and
/// inverse-CDF sampling on the window otherwise.
pub fn sample_truncated_normal<R: Rng + ?Sized>(
    mean: f64,
    sigma_rel: f64,
    lo: f64,
    hi: f64,
    rng: &mut R,
) -> Result<f64> {
    if lo > hi {
        return Err(Error::invalid(format!("truncation bounds reversed: [{lo}, {hi}]")));
    }
    if sigma_rel < 0.0 {
        return Err(Error::invalid("sigma_rel must be non-negative"));
    }
    let sd = sigma_rel * mean.abs();
    if sd == 0.0 {
        return Ok(mean);
    }
    if lo == hi {
        return Ok(lo);
    }

    let a = (lo - mean) / sd;
    let b = (hi - mean) / sd;
    let unit = std_normal();
    // work on the lower tail for accuracy
    let (fa, fb) = if a > 0.0 {
        (unit.cdf(-b), unit.cdf(-a))
    } else {
        (unit.cdf(a), unit.cdf(b))
    };
    let mass = fb - fa;

    if mass >= MIN_ACCEPTANCE {
        loop {
            let z: f64 = StandardNormal.sample(rng);
            if (a..=b).contains(&z) {
                return Ok(mean + sd * z);
            }
        }
    }

    let u = fa + rng.random::<f64>() * mass;
    let q = unit.inverse_cdf(u.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON));
    let z = if a > 0.0 { -q } else { q };
    Ok((mean + sd * z).clamp(lo, hi))
}

/// Weibull scale whose distribution mean equals `mean`.
pub fn weibull_scale(mean: f64, shape: f64) -> f64 {
    mean / gamma(1.0 + 1.0 / shape)
}

/// Draws wind output from a Weibull law with shape `a` and mean `p_w`.
///
/// The result is unbounded above; callers clip it to the generator limits.
pub fn sample_weibull<R: Rng + ?Sized>(p_w: f64, a: f64, rng: &mut R) -> Result<f64> {
    if !(p_w >= 0.0) {
        return Err(Error::invalid("Weibull mean must be non-negative"));
    }
    if !(a > 0.0) {
        return Err(Error::invalid("Weibull shape must be positive"));
    }
    if p_w == 0.0 {
        return Ok(0.0);
    }
    let scale = weibull_scale(p_w, a);
    // inverse CDF on 1 - u keeps the argument of ln away from zero
    let u: f64 = rng.random();
    Ok(scale * (-(1.0 - u).ln()).powf(1.0 / a))
}

/// Samples ensemble member `stream` of the scenario at instant `t`.
///
/// Every load and renewable element draws from its own sub-stream, so the
/// load and PV draws do not depend on the wind model.
pub fn perturb(
    scenario: &GridScenario,
    t: usize,
    spec: &FluctuationSpec,
    stream: &RngStream,
) -> Result<PerturbedState> {
    if t >= scenario.instants() {
        return Err(Error::invalid(format!("instant {t} out of range")));
    }
    let mut state = PerturbedState::reference(scenario, t);

    for (i, lp) in scenario.loads.iter().enumerate() {
        let mean = state.load[i];
        let (lo, hi) = lp.bounds_at(mean);
        let mut rng = stream.path(&[element::LOAD, i as u64]).rng();
        state.load[i] = sample_truncated_normal(mean, spec.sigma_l, lo, hi, &mut rng)?.clamp(lo, hi);
    }

    for (i, g) in scenario.res_generators.iter().enumerate() {
        let mean = state.res[i];
        let (lo, hi) = (g.floor, g.capacity);
        let x = match g.kind {
            ResKind::Pv => {
                let mut rng = stream.path(&[element::PV, i as u64]).rng();
                sample_truncated_normal(mean, spec.sigma_pv, lo, hi, &mut rng)?
            }
            ResKind::Wind => {
                let mut rng = stream.path(&[element::WIND, i as u64]).rng();
                match spec.wind_model {
                    WindModel::Gaussian => {
                        sample_truncated_normal(mean, spec.sigma_w, lo, hi, &mut rng)?
                    }
                    WindModel::Weibull => sample_weibull(mean, spec.weibull_shape, &mut rng)?,
                }
            }
        };
        state.res[i] = x.clamp(lo, hi);
    }
    Ok(state)
}
