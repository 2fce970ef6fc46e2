use alloc::string::String;
use alloc::vec::Vec;
use rand::Rng;

use super::panel::{CountPanel, SeasonMap, MONTHS};
use super::params::ModelState;
use super::thinning::binomial_thin;
use crate::draw;
use crate::error::{dimension, domain};
use crate::Result;

/// How the pre-sample value `Y[0]` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum InitialValue {
    /// Poisson with the stationary mean `lambda * theta[s(1)] / (1 - alpha)`.
    #[default]
    Stationary,
    Fixed(u64),
}

/// Simulates `Y[1..=len]` of a Poisson INAR(1) series started from `Y[0]`:
/// `Y[t] = alpha ∘ Y[t-1] + Poisson(lambda * theta[s(t)])`.
pub fn simulate_poinar<R: Rng + ?Sized>(
    lambda: f64,
    alpha: f64,
    theta: &[f64],
    season: &SeasonMap,
    len: usize,
    initial: InitialValue,
    rng: &mut R,
) -> Result<Vec<u64>> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(domain!("rate {lambda} must be finite and non-negative"));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(domain!("thinning probability {alpha} outside [0, 1]"));
    }
    check_theta(theta)?;
    if season.len() < len {
        return Err(dimension!("season map covers {} of {len} steps", season.len()));
    }
    let (_, ys, _) = simulate_series(lambda, alpha, theta, season, len, initial, rng)?;
    Ok(ys)
}

// Returns (Y[0], counts, innovations).
fn simulate_series<R: Rng + ?Sized>(
    lambda: f64,
    alpha: f64,
    theta: &[f64],
    season: &SeasonMap,
    len: usize,
    initial: InitialValue,
    rng: &mut R,
) -> Result<(u64, Vec<u64>, Vec<u64>)> {
    let y0 = match initial {
        InitialValue::Fixed(v) => v,
        InitialValue::Stationary => {
            if lambda == 0.0 {
                0
            } else if alpha >= 1.0 {
                return Err(domain!("no stationary start for alpha = 1 with a positive rate"));
            } else {
                let m0 = if len > 0 { season.month(0) } else { 0 };
                draw::poisson(rng, lambda * theta[m0] / (1.0 - alpha))
            }
        }
    };
    let mut ys = Vec::with_capacity(len);
    let mut eps = Vec::with_capacity(len);
    let mut prev = y0;
    for t in 0..len {
        let e = draw::poisson(rng, lambda * theta[season.month(t)]);
        let y = binomial_thin(prev, alpha, rng)? + e;
        ys.push(y);
        eps.push(e);
        prev = y;
    }
    Ok((y0, ys, eps))
}

fn check_theta(theta: &[f64]) -> Result<()> {
    if theta.len() != MONTHS {
        return Err(dimension!("{} seasonal effects, expected {MONTHS}", theta.len()));
    }
    if let Some(v) = theta.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(domain!("seasonal effect {v} must be strictly positive"));
    }
    Ok(())
}

/// Ground-truth parameters for a simulated panel.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelSpec {
    pub cluster_rates: Vec<f64>,
    /// Zero-based cluster of each series.
    pub memberships: Vec<usize>,
    pub alpha: Vec<f64>,
    pub theta: Vec<f64>,
    pub season: SeasonMap,
    /// When present, series `l` has rate `exposure[l] * cluster_rates[z[l]]`.
    pub exposure: Option<Vec<f64>>,
    pub initial: InitialValue,
}

impl PanelSpec {
    /// Equal-size clusters in contiguous blocks, common thinning, no seasonality.
    pub fn blocks(rates: &[f64], per_cluster: usize, alpha: f64, season: SeasonMap) -> Self {
        let memberships = (0..rates.len())
            .flat_map(|k| core::iter::repeat_n(k, per_cluster))
            .collect::<Vec<_>>();
        let l = memberships.len();
        Self {
            cluster_rates: rates.to_vec(),
            memberships,
            alpha: alloc::vec![alpha; l],
            theta: alloc::vec![1.0; MONTHS],
            season,
            exposure: None,
            initial: InitialValue::Stationary,
        }
    }

    pub fn n_series(&self) -> usize {
        self.memberships.len()
    }

    pub fn series_rate(&self, l: usize) -> f64 {
        let r = self.cluster_rates[self.memberships[l]];
        match &self.exposure {
            Some(x) => x[l] * r,
            None => r,
        }
    }
}

/// A simulated panel together with the parameters that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedPanel {
    pub panel: CountPanel,
    /// True parameters. `innovations` holds the simulated arrivals; `tau` is
    /// not part of the generating process and is set to 1.
    pub truth: ModelState,
    /// Pre-sample values `Y[0]`.
    pub initial_values: Vec<u64>,
}

/// Simulates every series of `spec` in order with one random stream.
pub fn simulate_panel<R: Rng + ?Sized>(spec: &PanelSpec, rng: &mut R) -> Result<SimulatedPanel> {
    let l = spec.memberships.len();
    if l == 0 {
        return Err(domain!("panel spec has no series"));
    }
    if spec.alpha.len() != l {
        return Err(dimension!("{} thinning values for {l} series", spec.alpha.len()));
    }
    if let Some(x) = &spec.exposure {
        if x.len() != l {
            return Err(dimension!("{} exposures for {l} series", x.len()));
        }
    }
    if let Some(k) = spec.memberships.iter().find(|k| **k >= spec.cluster_rates.len()) {
        return Err(dimension!(
            "membership {k} references one of {} clusters",
            spec.cluster_rates.len()
        ));
    }
    check_theta(&spec.theta)?;
    let len = spec.season.len();
    let mut counts = Vec::with_capacity(l);
    let mut innovations = Vec::with_capacity(l);
    let mut initial_values = Vec::with_capacity(l);
    for i in 0..l {
        let rate = spec.series_rate(i);
        if !(rate >= 0.0 && rate.is_finite()) {
            return Err(domain!("series {i} has invalid rate {rate}"));
        }
        if !(0.0..=1.0).contains(&spec.alpha[i]) {
            return Err(domain!("series {i} thinning {} outside [0, 1]", spec.alpha[i]));
        }
        let (y0, ys, eps) =
            simulate_series(rate, spec.alpha[i], &spec.theta, &spec.season, len, spec.initial, rng)?;
        counts.push(ys);
        innovations.push(eps);
        initial_values.push(y0);
    }
    let ids: Vec<String> = (0..l).map(|i| alloc::format!("s{i}")).collect();
    let panel = CountPanel::new(counts, spec.season.clone(), spec.exposure.clone(), ids)?;
    let truth = ModelState {
        alpha: spec.alpha.clone(),
        z: spec.memberships.clone(),
        phi_star: spec.cluster_rates.clone(),
        theta: spec.theta.clone(),
        tau: 1.0,
        innovations,
    };
    Ok(SimulatedPanel {
        panel,
        truth,
        initial_values,
    })
}
