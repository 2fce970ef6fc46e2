//! Steps 3-6: conjugate updates for cluster values, seasonal effects,
//! thinning probabilities and the DP concentration.

use alloc::vec::Vec;
use rand::Rng;

use super::membership::exposure_multipliers;
use super::stats::SuffStats;
use crate::draw;
use crate::model::{CountPanel, Hyperparams, ModelState, MONTHS};

/// Shape/rate of the Gamma full conditional of every cluster value.
pub fn rate_posteriors(
    state: &ModelState,
    panel: &CountPanel,
    stats: &SuffStats,
    hyper: &Hyperparams,
) -> Vec<(f64, f64)> {
    let multipliers = exposure_multipliers(panel, hyper.mode);
    let mut exposure = alloc::vec![0.0; state.n_clusters()];
    for (l, &k) in state.z.iter().enumerate() {
        exposure[k] += multipliers[l];
    }
    stats
        .cluster_totals
        .iter()
        .zip(&exposure)
        .map(|(b, w)| {
            (
                *b as f64 + hyper.gamma1,
                w * stats.season.theta_total + hyper.gamma2,
            )
        })
        .collect()
}

/// Step 3: `phi*[k] ~ Gamma(B[k] + γ1, n[k] Θ + γ2)`; in covariate mode the
/// rate is `Σ_{l in k} X[l] Θ + γ2`.
pub fn sample_unique_rates<R: Rng + ?Sized>(
    state: &mut ModelState,
    panel: &CountPanel,
    stats: &SuffStats,
    hyper: &Hyperparams,
    rng: &mut R,
) {
    let post = rate_posteriors(state, panel, stats, hyper);
    state.phi_star = post.iter().map(|(a, b)| draw::gamma(rng, *a, *b)).collect();
}

/// Shape/rate of the Gamma full conditional of each seasonal effect.
pub fn seasonal_posteriors(
    state: &ModelState,
    panel: &CountPanel,
    stats: &SuffStats,
    hyper: &Hyperparams,
) -> [(f64, f64); MONTHS] {
    let rate_sum: f64 = state.series_rates(hyper.mode, panel.exposure()).iter().sum();
    let mut out = [(0.0, 0.0); MONTHS];
    for (m, o) in out.iter_mut().enumerate() {
        *o = (
            stats.month_totals[m] as f64 + hyper.xi1,
            stats.season.q[m] as f64 * rate_sum + hyper.xi2,
        );
    }
    out
}

/// Step 4: `theta[m] ~ Gamma(Σ_l Σ_{s(t)=m} eps + ξ1, q[m] Σ_l λ[l] + ξ2)`.
/// Months absent from the data (`q[m] = 0`) reduce to a prior draw.
pub fn sample_seasonals<R: Rng + ?Sized>(
    state: &mut ModelState,
    panel: &CountPanel,
    stats: &SuffStats,
    hyper: &Hyperparams,
    rng: &mut R,
) {
    let post = seasonal_posteriors(state, panel, stats, hyper);
    state.theta = post.iter().map(|(a, b)| draw::gamma(rng, *a, *b)).collect();
}

/// Beta parameters of the thinning full conditional of series `l`:
/// survivors `Σ_{t≥2} (Y[t] - eps[t])` plus `η1`, and deaths
/// `Σ_{t≥2} (Y[t-1] - Y[t] + eps[t])` plus `η2`.
pub fn thinning_posterior(
    series: &[u64],
    transition_total: u64,
    hyper: &Hyperparams,
) -> (f64, f64) {
    let (mut sum_curr, mut sum_prev) = (0u64, 0u64);
    for w in series.windows(2) {
        sum_prev += w[0];
        sum_curr += w[1];
    }
    let survivors = sum_curr - transition_total;
    let deaths = sum_prev - survivors;
    (survivors as f64 + hyper.eta1, deaths as f64 + hyper.eta2)
}

/// Step 5.
pub fn sample_thinnings<R: Rng + ?Sized>(
    state: &mut ModelState,
    panel: &CountPanel,
    stats: &SuffStats,
    hyper: &Hyperparams,
    rng: &mut R,
) {
    for l in 0..state.n_series() {
        let (a, b) = thinning_posterior(panel.series(l), stats.transition_totals[l], hyper);
        state.alpha[l] = draw::beta(rng, a, b);
    }
}

/// Two-component Gamma mixture for the concentration given the auxiliary
/// `kappa`: weight `pi` on `Gamma(a_τ + K, b_τ - ln κ)` and `1 - pi` on
/// `Gamma(a_τ + K - 1, b_τ - ln κ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationMixture {
    pub pi: f64,
    pub shape_high: f64,
    pub shape_low: f64,
    pub rate: f64,
}

pub fn concentration_mixture(k: usize, l: usize, kappa: f64, hyper: &Hyperparams) -> ConcentrationMixture {
    let rate = hyper.b_tau - libm::log(kappa);
    let odds = (hyper.a_tau + k as f64 - 1.0) / (l as f64 * rate);
    ConcentrationMixture {
        pi: odds / (1.0 + odds),
        shape_high: hyper.a_tau + k as f64,
        shape_low: hyper.a_tau + k as f64 - 1.0,
        rate,
    }
}

/// Step 6: auxiliary-variable update of the DP concentration.
pub fn sample_concentration<R: Rng + ?Sized>(
    k: usize,
    l: usize,
    tau_old: f64,
    hyper: &Hyperparams,
    rng: &mut R,
) -> f64 {
    let kappa = draw::beta(rng, tau_old + 1.0, l as f64).max(f64::MIN_POSITIVE);
    let mix = concentration_mixture(k, l, kappa, hyper);
    let shape = if draw::uniform(rng) < mix.pi {
        mix.shape_high
    } else {
        mix.shape_low
    };
    draw::gamma(rng, shape, mix.rate).max(f64::MIN_POSITIVE)
}
