//! Point forecasts, exact one-step predictive pmfs, quantiles and intervals.
//!
//! Given the last count `y_T`, the next count is `alpha ∘ y_T + eps` with
//! `eps ~ Poisson(lambda * theta[s(T+1)])`, so its distribution is the
//! convolution of `Binomial(y_T, alpha)` and that Poisson. Months are
//! zero-based throughout.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::domain;
use crate::math::ln_factorial;
use crate::model::RateMode;
use crate::sampler::PosteriorDraws;
use crate::{Error, Result};

/// Mass that may be lost to truncation of the support.
pub const TAIL_BUDGET: f64 = 1e-9;

/// Internal stopping tolerance for auto-extension; much tighter than the
/// budget so that moments computed from the pmf are accurate too.
const TAIL_TARGET: f64 = 1e-13;

/// Where a predictive distribution came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForecastSource {
    /// Plug-in parameters of a single draw or estimate.
    PerDraw,
    /// Pointwise average over posterior draws.
    PosteriorAveraged,
}

/// A predictive distribution over `0..=y_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastDistribution {
    pub pmf: Vec<f64>,
    pub y_max: u64,
    /// Exact mean of the untruncated distribution.
    pub mean: f64,
    pub source: ForecastSource,
}

impl ForecastDistribution {
    /// Total retained mass.
    pub fn mass(&self) -> f64 {
        self.pmf.iter().sum()
    }

    /// Mean computed from the truncated pmf.
    pub fn pmf_mean(&self) -> f64 {
        self.pmf
            .iter()
            .enumerate()
            .map(|(y, p)| y as f64 * p)
            .sum()
    }

    /// Cumulative probabilities `P(Y <= y)` for `y = 0..=y_max`.
    pub fn cdf(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.pmf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect()
    }
}

fn check_params(alpha: f64, lambda: f64, theta: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(domain!("thinning {alpha} outside [0, 1]"));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(domain!("rate {lambda} must be finite and non-negative"));
    }
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(domain!("seasonal effect {theta} must be finite and non-negative"));
    }
    Ok(())
}

/// `E(Y[T+1] | Y[T] = y_t) = alpha * y_t + lambda * theta_next`.
#[inline]
pub fn conditional_mean_one_step(y_t: u64, alpha: f64, lambda: f64, theta_next: f64) -> f64 {
    alpha * y_t as f64 + lambda * theta_next
}

/// `E(Y[T+h] | Y[T] = y_t) = alpha^h y_t + lambda Σ_{j=1..h} alpha^(h-j) theta[s(T+j)]`
/// with `future_months[j-1] = s(T+j)` and `h = future_months.len()`.
///
/// Evaluated by the recursion `f(j) = alpha f(j-1) + lambda theta[s(T+j)]`,
/// `f(0) = y_t`, so `h = 0` returns `y_t`.
pub fn conditional_mean_h_step(
    y_t: u64,
    alpha: f64,
    lambda: f64,
    theta: &[f64],
    future_months: &[usize],
) -> f64 {
    future_months
        .iter()
        .fold(y_t as f64, |f, &m| alpha * f + lambda * theta[m])
}

fn binomial_pmf(n: u64, p: f64) -> Vec<f64> {
    let len = n as usize + 1;
    if p <= 0.0 {
        let mut out = alloc::vec![0.0; len];
        out[0] = 1.0;
        return out;
    }
    if p >= 1.0 {
        let mut out = alloc::vec![0.0; len];
        out[n as usize] = 1.0;
        return out;
    }
    let (lp, lq) = (libm::log(p), libm::log1p(-p));
    let ln_n = ln_factorial(n);
    (0..=n)
        .map(|k| {
            libm::exp(
                ln_n - ln_factorial(k) - ln_factorial(n - k) + k as f64 * lp + (n - k) as f64 * lq,
            )
        })
        .collect()
}

fn poisson_pmf(mean: f64, upto: u64) -> Vec<f64> {
    if mean <= 0.0 {
        let mut out = alloc::vec![0.0; upto as usize + 1];
        out[0] = 1.0;
        return out;
    }
    let lm = libm::log(mean);
    (0..=upto)
        .map(|k| libm::exp(k as f64 * lm - mean - ln_factorial(k)))
        .collect()
}

fn default_y_max(y_t: u64, mean: f64) -> u64 {
    libm::ceil(mean + 12.0 * libm::sqrt(mean)) as u64 + y_t
}

/// Exact pmf of `alpha ∘ y_t + Poisson(lambda * theta_next)`.
///
/// With `y_max = None` the support starts at `mean + 12 sqrt(mean) + y_t`.
/// In either case it is extended until the lost tail mass is negligible
/// (well below [`TAIL_BUDGET`]).
pub fn predictive_pmf(
    y_t: u64,
    alpha: f64,
    lambda: f64,
    theta_next: f64,
    y_max: Option<u64>,
) -> Result<ForecastDistribution> {
    check_params(alpha, lambda, theta_next)?;
    let rate = lambda * theta_next;
    let mean = conditional_mean_one_step(y_t, alpha, lambda, theta_next);
    let binom = binomial_pmf(y_t, alpha);
    let mut upper = y_max.unwrap_or_else(|| default_y_max(y_t, mean)).max(y_t);
    loop {
        let pois = poisson_pmf(rate, upper);
        let pmf: Vec<f64> = (0..=upper)
            .map(|y| {
                let lo = y.saturating_sub(y_t);
                (lo..=y)
                    .map(|r| binom[(y - r) as usize] * pois[r as usize])
                    .sum()
            })
            .collect();
        let mass: f64 = pmf.iter().sum();
        if 1.0 - mass < TAIL_TARGET {
            return Ok(ForecastDistribution {
                pmf,
                y_max: upper,
                mean,
                source: ForecastSource::PerDraw,
            });
        }
        upper = upper.saturating_mul(2).max(upper + 8);
    }
}

/// Smallest `y` with `P(Y <= y) >= upsilon`.
///
/// If the retained mass never reaches `upsilon` (only possible for `upsilon`
/// within the truncation budget of 1) the truncation point is returned.
pub fn quantile(dist: &ForecastDistribution, upsilon: f64) -> Result<u64> {
    if !(upsilon > 0.0 && upsilon < 1.0) {
        return Err(domain!("quantile level {upsilon} outside (0, 1)"));
    }
    let mut acc = 0.0;
    for (y, p) in dist.pmf.iter().enumerate() {
        acc += p;
        if acc >= upsilon {
            return Ok(y as u64);
        }
    }
    Ok(dist.y_max)
}

/// Central prediction interval `[q((1-level)/2), q((1+level)/2)]`.
pub fn interval(dist: &ForecastDistribution, level: f64) -> Result<(u64, u64)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(domain!("interval level {level} outside (0, 1)"));
    }
    let half = (1.0 - level) / 2.0;
    Ok((quantile(dist, half)?, quantile(dist, 1.0 - half)?))
}

/// Where a series sits when forecasting from posterior draws.
#[derive(Debug, Clone, Copy)]
pub struct SeriesContext<'a> {
    /// Series index into the panel the draws were fitted on.
    pub series: usize,
    /// Last observed count.
    pub last: u64,
    pub mode: RateMode,
    pub exposure: Option<&'a [f64]>,
}

fn series_params(state: &crate::ModelState, ctx: &SeriesContext<'_>) -> Result<(f64, f64)> {
    if ctx.series >= state.n_series() {
        return Err(domain!(
            "series {} out of range for draws over {} series",
            ctx.series,
            state.n_series()
        ));
    }
    Ok((
        state.alpha[ctx.series],
        state.series_rate(ctx.series, ctx.mode, ctx.exposure),
    ))
}

/// Pointwise average over draws of the one-step predictive pmf for month
/// `month` (zero-based). Its mean is the average of per-draw conditional
/// means.
pub fn posterior_predictive(
    draws: &PosteriorDraws,
    ctx: &SeriesContext<'_>,
    month: usize,
    y_max: Option<u64>,
) -> Result<ForecastDistribution> {
    if draws.is_empty() {
        return Err(Error::Empty("posterior predictive needs at least one draw".into()));
    }
    let mut pmf: Vec<f64> = Vec::new();
    let mut mean = 0.0;
    for d in draws.iter() {
        let (alpha, lambda) = series_params(&d.state, ctx)?;
        let one = predictive_pmf(ctx.last, alpha, lambda, d.state.theta[month], y_max)?;
        if one.pmf.len() > pmf.len() {
            pmf.resize(one.pmf.len(), 0.0);
        }
        for (acc, p) in pmf.iter_mut().zip(&one.pmf) {
            *acc += p;
        }
        mean += one.mean;
    }
    let n = draws.len() as f64;
    pmf.iter_mut().for_each(|p| *p /= n);
    Ok(ForecastDistribution {
        y_max: (pmf.len() - 1) as u64,
        pmf,
        mean: mean / n,
        source: ForecastSource::PosteriorAveraged,
    })
}

/// Draw-averaged `h`-step conditional mean, `h = future_months.len()`.
pub fn posterior_mean_forecast(
    draws: &PosteriorDraws,
    ctx: &SeriesContext<'_>,
    future_months: &[usize],
) -> Result<f64> {
    if draws.is_empty() {
        return Err(Error::Empty("posterior forecast needs at least one draw".into()));
    }
    let mut total = 0.0;
    for d in draws.iter() {
        let (alpha, lambda) = series_params(&d.state, ctx)?;
        total += conditional_mean_h_step(ctx.last, alpha, lambda, &d.state.theta, future_months);
    }
    Ok(total / draws.len() as f64)
}
