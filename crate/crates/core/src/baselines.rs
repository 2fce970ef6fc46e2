//! Per-series baselines: conditional least squares (CLS) and the simple
//! Poisson process (SPP) series-mean predictor.
//!
//! CLS minimises `Σ_{t>=1} (y[t] - alpha y[t-1] - lambda theta[s(t)])²`
//! subject to `Σ_m theta[m] = 1` by cycling through closed-form block
//! updates: the joint `(alpha, lambda)` least-squares `lambda` given `theta`,
//! then `alpha` given `lambda` and `theta` (together the exact joint minimiser
//! over `(alpha, lambda)`), then the Lagrangian `theta` given `alpha` and
//! `lambda`. Each block is an exact minimiser, so the sum of squares never
//! increases from block to block.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{dimension, domain};
use crate::forecast::conditional_mean_h_step;
use crate::model::{SeasonMap, MONTHS};
use crate::{Error, Result};

/// Floor applied to a seasonal effect that the update drives negative.
pub const THETA_FLOOR: f64 = 1e-8;

/// Fewest observations for which all 14 parameters can be identified.
pub const MIN_LENGTH: usize = 14;

/// Starting values for [`cls_fit`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClsInit {
    pub alpha: f64,
    pub lambda: f64,
    pub theta: Vec<f64>,
}

/// Controls for [`cls_fit`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClsOptions {
    /// Defaults to `alpha = 0.2`, `lambda = series mean`, `theta = 1/12`.
    pub init: Option<ClsInit>,
    /// Stop when no parameter moves by more than this in a cycle.
    pub tol: f64,
    pub max_cycles: usize,
}

impl Default for ClsOptions {
    fn default() -> Self {
        Self {
            init: None,
            tol: 1e-8,
            max_cycles: 100,
        }
    }
}

/// Result of a CLS fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClsEstimate {
    pub alpha: f64,
    pub lambda: f64,
    /// Seasonal effects summing to one.
    pub theta: Vec<f64>,
    pub sse: f64,
    /// Completed update cycles.
    pub iterations: usize,
    pub converged: bool,
    /// Set when a seasonal effect had to be floored, or `lambda <= 0`.
    pub flagged: bool,
    /// Sum of squares at the start and after every block update: the joint
    /// `(lambda, alpha)` block and the `theta` block, two per cycle.
    pub sse_trace: Vec<f64>,
}

/// `Σ_{t=1}^{T-1} (y[t] - alpha y[t-1] - lambda theta[s(t)])²`.
pub fn cls_sse(series: &[u64], season: &SeasonMap, alpha: f64, lambda: f64, theta: &[f64]) -> f64 {
    series
        .windows(2)
        .enumerate()
        .map(|(i, w)| {
            let r = w[1] as f64 - alpha * w[0] as f64 - lambda * theta[season.month(i + 1)];
            r * r
        })
        .sum()
}

/// Moments of the regression that stay fixed during the iteration.
struct Moments {
    sxx: f64,
    sxy: f64,
    /// Per-month count of response times.
    n: [usize; MONTHS],
    /// Per-month sums of `y[t]` and `y[t-1]` over response times.
    sy: [f64; MONTHS],
    sx: [f64; MONTHS],
}

impl Moments {
    fn new(series: &[u64], season: &SeasonMap) -> Self {
        let mut m = Moments {
            sxx: 0.0,
            sxy: 0.0,
            n: [0; MONTHS],
            sy: [0.0; MONTHS],
            sx: [0.0; MONTHS],
        };
        for (i, w) in series.windows(2).enumerate() {
            let (x, y) = (w[0] as f64, w[1] as f64);
            let s = season.month(i + 1);
            m.sxx += x * x;
            m.sxy += x * y;
            m.n[s] += 1;
            m.sy[s] += y;
            m.sx[s] += x;
        }
        m
    }

    fn theta_sums(&self, theta: &[f64]) -> (f64, f64, f64) {
        let (mut syt, mut sxt, mut stt) = (0.0, 0.0, 0.0);
        for s in 0..MONTHS {
            syt += self.sy[s] * theta[s];
            sxt += self.sx[s] * theta[s];
            stt += self.n[s] as f64 * theta[s] * theta[s];
        }
        (syt, sxt, stt)
    }
}

fn max_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Fits CLS to one series.
///
/// `season` must cover every time index of `series`. Months with no response
/// time carry no information; their effects stay at `1/12` and the others
/// share the remaining mass. A fit that hits `max_cycles` is returned with
/// `converged = false`.
pub fn cls_fit(series: &[u64], season: &SeasonMap, options: &ClsOptions) -> Result<ClsEstimate> {
    let t = series.len();
    if t < MIN_LENGTH {
        return Err(domain!("CLS needs at least {MIN_LENGTH} observations, got {t}"));
    }
    if season.len() < t {
        return Err(dimension!("season map covers {} of {t} times", season.len()));
    }
    if series.iter().all(|&y| y == 0) {
        return Err(Error::Degenerate("CLS on an identically zero series".into()));
    }
    let mo = Moments::new(series, season);
    if mo.sxx == 0.0 {
        return Err(Error::Degenerate(
            "CLS needs a non-zero lagged count before the last time".into(),
        ));
    }
    let present: Vec<usize> = (0..MONTHS).filter(|&s| mo.n[s] > 0).collect();
    let budget = 1.0 - (MONTHS - present.len()) as f64 / MONTHS as f64;
    let inv_n_total: f64 = present.iter().map(|&s| 1.0 / mo.n[s] as f64).sum();

    let init = options.init.clone().unwrap_or_else(|| ClsInit {
        alpha: 0.2,
        lambda: series.iter().sum::<u64>() as f64 / t as f64,
        theta: alloc::vec![1.0 / MONTHS as f64; MONTHS],
    });
    if init.theta.len() != MONTHS {
        return Err(dimension!("initial theta has {} entries", init.theta.len()));
    }
    let (mut alpha, mut lambda, mut theta) = (init.alpha, init.lambda, init.theta);
    for s in 0..MONTHS {
        if mo.n[s] == 0 {
            theta[s] = 1.0 / MONTHS as f64;
        }
    }

    let sse = |a: f64, l: f64, th: &[f64]| cls_sse(series, season, a, l, th);
    let mut trace = alloc::vec![sse(alpha, lambda, &theta)];
    let mut flagged = false;
    let mut converged = false;
    let mut cycles = 0;
    while cycles < options.max_cycles {
        cycles += 1;
        let before = [alpha, lambda];
        let theta_before = theta.clone();

        let (syt, sxt, stt) = mo.theta_sums(&theta);
        let det = mo.sxx * stt - sxt * sxt;
        if det > 1e-12 * mo.sxx * stt {
            lambda = (mo.sxx * syt - mo.sxy * sxt) / det;
        }

        alpha = (mo.sxy - lambda * sxt) / mo.sxx;
        trace.push(sse(alpha, lambda, &theta));

        if lambda.abs() > 1e-300 {
            let resid = |s: usize| mo.sy[s] - alpha * mo.sx[s];
            let c = 2.0 * lambda / inv_n_total
                * (present.iter().map(|&s| resid(s) / mo.n[s] as f64).sum::<f64>()
                    - budget * lambda);
            for &s in &present {
                theta[s] = (2.0 * lambda * resid(s) - c) / (2.0 * lambda * lambda * mo.n[s] as f64);
            }
            if present.iter().any(|&s| theta[s] < THETA_FLOOR) {
                flagged = true;
                for &s in &present {
                    theta[s] = theta[s].max(THETA_FLOOR);
                }
                let total: f64 = present.iter().map(|&s| theta[s]).sum();
                for &s in &present {
                    theta[s] *= budget / total;
                }
            }
        }
        trace.push(sse(alpha, lambda, &theta));

        let change = max_change(&before, &[alpha, lambda]).max(max_change(&theta_before, &theta));
        if change < options.tol {
            converged = true;
            break;
        }
    }
    if lambda <= 0.0 {
        flagged = true;
    }
    Ok(ClsEstimate {
        alpha,
        lambda,
        sse: *trace.last().unwrap(),
        theta,
        iterations: cycles,
        converged,
        flagged,
        sse_trace: trace,
    })
}

/// Plug-in `h`-step conditional mean, `h = future_months.len()`.
pub fn cls_forecast(est: &ClsEstimate, y_t: u64, future_months: &[usize]) -> f64 {
    conditional_mean_h_step(y_t, est.alpha, est.lambda, &est.theta, future_months)
}

/// SPP predictor: the series mean.
pub fn spp_fit_forecast(series: &[u64]) -> Result<f64> {
    if series.is_empty() {
        return Err(Error::Empty("series-mean predictor needs one observation".into()));
    }
    Ok(series.iter().sum::<u64>() as f64 / series.len() as f64)
}
