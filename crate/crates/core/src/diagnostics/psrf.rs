//! Potential scale reduction factor.

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::dimension;
use crate::math::{mean, sample_variance};
use crate::model::{RateMode, MONTHS};
use crate::sampler::PosteriorDraws;
use crate::{Error, Result};

/// `sqrt(((n-1)/n W + B/n) / W)` for `m >= 2` chains of equal length
/// `n >= 2`, where `W` is the mean within-chain variance and `B` is `n` times
/// the variance of the chain means.
///
/// Returns `+inf` when `W = 0 < B` and `1` when `W = B = 0`.
pub fn psrf(chains: &[Vec<f64>]) -> Result<f64> {
    if chains.len() < 2 {
        return Err(Error::Config(alloc::format!(
            "PSRF needs at least two chains, got {}",
            chains.len()
        )));
    }
    let n = chains[0].len();
    if chains.iter().any(|c| c.len() != n) {
        return Err(dimension!("PSRF chains must have equal lengths"));
    }
    if n < 2 {
        return Err(Error::Config("PSRF needs at least two draws per chain".into()));
    }
    let means: Vec<f64> = chains.iter().map(|c| mean(c)).collect();
    let w = chains.iter().map(|c| sample_variance(c)).sum::<f64>() / chains.len() as f64;
    let b = n as f64 * sample_variance(&means);
    if w == 0.0 {
        return Ok(if b > 0.0 { f64::INFINITY } else { 1.0 });
    }
    let nf = n as f64;
    Ok(libm::sqrt(((nf - 1.0) / nf * w + b / nf) / w))
}

/// PSRFs of label-invariant functionals of the state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsrfReport {
    /// For `Σ_l lambda[l]`.
    pub sum_rates: f64,
    /// Per series thinning probability.
    pub alpha: Vec<f64>,
    /// Per month seasonal effect.
    pub theta: Vec<f64>,
}

impl PsrfReport {
    /// Largest finite-or-infinite value across all functionals.
    pub fn max(&self) -> f64 {
        self.alpha
            .iter()
            .chain(&self.theta)
            .fold(self.sum_rates, |a, b| a.max(*b))
    }
}

pub fn psrf_report(
    draws: &PosteriorDraws,
    mode: RateMode,
    exposure: Option<&[f64]>,
) -> Result<PsrfReport> {
    let sum_rates = psrf(&draws.chain_traces(|s| s.series_rates(mode, exposure).iter().sum()))?;
    let n_series = draws.draws.first().map_or(0, |d| d.state.n_series());
    let alpha = (0..n_series)
        .map(|l| psrf(&draws.chain_traces(|s| s.alpha[l])))
        .collect::<Result<Vec<_>>>()?;
    let theta = (0..MONTHS)
        .map(|m| psrf(&draws.chain_traces(|s| s.theta[m])))
        .collect::<Result<Vec<_>>>()?;
    Ok(PsrfReport {
        sum_rates,
        alpha,
        theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_chains_sit_at_lower_bound() {
        let c: Vec<f64> = (0..10).map(|i| (i * i % 7) as f64).collect();
        let r = psrf(&[c.clone(), c]).unwrap();
        assert!((r - libm::sqrt(0.9)).abs() < 1e-15);
    }

    #[test]
    fn alternating_chains_have_equal_means() {
        let a: Vec<f64> = (0..20).map(|i| (i % 2) as f64).collect();
        let b: Vec<f64> = (0..20).map(|i| ((i + 1) % 2) as f64).collect();
        let r = psrf(&[a, b]).unwrap();
        assert!((r - libm::sqrt(19.0 / 20.0)).abs() < 1e-15);
    }

    #[test]
    fn separated_chains_exceed_one() {
        let a: Vec<f64> = (0..50).map(|i| (i % 3) as f64).collect();
        let b: Vec<f64> = a.iter().map(|x| x + 5.0).collect();
        assert!(psrf(&[a, b]).unwrap() > 2.0);
    }

    #[test]
    fn constant_chains() {
        assert_eq!(psrf(&[alloc::vec![1.0; 4], alloc::vec![1.0; 4]]).unwrap(), 1.0);
        assert_eq!(
            psrf(&[alloc::vec![1.0; 4], alloc::vec![2.0; 4]]).unwrap(),
            f64::INFINITY
        );
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(psrf(&[alloc::vec![1.0, 2.0]]).is_err());
        assert!(psrf(&[alloc::vec![1.0, 2.0], alloc::vec![1.0]]).is_err());
        assert!(psrf(&[alloc::vec![1.0], alloc::vec![1.0]]).is_err());
    }
}
