//! Step 1: latent innovations given counts and parameters.
//!
//! Given `Y[t-1] = p`, `Y[t] = c`, the innovation `e` lies in
//! `max(0, c - p) ..= c` with weight
//! `1 / (e! (c-e)! (p-c+e)!) * (rate (1-alpha) / alpha)^e`.

use alloc::vec::Vec;
use rand::Rng;

use crate::draw;
use crate::error::domain;
use crate::math::{pick_index, LnFactorials};
use crate::Result;

/// Thinning probabilities are clamped into this band before forming `(1-alpha)/alpha`.
pub const ALPHA_CLAMP: f64 = 1e-12;

/// Normalised conditional pmf of one innovation over its support.
#[derive(Debug, Clone, PartialEq)]
pub struct InnovationPmf {
    /// Smallest value in the support.
    pub lower: u64,
    /// `probs[i]` is the probability of `lower + i`.
    pub probs: Vec<f64>,
}

impl InnovationPmf {
    pub fn upper(&self) -> u64 {
        self.lower + self.probs.len() as u64 - 1
    }

    pub fn prob(&self, e: u64) -> f64 {
        if e < self.lower {
            return 0.0;
        }
        self.probs.get((e - self.lower) as usize).copied().unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, p)| (self.lower + i as u64) as f64 * p)
            .sum()
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        if self.probs.len() == 1 {
            return self.lower;
        }
        self.lower + pick_index(&self.probs, draw::uniform(rng)) as u64
    }
}

fn check(alpha: f64, rate: f64) -> Result<()> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(domain!("innovation rate {rate} must be strictly positive"));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(domain!("thinning probability {alpha} outside [0, 1]"));
    }
    Ok(())
}

/// Support bounds of the innovation given consecutive counts.
#[inline]
pub fn innovation_support(y_prev: u64, y_curr: u64) -> (u64, u64) {
    (y_curr.saturating_sub(y_prev), y_curr)
}

/// Exact conditional pmf of the innovation at one transition.
pub fn innovation_pmf(y_prev: u64, y_curr: u64, alpha: f64, rate: f64) -> Result<InnovationPmf> {
    check(alpha, rate)?;
    let table = LnFactorials::new(y_prev.max(y_curr));
    Ok(pmf_with_table(y_prev, y_curr, alpha, rate, &table))
}

pub(crate) fn pmf_with_table(
    y_prev: u64,
    y_curr: u64,
    alpha: f64,
    rate: f64,
    table: &LnFactorials,
) -> InnovationPmf {
    let (lower, upper) = innovation_support(y_prev, y_curr);
    if y_curr == 0 || y_prev == 0 {
        return InnovationPmf {
            lower: upper,
            probs: alloc::vec![1.0],
        };
    }
    let a = alpha.clamp(ALPHA_CLAMP, 1.0 - ALPHA_CLAMP);
    let log_ratio = libm::log(rate) + libm::log1p(-a) - libm::log(a);
    let mut probs: Vec<f64> = (lower..=upper)
        .map(|e| {
            -table.get(e) - table.get(y_curr - e) - table.get(y_prev + e - y_curr)
                + e as f64 * log_ratio
        })
        .collect();
    crate::math::normalize_log_weights(&mut probs);
    InnovationPmf { lower, probs }
}

/// Exact draw of one innovation.
pub fn sample_innovation<R: Rng + ?Sized>(
    y_prev: u64,
    y_curr: u64,
    alpha: f64,
    rate: f64,
    rng: &mut R,
) -> Result<u64> {
    Ok(innovation_pmf(y_prev, y_curr, alpha, rate)?.sample(rng))
}

/// One independence Metropolis-Hastings update of an innovation with a
/// `Poisson(rate)` proposal. With that proposal the acceptance ratio reduces to
/// the ratio of binomial survivor probabilities.
pub fn metropolis_innovation<R: Rng + ?Sized>(
    current: u64,
    y_prev: u64,
    y_curr: u64,
    alpha: f64,
    rate: f64,
    table: &LnFactorials,
    rng: &mut R,
) -> u64 {
    let (lower, upper) = innovation_support(y_prev, y_curr);
    if lower == upper {
        return lower;
    }
    let current = current.clamp(lower, upper);
    let proposal = draw::poisson(rng, rate);
    if proposal < lower || proposal > upper {
        return current;
    }
    let a = alpha.clamp(ALPHA_CLAMP, 1.0 - ALPHA_CLAMP);
    let log_survivors = |e: u64| {
        let s = y_curr - e;
        -table.get(s) - table.get(y_prev - s) + s as f64 * libm::log(a) + (y_prev - s) as f64 * libm::log1p(-a)
    };
    let log_accept = log_survivors(proposal) - log_survivors(current);
    if log_accept >= 0.0 || libm::log(draw::uniform(rng)) < log_accept {
        proposal
    } else {
        current
    }
}
