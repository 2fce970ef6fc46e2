//! Dependent multivariate Poisson INAR(1) modelling for panels of low-count
//! time series.
//!
//! Each series follows a Poisson INAR(1) process
//! `Y[l, t] = alpha[l] ∘ Y[l, t-1] + eps[l, t]` where `∘` is binomial thinning and
//! `eps[l, t] ~ Poisson(lambda[l] * theta[s(t)])`. The per-series rates share a
//! Dirichlet-process prior, so series are clustered by innovation rate, and a
//! month-level seasonal factor `theta` is shared by all series.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command line
//! and multi-threaded chain execution live in the `dpoinar` crate.
//!
//! Module map:
//!
//! * [`model`]: domain types, binomial thinning, simulation, DP prior draws.
//! * [`sampler`]: the collapsed Gibbs sampler and chain runner.
//! * [`forecast`]: conditional means, predictive pmfs and quantiles.
//! * [`baselines`]: conditional least squares and the series-mean predictor.
//! * [`diagnostics`]: PSRF, clustering agreement and forecast metrics.

#![no_std]

extern crate alloc;

#[cfg(feature = "std")]
extern crate std;

pub mod baselines;
pub mod diagnostics;
mod draw;
mod error;
pub mod forecast;
pub mod math;
pub mod model;
pub mod sampler;

pub use error::{Error, Result};
pub use model::{CountPanel, Hyperparams, ModelState, RateMode, SeasonMap};

pub use sampler::{PosteriorDraws, SamplerConfig};
