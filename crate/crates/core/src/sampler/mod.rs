//! Collapsed Gibbs sampler for the dependent PoINAR(1) model.
//!
//! One sweep runs, in order: innovations (Step 1), memberships (Step 2),
//! cluster values (Step 3), seasonal effects (Step 4), thinning
//! probabilities (Step 5) and the DP concentration (Step 6). Unless
//! disabled, a rescaling move between Steps 4 and 5 redraws the shared scale
//! of cluster values and seasonal effects (see [`sample_scale`]).

mod chain;
mod innovation;
mod membership;
mod scale;
mod stats;
mod updates;

pub use chain::{
    chain_rng, initial_state, run_chain, run_chains, sweep, Draw, InitPriors, InnovationStrategy,
    PosteriorDraws, SamplerConfig,
};
pub use innovation::{
    innovation_pmf, innovation_support, metropolis_innovation, sample_innovation, InnovationPmf,
    ALPHA_CLAMP,
};
pub use membership::{existing_cluster_weight, log_predictive, new_cluster_weight, sample_memberships};
pub use scale::{sample_scale, scale_conditional, scale_log_density};
pub use stats::SuffStats;
pub use updates::{
    concentration_mixture, rate_posteriors, sample_concentration, sample_seasonals,
    sample_thinnings, sample_unique_rates, seasonal_posteriors, thinning_posterior,
    ConcentrationMixture,
};
