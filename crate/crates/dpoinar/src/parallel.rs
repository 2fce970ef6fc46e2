//! Multi-threaded chain execution.

use dpoinar_core::sampler::{chain_rng, run_chain};
use dpoinar_core::{CountPanel, PosteriorDraws, SamplerConfig};
use rayon::prelude::*;

/// Runs `config.n_chains` chains concurrently. Chain `c` uses the stream
/// `chain_rng(config.seed, c)`, so the result equals the sequential
/// `dpoinar_core::sampler::run_chains`.
pub fn run_chains_parallel(
    panel: &CountPanel,
    config: &SamplerConfig,
) -> dpoinar_core::Result<Vec<PosteriorDraws>> {
    (0..config.n_chains)
        .into_par_iter()
        .map(|c| run_chain(panel, config, c, &mut chain_rng(config.seed, c)))
        .collect()
}
