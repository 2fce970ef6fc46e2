use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::innovation::{innovation_support, metropolis_innovation, ALPHA_CLAMP};
use super::membership::sample_memberships;
use super::scale::sample_scale;
use super::stats::SuffStats;
use super::updates::{sample_concentration, sample_seasonals, sample_thinnings, sample_unique_rates};
use crate::draw;
use crate::math::{normalize_log_weights, pick_index, LnFactorials};
use crate::model::{crp_draw, CountPanel, Hyperparams, ModelState, RateMode, MONTHS};
use crate::{Error, Result};

/// How Step 1 draws each innovation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum InnovationStrategy {
    /// Enumerate the full support and draw exactly.
    #[default]
    ExactEnumeration,
    /// Exact below `threshold`; one independence Metropolis step with a
    /// Poisson proposal when the current count exceeds it.
    MetropolisPoisson { threshold: u64 },
}

/// Distributions of the starting values (shape/rate for Gammas).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitPriors {
    pub theta: (f64, f64),
    pub alpha: (f64, f64),
    pub tau: (f64, f64),
    pub phi: (f64, f64),
}

impl Default for InitPriors {
    fn default() -> Self {
        Self {
            theta: (1.0, 1.0),
            alpha: (1.0, 1.0),
            tau: (2.0, 4.0),
            phi: (1.0, 1.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub n_iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub n_chains: usize,
    pub seed: u64,
    pub hyper: Hyperparams,
    #[serde(default)]
    pub innovation_strategy: InnovationStrategy,
    #[serde(default)]
    pub init: InitPriors,
    /// Store latent innovations in every recorded draw.
    #[serde(default)]
    pub keep_innovations: bool,
    /// Redraw the shared scale of cluster values and seasonal effects each
    /// sweep; only their products are identified.
    #[serde(default = "enabled")]
    pub rescale: bool,
}

fn enabled() -> bool {
    true
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            n_iterations: 1000,
            burn_in: 100,
            thin: 5,
            n_chains: 1,
            seed: 0,
            hyper: Hyperparams::default(),
            innovation_strategy: InnovationStrategy::default(),
            init: InitPriors::default(),
            keep_innovations: false,
            rescale: true,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        self.hyper.validate()?;
        if self.n_iterations == 0 || self.thin == 0 || self.n_chains == 0 {
            return Err(Error::Config(
                "iterations, thinning interval and chain count must be positive".into(),
            ));
        }
        if self.burn_in >= self.n_iterations {
            return Err(Error::Config(alloc::format!(
                "burn-in {} must be smaller than the {} iterations",
                self.burn_in,
                self.n_iterations
            )));
        }
        Ok(())
    }

    /// Number of draws each chain records.
    pub fn draws_per_chain(&self) -> usize {
        (self.n_iterations - self.burn_in) / self.thin
    }

    fn keeps(&self, iteration: usize) -> bool {
        iteration > self.burn_in && (iteration - self.burn_in) % self.thin == 0
    }
}

/// One recorded state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Draw {
    pub chain: usize,
    /// One-based sweep number.
    pub iteration: usize,
    pub state: ModelState,
}

/// Recorded draws, in chain then iteration order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PosteriorDraws {
    pub draws: Vec<Draw>,
}

impl PosteriorDraws {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Draw> {
        self.draws.iter()
    }

    pub fn merge(chains: impl IntoIterator<Item = PosteriorDraws>) -> Self {
        Self {
            draws: chains.into_iter().flat_map(|c| c.draws).collect(),
        }
    }

    /// Distinct chain indices in order of appearance.
    pub fn chain_ids(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = Vec::new();
        for d in &self.draws {
            if !ids.contains(&d.chain) {
                ids.push(d.chain);
            }
        }
        ids
    }

    /// Per-chain sequences of a scalar functional of the state.
    pub fn chain_traces(&self, f: impl Fn(&ModelState) -> f64) -> Vec<Vec<f64>> {
        self.chain_ids()
            .into_iter()
            .map(|c| {
                self.draws
                    .iter()
                    .filter(|d| d.chain == c)
                    .map(|d| f(&d.state))
                    .collect()
            })
            .collect()
    }
}

/// Random stream of chain `chain` under master seed `seed`.
pub fn chain_rng(seed: u64, chain: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chain as u64);
    rng
}

/// Starting state: parameters from `config.init`, memberships from a CRP
/// with the drawn concentration, innovations at the lower end of their support.
pub fn initial_state<R: Rng + ?Sized>(
    panel: &CountPanel,
    config: &SamplerConfig,
    rng: &mut R,
) -> Result<ModelState> {
    let init = &config.init;
    let l = panel.n_series();
    let theta = (0..MONTHS)
        .map(|_| draw::gamma(rng, init.theta.0, init.theta.1))
        .collect();
    let alpha = (0..l).map(|_| draw::beta(rng, init.alpha.0, init.alpha.1)).collect();
    let tau = draw::gamma(rng, init.tau.0, init.tau.1).max(1e-6);
    let z = crp_draw(l, tau, rng)?;
    let k = z.iter().max().map_or(0, |m| m + 1);
    let phi_star = (0..k)
        .map(|_| draw::gamma(rng, init.phi.0, init.phi.1).max(1e-12))
        .collect();
    let innovations = panel
        .counts()
        .iter()
        .map(|y| {
            let mut eps = Vec::with_capacity(y.len());
            eps.push(y[0]);
            eps.extend(y.windows(2).map(|w| innovation_support(w[0], w[1]).0));
            eps
        })
        .collect();
    Ok(ModelState {
        alpha,
        z,
        phi_star,
        theta,
        tau,
        innovations,
    })
}

struct Workspace {
    table: LnFactorials,
    buf: Vec<f64>,
}

fn sample_innovations<R: Rng + ?Sized>(
    state: &mut ModelState,
    panel: &CountPanel,
    hyper: &Hyperparams,
    strategy: InnovationStrategy,
    ws: &mut Workspace,
    rng: &mut R,
) {
    let season = panel.season();
    let ln_theta: Vec<f64> = state.theta.iter().map(|t| libm::log(*t)).collect();
    for l in 0..panel.n_series() {
        let y = panel.series(l);
        let rate_l = state.series_rate(l, hyper.mode, panel.exposure());
        let a = state.alpha[l].clamp(ALPHA_CLAMP, 1.0 - ALPHA_CLAMP);
        let base = libm::log(rate_l) + libm::log1p(-a) - libm::log(a);
        let eps = &mut state.innovations[l];
        eps[0] = y[0];
        for t in 1..y.len() {
            let (yp, yc) = (y[t - 1], y[t]);
            if yc == 0 || yp == 0 {
                eps[t] = yc;
                continue;
            }
            let m = season.month(t);
            if let InnovationStrategy::MetropolisPoisson { threshold } = strategy {
                if yc > threshold {
                    let rate = rate_l * state.theta[m];
                    eps[t] = metropolis_innovation(eps[t], yp, yc, a, rate, &ws.table, rng);
                    continue;
                }
            }
            let log_ratio = base + ln_theta[m];
            let lower = yc.saturating_sub(yp);
            ws.buf.clear();
            for e in lower..=yc {
                ws.buf.push(
                    e as f64 * log_ratio
                        - ws.table.get(e)
                        - ws.table.get(yc - e)
                        - ws.table.get(yp + e - yc),
                );
            }
            normalize_log_weights(&mut ws.buf);
            eps[t] = lower + pick_index(&ws.buf, draw::uniform(rng)) as u64;
        }
    }
}

/// One full sweep of Steps 1-6 (plus the rescaling move when enabled).
pub fn sweep<R: Rng + ?Sized>(
    state: &mut ModelState,
    panel: &CountPanel,
    config: &SamplerConfig,
    rng: &mut R,
) {
    let mut ws = Workspace {
        table: LnFactorials::new(panel.max_count()),
        buf: Vec::new(),
    };
    sweep_with(state, panel, config, &mut ws, rng);
}

fn sweep_with<R: Rng + ?Sized>(
    state: &mut ModelState,
    panel: &CountPanel,
    config: &SamplerConfig,
    ws: &mut Workspace,
    rng: &mut R,
) {
    let hyper = &config.hyper;
    sample_innovations(state, panel, hyper, config.innovation_strategy, ws, rng);
    let stats = SuffStats::compute(state, panel);
    sample_memberships(state, panel, &stats, hyper, None, rng);
    let stats = SuffStats::compute(state, panel);
    debug_assert!(stats.is_consistent());
    sample_unique_rates(state, panel, &stats, hyper, rng);
    sample_seasonals(state, panel, &stats, hyper, rng);
    if config.rescale {
        sample_scale(state, hyper, rng);
    }
    sample_thinnings(state, panel, &stats, hyper, rng);
    state.tau = sample_concentration(state.n_clusters(), panel.n_series(), state.tau, hyper, rng);
    debug_assert!(state.validate(Some(panel)).is_ok());
}

fn check_inputs(panel: &CountPanel, config: &SamplerConfig) -> Result<()> {
    config.validate()?;
    if config.hyper.mode == RateMode::Covariate && panel.exposure().is_none() {
        return Err(Error::Config(
            "covariate mode requires an exposure for every series".into(),
        ));
    }
    Ok(())
}

/// Runs one chain and records the thinned post-burn-in states.
pub fn run_chain<R: Rng + ?Sized>(
    panel: &CountPanel,
    config: &SamplerConfig,
    chain: usize,
    rng: &mut R,
) -> Result<PosteriorDraws> {
    check_inputs(panel, config)?;
    let mut state = initial_state(panel, config, rng)?;
    let mut ws = Workspace {
        table: LnFactorials::new(panel.max_count()),
        buf: Vec::new(),
    };
    let mut draws = Vec::with_capacity(config.draws_per_chain());
    for iteration in 1..=config.n_iterations {
        sweep_with(&mut state, panel, config, &mut ws, rng);
        if config.keeps(iteration) {
            let mut snapshot = state.clone();
            if !config.keep_innovations {
                snapshot.innovations = Vec::new();
            }
            draws.push(Draw {
                chain,
                iteration,
                state: snapshot,
            });
        }
    }
    Ok(PosteriorDraws { draws })
}

/// Runs `config.n_chains` chains one after another, chain `c` on stream
/// [`chain_rng`]`(config.seed, c)`.
pub fn run_chains(panel: &CountPanel, config: &SamplerConfig) -> Result<Vec<PosteriorDraws>> {
    (0..config.n_chains)
        .map(|c| run_chain(panel, config, c, &mut chain_rng(config.seed, c)))
        .collect()
}
