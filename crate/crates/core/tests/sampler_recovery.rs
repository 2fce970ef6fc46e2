//! End-to-end sampler behaviour on a small simulated panel.

use dpoinar_core::diagnostics::{cluster_count_histogram, hamming_error, representative_assignment};
use dpoinar_core::model::{simulate_panel, PanelSpec, SeasonMap};
use dpoinar_core::sampler::{run_chains, SamplerConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn setup() -> (dpoinar_core::model::SimulatedPanel, SamplerConfig) {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let spec = PanelSpec::blocks(&[1.0, 6.0], 6, 0.3, SeasonMap::weekly(2001, 1, 1, 208));
    let sim = simulate_panel(&spec, &mut rng).unwrap();
    let config = SamplerConfig {
        n_iterations: 600,
        burn_in: 100,
        thin: 5,
        n_chains: 2,
        seed: 3,
        ..SamplerConfig::default()
    };
    (sim, config)
}

#[test]
fn recovers_two_clusters() {
    let (sim, config) = setup();
    let chains = run_chains(&sim.panel, &config).unwrap();
    assert_eq!(chains.len(), 2);
    for c in &chains {
        assert_eq!(c.len(), 100);
    }
    let draws = dpoinar_core::PosteriorDraws::merge(chains);
    let hist = cluster_count_histogram(&draws);
    assert_eq!(hist.mode(), Some(2));
    let rep = representative_assignment(&draws).unwrap();
    assert_eq!(hamming_error(&rep.z, &sim.truth.z).unwrap(), 0.0);

    let n = draws.len() as f64;
    let alpha_mean: f64 = draws.iter().map(|d| d.state.alpha.iter().sum::<f64>() / 12.0).sum::<f64>() / n;
    assert!((alpha_mean - 0.3).abs() < 0.08, "mean thinning {alpha_mean}");
    // Only the products lambda * theta are identified; compare the total
    // arrival rate per week averaged over the observed weeks.
    let season = sim.panel.season();
    let weeks = season.len() as f64;
    let arrivals: f64 = draws
        .iter()
        .map(|d| {
            let theta_bar = season.months().map(|m| d.state.theta[m]).sum::<f64>() / weeks;
            d.state.z.iter().map(|k| d.state.phi_star[*k]).sum::<f64>() * theta_bar
        })
        .sum::<f64>()
        / n;
    assert!((arrivals / 42.0 - 1.0).abs() < 0.1, "arrival rate {arrivals}");
    for d in draws.iter() {
        d.state.validate(Some(&sim.panel)).unwrap();
    }
}

#[test]
fn chains_are_reproducible() {
    let (sim, config) = setup();
    let config = SamplerConfig { n_iterations: 150, ..config };
    let a = run_chains(&sim.panel, &config).unwrap();
    let b = run_chains(&sim.panel, &config).unwrap();
    assert_eq!(a, b);
    assert_ne!(a[0].draws[0].state, a[1].draws[0].state);
}
