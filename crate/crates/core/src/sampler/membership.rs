//! Step 2: collapsed Chinese-restaurant update of the cluster memberships.
//!
//! With the cluster value integrated out against the Gamma base measure, the
//! innovation total `S` of a series with exposure `E` (= `Θ`, or `X[l] Θ` in
//! covariate mode) has a negative binomial predictive law
//! `Γ(S+a) / (Γ(a) S!) (b/(b+E))^a (E/(b+E))^S`, where `a = A + γ1` and
//! `b = W + γ2` collect the total `A` and exposure `W` of the other members of
//! the cluster (`A = W = 0` for a new cluster).

use alloc::vec::Vec;
use rand::Rng;

use super::stats::SuffStats;
use crate::draw;
use crate::math::{ln_factorial, ln_gamma, normalize_log_weights, pick_index};
use crate::model::{CountPanel, Hyperparams, ModelState, RateMode};

/// Log predictive probability of a series total `s` with exposure `exposure`
/// joining a cluster whose other members have total `cluster_total` and
/// summed exposure `cluster_exposure`.
pub fn log_predictive(
    s: u64,
    exposure: f64,
    cluster_total: u64,
    cluster_exposure: f64,
    hyper: &Hyperparams,
) -> f64 {
    let a = cluster_total as f64 + hyper.gamma1;
    let b = cluster_exposure + hyper.gamma2;
    let sf = s as f64;
    let mut lp = ln_gamma(sf + a) - ln_gamma(a) - ln_factorial(s) + a * (libm::log(b) - libm::log(b + exposure));
    if s > 0 {
        lp += sf * (libm::log(exposure) - libm::log(b + exposure));
    }
    lp
}

/// `p[l,0]`: the weight for opening a new cluster.
pub fn new_cluster_weight(s: u64, theta_total: f64, hyper: &Hyperparams) -> f64 {
    libm::exp(log_predictive(s, theta_total, 0, 0.0, hyper))
}

/// `p[l,j]` in plain mode, where `others` is the number of members of cluster
/// `j` other than `l` and `a_j` their innovation total.
pub fn existing_cluster_weight(
    s: u64,
    a_j: u64,
    others: usize,
    theta_total: f64,
    hyper: &Hyperparams,
) -> f64 {
    libm::exp(log_predictive(s, theta_total, a_j, others as f64 * theta_total, hyper))
}

#[derive(Debug, Clone)]
struct Table {
    size: usize,
    total: u64,
    exposure: f64,
    phi: f64,
}

/// Per-series exposure multipliers (`X[l]` in covariate mode, 1 otherwise).
pub(crate) fn exposure_multipliers(panel: &CountPanel, mode: RateMode) -> Vec<f64> {
    match (mode, panel.exposure()) {
        (RateMode::Covariate, Some(x)) => x.to_vec(),
        _ => alloc::vec![1.0; panel.n_series()],
    }
}

/// Resamples every membership in turn (visiting series in `order`), removes
/// emptied clusters and relabels by first appearance.
///
/// Clusters created during the sweep get a value drawn from their
/// single-member posterior so the returned state stays complete; Step 3
/// redraws every cluster value afterwards.
pub fn sample_memberships<R: Rng + ?Sized>(
    state: &mut ModelState,
    panel: &CountPanel,
    stats: &SuffStats,
    hyper: &Hyperparams,
    order: Option<&[usize]>,
    rng: &mut R,
) {
    let theta_total = stats.season.theta_total;
    let multipliers = exposure_multipliers(panel, hyper.mode);
    let mut tables: Vec<Option<Table>> = state
        .phi_star
        .iter()
        .map(|&phi| {
            Some(Table {
                size: 0,
                total: 0,
                exposure: 0.0,
                phi,
            })
        })
        .collect();
    for (l, &k) in state.z.iter().enumerate() {
        let t = tables[k].as_mut().expect("fresh table");
        t.size += 1;
        t.total += stats.series_totals[l];
        t.exposure += multipliers[l] * theta_total;
    }

    let l_count = state.z.len();
    let default_order: Vec<usize>;
    let order = match order {
        Some(o) => o,
        None => {
            default_order = (0..l_count).collect();
            &default_order
        }
    };
    let mut labels: Vec<usize> = Vec::new();
    let mut log_w: Vec<f64> = Vec::new();
    let ln_tau = libm::log(state.tau);
    for &l in order {
        let s = stats.series_totals[l];
        let e = multipliers[l] * theta_total;
        let old = state.z[l];
        {
            let t = tables[old].as_mut().expect("occupied table");
            t.size -= 1;
            t.total -= s;
            t.exposure -= e;
            if t.size == 0 {
                tables[old] = None;
            }
        }
        labels.clear();
        log_w.clear();
        for (k, t) in tables.iter().enumerate() {
            if let Some(t) = t {
                labels.push(k);
                log_w.push(libm::log(t.size as f64) + log_predictive(s, e, t.total, t.exposure.max(0.0), hyper));
            }
        }
        log_w.push(ln_tau + log_predictive(s, e, 0, 0.0, hyper));
        normalize_log_weights(&mut log_w);
        let pick = pick_index(&log_w, draw::uniform(rng));
        let k = if pick < labels.len() {
            labels[pick]
        } else {
            let phi = draw::gamma(rng, s as f64 + hyper.gamma1, e + hyper.gamma2);
            let fresh = Table {
                size: 0,
                total: 0,
                exposure: 0.0,
                phi,
            };
            match tables.iter().position(Option::is_none) {
                Some(slot) => {
                    tables[slot] = Some(fresh);
                    slot
                }
                None => {
                    tables.push(Some(fresh));
                    tables.len() - 1
                }
            }
        };
        let t = tables[k].as_mut().expect("chosen table");
        t.size += 1;
        t.total += s;
        t.exposure += e;
        state.z[l] = k;
    }

    let phi: Vec<f64> = tables
        .iter()
        .map(|t| t.as_ref().map_or(f64::NAN, |t| t.phi))
        .collect();
    state.phi_star = phi;
    state.canonicalize();
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_total_weight_reduces_to_prior_odds() {
        let h = Hyperparams {
            gamma1: 2.0,
            gamma2: 0.5,
            ..Hyperparams::default()
        };
        let theta_total = 10.0;
        let p0 = new_cluster_weight(0, theta_total, &h);
        let expected = libm::pow(0.5 / 10.5, 2.0);
        assert!((p0 - expected).abs() < 1e-15);
    }

    #[test]
    fn printed_existing_form_matches() {
        // (1 - Θ/(n Θ + γ2))^(A+γ1) (Θ/(n Θ + γ2))^S Γ(S+A+γ1)/(Γ(A+γ1) S!) with n counting l
        let h = Hyperparams::default();
        let (s, a_j, others, theta) = (4u64, 7u64, 2usize, 3.5);
        let n = others as f64 + 1.0;
        let q = theta / (n * theta + h.gamma2);
        let a = a_j as f64 + h.gamma1;
        let printed = libm::exp(ln_gamma(s as f64 + a) - ln_gamma(a) - ln_factorial(s))
            * libm::pow(1.0 - q, a)
            * libm::pow(q, s as f64);
        let ours = existing_cluster_weight(s, a_j, others, theta, &h);
        assert!(((ours - printed) / printed).abs() < 1e-12);
    }
}
