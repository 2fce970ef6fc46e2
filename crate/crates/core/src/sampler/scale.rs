//! Rescaling move along the unidentified direction `(c φ*, θ / c)`.
//!
//! Only products of cluster values and seasonal effects enter the
//! likelihood, so along this orbit the posterior is shaped by the priors
//! alone. The conjugate Steps 3 and 4 each condition on the other block and
//! creep along the orbit in steps of the posterior's (small) width; with
//! much data the chains then disagree on the overall scale of the rates.
//!
//! This move draws the scale from its full conditional on the orbit. With
//! Haar measure `dc / c` and Jacobian `c^K c^-12`, `x = ln c` has log
//! density `p x − A e^x − B e^-x` with `p = K γ1 − 12 ξ1`, `A = γ2 Σ φ*`
//! and `B = ξ2 Σ θ`, which is concave. It is sampled by one independence
//! Metropolis step from a widened Laplace approximation, whose tails are
//! heavier than the target's on both sides. The move leaves the joint
//! posterior invariant and touches no identified quantity.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::draw;
use crate::model::{Hyperparams, ModelState, MONTHS};

/// Proposal standard deviation relative to the Laplace approximation.
const WIDEN: f64 = 1.5;

/// `(p, A, B)` of the log density of `ln c` at the current state.
pub fn scale_conditional(state: &ModelState, hyper: &Hyperparams) -> (f64, f64, f64) {
    let k = state.n_clusters() as f64;
    let p = k * hyper.gamma1 - MONTHS as f64 * hyper.xi1;
    let a = hyper.gamma2 * state.phi_star.iter().sum::<f64>();
    let b = hyper.xi2 * state.theta.iter().sum::<f64>();
    (p, a, b)
}

/// Unnormalised log density of `x = ln c`.
#[inline]
pub fn scale_log_density(x: f64, p: f64, a: f64, b: f64) -> f64 {
    p * x - a * libm::exp(x) - b * libm::exp(-x)
}

/// Mode and curvature of the log density.
fn laplace(p: f64, a: f64, b: f64) -> (f64, f64) {
    // p - a c + b / c = 0  =>  a c² - p c - b = 0
    let c = (p + libm::sqrt(p * p + 4.0 * a * b)) / (2.0 * a);
    (libm::log(c), a * c + b / c)
}

/// Rescales `φ*` by `c` and `θ` by `1/c`, with `c` drawn as described in the
/// module documentation. Returns the factor applied (1 when rejected).
pub fn sample_scale<R: Rng + ?Sized>(state: &mut ModelState, hyper: &Hyperparams, rng: &mut R) -> f64 {
    let (p, a, b) = scale_conditional(state, hyper);
    if !(a > 0.0 && b > 0.0) {
        return 1.0;
    }
    let (mode, curvature) = laplace(p, a, b);
    let sd = WIDEN / libm::sqrt(curvature);
    let z: f64 = StandardNormal.sample(rng);
    let proposal = mode + sd * z;
    let log_q = |x: f64| -0.5 * ((x - mode) / sd) * ((x - mode) / sd);
    let log_ratio = scale_log_density(proposal, p, a, b) - scale_log_density(0.0, p, a, b) + log_q(0.0)
        - log_q(proposal);
    if libm::log(draw::uniform(rng)) >= log_ratio {
        return 1.0;
    }
    let c = libm::exp(proposal);
    state.phi_star.iter_mut().for_each(|v| *v *= c);
    state.theta.iter_mut().for_each(|v| *v /= c);
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn state() -> ModelState {
        ModelState {
            alpha: vec![0.5; 3],
            z: vec![0, 1, 1],
            phi_star: vec![2.0, 5.0],
            theta: vec![1.0; MONTHS],
            tau: 1.0,
            innovations: Vec::new(),
        }
    }

    #[test]
    fn preserves_products() {
        let mut s = state();
        let before: Vec<f64> = s.phi_star.iter().map(|p| p * s.theta[3]).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = sample_scale(&mut s, &Hyperparams::default(), &mut rng);
        assert!(c > 0.0);
        for (k, v) in before.iter().enumerate() {
            assert!((s.phi_star[k] * s.theta[3] - v).abs() < 1e-12 * v);
        }
    }

    #[test]
    fn laplace_mode_is_stationary() {
        let (p, a, b) = (-8.0, 0.7, 12.0);
        let (x, curv) = laplace(p, a, b);
        let h = 1e-5;
        let d = (scale_log_density(x + h, p, a, b) - scale_log_density(x - h, p, a, b)) / (2.0 * h);
        assert!(d.abs() < 1e-6);
        let d2 = (scale_log_density(x + h, p, a, b) - 2.0 * scale_log_density(x, p, a, b)
            + scale_log_density(x - h, p, a, b))
            / (h * h);
        assert!((d2 + curv).abs() < 1e-3 * curv);
    }

    #[test]
    fn chain_on_scale_has_target_moments() {
        // Iterating the move makes the absolute scale s (relative to the
        // start) a Markov chain with density ∝ s^(p-1) exp(-A0 s - B0 / s).
        let hyper = Hyperparams::default();
        let mut s = state();
        let (p, a0, b0) = scale_conditional(&s, &hyper);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 200_000;
        let mut total = 0.0;
        let mut absolute = 1.0;
        for _ in 0..n {
            absolute *= sample_scale(&mut s, &hyper, &mut rng);
            total += libm::log(absolute);
        }
        let got = total / n as f64;
        // E[ln s] by trapezoid over x = ln s.
        let (mut num, mut den) = (0.0, 0.0);
        let mut x = -30.0;
        while x < 30.0 {
            let w = libm::exp(scale_log_density(x, p, a0, b0) - scale_log_density(0.0, p, a0, b0));
            num += x * w;
            den += w;
            x += 1e-3;
        }
        let expect = num / den;
        assert!((got - expect).abs() < 0.02, "{got} vs {expect}");
    }
}
