//! Thin wrappers over `rand_distr` with the parameterisations used in this crate.

use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, Poisson};

/// Poisson draw; a zero mean yields zero.
#[inline]
pub(crate) fn poisson<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).expect("finite positive Poisson mean").sample(rng) as u64
}

/// Gamma draw with shape/rate parameterisation.
#[inline]
pub(crate) fn gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, rate: f64) -> f64 {
    Gamma::new(shape, 1.0 / rate)
        .expect("positive gamma parameters")
        .sample(rng)
}

#[inline]
pub(crate) fn beta<R: Rng + ?Sized>(rng: &mut R, a: f64, b: f64) -> f64 {
    Beta::new(a, b).expect("positive beta parameters").sample(rng)
}

#[inline]
pub(crate) fn uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>()
}
