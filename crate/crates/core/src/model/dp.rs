use alloc::vec::Vec;
use rand::Rng;

use crate::draw;
use crate::error::domain;
use crate::Result;

/// Memberships for `n` items drawn sequentially from the Chinese restaurant
/// process with concentration `tau`. Labels are zero-based in order of creation.
pub fn crp_draw<R: Rng + ?Sized>(n: usize, tau: f64, rng: &mut R) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(domain!("CRP needs at least one item"));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(domain!("CRP concentration {tau} must be positive"));
    }
    let mut z = Vec::with_capacity(n);
    let mut sizes: Vec<usize> = Vec::new();
    z.push(0);
    sizes.push(1);
    for i in 1..n {
        // item i joins with i items already seated
        let u = draw::uniform(rng) * (i as f64 + tau);
        let mut acc = 0.0;
        let mut chosen = sizes.len();
        for (k, nk) in sizes.iter().enumerate() {
            acc += *nk as f64;
            if u < acc {
                chosen = k;
                break;
            }
        }
        if chosen == sizes.len() {
            sizes.push(0);
        }
        sizes[chosen] += 1;
        z.push(chosen);
    }
    Ok(z)
}

/// Truncated stick-breaking weights.
#[derive(Debug, Clone, PartialEq)]
pub struct StickBreaking {
    pub weights: Vec<f64>,
    /// Mass not allocated to the first `weights.len()` sticks.
    pub remainder: f64,
}

/// First `truncation` stick-breaking weights `beta_k = nu_k * Π_{j<k} (1 - nu_j)`
/// with `nu_k ~ Beta(1, tau)`.
pub fn stick_breaking<R: Rng + ?Sized>(
    tau: f64,
    truncation: usize,
    rng: &mut R,
) -> Result<StickBreaking> {
    if truncation == 0 {
        return Err(domain!("stick-breaking truncation must be at least 1"));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(domain!("stick-breaking concentration {tau} must be positive"));
    }
    let mut weights = Vec::with_capacity(truncation);
    let mut remaining = 1.0;
    for _ in 0..truncation {
        let nu = draw::beta(rng, 1.0, tau);
        weights.push(nu * remaining);
        remaining *= 1.0 - nu;
    }
    Ok(StickBreaking {
        weights,
        remainder: remaining,
    })
}
