use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::error::domain;
use crate::Result;

/// Binomial thinning `alpha ∘ x`: the number of survivors among `x`
/// independent Bernoulli(`alpha`) trials.
pub fn binomial_thin<R: Rng + ?Sized>(x: u64, alpha: f64, rng: &mut R) -> Result<u64> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(domain!("thinning probability {alpha} outside [0, 1]"));
    }
    if x == 0 || alpha == 0.0 {
        return Ok(0);
    }
    if alpha == 1.0 {
        return Ok(x);
    }
    Ok(Binomial::new(x, alpha).expect("validated").sample(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn endpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(binomial_thin(5, 0.0, &mut rng).unwrap(), 0);
        assert_eq!(binomial_thin(7, 1.0, &mut rng).unwrap(), 7);
        assert!(binomial_thin(7, 1.5, &mut rng).is_err());
        assert!(binomial_thin(7, -0.1, &mut rng).is_err());
    }

    #[test]
    fn mean_of_many_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 1_000_000;
        let total: u64 = (0..n).map(|_| binomial_thin(10, 0.3, &mut rng).unwrap()).sum();
        let mean = total as f64 / n as f64;
        // sd of the mean: sqrt(10 * 0.3 * 0.7 / n)
        let sd = libm::sqrt(2.1 / n as f64);
        assert!((mean - 3.0).abs() < 3.0 * sd, "mean {mean}");
    }
}
