//! Predictive pmf, quantiles and multi-step means against independent
//! constructions.

use dpoinar_core::forecast::{
    conditional_mean_h_step, conditional_mean_one_step, predictive_pmf, quantile, TAIL_BUDGET,
};
use proptest::prelude::*;
use statrs::distribution::{Binomial, Discrete, Poisson};

fn oracle_pmf(y_t: u64, alpha: f64, rate: f64, y: u64) -> f64 {
    let bin = Binomial::new(alpha, y_t).unwrap();
    let pois = Poisson::new(rate).unwrap();
    (0..=y.min(y_t)).map(|s| bin.pmf(s) * pois.pmf(y - s)).sum()
}

#[test]
fn mean_identity_on_grid() {
    let mut cases = 0;
    for y_t in [0, 1, 2, 5, 13] {
        for alpha in [0.0, 0.1, 0.5, 0.9, 1.0] {
            for (lambda, theta) in [(0.2, 1.0), (1.0, 0.7), (5.0, 1.3), (30.0, 0.5)] {
                let d = predictive_pmf(y_t, alpha, lambda, theta, None).unwrap();
                let expect = conditional_mean_one_step(y_t, alpha, lambda, theta);
                assert!((d.pmf_mean() - expect).abs() < 1e-10);
                assert!(d.mass() >= 1.0 - TAIL_BUDGET);
                cases += 1;
            }
        }
    }
    assert_eq!(cases, 100);
}

#[test]
fn pmf_matches_statrs_convolution() {
    for &(y_t, alpha, rate) in &[(1, 0.5, 1.0), (6, 0.3, 2.5), (12, 0.9, 0.4)] {
        let d = predictive_pmf(y_t, alpha, rate, 1.0, None).unwrap();
        for (y, p) in d.pmf.iter().enumerate() {
            assert!((p - oracle_pmf(y_t, alpha, rate, y as u64)).abs() < 1e-13);
        }
    }
}

proptest! {
    #[test]
    fn quantiles_are_monotone(
        y_t in 0u64..30,
        alpha in 0.0f64..1.0,
        lambda in 0.01f64..20.0,
        mut levels in prop::collection::vec(0.001f64..0.999, 2..8),
    ) {
        let d = predictive_pmf(y_t, alpha, lambda, 1.0, None).unwrap();
        levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let qs: Vec<u64> = levels.iter().map(|u| quantile(&d, *u).unwrap()).collect();
        prop_assert!(qs.windows(2).all(|w| w[0] <= w[1]));
        // quantile definition: CDF(q) >= u > CDF(q - 1)
        let cdf = d.cdf();
        for (u, q) in levels.iter().zip(&qs) {
            prop_assert!(cdf[*q as usize] >= *u);
            if *q > 0 {
                prop_assert!(cdf[*q as usize - 1] < *u);
            }
        }
    }

    #[test]
    fn pmf_mass_and_mean(y_t in 0u64..40, alpha in 0.0f64..=1.0, lambda in 0.0f64..25.0, theta in 0.0f64..3.0) {
        let d = predictive_pmf(y_t, alpha, lambda, theta, None).unwrap();
        prop_assert!(d.pmf.iter().all(|p| *p >= 0.0));
        prop_assert!(d.mass() >= 1.0 - TAIL_BUDGET);
        prop_assert!((d.pmf_mean() - conditional_mean_one_step(y_t, alpha, lambda, theta)).abs() < 1e-10);
    }

    #[test]
    fn h_step_recursion(
        y_t in 0u64..50,
        alpha in 0.0f64..=1.0,
        lambda in 0.0f64..10.0,
        theta in prop::collection::vec(0.1f64..3.0, 12),
        months in prop::collection::vec(0usize..12, 1..20),
    ) {
        // closed form alpha^h y + lambda Σ alpha^(h-j) theta[s(T+j)]
        let h = months.len();
        let closed = alpha.powi(h as i32) * y_t as f64
            + lambda * months.iter().enumerate()
                .map(|(j, m)| alpha.powi((h - j - 1) as i32) * theta[*m]).sum::<f64>();
        let f = conditional_mean_h_step(y_t, alpha, lambda, &theta, &months);
        prop_assert!((f - closed).abs() <= 1e-9 * closed.abs().max(1.0));
        let prev = conditional_mean_h_step(y_t, alpha, lambda, &theta, &months[..h - 1]);
        prop_assert_eq!(f, alpha * prev + lambda * theta[months[h - 1]]);
    }
}
