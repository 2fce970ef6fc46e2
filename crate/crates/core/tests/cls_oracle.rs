//! Conditional least squares against two oracles: a grid search over
//! `(alpha, lambda)` with the seasonal effects profiled out, and the exact
//! unconstrained least-squares fit of `y[t]` on `y[t-1]` and month dummies,
//! which has the same minimum because `lambda theta[m]` is free per month.

use dpoinar_core::baselines::{cls_fit, cls_sse, ClsOptions};
use dpoinar_core::model::{simulate_poinar, InitialValue, SeasonMap};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn least_squares_sse(y: &[u64], season: &SeasonMap) -> f64 {
    let months: Vec<usize> = {
        let mut m: Vec<usize> = (1..y.len()).map(|t| season.month(t)).collect();
        m.sort();
        m.dedup();
        m
    };
    let n = y.len() - 1;
    let mut x = DMatrix::<f64>::zeros(n, 1 + months.len());
    let mut b = DVector::<f64>::zeros(n);
    for t in 1..y.len() {
        x[(t - 1, 0)] = y[t - 1] as f64;
        let col = months.iter().position(|m| *m == season.month(t)).unwrap();
        x[(t - 1, 1 + col)] = 1.0;
        b[t - 1] = y[t] as f64;
    }
    let xtx = x.transpose() * &x;
    let xtb = x.transpose() * &b;
    let beta = xtx.lu().solve(&xtb).unwrap();
    (b - x * beta).norm_squared()
}

/// SSE at `(alpha, lambda)` with theta minimised under `Σ theta = 1`.
fn profiled_sse(y: &[u64], season: &SeasonMap, alpha: f64, lambda: f64) -> f64 {
    let mut n = [0.0; 12];
    let mut r = [0.0; 12];
    for t in 1..y.len() {
        let m = season.month(t);
        n[m] += 1.0;
        r[m] += y[t] as f64 - alpha * y[t - 1] as f64;
    }
    // minimise Σ_m Σ_t (r_t - lambda theta_m)² s.t. Σ theta = 1 (absent
    // months fixed at 1/12)
    let present: Vec<usize> = (0..12).filter(|m| n[*m] > 0.0).collect();
    let budget = present.len() as f64 / 12.0;
    let inv: f64 = present.iter().map(|m| 1.0 / n[*m]).sum();
    let mean_sum: f64 = present.iter().map(|m| r[*m] / n[*m]).sum();
    let shift = (mean_sum - budget * lambda) / inv;
    let mut theta = [1.0 / 12.0; 12];
    for &m in &present {
        theta[m] = (r[m] - shift) / (lambda * n[m]);
    }
    cls_sse(y, season, alpha, lambda, &theta)
}

fn grid_minimum(y: &[u64], season: &SeasonMap) -> f64 {
    let mean = y.iter().sum::<u64>() as f64 / y.len() as f64;
    let mut best = f64::INFINITY;
    for i in 0..20 {
        let alpha = i as f64 / 20.0;
        for j in 1..=400 {
            let lambda = 12.0 * mean * j as f64 / 200.0;
            best = best.min(profiled_sse(y, season, alpha, lambda));
        }
    }
    best
}

#[test]
fn fits_reach_the_least_squares_minimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for case in 0..20 {
        let len = rng.random_range(60..400);
        let season = SeasonMap::weekly(2000 + case, 1 + (case as u32 % 12), 3, len);
        let alpha = rng.random_range(0.0..0.9);
        let lambda = rng.random_range(0.3..8.0);
        let theta: Vec<f64> = (0..12).map(|_| rng.random_range(0.5..1.5)).collect();
        let y = simulate_poinar(lambda, alpha, &theta, &season, len, InitialValue::Stationary, &mut rng)
            .unwrap();
        let est = cls_fit(&y, &season, &ClsOptions::default()).unwrap();
        assert!(est.converged, "case {case} did not converge in {} cycles", est.iterations);
        assert!((est.theta.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        for w in est.sse_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-9 * w[0].max(1.0), "case {case}: SSE rose");
        }
        let exact = least_squares_sse(&y, &season);
        assert!((est.sse - exact).abs() <= 1e-7 * exact.max(1.0), "case {case}: {} vs {exact}", est.sse);
        assert!(est.sse <= grid_minimum(&y, &season) + 1e-6, "case {case}");
    }
}

#[test]
fn white_noise_gives_small_thinning() {
    let season = SeasonMap::weekly(2001, 1, 1, 5000);
    let mut total = 0.0;
    for seed in 0..5 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y = simulate_poinar(2.0, 0.0, &[1.0; 12], &season, 5000, InitialValue::Stationary, &mut rng)
            .unwrap();
        total += cls_fit(&y, &season, &ClsOptions::default()).unwrap().alpha / 5.0;
    }
    assert!(total.abs() < 0.1, "mean alpha {total}");
}
