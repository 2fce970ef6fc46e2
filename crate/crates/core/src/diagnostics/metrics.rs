//! Point-forecast accuracy: RMSE, APE and bias, overall and by last count.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::dimension;
use crate::math::{mean, sample_variance};
use crate::Result;

/// Accuracy of one group of forecasts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LastValueRow {
    /// Last observed count of the group.
    pub last: u64,
    /// The group collects every last count `>= last`.
    pub at_least: bool,
    pub n: usize,
    /// Share of all forecasts in this group.
    pub frequency: f64,
    pub rmse: f64,
    pub rmse_se: f64,
    pub bias: f64,
    pub bias_se: f64,
}

/// Forecast accuracy summary.
///
/// Standard errors are those of the sample mean: `sd(e)/sqrt(n)` for the
/// bias and, by the delta method, `se(mean e²) / (2 rmse)` for the RMSE.
/// Both are zero when fewer than two forecasts are available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n: usize,
    pub rmse: f64,
    pub rmse_se: f64,
    pub bias: f64,
    pub bias_se: f64,
    /// Mean of `|pred - truth| / truth` over forecasts with `truth > 0`.
    pub ape: f64,
    pub ape_n: usize,
    /// Forecasts left out of the APE because the truth is zero.
    pub ape_skipped: usize,
    pub by_last_value: Vec<LastValueRow>,
}

struct Summary {
    rmse: f64,
    rmse_se: f64,
    bias: f64,
    bias_se: f64,
}

fn summarize(errors: &[f64]) -> Summary {
    if errors.is_empty() {
        return Summary {
            rmse: 0.0,
            rmse_se: 0.0,
            bias: 0.0,
            bias_se: 0.0,
        };
    }
    let n = errors.len() as f64;
    let squares: Vec<f64> = errors.iter().map(|e| e * e).collect();
    let rmse = libm::sqrt(mean(&squares));
    let (bias_se, rmse_se) = if errors.len() < 2 {
        (0.0, 0.0)
    } else {
        let mse_se = libm::sqrt(sample_variance(&squares) / n);
        let rmse_se = if rmse > 0.0 { mse_se / (2.0 * rmse) } else { 0.0 };
        (libm::sqrt(sample_variance(errors) / n), rmse_se)
    };
    Summary {
        rmse,
        rmse_se,
        bias: mean(errors),
        bias_se,
    }
}

/// Summarises forecasts `predictions` of `truths`, grouped by the last
/// observed count. With `top = Some(c)` every last count `>= c` shares one
/// group, as in a table whose final column reads "c or more".
pub fn forecast_metrics(
    predictions: &[f64],
    truths: &[f64],
    last_values: &[u64],
    top: Option<u64>,
) -> Result<EvalReport> {
    let n = predictions.len();
    if truths.len() != n || last_values.len() != n {
        return Err(dimension!(
            "{} predictions, {} truths and {} last values",
            n,
            truths.len(),
            last_values.len()
        ));
    }
    let errors: Vec<f64> = predictions.iter().zip(truths).map(|(p, t)| p - t).collect();
    let overall = summarize(&errors);

    let mut ape_sum = 0.0;
    let mut ape_n = 0;
    for (e, t) in errors.iter().zip(truths) {
        if *t > 0.0 {
            ape_sum += e.abs() / t;
            ape_n += 1;
        }
    }

    let mut groups: BTreeMap<u64, Vec<f64>> = BTreeMap::new();
    for (e, &last) in errors.iter().zip(last_values) {
        let key = top.map_or(last, |c| last.min(c));
        groups.entry(key).or_default().push(*e);
    }
    let by_last_value = groups
        .into_iter()
        .map(|(last, errs)| {
            let s = summarize(&errs);
            LastValueRow {
                last,
                at_least: top == Some(last),
                n: errs.len(),
                frequency: errs.len() as f64 / n as f64,
                rmse: s.rmse,
                rmse_se: s.rmse_se,
                bias: s.bias,
                bias_se: s.bias_se,
            }
        })
        .collect();

    Ok(EvalReport {
        n,
        rmse: overall.rmse,
        rmse_se: overall.rmse_se,
        bias: overall.bias,
        bias_se: overall.bias_se,
        ape: if ape_n > 0 { ape_sum / ape_n as f64 } else { 0.0 },
        ape_n,
        ape_skipped: n - ape_n,
        by_last_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_forecasts() {
        let t = [1.0, 0.0, 3.0];
        let r = forecast_metrics(&t, &t, &[0, 1, 2], None).unwrap();
        assert_eq!((r.rmse, r.bias, r.ape), (0.0, 0.0, 0.0));
        assert_eq!(r.ape_skipped, 1);
    }

    #[test]
    fn constant_offset() {
        let t = [1.0, 2.0, 5.0, 0.5];
        let p: Vec<f64> = t.iter().map(|x| x + 1.0).collect();
        let r = forecast_metrics(&p, &t, &[0, 0, 1, 1], None).unwrap();
        assert!((r.bias - 1.0).abs() < 1e-15);
        assert!((r.rmse - 1.0).abs() < 1e-15);
        assert_eq!(r.bias_se, 0.0);
        assert_eq!(r.rmse_se, 0.0);
    }

    #[test]
    fn ape_example() {
        let r = forecast_metrics(&[2.0], &[1.0], &[0], None).unwrap();
        assert_eq!(r.ape, 1.0);
        assert_eq!(r.ape_n, 1);
    }

    #[test]
    fn groups_and_top_bucket() {
        let p = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        let t = [0.0; 6];
        let r = forecast_metrics(&p, &t, &[0, 0, 1, 4, 7, 9], Some(4)).unwrap();
        let lasts: Vec<u64> = r.by_last_value.iter().map(|g| g.last).collect();
        assert_eq!(lasts, [0, 1, 4]);
        assert!(r.by_last_value[2].at_least);
        assert_eq!(r.by_last_value[2].n, 3);
        let total: f64 = r.by_last_value.iter().map(|g| g.frequency).sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert!((r.by_last_value[0].rmse - libm::sqrt(2.5)).abs() < 1e-15);
    }

    #[test]
    fn standard_errors() {
        let p = [1.0, 3.0, 2.0, 6.0];
        let t = [0.0; 4];
        let r = forecast_metrics(&p, &t, &[0; 4], None).unwrap();
        // errors 1,3,2,6: mean 3, sample variance 14/3.
        assert!((r.bias_se - libm::sqrt(14.0 / 3.0 / 4.0)).abs() < 1e-14);
        // squares 1, 9, 4, 36 with mean 12.5.
        let sq = [1.0, 9.0, 4.0, 36.0];
        let m = 12.5;
        let var = sq.iter().map(|s: &f64| (s - m) * (s - m)).sum::<f64>() / 3.0;
        let expect = libm::sqrt(var / 4.0) / (2.0 * libm::sqrt(m));
        assert!((r.rmse_se - expect).abs() < 1e-14);
    }

    #[test]
    fn rmse_decomposes_into_bias_and_spread() {
        let p = [0.3, 1.9, 2.2, 4.0, 0.0, 1.1];
        let t = [1.0, 1.0, 2.0, 3.0, 1.0, 0.0];
        let r = forecast_metrics(&p, &t, &[0; 6], None).unwrap();
        let e: Vec<f64> = p.iter().zip(&t).map(|(a, b)| a - b).collect();
        let var = sample_variance(&e) * 5.0 / 6.0;
        assert!((r.rmse * r.rmse - (r.bias * r.bias + var)).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch() {
        assert!(forecast_metrics(&[1.0], &[1.0, 2.0], &[0], None).is_err());
    }
}
