//! Rolling-origin evaluation of one-week-ahead forecasts.
//!
//! For every origin week `t` the models are fitted on weeks `0..t` and
//! forecast week `t`; the forecasts are scored against the observed counts
//! and broken down by the last observed count.

use std::path::Path;

use dpoinar_core::baselines::{cls_fit, cls_forecast, spp_fit_forecast, ClsOptions, MIN_LENGTH};
use dpoinar_core::diagnostics::{forecast_metrics, EvalReport};
use dpoinar_core::forecast::{posterior_mean_forecast, SeriesContext};
use dpoinar_core::math::{civil_from_days, mix_seed};
use dpoinar_core::model::{simulate_panel, PanelSpec, SeasonMap, SimulatedPanel, MONTHS};
use dpoinar_core::{CountPanel, PosteriorDraws, SamplerConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::write_json;
use crate::parallel::run_chains_parallel;

/// Which weeks are forecast.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Origins {
    /// The first week starting in each month of `year`.
    FirstWeekOfMonth { year: i32 },
    /// The last `weeks` weeks of the panel.
    LastWeeks { weeks: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    /// Sampler settings; origin `t` runs with seed `mix_seed(seed, t)`.
    pub sampler: SamplerConfig,
    pub origins: Origins,
    /// Last counts at or above this share one group.
    pub top_bucket: Option<u64>,
}

/// Week indices to forecast.
pub fn origin_weeks(season: &SeasonMap, origins: Origins) -> Result<Vec<usize>> {
    let n = season.len();
    let weeks: Vec<usize> = match origins {
        Origins::LastWeeks { weeks } => (n.saturating_sub(weeks)..n).collect(),
        Origins::FirstWeekOfMonth { year } => {
            let start = season
                .weekly_start()
                .ok_or_else(|| Error::Config("month origins need a weekly-dated panel".into()))?;
            let mut out = Vec::new();
            let mut month_seen = [false; MONTHS];
            for t in 0..n {
                let (y, m, _) = civil_from_days(start + 7 * t as i64);
                if y == year as i64 && !month_seen[m as usize - 1] {
                    month_seen[m as usize - 1] = true;
                    out.push(t);
                }
            }
            out
        }
    };
    if weeks.is_empty() {
        return Err(Error::Config("no forecast origins fall inside the panel".into()));
    }
    if weeks[0] < MIN_LENGTH {
        return Err(Error::Config(format!(
            "origin week {} leaves fewer than {MIN_LENGTH} training weeks",
            weeks[0]
        )));
    }
    Ok(weeks)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: String,
    pub report: EvalReport,
}

/// Reports for the DP model (`BNP`), `CLS` and `SPP` over all origins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalTable {
    pub origins: Vec<usize>,
    pub n_forecasts: usize,
    pub cls_fallbacks: usize,
    pub methods: Vec<MethodReport>,
}

struct OriginForecasts {
    last: Vec<u64>,
    truth: Vec<f64>,
    bnp: Vec<f64>,
    cls: Vec<f64>,
    spp: Vec<f64>,
    cls_fallbacks: usize,
}

fn forecast_origin(panel: &CountPanel, t: usize, config: &EvalConfig) -> Result<OriginForecasts> {
    let train = panel.prefix(t)?;
    let sampler = SamplerConfig {
        seed: mix_seed(config.sampler.seed, t as u64),
        ..config.sampler.clone()
    };
    let draws = PosteriorDraws::merge(run_chains_parallel(&train, &sampler)?);
    let month = panel.season().month(t);
    let mut out = OriginForecasts {
        last: Vec::new(),
        truth: Vec::new(),
        bnp: Vec::new(),
        cls: Vec::new(),
        spp: Vec::new(),
        cls_fallbacks: 0,
    };
    for l in 0..panel.n_series() {
        let y = train.series(l);
        let last = y[t - 1];
        let ctx = SeriesContext {
            series: l,
            last,
            mode: sampler.hyper.mode,
            exposure: train.exposure(),
        };
        out.last.push(last);
        out.truth.push(panel.series(l)[t] as f64);
        out.bnp.push(posterior_mean_forecast(&draws, &ctx, &[month])?);
        let spp = spp_fit_forecast(y)?;
        out.spp.push(spp);
        match cls_fit(y, train.season(), &ClsOptions::default()) {
            Ok(est) => out.cls.push(cls_forecast(&est, last, &[month])),
            Err(dpoinar_core::Error::Degenerate(_)) => {
                out.cls_fallbacks += 1;
                out.cls.push(spp);
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out)
}

/// Runs the rolling-origin evaluation; origins are processed concurrently.
pub fn evaluate_panel(panel: &CountPanel, config: &EvalConfig) -> Result<EvalTable> {
    let origins = origin_weeks(panel.season(), config.origins)?;
    let per_origin: Vec<OriginForecasts> = origins
        .par_iter()
        .map(|&t| forecast_origin(panel, t, config))
        .collect::<Result<_>>()?;
    let mut all = OriginForecasts {
        last: Vec::new(),
        truth: Vec::new(),
        bnp: Vec::new(),
        cls: Vec::new(),
        spp: Vec::new(),
        cls_fallbacks: 0,
    };
    for o in per_origin {
        all.last.extend(o.last);
        all.truth.extend(o.truth);
        all.bnp.extend(o.bnp);
        all.cls.extend(o.cls);
        all.spp.extend(o.spp);
        all.cls_fallbacks += o.cls_fallbacks;
    }
    let methods = [("SPP", &all.spp), ("CLS", &all.cls), ("BNP", &all.bnp)]
        .into_iter()
        .map(|(name, pred)| {
            Ok(MethodReport {
                method: name.into(),
                report: forecast_metrics(pred, &all.truth, &all.last, config.top_bucket)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalTable {
        origins,
        n_forecasts: all.truth.len(),
        cls_fallbacks: all.cls_fallbacks,
        methods,
    })
}

/// Writes `evaluation.csv` in the layout of a by-last-count table (one row
/// per method and statistic, one column per last-count group plus
/// `overall`, and a final `frequency` row) and `evaluation.json`.
pub fn write_eval_report(table: &EvalTable, dir: &Path) -> Result<Vec<String>> {
    let path = dir.join("evaluation.csv");
    let to_err = |e: csv::Error| Error::parse(&path, e.to_string());
    let mut w = csv::Writer::from_path(&path).map_err(to_err)?;
    let groups = &table.methods[0].report.by_last_value;
    let mut header = vec!["statistic".to_string(), "method".to_string()];
    header.extend(groups.iter().map(|g| {
        if g.at_least {
            format!("{}+", g.last)
        } else {
            g.last.to_string()
        }
    }));
    header.push("overall".into());
    w.write_record(&header).map_err(to_err)?;
    for stat in ["rmse", "rmse_se", "bias", "bias_se"] {
        for m in &table.methods {
            let r = &m.report;
            let pick = |rmse: f64, rmse_se: f64, bias: f64, bias_se: f64| match stat {
                "rmse" => rmse,
                "rmse_se" => rmse_se,
                "bias" => bias,
                _ => bias_se,
            };
            let mut row = vec![stat.to_string(), m.method.clone()];
            row.extend(
                r.by_last_value
                    .iter()
                    .map(|g| format!("{:.6}", pick(g.rmse, g.rmse_se, g.bias, g.bias_se))),
            );
            row.push(format!("{:.6}", pick(r.rmse, r.rmse_se, r.bias, r.bias_se)));
            w.write_record(&row).map_err(to_err)?;
        }
    }
    let mut freq = vec!["frequency".to_string(), String::new()];
    freq.extend(groups.iter().map(|g| format!("{:.6}", g.frequency)));
    freq.push(format!("{:.6}", 1.0));
    w.write_record(&freq).map_err(to_err)?;
    w.flush().map_err(|e| Error::io(&path, e))?;
    write_json(&dir.join("evaluation.json"), table)?;
    Ok(vec!["evaluation.csv".into(), "evaluation.json".into()])
}

/// A synthetic panel shaped like weekly tract-level crime counts: 188 series
/// over 418 weeks from 2001-01-01, four rate clusters of unequal size, low
/// thinning and a summer peak in the seasonal effects.
pub fn synthetic_crime_panel(n_series: usize, n_times: usize, seed: u64) -> Result<SimulatedPanel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rates = [0.15, 0.4, 0.8, 1.5];
    let shares = [0.4, 0.3, 0.2, 0.1];
    let mut memberships = Vec::with_capacity(n_series);
    for (k, share) in shares.iter().enumerate() {
        let n = if k + 1 == shares.len() {
            n_series - memberships.len()
        } else {
            (share * n_series as f64).round() as usize
        };
        memberships.extend(std::iter::repeat_n(k, n));
    }
    let beta = Beta::new(2.0, 8.0).expect("valid beta");
    let alpha = (0..n_series).map(|_| beta.sample(&mut rng)).collect();
    let theta = (0..MONTHS)
        .map(|m| 1.0 + 0.25 * (2.0 * std::f64::consts::PI * (m as f64 - 3.5) / 12.0).sin())
        .collect();
    let spec = PanelSpec {
        cluster_rates: rates.to_vec(),
        memberships,
        alpha,
        theta,
        season: SeasonMap::weekly(2001, 1, 1, n_times),
        exposure: None,
        initial: Default::default(),
    };
    Ok(simulate_panel(&spec, &mut rng)?)
}
