//! Run configuration shared by the command-line subcommands.

use std::path::PathBuf;

use dpoinar_core::SamplerConfig;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::study::Scale;

/// Everything that determines a command's outputs.
///
/// The output directory is deliberately not serialized, so a manifest
/// replayed elsewhere reproduces the same bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub counts: Option<PathBuf>,
    pub exposure: Option<PathBuf>,
    pub draws: Option<PathBuf>,
    #[serde(skip)]
    pub out_dir: PathBuf,
    pub sampler: SamplerConfig,
    /// Forecast horizon in weeks.
    pub horizon: usize,
    /// Quantile levels reported by `forecast`.
    pub quantiles: Vec<f64>,
    /// Coverage of the central prediction interval reported by `forecast`.
    pub level: f64,
    /// Calendar year whose first week of each month is forecast by `evaluate`.
    pub holdout_year: Option<i32>,
    /// Number of final weeks forecast by `evaluate` when no year is given.
    pub holdout_weeks: Option<usize>,
    /// Last counts at or above this share one group in evaluation reports.
    pub top_bucket: Option<u64>,
    /// Scenario simulated by `simulate`.
    pub scenario: Option<String>,
    /// Overrides the scenario's (or synthetic panel's) number of series.
    pub n_series: Option<usize>,
    /// Overrides the scenario's (or synthetic panel's) number of weeks.
    pub n_times: Option<usize>,
    /// Draw monthly seasonal effects instead of using none.
    pub seasonal: bool,
    /// Seed of simulated data (`simulate`, synthetic `evaluate`).
    pub data_seed: u64,
    pub scale: Option<Scale>,
    pub replicates: Option<usize>,
    /// Scenarios run by `study`; empty means all.
    pub scenarios: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            counts: None,
            exposure: None,
            draws: None,
            out_dir: PathBuf::from("."),
            sampler: SamplerConfig::default(),
            horizon: 1,
            quantiles: vec![0.5, 0.95, 0.99],
            level: 0.95,
            holdout_year: None,
            holdout_weeks: None,
            top_bucket: Some(4),
            scenario: None,
            n_series: None,
            n_times: None,
            seasonal: false,
            data_seed: 0,
            scale: None,
            replicates: None,
            scenarios: Vec::new(),
        }
    }
}

impl RunConfig {
    /// Checks that input paths exist and quantile levels are strictly
    /// increasing inside (0, 1).
    pub fn validate(&self) -> Result<()> {
        for path in [&self.counts, &self.exposure, &self.draws].into_iter().flatten() {
            if !path.exists() {
                return Err(Error::MissingInput(path.clone()));
            }
        }
        if self.quantiles.iter().any(|q| !(*q > 0.0 && *q < 1.0)) {
            return Err(Error::Config("quantile levels must lie strictly inside (0, 1)".into()));
        }
        if self.quantiles.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("quantile levels must be strictly increasing".into()));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(Error::Config("interval level must lie strictly inside (0, 1)".into()));
        }
        if self.horizon == 0 {
            return Err(Error::Config("forecast horizon must be at least one week".into()));
        }
        self.sampler.validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_quantiles_and_paths() {
        let bad = |f: fn(&mut RunConfig)| {
            let mut c = RunConfig::default();
            f(&mut c);
            c.validate().unwrap_err()
        };
        assert!(matches!(bad(|c| c.quantiles = vec![0.5, 0.5]), Error::Config(_)));
        assert!(matches!(bad(|c| c.quantiles = vec![0.0, 0.5]), Error::Config(_)));
        assert!(matches!(bad(|c| c.quantiles = vec![0.9, 0.5]), Error::Config(_)));
        assert!(matches!(bad(|c| c.horizon = 0), Error::Config(_)));
        assert!(matches!(
            bad(|c| c.counts = Some("/nonexistent/counts.csv".into())),
            Error::MissingInput(_)
        ));
    }

    #[test]
    fn out_dir_is_not_serialized() {
        let mut c = RunConfig::default();
        c.out_dir = "/somewhere".into();
        let json = serde_json::to_string(&c).unwrap();
        assert!(!json.contains("somewhere"));
    }
}
