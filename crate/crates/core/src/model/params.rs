use alloc::vec;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::panel::{CountPanel, MONTHS};
use crate::error::{dimension, domain};
use crate::Result;

/// How a series' innovation rate is formed from its cluster value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RateMode {
    /// `lambda[l] = phi*[z[l]]`.
    #[default]
    Plain,
    /// `lambda[l] = X[l] * psi*[z[l]]`; cluster values are per-unit-exposure rates.
    Covariate,
}

/// Prior hyperparameters. Every Gamma is shape/rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    /// Beta prior on thinning probabilities.
    pub eta1: f64,
    pub eta2: f64,
    /// Gamma prior on the seasonal effects.
    pub xi1: f64,
    pub xi2: f64,
    /// Gamma base measure of the Dirichlet process.
    pub gamma1: f64,
    pub gamma2: f64,
    /// Gamma prior on the DP concentration.
    pub a_tau: f64,
    pub b_tau: f64,
    pub mode: RateMode,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            eta1: 1.0,
            eta2: 1.0,
            xi1: 1.0,
            xi2: 1.0,
            gamma1: 1.0,
            gamma2: 0.1,
            a_tau: 2.0,
            b_tau: 4.0,
            mode: RateMode::Plain,
        }
    }
}

impl Hyperparams {
    /// Defaults for the exposure-adjusted model: base measure Gamma(0.5, 0.5).
    pub fn covariate() -> Self {
        Self {
            gamma1: 0.5,
            gamma2: 0.5,
            mode: RateMode::Covariate,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let named = [
            ("eta1", self.eta1),
            ("eta2", self.eta2),
            ("xi1", self.xi1),
            ("xi2", self.xi2),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("a_tau", self.a_tau),
            ("b_tau", self.b_tau),
        ];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain!("hyperparameter {name}={v} must be strictly positive"));
            }
        }
        Ok(())
    }
}

/// One full parameter configuration of the model.
///
/// Cluster labels in `z` are zero-based and contiguous (`0..phi_star.len()`).
/// `innovations` may be empty when a stored draw omits them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelState {
    pub alpha: Vec<f64>,
    pub z: Vec<usize>,
    pub phi_star: Vec<f64>,
    pub theta: Vec<f64>,
    pub tau: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub innovations: Vec<Vec<u64>>,
}

impl ModelState {
    pub fn n_clusters(&self) -> usize {
        self.phi_star.len()
    }

    pub fn n_series(&self) -> usize {
        self.z.len()
    }

    /// Innovation rate of series `l` before the seasonal factor.
    #[inline]
    pub fn series_rate(&self, l: usize, mode: RateMode, exposure: Option<&[f64]>) -> f64 {
        let phi = self.phi_star[self.z[l]];
        match (mode, exposure) {
            (RateMode::Covariate, Some(x)) => x[l] * phi,
            _ => phi,
        }
    }

    pub fn series_rates(&self, mode: RateMode, exposure: Option<&[f64]>) -> Vec<f64> {
        (0..self.z.len())
            .map(|l| self.series_rate(l, mode, exposure))
            .collect()
    }

    /// Cluster sizes.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        let mut n = vec![0; self.phi_star.len()];
        for &k in &self.z {
            n[k] += 1;
        }
        n
    }

    /// Drops empty clusters and relabels by order of first appearance in `z`.
    pub fn canonicalize(&mut self) {
        let (z, phi) = canonical_labels(&self.z, &self.phi_star);
        self.z = z;
        self.phi_star = phi;
    }

    /// Structural checks. With a panel, also checks the series count and,
    /// when innovations are stored, their support bounds.
    pub fn validate(&self, panel: Option<&CountPanel>) -> Result<()> {
        let l = self.z.len();
        if self.alpha.len() != l {
            return Err(dimension!("{} thinning values for {l} series", self.alpha.len()));
        }
        if self.theta.len() != MONTHS {
            return Err(dimension!("{} seasonal effects, expected {MONTHS}", self.theta.len()));
        }
        if let Some(a) = self.alpha.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(domain!("thinning value {a} outside [0, 1]"));
        }
        let sizes = self.cluster_sizes_checked()?;
        if sizes.iter().any(|n| *n == 0) {
            return Err(domain!("state contains an empty cluster"));
        }
        if !(self.tau > 0.0) {
            return Err(domain!("concentration {} must be positive", self.tau));
        }
        if let Some(p) = panel {
            if l != p.n_series() {
                return Err(dimension!("state covers {l} of {} series", p.n_series()));
            }
            if self.innovations.is_empty() {
                return Ok(());
            }
            if self.innovations.len() != p.n_series() {
                return Err(dimension!("innovations cover {} series", self.innovations.len()));
            }
            for (i, (eps, y)) in self.innovations.iter().zip(p.counts()).enumerate() {
                if eps.len() != y.len() {
                    return Err(dimension!("innovations for series {i} have wrong length"));
                }
                if eps[0] != y[0] {
                    return Err(domain!("first innovation of series {i} differs from the count"));
                }
                for t in 1..y.len() {
                    let lo = y[t].saturating_sub(y[t - 1]);
                    if eps[t] < lo || eps[t] > y[t] {
                        return Err(domain!(
                            "innovation {} at ({i}, {t}) outside [{lo}, {}]",
                            eps[t],
                            y[t]
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn cluster_sizes_checked(&self) -> Result<Vec<usize>> {
        let k = self.phi_star.len();
        let mut n = vec![0; k];
        for &zl in &self.z {
            if zl >= k {
                return Err(domain!("membership {zl} references one of {k} clusters"));
            }
            n[zl] += 1;
        }
        Ok(n)
    }
}

/// Relabels memberships by first appearance and reorders per-cluster values to match.
pub(crate) fn canonical_labels(z: &[usize], values: &[f64]) -> (Vec<usize>, Vec<f64>) {
    let mut map = vec![usize::MAX; values.len().max(z.iter().max().map_or(0, |m| m + 1))];
    let mut out_values = Vec::new();
    let mut out_z = Vec::with_capacity(z.len());
    for &k in z {
        if map[k] == usize::MAX {
            map[k] = out_values.len();
            out_values.push(values.get(k).copied().unwrap_or(f64::NAN));
        }
        out_z.push(map[k]);
    }
    (out_z, out_values)
}
