use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{dimension, domain};
use crate::math::{civil_from_days, days_from_civil};
use crate::Result;

/// Number of seasonal levels (calendar months).
pub const MONTHS: usize = 12;

/// Maps each time index to a month. Months are stored zero-based (`0..12`).
///
/// A map built from weekly dates remembers its start date so that months of
/// weeks after the observed window can be derived for forecasting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeasonMap {
    months: Vec<u8>,
    weekly_start: Option<i64>,
}

impl SeasonMap {
    /// Builds a map from one-based month numbers (`1..=12`).
    pub fn from_months(months: &[u8]) -> Result<Self> {
        if let Some((t, m)) = months.iter().enumerate().find(|(_, m)| !(1..=12).contains(*m)) {
            return Err(domain!("month {m} at t={t} is outside 1..=12"));
        }
        Ok(Self {
            months: months.iter().map(|m| m - 1).collect(),
            weekly_start: None,
        })
    }

    /// Weekly map: week `t` starts `7 t` days after the given date and is
    /// assigned the calendar month of its first day.
    pub fn weekly(year: i64, month: u32, day: u32, len: usize) -> Self {
        let start = days_from_civil(year, month, day);
        let months = (0..len)
            .map(|t| (civil_from_days(start + 7 * t as i64).1 - 1) as u8)
            .collect();
        Self {
            months,
            weekly_start: Some(start),
        }
    }

    /// Every time step in the same month. Useful when seasonality is irrelevant.
    pub fn constant(len: usize) -> Self {
        Self {
            months: alloc::vec![0; len],
            weekly_start: None,
        }
    }

    pub fn len(&self) -> usize {
        self.months.len()
    }

    pub fn is_empty(&self) -> bool {
        self.months.is_empty()
    }

    /// Zero-based month of observed time index `t` (zero-based).
    #[inline]
    pub fn month(&self, t: usize) -> usize {
        self.months[t] as usize
    }

    /// Zero-based month of any time index, including indices past the
    /// observed window when the map is weekly-dated.
    pub fn month_at(&self, t: usize) -> Option<usize> {
        if let Some(m) = self.months.get(t) {
            return Some(*m as usize);
        }
        self.weekly_start
            .map(|start| (civil_from_days(start + 7 * t as i64).1 - 1) as usize)
    }

    /// Start date of a weekly map as days since 1970-01-01.
    pub fn weekly_start(&self) -> Option<i64> {
        self.weekly_start
    }

    pub fn months(&self) -> impl Iterator<Item = usize> + '_ {
        self.months.iter().map(|m| *m as usize)
    }

    /// Month counts and `Θ` for a given seasonal vector.
    pub fn summary(&self, theta: &[f64]) -> SeasonSummary {
        let mut q = [0u64; MONTHS];
        for m in self.months() {
            q[m] += 1;
        }
        let theta_total = q.iter().zip(theta).map(|(n, th)| *n as f64 * th).sum();
        SeasonSummary { q, theta_total }
    }

    /// Truncates to the first `len` steps (used to split train / holdout).
    pub fn prefix(&self, len: usize) -> Self {
        Self {
            months: self.months[..len.min(self.months.len())].to_vec(),
            weekly_start: self.weekly_start,
        }
    }
}

/// Occurrence count of each month and `Θ = Σ_t θ[s(t)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeasonSummary {
    pub q: [u64; MONTHS],
    pub theta_total: f64,
}

/// `L × T` panel of counts with its season map and optional exposures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountPanel {
    counts: Vec<Vec<u64>>,
    season: SeasonMap,
    exposure: Option<Vec<f64>>,
    series_ids: Vec<String>,
}

impl CountPanel {
    pub fn new(
        counts: Vec<Vec<u64>>,
        season: SeasonMap,
        exposure: Option<Vec<f64>>,
        series_ids: Vec<String>,
    ) -> Result<Self> {
        let l = counts.len();
        if l == 0 {
            return Err(crate::Error::Empty("panel has no series".into()));
        }
        let t = season.len();
        if t == 0 {
            return Err(crate::Error::Empty("panel has no time steps".into()));
        }
        if let Some((i, row)) = counts.iter().enumerate().find(|(_, r)| r.len() != t) {
            return Err(dimension!(
                "series {i} has {} observations, season map has {t}",
                row.len()
            ));
        }
        if series_ids.len() != l {
            return Err(dimension!("{} series ids for {l} series", series_ids.len()));
        }
        if let Some(x) = &exposure {
            if x.len() != l {
                return Err(dimension!("{} exposures for {l} series", x.len()));
            }
            if let Some((i, v)) = x.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
                return Err(domain!("exposure {v} for series {i} is not strictly positive"));
            }
        }
        Ok(Self {
            counts,
            season,
            exposure,
            series_ids,
        })
    }

    /// Panel with generated ids `s0, s1, ...` and no exposure.
    pub fn from_counts(counts: Vec<Vec<u64>>, season: SeasonMap) -> Result<Self> {
        let ids = (0..counts.len()).map(|i| alloc::format!("s{i}")).collect();
        Self::new(counts, season, None, ids)
    }

    pub fn with_exposure(mut self, exposure: Vec<f64>) -> Result<Self> {
        self.exposure = None;
        Self::new(self.counts, self.season, Some(exposure), self.series_ids)
    }

    pub fn n_series(&self) -> usize {
        self.counts.len()
    }

    pub fn n_times(&self) -> usize {
        self.season.len()
    }

    pub fn series(&self, l: usize) -> &[u64] {
        &self.counts[l]
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn season(&self) -> &SeasonMap {
        &self.season
    }

    pub fn exposure(&self) -> Option<&[f64]> {
        self.exposure.as_deref()
    }

    pub fn series_ids(&self) -> &[String] {
        &self.series_ids
    }

    pub fn max_count(&self) -> u64 {
        self.counts.iter().flatten().copied().max().unwrap_or(0)
    }

    /// First `len` time steps of every series.
    pub fn prefix(&self, len: usize) -> Result<Self> {
        if len == 0 || len > self.n_times() {
            return Err(domain!("prefix length {len} outside 1..={}", self.n_times()));
        }
        Self::new(
            self.counts.iter().map(|r| r[..len].to_vec()).collect(),
            self.season.prefix(len),
            self.exposure.clone(),
            self.series_ids.clone(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn weekly_map_uses_month_of_week_start() {
        let s = SeasonMap::weekly(2001, 1, 1, 6);
        // 2001-01-01, 01-08, 01-15, 01-22, 01-29, 02-05
        assert_eq!(s.months().collect::<Vec<_>>(), vec![0, 0, 0, 0, 0, 1]);
        assert_eq!(s.month_at(208), Some(civil_from_days(days_from_civil(2001, 1, 1) + 7 * 208).1 as usize - 1));
    }

    #[test]
    fn summary_identity() {
        let s = SeasonMap::weekly(2001, 1, 1, 208);
        let theta: Vec<f64> = (1..=12).map(|m| m as f64 * 0.1).collect();
        let sum = s.summary(&theta);
        assert_eq!(sum.q.iter().sum::<u64>(), 208);
        let direct: f64 = s.months().map(|m| theta[m]).sum();
        assert!((direct - sum.theta_total).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_months_and_ragged_rows() {
        assert!(SeasonMap::from_months(&[1, 13]).is_err());
        assert!(SeasonMap::from_months(&[0]).is_err());
        let s = SeasonMap::constant(3);
        assert!(CountPanel::from_counts(vec![vec![1, 2, 3], vec![1, 2]], s.clone()).is_err());
        let p = CountPanel::from_counts(vec![vec![1, 2, 3]], s).unwrap();
        assert!(p.clone().with_exposure(vec![0.0]).is_err());
        assert!(p.clone().with_exposure(vec![1.0, 2.0]).is_err());
        assert!(p.with_exposure(vec![2.5]).is_ok());
    }
}
