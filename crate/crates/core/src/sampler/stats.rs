use alloc::vec;
use alloc::vec::Vec;

use crate::model::{CountPanel, ModelState, SeasonSummary, MONTHS};

/// Sums of the latent innovations that the conjugate updates depend on.
#[derive(Debug, Clone, PartialEq)]
pub struct SuffStats {
    /// `S[l] = Σ_t eps[l, t]` over all time steps.
    pub series_totals: Vec<u64>,
    /// `S[l]` restricted to transitions (`t ≥ 2`).
    pub transition_totals: Vec<u64>,
    /// `B[k] = Σ_{l in k} S[l]`.
    pub cluster_totals: Vec<u64>,
    /// `n[k]`.
    pub cluster_sizes: Vec<usize>,
    /// `R[t] = Σ_l eps[l, t]`.
    pub time_totals: Vec<u64>,
    /// Innovations summed over series and over the weeks of each month.
    pub month_totals: [u64; MONTHS],
    pub season: SeasonSummary,
}

impl SuffStats {
    pub fn compute(state: &ModelState, panel: &CountPanel) -> Self {
        let t_len = panel.n_times();
        let k = state.n_clusters();
        let mut series_totals = Vec::with_capacity(state.n_series());
        let mut transition_totals = Vec::with_capacity(state.n_series());
        let mut time_totals = vec![0u64; t_len];
        for eps in &state.innovations {
            let total: u64 = eps.iter().sum();
            series_totals.push(total);
            transition_totals.push(total - eps.first().copied().unwrap_or(0));
            for (r, e) in time_totals.iter_mut().zip(eps) {
                *r += e;
            }
        }
        let mut cluster_totals = vec![0u64; k];
        let mut cluster_sizes = vec![0usize; k];
        for (l, &zl) in state.z.iter().enumerate() {
            cluster_totals[zl] += series_totals[l];
            cluster_sizes[zl] += 1;
        }
        let mut month_totals = [0u64; MONTHS];
        for (t, r) in time_totals.iter().enumerate() {
            month_totals[panel.season().month(t)] += r;
        }
        Self {
            series_totals,
            transition_totals,
            cluster_totals,
            cluster_sizes,
            time_totals,
            month_totals,
            season: panel.season().summary(&state.theta),
        }
    }

    /// `A[j]`: innovation total of cluster `j` excluding series `l`.
    pub fn cluster_total_without(&self, j: usize, l: usize, z: &[usize]) -> u64 {
        if z[l] == j {
            self.cluster_totals[j] - self.series_totals[l]
        } else {
            self.cluster_totals[j]
        }
    }

    /// Checks the identities linking the different sums.
    pub fn is_consistent(&self) -> bool {
        let by_series: u64 = self.series_totals.iter().sum();
        let by_cluster: u64 = self.cluster_totals.iter().sum();
        let by_time: u64 = self.time_totals.iter().sum();
        let by_month: u64 = self.month_totals.iter().sum();
        by_series == by_cluster
            && by_series == by_time
            && by_series == by_month
            && self.cluster_sizes.iter().sum::<usize>() == self.series_totals.len()
            && self.cluster_sizes.iter().all(|n| *n >= 1)
    }
}
