//! Agreement between clusterings and summaries of sampled memberships.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use super::assignment::max_weight_assignment;
use crate::error::dimension;
use crate::sampler::PosteriorDraws;
use crate::{Error, Result};

/// Maps arbitrary labels to `0..k` in order of first appearance.
fn compress(z: &[usize]) -> (Vec<usize>, usize) {
    let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
    let out = z
        .iter()
        .map(|&label| {
            let next = seen.len();
            *seen.entry(label).or_insert(next)
        })
        .collect();
    (out, seen.len())
}

/// Fraction of series whose labels disagree under the best one-to-one
/// matching of estimated to true labels.
///
/// The matching maximises the overlap in the `K_est × K_true` contingency
/// table; labels left unmatched count as errors. Empty inputs give 0.
pub fn hamming_error(z_est: &[usize], z_true: &[usize]) -> Result<f64> {
    if z_est.len() != z_true.len() {
        return Err(dimension!(
            "membership vectors of length {} and {}",
            z_est.len(),
            z_true.len()
        ));
    }
    if z_est.is_empty() {
        return Ok(0.0);
    }
    let (a, ka) = compress(z_est);
    let (b, kb) = compress(z_true);
    let mut overlap = alloc::vec![0i64; ka * kb];
    for (&i, &j) in a.iter().zip(&b) {
        overlap[i * kb + j] += 1;
    }
    let (_, matched) = max_weight_assignment(&overlap, ka, kb);
    Ok(1.0 - matched as f64 / z_est.len() as f64)
}

/// The stored membership vector closest on average to all others.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Representative {
    /// Position in the draw list.
    pub index: usize,
    pub chain: usize,
    pub iteration: usize,
    pub z: Vec<usize>,
    /// Mean Hamming error against every stored draw.
    pub mean_distance: f64,
}

/// Draw minimising the mean Hamming error to all draws; ties go to the
/// smallest `(chain, iteration)`.
pub fn representative_assignment(draws: &PosteriorDraws) -> Result<Representative> {
    if draws.is_empty() {
        return Err(Error::Empty("representative assignment needs draws".into()));
    }
    let d = &draws.draws;
    let n = d.len();
    let mut total = alloc::vec![0.0; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let h = hamming_error(&d[i].state.z, &d[j].state.z)?;
            total[i] += h;
            total[j] += h;
        }
    }
    let mut best = 0;
    for i in 1..n {
        let key = (d[i].chain, d[i].iteration);
        let best_key = (d[best].chain, d[best].iteration);
        if total[i] < total[best] || (total[i] == total[best] && key < best_key) {
            best = i;
        }
    }
    Ok(Representative {
        index: best,
        chain: d[best].chain,
        iteration: d[best].iteration,
        z: d[best].state.z.clone(),
        mean_distance: total[best] / n as f64,
    })
}

/// Tally of the number of clusters across draws.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ClusterCountHistogram {
    pub counts: BTreeMap<usize, usize>,
    pub total: usize,
}

impl ClusterCountHistogram {
    pub fn frequency(&self, k: usize) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        *self.counts.get(&k).unwrap_or(&0) as f64 / self.total as f64
    }

    /// Most frequent cluster count; the smallest one on ties.
    pub fn mode(&self) -> Option<usize> {
        let mut best: Option<(usize, usize)> = None;
        for (&k, &c) in &self.counts {
            if best.is_none_or(|(_, bc)| c > bc) {
                best = Some((k, c));
            }
        }
        best.map(|(k, _)| k)
    }
}

pub fn cluster_count_histogram(draws: &PosteriorDraws) -> ClusterCountHistogram {
    let mut hist = ClusterCountHistogram::default();
    for d in draws.iter() {
        *hist.counts.entry(d.state.n_clusters()).or_insert(0) += 1;
        hist.total += 1;
    }
    hist
}
