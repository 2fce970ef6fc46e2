//! The simulation study: four equal clusters at three levels of rate
//! separation crossed with three thinning values, plus a single-cluster
//! check. Each replicate simulates a panel, fits the DP model, CLS and the
//! series mean, and scores their one-step forecasts against the true
//! conditional mean `alpha[l] y[l,T] + lambda[l] theta[s(T+1)]`.

use std::path::Path;

use dpoinar_core::baselines::{cls_fit, cls_forecast, spp_fit_forecast, ClsOptions};
use dpoinar_core::diagnostics::{cluster_count_histogram, hamming_error, representative_assignment};
use dpoinar_core::forecast::{posterior_mean_forecast, SeriesContext};
use dpoinar_core::math::mix_seed;
use dpoinar_core::model::{simulate_panel, PanelSpec, SeasonMap, SimulatedPanel, MONTHS};
use dpoinar_core::{PosteriorDraws, SamplerConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::write_json;
use crate::parallel::run_chains_parallel;

/// Salt separating the sampler stream from the simulation stream.
pub const SAMPLER_SALT: u64 = 0x5a4d_504c_4552;

/// Simulated panels start on Monday 2001-01-01.
pub const START: (i64, u32, u32) = (2001, 1, 1);

pub const EASY: [f64; 4] = [1.0, 3.0, 6.0, 10.0];
pub const MEDIUM: [f64; 4] = [0.01, 0.5, 1.2, 2.0];
pub const HARD: [f64; 4] = [0.1, 0.2, 0.3, 0.6];
pub const THINNINGS: [f64; 3] = [0.1, 0.5, 0.9];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaMode {
    /// No seasonality: every month has effect 1.
    Unit,
    /// Monthly effects drawn from Gamma(20, 20) per replicate.
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub cluster_rates: Vec<f64>,
    pub thinning: f64,
    pub n_series: usize,
    pub n_times: usize,
    pub theta_mode: ThetaMode,
    pub seed: u64,
}

impl Scenario {
    /// Equal-size clusters in contiguous blocks.
    pub fn memberships(&self) -> Vec<usize> {
        let k = self.cluster_rates.len();
        let per = self.n_series / k;
        (0..self.n_series).map(|l| (l / per).min(k - 1)).collect()
    }

    pub fn with_series(mut self, n_series: usize) -> Self {
        self.n_series = n_series;
        self
    }

    pub fn with_thinning(mut self, thinning: f64) -> Self {
        self.thinning = thinning;
        self.name = format!("{}-{}", self.name.split('-').next().unwrap_or("custom"), thinning);
        self
    }

    /// Draws the ground truth (seasonal effects when sampled) and the panel.
    pub fn simulate(&self, seed: u64) -> Result<SimulatedPanel> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let season = SeasonMap::weekly(START.0, START.1, START.2, self.n_times);
        let mut spec = PanelSpec::blocks(&self.cluster_rates, 1, self.thinning, season);
        spec.memberships = self.memberships();
        spec.alpha = vec![self.thinning; self.n_series];
        if self.theta_mode == ThetaMode::Sampled {
            let g = Gamma::new(20.0, 1.0 / 20.0).expect("valid gamma");
            spec.theta = (0..MONTHS).map(|_| g.sample(&mut rng)).collect();
        }
        Ok(simulate_panel(&spec, &mut rng)?)
    }
}

fn scenario(name: &str, rates: &[f64], thinning: f64, seed: u64) -> Scenario {
    Scenario {
        name: name.into(),
        cluster_rates: rates.to_vec(),
        thinning,
        n_series: 100,
        n_times: 208,
        theta_mode: ThetaMode::Unit,
        seed,
    }
}

/// The 3 × 3 grid (names `easy-0.1` … `hard-0.9`) followed by `single`, one
/// cluster of rate 1 with thinning 0.5. All have 100 series of 208 weeks.
pub fn paper_scenarios() -> Vec<Scenario> {
    let mut out = Vec::new();
    for (i, alpha) in THINNINGS.iter().enumerate() {
        for (j, (label, rates)) in [("easy", &EASY), ("med", &MEDIUM), ("hard", &HARD)]
            .iter()
            .enumerate()
        {
            let seed = 1000 + (3 * i + j) as u64;
            out.push(scenario(&format!("{label}-{alpha}"), *rates, *alpha, seed));
        }
    }
    out.push(scenario("single", &[1.0], 0.5, 1009));
    out
}

pub fn scenario_by_name(name: &str) -> Option<Scenario> {
    paper_scenarios().into_iter().find(|s| s.name == name)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// 100 series, 5 replicates.
    Full,
    /// 40 series, 3 replicates.
    Desk,
}

impl Scale {
    pub fn n_series(self) -> usize {
        match self {
            Scale::Full => 100,
            Scale::Desk => 40,
        }
    }

    pub fn replicates(self) -> usize {
        match self {
            Scale::Full => 5,
            Scale::Desk => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub scale: Scale,
    /// Overrides the scale's replicate count.
    pub replicates: Option<usize>,
    /// Sampler settings; the seed is replaced per replicate.
    pub sampler: SamplerConfig,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            scale: Scale::Desk,
            replicates: None,
            sampler: SamplerConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub rmse: f64,
    pub ape: f64,
}

fn scores(predictions: &[f64], truths: &[f64]) -> Scores {
    let n = truths.len() as f64;
    let mut se = 0.0;
    let mut ape = 0.0;
    for (p, t) in predictions.iter().zip(truths) {
        se += (p - t) * (p - t);
        ape += (p - t).abs() / t;
    }
    Scores {
        rmse: (se / n).sqrt(),
        ape: ape / n,
    }
}

fn average(scores: impl Iterator<Item = Scores>) -> Scores {
    let (mut r, mut a, mut n) = (0.0, 0.0, 0.0);
    for s in scores {
        r += s.rmse;
        a += s.ape;
        n += 1.0;
    }
    Scores {
        rmse: r / n,
        ape: a / n,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateResult {
    pub replicate: usize,
    pub seed: u64,
    pub bnp: Scores,
    pub cls: Scores,
    pub spp: Scores,
    /// Mean over series of the true next-week conditional mean.
    pub true_mean: f64,
    pub modal_k: usize,
    /// Hamming error of the representative assignment.
    pub representative_hamming: f64,
    /// Mean Hamming error over the recorded draws.
    pub mean_hamming: f64,
    /// Series whose CLS fit was degenerate and fell back to the series mean.
    pub cls_fallbacks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub scenario: Scenario,
    pub bnp: Scores,
    pub cls: Scores,
    pub spp: Scores,
    pub true_mean: f64,
    pub replicates: Vec<ReplicateResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub scale: Scale,
    pub sampler: SamplerConfig,
    pub results: Vec<ScenarioResult>,
}

/// One-step predictions of every method for a simulated panel and fitted
/// draws.
struct Predictions {
    truth: Vec<f64>,
    bnp: Vec<f64>,
    cls: Vec<f64>,
    spp: Vec<f64>,
    cls_fallbacks: usize,
}

fn predict(sim: &SimulatedPanel, draws: &PosteriorDraws, config: &SamplerConfig) -> Result<Predictions> {
    let panel = &sim.panel;
    let t = panel.n_times();
    let next = panel
        .season()
        .month_at(t)
        .ok_or_else(|| Error::Config("panel has no calendar beyond its last week".into()))?;
    let truth_state = &sim.truth;
    let mut out = Predictions {
        truth: Vec::new(),
        bnp: Vec::new(),
        cls: Vec::new(),
        spp: Vec::new(),
        cls_fallbacks: 0,
    };
    for l in 0..panel.n_series() {
        let y = panel.series(l);
        let last = y[t - 1];
        let rate = truth_state.series_rate(l, config.hyper.mode, panel.exposure());
        out.truth
            .push(truth_state.alpha[l] * last as f64 + rate * truth_state.theta[next]);
        let ctx = SeriesContext {
            series: l,
            last,
            mode: config.hyper.mode,
            exposure: panel.exposure(),
        };
        out.bnp.push(posterior_mean_forecast(draws, &ctx, &[next])?);
        let spp = spp_fit_forecast(y)?;
        out.spp.push(spp);
        match cls_fit(y, panel.season(), &ClsOptions::default()) {
            Ok(est) => out.cls.push(cls_forecast(&est, last, &[next])),
            Err(dpoinar_core::Error::Degenerate(_)) => {
                out.cls_fallbacks += 1;
                out.cls.push(spp);
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out)
}

/// Simulates and scores one replicate.
pub fn run_replicate(scenario: &Scenario, replicate: usize, sampler: &SamplerConfig) -> Result<ReplicateResult> {
    let seed = mix_seed(scenario.seed, replicate as u64);
    let sim = scenario.simulate(seed)?;
    let config = SamplerConfig {
        seed: mix_seed(seed, SAMPLER_SALT),
        ..sampler.clone()
    };
    let draws = PosteriorDraws::merge(run_chains_parallel(&sim.panel, &config)?);
    let p = predict(&sim, &draws, &config)?;

    let hist = cluster_count_histogram(&draws);
    let rep = representative_assignment(&draws)?;
    let mut hamming_total = 0.0;
    for d in draws.iter() {
        hamming_total += hamming_error(&d.state.z, &sim.truth.z)?;
    }
    Ok(ReplicateResult {
        replicate,
        seed,
        bnp: scores(&p.bnp, &p.truth),
        cls: scores(&p.cls, &p.truth),
        spp: scores(&p.spp, &p.truth),
        true_mean: p.truth.iter().sum::<f64>() / p.truth.len() as f64,
        modal_k: hist.mode().unwrap_or(0),
        representative_hamming: hamming_error(&rep.z, &sim.truth.z)?,
        mean_hamming: hamming_total / draws.len() as f64,
        cls_fallbacks: p.cls_fallbacks,
    })
}

/// Runs every scenario at the configured scale; replicates run concurrently.
pub fn run_study(scenarios: &[Scenario], config: &StudyConfig) -> Result<StudyReport> {
    let reps = config.replicates.unwrap_or(config.scale.replicates());
    let sized: Vec<Scenario> = scenarios
        .iter()
        .map(|s| s.clone().with_series(config.scale.n_series()))
        .collect();
    let jobs: Vec<(usize, usize)> = (0..sized.len())
        .flat_map(|i| (0..reps).map(move |r| (i, r)))
        .collect();
    let outcomes: Vec<ReplicateResult> = jobs
        .par_iter()
        .map(|&(i, r)| run_replicate(&sized[i], r, &config.sampler))
        .collect::<Result<_>>()?;
    let mut outcomes = outcomes.into_iter();
    let results = sized
        .into_iter()
        .map(|scenario| {
            let replicates: Vec<ReplicateResult> = outcomes.by_ref().take(reps).collect();
            ScenarioResult {
                bnp: average(replicates.iter().map(|r| r.bnp)),
                cls: average(replicates.iter().map(|r| r.cls)),
                spp: average(replicates.iter().map(|r| r.spp)),
                true_mean: replicates.iter().map(|r| r.true_mean).sum::<f64>() / reps as f64,
                scenario,
                replicates,
            }
        })
        .collect();
    Ok(StudyReport {
        scale: config.scale,
        sampler: config.sampler.clone(),
        results,
    })
}

/// Writes `study.csv` (one row per scenario: RMSE and APE of each method and
/// the mean true conditional mean) and `study.json` (everything). Returns
/// the file names.
pub fn write_study_report(report: &StudyReport, dir: &Path) -> Result<Vec<String>> {
    let csv_path = dir.join("study.csv");
    let mut w = csv::Writer::from_path(&csv_path).map_err(|e| Error::parse(&csv_path, e.to_string()))?;
    let header = [
        "scenario", "thinning", "rates", "spp_rmse", "cls_rmse", "bnp_rmse", "spp_ape", "cls_ape",
        "bnp_ape", "true_mean",
    ];
    let to_err = |e: csv::Error| Error::parse(&csv_path, e.to_string());
    w.write_record(header).map_err(to_err)?;
    for r in &report.results {
        let rates: Vec<String> = r.scenario.cluster_rates.iter().map(|x| x.to_string()).collect();
        w.write_record([
            r.scenario.name.clone(),
            r.scenario.thinning.to_string(),
            rates.join(" "),
            format!("{:.6}", r.spp.rmse),
            format!("{:.6}", r.cls.rmse),
            format!("{:.6}", r.bnp.rmse),
            format!("{:.6}", r.spp.ape),
            format!("{:.6}", r.cls.ape),
            format!("{:.6}", r.bnp.ape),
            format!("{:.6}", r.true_mean),
        ])
        .map_err(to_err)?;
    }
    w.flush().map_err(|e| Error::io(&csv_path, e))?;
    write_json(&dir.join("study.json"), report)?;
    Ok(vec!["study.csv".into(), "study.json".into()])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        let all = paper_scenarios();
        assert_eq!(all.len(), 10);
        assert!(all.iter().all(|s| s.n_series == 100 && s.n_times == 208));
        let easy = scenario_by_name("easy-0.5").unwrap();
        assert_eq!(easy.cluster_rates, EASY);
        assert_eq!(scenario_by_name("hard-0.9").unwrap().cluster_rates, HARD);
        assert_eq!(scenario_by_name("med-0.1").unwrap().cluster_rates, MEDIUM);
        let single = scenario_by_name("single").unwrap();
        assert_eq!(single.cluster_rates, [1.0]);
        let mut names: Vec<&str> = all.iter().map(|s| s.name.as_str()).collect();
        names.dedup();
        assert_eq!(names.len(), 10);
    }

    #[test]
    fn equal_blocks() {
        let s = scenario_by_name("easy-0.1").unwrap().with_series(40);
        let z = s.memberships();
        assert_eq!(z.iter().filter(|k| **k == 3).count(), 10);
        assert_eq!(z[9], 0);
        assert_eq!(z[10], 1);
    }

    #[test]
    fn simulation_is_seeded() {
        let s = scenario_by_name("med-0.5").unwrap().with_series(8);
        assert_eq!(s.simulate(4).unwrap(), s.simulate(4).unwrap());
        assert_ne!(s.simulate(4).unwrap().panel, s.simulate(5).unwrap().panel);
    }

    #[test]
    fn renamed_thinning() {
        let s = scenario_by_name("easy-0.5").unwrap().with_thinning(0.3);
        assert_eq!(s.name, "easy-0.3");
        assert_eq!(s.thinning, 0.3);
    }
}
