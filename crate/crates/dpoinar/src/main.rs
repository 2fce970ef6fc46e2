//! `dpoinar`: simulate, fit, forecast and evaluate the dependent PoINAR(1)
//! model from the command line.
//!
//! Every run writes `manifest.json` next to its outputs. Usage errors
//! (unknown flags, missing inputs, inconsistent settings) exit with status
//! 2; failures while running exit with status 1.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dpoinar::evaluate::{evaluate_panel, synthetic_crime_panel, write_eval_report, EvalConfig, Origins};
use dpoinar::io::{load_counts, load_draws, save_counts, save_draws, write_json, DrawsHeader, Manifest};
use dpoinar::study::{paper_scenarios, run_study, scenario_by_name, write_study_report, Scale, StudyConfig, ThetaMode};
use dpoinar::{run_chains_parallel, Error, Result, RunConfig};
use dpoinar_core::diagnostics::{cluster_count_histogram, psrf_report, representative_assignment};
use dpoinar_core::forecast::{interval, posterior_mean_forecast, posterior_predictive, quantile, SeriesContext};
use dpoinar_core::sampler::InnovationStrategy;
use dpoinar_core::{CountPanel, Hyperparams, PosteriorDraws, RateMode};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "dpoinar", version, about = "Dependent Poisson INAR(1) models for panels of low counts")]
struct Cli {
    /// Output directory (created if missing).
    #[arg(long, global = true, env = "DPOINAR_OUT", default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a study scenario: writes counts.csv and truth.json.
    Simulate(SimulateArgs),
    /// Fit the model to a counts panel: writes draws.jsonl, diagnostics.json and clusters.csv.
    Fit(FitArgs),
    /// Forecast from saved draws: writes forecast.csv.
    Forecast(ForecastArgs),
    /// Rolling-origin backtest against SPP and CLS: writes evaluation.csv and evaluation.json.
    Evaluate(EvaluateArgs),
    /// Run the simulation study: writes study.csv and study.json.
    Study(StudyArgs),
}

#[derive(Args)]
struct SamplerArgs {
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    iterations: usize,
    #[arg(long, default_value_t = 100)]
    burn_in: usize,
    #[arg(long, default_value_t = 5)]
    thin: usize,
    #[arg(long, default_value_t = 1)]
    chains: usize,
    /// Draw innovations exactly below this count and by a Metropolis step above it.
    #[arg(long)]
    metropolis_above: Option<u64>,
    /// Skip the move that redraws the shared scale of rates and seasonal effects.
    #[arg(long)]
    no_rescale: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Plain,
    Covariate,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario name, e.g. easy-0.5, med-0.1, hard-0.9 or single.
    #[arg(long)]
    scenario: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of series (default: the scenario's).
    #[arg(long)]
    series: Option<usize>,
    /// Number of weeks (default: the scenario's).
    #[arg(long)]
    weeks: Option<usize>,
    /// Draw monthly seasonal effects.
    #[arg(long)]
    seasonal: bool,
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    counts: PathBuf,
    #[arg(long)]
    exposure: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "plain")]
    mode: Mode,
    /// Store the latent innovations with every draw.
    #[arg(long)]
    keep_innovations: bool,
    #[command(flatten)]
    sampler: SamplerArgs,
}

#[derive(Args)]
struct ForecastArgs {
    #[arg(long)]
    draws: PathBuf,
    #[arg(long)]
    counts: PathBuf,
    #[arg(long)]
    exposure: Option<PathBuf>,
    /// Weeks ahead for the point forecasts.
    #[arg(long, default_value_t = 1)]
    horizon: usize,
    /// Quantile levels of the one-week-ahead predictive distribution.
    #[arg(long, value_delimiter = ',', default_value = "0.5,0.95,0.99")]
    quantiles: Vec<f64>,
    /// Coverage of the central one-week-ahead prediction interval.
    #[arg(long, default_value_t = 0.95)]
    level: f64,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Counts panel to backtest; omit with --synthetic.
    #[arg(long, required_unless_present = "synthetic")]
    counts: Option<PathBuf>,
    #[arg(long)]
    exposure: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "plain")]
    mode: Mode,
    /// Backtest a simulated 188-series, 418-week panel of low counts.
    #[arg(long, conflicts_with = "counts")]
    synthetic: bool,
    /// Seed of the synthetic panel.
    #[arg(long, default_value_t = 0)]
    data_seed: u64,
    #[arg(long, requires = "synthetic")]
    series: Option<usize>,
    #[arg(long, requires = "synthetic")]
    weeks: Option<usize>,
    /// Forecast the first week of each month of this year.
    #[arg(long, conflicts_with = "last_weeks")]
    holdout_year: Option<i32>,
    /// Forecast each of the final N weeks (default 12).
    #[arg(long)]
    last_weeks: Option<usize>,
    /// Last counts at or above this value share one group.
    #[arg(long, default_value_t = 4)]
    top_bucket: u64,
    #[command(flatten)]
    sampler: SamplerArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Full,
    Desk,
}

#[derive(Args)]
struct StudyArgs {
    #[arg(long, value_enum, default_value = "desk")]
    scale: ScaleArg,
    #[arg(long)]
    replicates: Option<usize>,
    /// Comma-separated scenario names (default: all).
    #[arg(long, value_delimiter = ',')]
    scenarios: Vec<String>,
    #[command(flatten)]
    sampler: SamplerArgs,
}

fn apply_sampler(config: &mut RunConfig, args: &SamplerArgs, mode: Mode, keep_innovations: bool) {
    let s = &mut config.sampler;
    s.seed = args.seed;
    s.n_iterations = args.iterations;
    s.burn_in = args.burn_in;
    s.thin = args.thin;
    s.n_chains = args.chains;
    s.keep_innovations = keep_innovations;
    s.rescale = !args.no_rescale;
    s.hyper = match mode {
        Mode::Plain => Hyperparams::default(),
        Mode::Covariate => Hyperparams::covariate(),
    };
    if let Some(threshold) = args.metropolis_above {
        s.innovation_strategy = InnovationStrategy::MetropolisPoisson { threshold };
    }
}

fn require_exposure(mode: Mode, exposure: &Option<PathBuf>) -> Result<()> {
    if matches!(mode, Mode::Covariate) && exposure.is_none() {
        return Err(Error::Config("covariate mode needs an --exposure file".into()));
    }
    Ok(())
}

fn finish(command: &str, config: &RunConfig, mut outputs: Vec<String>) -> Result<()> {
    outputs.push("manifest.json".into());
    let manifest = Manifest::new(command, config, outputs);
    write_json(&config.out_dir.join("manifest.json"), &manifest)
}

#[derive(Serialize)]
struct Truth<'a> {
    scenario: &'a dpoinar::study::Scenario,
    seed: u64,
    series_ids: &'a [String],
    initial_values: &'a [u64],
    state: &'a dpoinar_core::ModelState,
}

fn simulate(args: SimulateArgs, mut config: RunConfig) -> Result<()> {
    config.scenario = Some(args.scenario.clone());
    config.data_seed = args.seed;
    config.n_series = args.series;
    config.n_times = args.weeks;
    config.seasonal = args.seasonal;
    config.validate()?;
    let mut scenario = scenario_by_name(&args.scenario).ok_or_else(|| {
        let names: Vec<String> = paper_scenarios().into_iter().map(|s| s.name).collect();
        Error::Config(format!("unknown scenario {:?}; expected one of {}", args.scenario, names.join(", ")))
    })?;
    if let Some(n) = args.series {
        if n < scenario.cluster_rates.len() {
            return Err(Error::Config(format!(
                "{n} series cannot hold {} clusters",
                scenario.cluster_rates.len()
            )));
        }
        scenario = scenario.with_series(n);
    }
    if let Some(t) = args.weeks {
        scenario.n_times = t;
    }
    if args.seasonal {
        scenario.theta_mode = ThetaMode::Sampled;
    }
    let sim = scenario.simulate(args.seed)?;
    save_counts(&sim.panel, &config.out_dir.join("counts.csv"))?;
    let truth = Truth {
        scenario: &scenario,
        seed: args.seed,
        series_ids: sim.panel.series_ids(),
        initial_values: &sim.initial_values,
        state: &sim.truth,
    };
    write_json(&config.out_dir.join("truth.json"), &truth)?;
    finish("simulate", &config, vec!["counts.csv".into(), "truth.json".into()])
}

#[derive(Serialize)]
struct Diagnostics {
    n_draws: usize,
    chains: Vec<usize>,
    cluster_counts: dpoinar_core::diagnostics::ClusterCountHistogram,
    modal_clusters: Option<usize>,
    representative: dpoinar_core::diagnostics::Representative,
    /// Present when at least two chains were run.
    psrf: Option<dpoinar_core::diagnostics::PsrfReport>,
}

fn fit(args: FitArgs, mut config: RunConfig) -> Result<()> {
    require_exposure(args.mode, &args.exposure)?;
    config.counts = Some(args.counts.clone());
    config.exposure = args.exposure.clone();
    apply_sampler(&mut config, &args.sampler, args.mode, args.keep_innovations);
    config.validate()?;
    let panel = load_counts(&args.counts, args.exposure.as_deref())?;
    let draws = PosteriorDraws::merge(run_chains_parallel(&panel, &config.sampler)?);
    let mode = config.sampler.hyper.mode;
    let header = DrawsHeader::new(&draws, mode, panel.series_ids());
    save_draws(&config.out_dir.join("draws.jsonl"), &header, &draws)?;

    let representative = representative_assignment(&draws)?;
    let cluster_counts = cluster_count_histogram(&draws);
    let psrf = if config.sampler.n_chains >= 2 {
        Some(psrf_report(&draws, mode, panel.exposure())?)
    } else {
        None
    };
    let clusters_path = config.out_dir.join("clusters.csv");
    let mut clusters = String::from("series_id,cluster\n");
    for (id, k) in panel.series_ids().iter().zip(&representative.z) {
        clusters.push_str(&format!("{id},{k}\n"));
    }
    fs::write(&clusters_path, clusters).map_err(|e| Error::io(&clusters_path, e))?;
    let diagnostics = Diagnostics {
        n_draws: draws.len(),
        chains: draws.chain_ids(),
        modal_clusters: cluster_counts.mode(),
        cluster_counts,
        representative,
        psrf,
    };
    write_json(&config.out_dir.join("diagnostics.json"), &diagnostics)?;
    finish(
        "fit",
        &config,
        vec!["draws.jsonl".into(), "diagnostics.json".into(), "clusters.csv".into()],
    )
}

fn forecast(args: ForecastArgs, mut config: RunConfig) -> Result<()> {
    config.counts = Some(args.counts.clone());
    config.exposure = args.exposure.clone();
    config.draws = Some(args.draws.clone());
    config.horizon = args.horizon;
    config.quantiles = args.quantiles.clone();
    config.level = args.level;
    config.validate()?;
    let (header, draws) = load_draws(&args.draws)?;
    let panel = load_counts(&args.counts, args.exposure.as_deref())?;
    config.sampler.hyper.mode = header.mode;
    if header.mode == RateMode::Covariate && panel.exposure().is_none() {
        return Err(Error::Config("draws were fitted with exposure; pass --exposure".into()));
    }
    if header.series_ids != panel.series_ids() {
        return Err(Error::Config(format!(
            "draws in {} were fitted to different series than {}",
            args.draws.display(),
            args.counts.display()
        )));
    }
    let table = forecast_table(&panel, &draws, &config, header.mode)?;
    let path = config.out_dir.join("forecast.csv");
    fs::write(&path, table).map_err(|e| Error::io(&path, e))?;
    finish("forecast", &config, vec!["forecast.csv".into()])
}

/// One row per series: the last count, the posterior-mean forecast for each
/// week up to the horizon, quantiles of the one-week-ahead predictive
/// distribution and its central interval.
fn forecast_table(panel: &CountPanel, draws: &PosteriorDraws, config: &RunConfig, mode: RateMode) -> Result<String> {
    let t = panel.n_times();
    let months: Vec<usize> = (0..config.horizon)
        .map(|k| {
            panel.season().month_at(t + k).ok_or_else(|| {
                Error::Config("the panel's calendar does not extend past its last week".into())
            })
        })
        .collect::<Result<_>>()?;
    let mut out = String::from("series_id,last");
    for h in 1..=config.horizon {
        out.push_str(&format!(",mean_h{h}"));
    }
    for q in &config.quantiles {
        out.push_str(&format!(",q{q}"));
    }
    out.push_str(&format!(",lower{0},upper{0}\n", config.level));
    for l in 0..panel.n_series() {
        let last = panel.series(l)[t - 1];
        let ctx = SeriesContext {
            series: l,
            last,
            mode,
            exposure: panel.exposure(),
        };
        out.push_str(&format!("{},{last}", panel.series_ids()[l]));
        for h in 1..=config.horizon {
            out.push_str(&format!(",{}", posterior_mean_forecast(draws, &ctx, &months[..h])?));
        }
        let dist = posterior_predictive(draws, &ctx, months[0], None)?;
        for &q in &config.quantiles {
            out.push_str(&format!(",{}", quantile(&dist, q)?));
        }
        let (lo, hi) = interval(&dist, config.level)?;
        out.push_str(&format!(",{lo},{hi}\n"));
    }
    Ok(out)
}

fn evaluate(args: EvaluateArgs, mut config: RunConfig) -> Result<()> {
    require_exposure(args.mode, &args.exposure)?;
    config.counts = args.counts.clone();
    config.exposure = args.exposure.clone();
    config.holdout_year = args.holdout_year;
    config.holdout_weeks = if args.holdout_year.is_none() {
        Some(args.last_weeks.unwrap_or(12))
    } else {
        None
    };
    config.top_bucket = Some(args.top_bucket);
    apply_sampler(&mut config, &args.sampler, args.mode, false);
    let mut outputs = Vec::new();
    let panel = if args.synthetic {
        if args.exposure.is_some() {
            return Err(Error::Config("the synthetic panel has no exposure".into()));
        }
        config.data_seed = args.data_seed;
        config.n_series = Some(args.series.unwrap_or(188));
        config.n_times = Some(args.weeks.unwrap_or(418));
        config.validate()?;
        let sim = synthetic_crime_panel(config.n_series.unwrap(), config.n_times.unwrap(), args.data_seed)?;
        save_counts(&sim.panel, &config.out_dir.join("counts.csv"))?;
        outputs.push("counts.csv".into());
        sim.panel
    } else {
        config.validate()?;
        let counts = args.counts.as_deref().expect("clap requires --counts");
        load_counts(counts, args.exposure.as_deref())?
    };
    let origins = match (config.holdout_year, config.holdout_weeks) {
        (Some(year), _) => Origins::FirstWeekOfMonth { year },
        (None, Some(weeks)) => Origins::LastWeeks { weeks },
        (None, None) => unreachable!("one holdout rule is always set"),
    };
    let eval = EvalConfig {
        sampler: config.sampler.clone(),
        origins,
        top_bucket: config.top_bucket,
    };
    let table = evaluate_panel(&panel, &eval)?;
    outputs.extend(write_eval_report(&table, &config.out_dir)?);
    finish("evaluate", &config, outputs)
}

fn study(args: StudyArgs, mut config: RunConfig) -> Result<()> {
    apply_sampler(&mut config, &args.sampler, Mode::Plain, false);
    let scale = match args.scale {
        ScaleArg::Full => Scale::Full,
        ScaleArg::Desk => Scale::Desk,
    };
    config.scale = Some(scale);
    config.replicates = args.replicates;
    config.scenarios = args.scenarios.clone();
    config.validate()?;
    let scenarios = if args.scenarios.is_empty() {
        paper_scenarios()
    } else {
        args.scenarios
            .iter()
            .map(|name| {
                scenario_by_name(name).ok_or_else(|| Error::Config(format!("unknown scenario {name:?}")))
            })
            .collect::<Result<_>>()?
    };
    let report = run_study(
        &scenarios,
        &StudyConfig {
            scale,
            replicates: args.replicates,
            sampler: config.sampler.clone(),
        },
    )?;
    let outputs = write_study_report(&report, &config.out_dir)?;
    finish("study", &config, outputs)
}

fn run(cli: Cli) -> Result<()> {
    let out_dir = cli.out;
    ensure_dir(&out_dir)?;
    let config = RunConfig {
        out_dir,
        ..RunConfig::default()
    };
    match cli.command {
        Command::Simulate(a) => simulate(a, config),
        Command::Fit(a) => fit(a, config),
        Command::Forecast(a) => forecast(a, config),
        Command::Evaluate(a) => evaluate(a, config),
        Command::Study(a) => study(a, config),
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.to_path_buf(),
        source: e,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dpoinar: {e}");
            if e.is_usage() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
