//! Multi-trial experiments, beta sweeps and their CSV output.
//!
//! Every trial owns its chain and RNG, seeded with `base_seed + trial`, so
//! results do not depend on how trials are scheduled across threads.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::bounds::{dual_bounds, primal_bounds, BoundsReport};
use crate::error::{Error, Result};
use crate::estimators::{streaming_curve, to_model_log_z, EstimateSeries, EstimatorKind};
use crate::exact::{transfer_matrix_log_z, ExactSums};
use crate::model::{duality_gap, support_log_size, KernelKind, ModelSpec, Representation};
use crate::sampler::{run_chain, Method, SamplerConfig};
use crate::zq::{
    clock_spectrum_closed_form_q4, clock_spectrum_series, default_series_order, idft, potts_spectrum_closed_form,
    GroupElement,
};

pub const RAW_FILE: &str = "raw.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const PLOT_FILE: &str = "plot.gp";

pub const RAW_HEADER: &str = "model,q,L,beta,representation,estimator,trial,seed,M,log_z_per_site";
pub const SUMMARY_HEADER: &str =
    "model,q,L,beta,representation,estimator,M,mean_log_z_per_site,std_log_z_per_site,trials";
pub const SWEEP_HEADER: &str = "model,q,L,beta,representation,estimator,M,mean_log_z_per_site,std_log_z_per_site";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    Potts,
    Clock,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Potts => "potts",
            ModelKind::Clock => "clock",
        }
    }

    pub fn spec(self, q: usize, side: usize, beta: f64) -> Result<ModelSpec> {
        let kernel = match self {
            ModelKind::Potts => KernelKind::Potts,
            ModelKind::Clock => KernelKind::Clock,
        };
        ModelSpec::new(kernel, q, side, beta)
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "potts" => Ok(ModelKind::Potts),
            "clock" => Ok(ModelKind::Clock),
            _ => Err(Error::Config(format!("unknown model '{s}' (expected potts or clock)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepresentationChoice {
    Primal,
    Dual,
    Both,
}

impl RepresentationChoice {
    pub fn representations(self) -> &'static [Representation] {
        match self {
            RepresentationChoice::Primal => &[Representation::Primal],
            RepresentationChoice::Dual => &[Representation::Dual],
            RepresentationChoice::Both => &[Representation::Primal, Representation::Dual],
        }
    }
}

impl FromStr for RepresentationChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "primal" => Ok(RepresentationChoice::Primal),
            "dual" => Ok(RepresentationChoice::Dual),
            "both" => Ok(RepresentationChoice::Both),
            _ => Err(Error::Config(format!("unknown representation '{s}' (expected primal, dual or both)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorChoice {
    Ot,
    Uniform,
    Both,
}

impl EstimatorChoice {
    pub fn estimators(self) -> &'static [EstimatorKind] {
        match self {
            EstimatorChoice::Ot => &[EstimatorKind::OgataTanemura],
            EstimatorChoice::Uniform => &[EstimatorKind::Uniform],
            EstimatorChoice::Both => &[EstimatorKind::OgataTanemura, EstimatorKind::Uniform],
        }
    }
}

impl FromStr for EstimatorChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ot" => Ok(EstimatorChoice::Ot),
            "uniform" => Ok(EstimatorChoice::Uniform),
            "both" => Ok(EstimatorChoice::Both),
            _ => Err(Error::Config(format!("unknown estimator '{s}' (expected ot, uniform or both)"))),
        }
    }
}

/// OT estimates come from Gibbs chains, uniform estimates from uniform draws.
pub fn method_for(estimator: EstimatorKind) -> Method {
    match estimator {
        EstimatorKind::OgataTanemura => Method::Gibbs,
        EstimatorKind::Uniform => Method::Uniform,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CheckpointSchedule {
    /// `10, 10^1.5, 10^2, ...` rounded, capped by and ending at `M`.
    Geometric,
    Explicit(Vec<usize>),
}

impl CheckpointSchedule {
    pub fn resolve(&self, samples: usize) -> Result<Vec<usize>> {
        let points = match self {
            CheckpointSchedule::Geometric => {
                let mut points = Vec::new();
                let mut k = 0;
                loop {
                    let m = 10f64.powf(1.0 + 0.5 * k as f64).round() as usize;
                    if m >= samples {
                        break;
                    }
                    points.push(m);
                    k += 1;
                }
                points.push(samples);
                points
            }
            CheckpointSchedule::Explicit(points) => points.clone(),
        };
        if points.is_empty() {
            return Err(Error::Config("empty checkpoint list".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("checkpoints must be strictly increasing".into()));
        }
        if points[0] == 0 || *points.last().unwrap() > samples {
            return Err(Error::Config(format!("checkpoints must lie in [1, {samples}]")));
        }
        Ok(points)
    }
}

impl FromStr for CheckpointSchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "geometric" {
            return Ok(CheckpointSchedule::Geometric);
        }
        s.split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| Error::Config(format!("bad checkpoint '{p}'"))))
            .collect::<Result<Vec<_>>>()
            .map(CheckpointSchedule::Explicit)
    }
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    pub q: usize,
    pub side: usize,
    pub betas: Vec<f64>,
    pub representation: RepresentationChoice,
    pub estimator: EstimatorChoice,
    pub samples: usize,
    pub trials: usize,
    pub burn_in: usize,
    pub checkpoints: CheckpointSchedule,
    pub base_seed: u64,
    /// Worker threads; 0 uses every available core.
    pub jobs: usize,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.betas.is_empty() {
            return Err(Error::Config("at least one beta is required".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be >= 1".into()));
        }
        if self.samples == 0 {
            return Err(Error::Config("samples must be >= 1".into()));
        }
        self.checkpoints.resolve(self.samples)?;
        for &beta in &self.betas {
            self.model.spec(self.q, self.side, beta)?;
        }
        Ok(())
    }
}

/// Optional settings from a config file or the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub model: Option<ModelKind>,
    pub q: Option<usize>,
    pub side: Option<usize>,
    pub betas: Option<Vec<f64>>,
    pub representation: Option<RepresentationChoice>,
    pub estimator: Option<EstimatorChoice>,
    pub samples: Option<usize>,
    pub trials: Option<usize>,
    pub burn_in: Option<usize>,
    pub checkpoints: Option<CheckpointSchedule>,
    pub base_seed: Option<u64>,
    pub jobs: Option<usize>,
    pub output_dir: Option<PathBuf>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| Error::Config(format!("bad value '{value}' for '{key}'")))
}

fn parse_betas(value: &str) -> Result<Vec<f64>> {
    value.split(',').map(|v| parse_value("beta", v)).collect()
}

impl ConfigOverrides {
    /// Parses `key = value` lines. Keys are the long flag names; `beta` may
    /// repeat or hold a comma-separated list. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = ConfigOverrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "model" => out.model = Some(value.parse()?),
                "q" => out.q = Some(parse_value(key, value)?),
                "L" => out.side = Some(parse_value(key, value)?),
                "beta" => out.betas.get_or_insert_with(Vec::new).extend(parse_betas(value)?),
                "rep" => out.representation = Some(value.parse()?),
                "estimator" => out.estimator = Some(value.parse()?),
                "samples" => out.samples = Some(parse_value(key, value)?),
                "trials" => out.trials = Some(parse_value(key, value)?),
                "burn-in" => out.burn_in = Some(parse_value(key, value)?),
                "checkpoints" => out.checkpoints = Some(value.parse()?),
                "seed" => out.base_seed = Some(parse_value(key, value)?),
                "jobs" => out.jobs = Some(parse_value(key, value)?),
                "out" => out.output_dir = Some(PathBuf::from(value)),
                _ => return Err(Error::Config(format!("line {}: unknown key '{key}'", lineno + 1))),
            }
        }
        Ok(out)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// Fields set in `other` win.
    pub fn merge(self, other: ConfigOverrides) -> ConfigOverrides {
        ConfigOverrides {
            model: other.model.or(self.model),
            q: other.q.or(self.q),
            side: other.side.or(self.side),
            betas: other.betas.or(self.betas),
            representation: other.representation.or(self.representation),
            estimator: other.estimator.or(self.estimator),
            samples: other.samples.or(self.samples),
            trials: other.trials.or(self.trials),
            burn_in: other.burn_in.or(self.burn_in),
            checkpoints: other.checkpoints.or(self.checkpoints),
            base_seed: other.base_seed.or(self.base_seed),
            jobs: other.jobs.or(self.jobs),
            output_dir: other.output_dir.or(self.output_dir),
        }
    }

    /// Fills unset fields with defaults and validates. `beta` has no default.
    pub fn build(self) -> Result<ExperimentConfig> {
        let config = ExperimentConfig {
            model: self.model.unwrap_or(ModelKind::Potts),
            q: self.q.unwrap_or(2),
            side: self.side.unwrap_or(4),
            betas: self.betas.ok_or_else(|| Error::Config("missing beta".into()))?,
            representation: self.representation.unwrap_or(RepresentationChoice::Both),
            estimator: self.estimator.unwrap_or(EstimatorChoice::Ot),
            samples: self.samples.unwrap_or(10_000),
            trials: self.trials.unwrap_or(30),
            burn_in: self.burn_in.unwrap_or(0),
            checkpoints: self.checkpoints.unwrap_or(CheckpointSchedule::Geometric),
            base_seed: self.base_seed.unwrap_or(0),
            jobs: self.jobs.unwrap_or(0),
            output_dir: self.output_dir.unwrap_or_else(|| PathBuf::from("results")),
        };
        config.validate()?;
        Ok(config)
    }
}

/// One trial of one (beta, representation, estimator) cell. The series holds
/// per-site model estimates `log Z_hat / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub beta: f64,
    pub trial_index: usize,
    pub seed: u64,
    pub series: EstimateSeries,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub beta: f64,
    pub representation: Representation,
    pub estimator: EstimatorKind,
    pub samples: usize,
    pub mean: f64,
    pub std: f64,
    pub trials: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentResults {
    pub config: ExperimentConfig,
    pub trials: Vec<TrialResult>,
    pub summary: Vec<SummaryRow>,
}

impl ExperimentResults {
    pub fn rows_for(&self, beta: f64, representation: Representation, estimator: EstimatorKind) -> Vec<&SummaryRow> {
        self.summary
            .iter()
            .filter(|r| r.beta == beta && r.representation == representation && r.estimator == estimator)
            .collect()
    }

    /// The summary row at the largest checkpoint.
    pub fn final_row(&self, beta: f64, representation: Representation, estimator: EstimatorKind) -> Option<&SummaryRow> {
        self.rows_for(beta, representation, estimator).into_iter().max_by_key(|r| r.samples)
    }
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    beta_index: usize,
    representation: Representation,
    estimator: EstimatorKind,
}

/// Population mean and standard deviation, summed in slice order.
pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn run_trial(
    spec: &ModelSpec,
    representation: Representation,
    estimator: EstimatorKind,
    schedule: &[usize],
    config: SamplerConfig,
) -> Result<EstimateSeries> {
    let log_support = support_log_size(spec, representation)?;
    let m = *schedule.last().ok_or_else(|| Error::Config("empty checkpoint list".into()))?;
    let values = run_chain(spec, representation, method_for(estimator), m, config)?;
    let raw = streaming_curve(estimator, representation, log_support, values, schedule)?;
    let n = spec.num_sites() as f64;
    let checkpoints = raw
        .checkpoints
        .into_iter()
        .map(|(m, est)| (m, to_model_log_z(est, representation, spec) / n))
        .collect();
    Ok(EstimateSeries { checkpoints, ..raw })
}

fn run_cells(config: &ExperimentConfig, cells: &[Cell]) -> Result<ExperimentResults> {
    let schedule = config.checkpoints.resolve(config.samples)?;
    let specs = config
        .betas
        .iter()
        .map(|&b| config.model.spec(config.q, config.side, b))
        .collect::<Result<Vec<_>>>()?;
    for cell in cells {
        if cell.representation == Representation::Dual {
            support_log_size(&specs[cell.beta_index], Representation::Dual)?;
        }
    }

    let tasks: Vec<(Cell, usize)> =
        cells.iter().flat_map(|&c| (0..config.trials).map(move |t| (c, t))).collect();
    let run = || {
        tasks
            .par_iter()
            .map(|&(cell, trial)| {
                let seed = config.base_seed.wrapping_add(trial as u64);
                let sampler = SamplerConfig { seed, burn_in_sweeps: config.burn_in };
                let series =
                    run_trial(&specs[cell.beta_index], cell.representation, cell.estimator, &schedule, sampler)?;
                Ok(TrialResult { beta: config.betas[cell.beta_index], trial_index: trial, seed, series })
            })
            .collect::<Result<Vec<_>>>()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let trials = pool.install(run)?;

    let mut summary = Vec::new();
    for (ci, cell) in cells.iter().enumerate() {
        let block = &trials[ci * config.trials..(ci + 1) * config.trials];
        for (k, &m) in schedule.iter().enumerate() {
            let values: Vec<f64> = block.iter().map(|t| t.series.checkpoints[k].1).collect();
            let (mean, std) = mean_and_std(&values);
            summary.push(SummaryRow {
                beta: config.betas[cell.beta_index],
                representation: cell.representation,
                estimator: cell.estimator,
                samples: m,
                mean,
                std,
                trials: config.trials,
            });
        }
    }
    Ok(ExperimentResults { config: config.clone(), trials, summary })
}

/// Runs every (beta, representation, estimator) cell of the config.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResults> {
    config.validate()?;
    let mut cells = Vec::new();
    for beta_index in 0..config.betas.len() {
        for &representation in config.representation.representations() {
            for &estimator in config.estimator.estimators() {
                cells.push(Cell { beta_index, representation, estimator });
            }
        }
    }
    run_cells(config, &cells)
}

/// Final-checkpoint statistics of a sweep, one row per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub beta: f64,
    pub representation: Representation,
    pub estimator: EstimatorKind,
    pub samples: usize,
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResults {
    pub experiment: ExperimentResults,
    pub table: Vec<SweepRow>,
}

impl SweepResults {
    pub fn std_at(&self, beta: f64, representation: Representation, estimator: EstimatorKind) -> Option<f64> {
        self.table
            .iter()
            .find(|r| r.beta == beta && r.representation == representation && r.estimator == estimator)
            .map(|r| r.std)
    }
}

/// Like [`run_experiment`], but the dual is skipped at `beta = 0`, where its
/// spectrum is degenerate.
pub fn beta_sweep(config: &ExperimentConfig) -> Result<SweepResults> {
    config.validate()?;
    let mut cells = Vec::new();
    for (beta_index, &beta) in config.betas.iter().enumerate() {
        for &representation in config.representation.representations() {
            if representation == Representation::Dual && beta == 0.0 {
                continue;
            }
            for &estimator in config.estimator.estimators() {
                cells.push(Cell { beta_index, representation, estimator });
            }
        }
    }
    let experiment = run_cells(config, &cells)?;
    let table = cells
        .iter()
        .map(|c| {
            let beta = config.betas[c.beta_index];
            let row = experiment.final_row(beta, c.representation, c.estimator).expect("every cell summarized");
            SweepRow {
                beta,
                representation: c.representation,
                estimator: c.estimator,
                samples: row.samples,
                mean: row.mean,
                std: row.std,
            }
        })
        .collect();
    Ok(SweepResults { experiment, table })
}

/// Seventeen significant digits, enough to round-trip any `f64`.
pub struct Sci(pub f64);

impl fmt::Display for Sci {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.16e}", self.0)
    }
}

fn write_lines(path: &Path, header: &str, rows: impl Iterator<Item = String>) -> Result<()> {
    let mut buf = String::with_capacity(4096);
    buf.push_str(header);
    buf.push('\n');
    for row in rows {
        buf.push_str(&row);
        buf.push('\n');
    }
    fs::File::create(path)?.write_all(buf.as_bytes())?;
    Ok(())
}

fn prefix(config: &ExperimentConfig, beta: f64) -> String {
    format!("{},{},{},{}", config.model.name(), config.q, config.side, Sci(beta))
}

/// Writes `raw.csv`, `summary.csv` and a gnuplot script into `dir`.
pub fn emit_csv(results: &ExperimentResults, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let config = &results.config;
    let raw = dir.join(RAW_FILE);
    write_lines(
        &raw,
        RAW_HEADER,
        results.trials.iter().flat_map(|t| {
            t.series.checkpoints.iter().map(move |&(m, v)| {
                format!(
                    "{},{},{},{},{},{},{}",
                    prefix(config, t.beta),
                    t.series.representation,
                    t.series.estimator,
                    t.trial_index,
                    t.seed,
                    m,
                    Sci(v)
                )
            })
        }),
    )?;
    let summary = dir.join(SUMMARY_FILE);
    write_lines(
        &summary,
        SUMMARY_HEADER,
        results.summary.iter().map(|r| {
            format!(
                "{},{},{},{},{},{},{}",
                prefix(config, r.beta),
                r.representation,
                r.estimator,
                r.samples,
                Sci(r.mean),
                Sci(r.std),
                r.trials
            )
        }),
    )?;
    let plot = dir.join(PLOT_FILE);
    fs::write(&plot, convergence_script(results))?;
    Ok(vec![raw, summary, plot])
}

/// Writes the sweep table next to the experiment files.
pub fn emit_sweep_csv(sweep: &SweepResults, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths = emit_csv(&sweep.experiment, dir)?;
    let config = &sweep.experiment.config;
    let table = dir.join(SWEEP_FILE);
    write_lines(
        &table,
        SWEEP_HEADER,
        sweep.table.iter().map(|r| {
            format!(
                "{},{},{},{},{},{}",
                prefix(config, r.beta),
                r.representation,
                r.estimator,
                r.samples,
                Sci(r.mean),
                Sci(r.std)
            )
        }),
    )?;
    fs::write(dir.join(PLOT_FILE), sweep_script(sweep))?;
    paths.push(table);
    Ok(paths)
}

fn series_keys(results: &ExperimentResults) -> Vec<(Representation, EstimatorKind)> {
    let mut keys: BTreeMap<(Representation, EstimatorKind), ()> = BTreeMap::new();
    for r in &results.summary {
        keys.insert((r.representation, r.estimator), ());
    }
    keys.into_keys().collect()
}

fn convergence_script(results: &ExperimentResults) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\nset logscale x\nset key outside\n");
    s.push_str("set xlabel 'M (sweeps or draws)'\nset ylabel 'std of log Z / N'\n");
    s.push_str("set terminal pngcairo size 900,600\nset output 'convergence.png'\n");
    let mut plots = Vec::new();
    for &beta in &results.config.betas {
        for (rep, est) in series_keys(results) {
            if results.rows_for(beta, rep, est).is_empty() {
                continue;
            }
            plots.push(format!(
                "'{SUMMARY_FILE}' using 7:((strcol(5) eq '{rep}' && strcol(6) eq '{est}' && abs($4 - {beta}) < 1e-12) ? $9 : 1/0) with linespoints title '{rep} {est} beta={beta}'"
            ));
        }
    }
    s.push_str("plot ");
    s.push_str(&plots.join(", \\\n     "));
    s.push('\n');
    s
}

fn sweep_script(sweep: &SweepResults) -> String {
    let mut s = String::new();
    s.push_str("set datafile separator ','\nset key outside\n");
    s.push_str("set xlabel 'beta'\nset ylabel 'std of log Z / N'\n");
    s.push_str("set terminal pngcairo size 900,600\nset output 'sweep.png'\n");
    let plots: Vec<String> = series_keys(&sweep.experiment)
        .into_iter()
        .map(|(rep, est)| {
            format!(
                "'{SWEEP_FILE}' using 4:((strcol(5) eq '{rep}' && strcol(6) eq '{est}') ? $9 : 1/0) with linespoints title '{rep} {est}'"
            )
        })
        .collect();
    s.push_str("plot ");
    s.push_str(&plots.join(", \\\n     "));
    s.push('\n');
    s
}

/// Exact reference values for one representation at one beta.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactRow {
    pub beta: f64,
    pub representation: Representation,
    pub method: &'static str,
    pub log_z: f64,
    /// `log Z_primal / N`, recovered from either side.
    pub model_log_z_per_site: f64,
    /// `NaN` when only the transfer matrix was feasible.
    pub asym_var_ot: f64,
    pub asym_var_uniform: f64,
}

pub const EXACT_HEADER: &str =
    "model,q,L,beta,representation,method,log_z,model_log_z_per_site,asym_var_ot,asym_var_uniform";

/// Enumerates each instance when it is small enough; otherwise the primal
/// falls back to the transfer matrix, without variances.
pub fn exact_table(
    model: ModelKind,
    q: usize,
    side: usize,
    betas: &[f64],
    representation: RepresentationChoice,
) -> Result<Vec<ExactRow>> {
    let mut rows = Vec::new();
    for &beta in betas {
        let spec = model.spec(q, side, beta)?;
        let n = spec.num_sites() as f64;
        for &rep in representation.representations() {
            let row = match ExactSums::compute(&spec, rep) {
                Ok(sums) => ExactRow {
                    beta,
                    representation: rep,
                    method: "enumeration",
                    log_z: sums.log_z,
                    model_log_z_per_site: to_model_log_z(sums.log_z, rep, &spec) / n,
                    asym_var_ot: sums.asym_var_ot(),
                    asym_var_uniform: sums.asym_var_uniform(),
                },
                Err(Error::TooLargeForExact(_)) if rep == Representation::Primal => {
                    let log_z = transfer_matrix_log_z(&spec)?;
                    ExactRow {
                        beta,
                        representation: rep,
                        method: "transfer",
                        log_z,
                        model_log_z_per_site: log_z / n,
                        asym_var_ot: f64::NAN,
                        asym_var_uniform: f64::NAN,
                    }
                }
                Err(e) => return Err(e),
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn format_exact_rows(model: ModelKind, q: usize, side: usize, rows: &[ExactRow]) -> String {
    let mut out = String::from(EXACT_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            model.name(),
            q,
            side,
            Sci(r.beta),
            r.representation,
            r.method,
            Sci(r.log_z),
            Sci(r.model_log_z_per_site),
            Sci(r.asym_var_ot),
            Sci(r.asym_var_uniform)
        ));
    }
    out
}

pub const BOUNDS_HEADER: &str = "q,L,beta,representation,log1p_lower_ot,log1p_upper_ot,log1p_lower_uniform,log1p_upper_uniform,log1p_exact_ot,log1p_exact_uniform,crossover";

/// Bounds plus the exact `(OT, uniform)` variances when enumerable.
pub type BoundsRow = (BoundsReport, Option<(f64, f64)>);

/// Potts variance bounds, with the exact variances alongside when the
/// instance can be enumerated. All variances are reported as `log(1 + v)`.
pub fn bounds_table(
    q: usize,
    side: usize,
    betas: &[f64],
    representation: RepresentationChoice,
) -> Result<Vec<BoundsRow>> {
    let mut rows = Vec::new();
    for &beta in betas {
        let spec = ModelSpec::potts(q, side, beta)?;
        for &rep in representation.representations() {
            let report = match rep {
                Representation::Primal => primal_bounds(beta, spec.num_sites(), q)?,
                Representation::Dual => dual_bounds(beta, spec.num_sites(), q)?,
            };
            let exact = match ExactSums::compute(&spec, rep) {
                Ok(sums) => Some((sums.asym_var_ot(), sums.asym_var_uniform())),
                Err(Error::TooLargeForExact(_)) => None,
                Err(e) => return Err(e),
            };
            rows.push((report, exact));
        }
    }
    Ok(rows)
}

pub fn format_bounds_rows(side: usize, rows: &[BoundsRow]) -> String {
    let mut out = String::from(BOUNDS_HEADER);
    out.push('\n');
    for (b, exact) in rows {
        let (eo, eu) = match exact {
            Some((o, u)) => (Sci(o.ln_1p()).to_string(), Sci(u.ln_1p()).to_string()),
            None => (String::new(), String::new()),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            b.q,
            side,
            Sci(b.beta),
            b.representation,
            Sci(b.lower_ot.log_one_plus),
            Sci(b.upper_ot.log_one_plus),
            Sci(b.lower_uniform.log_one_plus),
            Sci(b.upper_uniform.log_one_plus),
            eo,
            eu,
            Sci(b.crossover)
        ));
    }
    out
}

/// One self-check: a measured error against its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub error: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.error.is_finite() && self.error < self.tolerance
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Transform closed forms, clock positivity and the primal/dual identity
/// `log Z = log Z_dual + N log q`, for the given instance.
pub fn self_checks(model: ModelKind, q: usize, side: usize, betas: &[f64]) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &beta in betas {
        let spec = model.spec(q, side, beta)?;
        let spectrum = spec.spectrum()?;
        match model {
            ModelKind::Potts => checks.push(Check {
                name: format!("potts spectrum closed form q={q} beta={beta}"),
                error: max_abs_diff(spectrum.values(), potts_spectrum_closed_form(beta, q)?.values()),
                tolerance: 1e-12,
            }),
            ModelKind::Clock => {
                if q == 4 {
                    checks.push(Check {
                        name: format!("clock spectrum closed form q=4 beta={beta}"),
                        error: max_abs_diff(spectrum.values(), clock_spectrum_closed_form_q4(beta).values()),
                        tolerance: 1e-12,
                    });
                }
                let n_max = default_series_order(beta);
                let series: Vec<f64> = (0..q)
                    .map(|k| clock_spectrum_series(beta, GroupElement::new(k, q).expect("k < q"), n_max))
                    .collect();
                checks.push(Check {
                    name: format!("clock series q={q} beta={beta}"),
                    error: max_abs_diff(spectrum.values(), &series),
                    tolerance: 1e-10,
                });
            }
        }
        let round_trip = idft(&spectrum)?;
        checks.push(Check {
            name: format!("inverse transform round trip q={q} beta={beta}"),
            error: max_abs_diff(round_trip.values(), spec.kernel().values()),
            tolerance: 1e-12,
        });
        if beta > 0.0 {
            let min = spectrum.values().iter().copied().fold(f64::INFINITY, f64::min);
            checks.push(Check {
                name: format!("spectrum positive q={q} beta={beta}"),
                error: if min > 0.0 { 0.0 } else { -min + f64::MIN_POSITIVE },
                tolerance: f64::MIN_POSITIVE,
            });
            checks.push(Check {
                name: format!("duality q={q} L={side} beta={beta}"),
                error: duality_gap(&spec)?.abs(),
                tolerance: 1e-9,
            });
        }
    }
    Ok(checks)
}
