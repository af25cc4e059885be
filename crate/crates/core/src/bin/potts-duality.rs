use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use potts_duality::harness::{
    self, beta_sweep, emit_csv, emit_sweep_csv, run_experiment, CheckpointSchedule, ConfigOverrides,
    EstimatorChoice, ExperimentConfig, ModelKind, RepresentationChoice, Sci,
};
use potts_duality::{Error, Result};

#[derive(Parser)]
#[command(name = "potts-duality", version, about = "Partition-function estimation on primal and dual factor graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Multi-trial estimate at a single beta.
    Estimate(Flags),
    /// Multi-trial estimates over a list of betas, with a std-dev table.
    Sweep(Flags),
    /// Exact log Z and asymptotic estimator variances.
    Exact(Flags),
    /// Closed-form variance bounds for the Potts model.
    Bounds(Flags),
    /// Transform and duality self-checks.
    Verify(Flags),
}

#[derive(Args, Debug, Default)]
struct Flags {
    /// potts or clock
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    q: Option<usize>,
    /// Torus side length.
    #[arg(long = "L", short = 'L')]
    side: Option<usize>,
    /// Inverse temperature; repeat or pass a comma-separated list.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    beta: Vec<f64>,
    /// primal, dual or both
    #[arg(long)]
    rep: Option<String>,
    /// ot, uniform or both
    #[arg(long)]
    estimator: Option<String>,
    /// Samples per trial (M).
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// Gibbs sweeps discarded before recording.
    #[arg(long = "burn-in")]
    burn_in: Option<usize>,
    /// Base seed; trial i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// "geometric" or a comma-separated list of sample counts.
    #[arg(long)]
    checkpoints: Option<String>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory for CSV files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// key = value file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Flags {
    fn overrides(&self) -> Result<ConfigOverrides> {
        let from_file = match &self.config {
            Some(path) => ConfigOverrides::from_file(path)
                .map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?,
            None => ConfigOverrides::default(),
        };
        let cli = ConfigOverrides {
            model: self.model.as_deref().map(str::parse::<ModelKind>).transpose()?,
            q: self.q,
            side: self.side,
            betas: (!self.beta.is_empty()).then(|| self.beta.clone()),
            representation: self.rep.as_deref().map(str::parse::<RepresentationChoice>).transpose()?,
            estimator: self.estimator.as_deref().map(str::parse::<EstimatorChoice>).transpose()?,
            samples: self.samples,
            trials: self.trials,
            burn_in: self.burn_in,
            checkpoints: self.checkpoints.as_deref().map(str::parse::<CheckpointSchedule>).transpose()?,
            base_seed: self.seed,
            jobs: self.jobs,
            output_dir: self.out.clone(),
        };
        Ok(from_file.merge(cli))
    }

    fn experiment(&self) -> Result<ExperimentConfig> {
        self.overrides()?.build()
    }
}

fn print_summary_tail(results: &harness::ExperimentResults) {
    println!("beta,representation,estimator,M,mean_log_z_per_site,std_log_z_per_site");
    for row in &results.summary {
        if results.final_row(row.beta, row.representation, row.estimator) == Some(row) {
            println!(
                "{},{},{},{},{},{}",
                Sci(row.beta),
                row.representation,
                row.estimator,
                row.samples,
                Sci(row.mean),
                Sci(row.std)
            );
        }
    }
}

fn estimate(flags: &Flags) -> Result<()> {
    let config = flags.experiment()?;
    if config.betas.len() != 1 {
        return Err(Error::Config("estimate takes exactly one beta; use sweep for a list".into()));
    }
    let results = run_experiment(&config)?;
    let files = emit_csv(&results, &config.output_dir)?;
    print_summary_tail(&results);
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn sweep(flags: &Flags) -> Result<()> {
    let config = flags.experiment()?;
    let results = beta_sweep(&config)?;
    let files = emit_sweep_csv(&results, &config.output_dir)?;
    println!("beta,representation,estimator,M,std_log_z_per_site");
    for r in &results.table {
        println!("{},{},{},{},{}", Sci(r.beta), r.representation, r.estimator, r.samples, Sci(r.std));
    }
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

/// Model settings only; samplers are not involved.
fn instance(flags: &Flags) -> Result<(ModelKind, usize, usize, Vec<f64>, RepresentationChoice)> {
    let o = flags.overrides()?;
    let betas = o.betas.ok_or_else(|| Error::Config("missing beta".into()))?;
    Ok((
        o.model.unwrap_or(ModelKind::Potts),
        o.q.unwrap_or(2),
        o.side.unwrap_or(4),
        betas,
        o.representation.unwrap_or(RepresentationChoice::Both),
    ))
}

fn exact(flags: &Flags) -> Result<()> {
    let (model, q, side, betas, rep) = instance(flags)?;
    let rows = harness::exact_table(model, q, side, &betas, rep)?;
    print!("{}", harness::format_exact_rows(model, q, side, &rows));
    Ok(())
}

fn bounds(flags: &Flags) -> Result<()> {
    let (model, q, side, betas, rep) = instance(flags)?;
    if model != ModelKind::Potts {
        return Err(Error::Config("variance bounds are available for the Potts model only".into()));
    }
    let rows = harness::bounds_table(q, side, &betas, rep)?;
    print!("{}", harness::format_bounds_rows(side, &rows));
    Ok(())
}

fn verify(flags: &Flags) -> Result<bool> {
    let (model, q, side, betas, _) = instance(flags)?;
    let checks = harness::self_checks(model, q, side, &betas)?;
    let mut ok = true;
    for c in &checks {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        ok &= c.passed();
        println!("{status} {} (error {:.3e}, tolerance {:.1e})", c.name, c.error, c.tolerance);
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Estimate(f) => estimate(f).map(|_| true),
        Command::Sweep(f) => sweep(f).map(|_| true),
        Command::Exact(f) => exact(f).map(|_| true),
        Command::Bounds(f) => bounds(f).map(|_| true),
        Command::Verify(f) => verify(f),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
