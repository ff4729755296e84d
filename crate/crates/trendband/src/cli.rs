use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use trendband_core::simulation::{
    coverage_experiment, normality_diagnostic, rate_check, simulate_sample, CoverageConfig, GPModel, MeanFunction,
    NoiseKind, NoiseModel, NormalityConfig, RateCheckConfig,
};
use trendband_core::{BandKind, Bandwidth, DesignGrid, EstimatorConfig, FunctionalSample, Kernel, Method};

use crate::error::{Error, Result};
use crate::{build_band, estimate_trend, io, BandRequest};

#[derive(Debug, Parser)]
#[command(
    name = "trendband",
    version,
    about = "Trend estimates and confidence bands for samples of noisy curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Estimate the mean curve of a sample and write it as CSV.
    Estimate {
        input: PathBuf,
        #[command(flatten)]
        estimator: EstimatorArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a confidence band as CSV plus a JSON header.
    Band {
        input: PathBuf,
        #[command(flatten)]
        estimator: EstimatorArgs,
        #[arg(long, default_value_t = 0.05)]
        gamma: f64,
        #[arg(long, value_enum, default_value_t = Kind::Simultaneous)]
        kind: Kind,
        /// CSV destination; the header goes next to it with a .json extension.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a synthetic sample from a Gaussian process model.
    Simulate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 100)]
        p: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo coverage of simultaneous and pointwise bands.
    Coverage {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        estimator: EstimatorArgs,
        #[arg(long, default_value_t = 100)]
        p: usize,
        #[arg(long, default_value_t = 0.10)]
        gamma: f64,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Variance of the estimate at one time point across grid sizes.
    RateCheck {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        estimator: EstimatorArgs,
        #[arg(long, value_delimiter = ',', default_value = "50,100,200,400")]
        p_list: Vec<usize>,
        /// Time point; defaults to the middle of the interval.
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long, default_value_t = 500)]
        reps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distribution of the scaled estimation error at one time point.
    Normality {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        estimator: EstimatorArgs,
        #[arg(long, default_value_t = 200)]
        p: usize,
        #[arg(long)]
        t0: Option<f64>,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Simultaneous,
    Pointwise,
}

impl From<Kind> for BandKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Simultaneous => BandKind::Simultaneous,
            Kind::Pointwise => BandKind::Pointwise,
        }
    }
}

#[derive(Debug, Args)]
struct EstimatorArgs {
    #[arg(long, default_value = "loclin", value_parser = parse_method)]
    method: Method,
    #[arg(long, default_value = "epanechnikov", value_parser = parse_kernel)]
    kernel: Kernel,
    /// Positive bandwidth or `auto`.
    #[arg(long, default_value = "auto", value_parser = parse_bandwidth)]
    bandwidth: Bandwidth,
    #[arg(long, default_value_t = trendband_core::estimators::DEFAULT_EVAL_POINTS)]
    eval_points: usize,
}

impl EstimatorArgs {
    fn config(&self) -> EstimatorConfig {
        EstimatorConfig::new(self.method, self.kernel, self.bandwidth)
    }
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// ou, brownian, bridge, se or deterministic.
    #[arg(long, default_value = "ou")]
    model: String,
    /// zero, sine or quadratic.
    #[arg(long, default_value = "sine")]
    mean: String,
    #[arg(long, default_value_t = 1.0)]
    horizon: f64,
    #[arg(long, default_value_t = 0.25)]
    sigma: f64,
    /// `iid` or `ar1:RHO`.
    #[arg(long, default_value = "iid", value_parser = parse_noise)]
    noise: NoiseKind,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ModelArgs {
    fn model(&self) -> Result<GPModel> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Usage(format!(
                "--horizon must be positive, got {}",
                self.horizon
            )));
        }
        let mean = MeanFunction::parse(&self.mean)?;
        Ok(GPModel::preset(&self.model, self.horizon)?.with_mean(mean))
    }

    fn noise(&self) -> NoiseModel {
        NoiseModel {
            sigma: self.sigma,
            kind: self.noise,
        }
    }
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: trendband_core::Error| e.to_string())
}

fn parse_kernel(s: &str) -> std::result::Result<Kernel, String> {
    s.parse().map_err(|e: trendband_core::Error| e.to_string())
}

fn parse_bandwidth(s: &str) -> std::result::Result<Bandwidth, String> {
    s.parse().map_err(|e: trendband_core::Error| e.to_string())
}

fn parse_noise(s: &str) -> std::result::Result<NoiseKind, String> {
    let s = s.trim().to_ascii_lowercase();
    if s == "iid" {
        return Ok(NoiseKind::Iid);
    }
    let rho = s
        .strip_prefix("ar1:")
        .ok_or_else(|| format!("expected 'iid' or 'ar1:RHO', got '{s}'"))?;
    let rho: f64 = rho.parse().map_err(|_| format!("'{rho}' is not a number"))?;
    Ok(NoiseKind::Ar1 { rho })
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn destination(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(create(path)?),
        None => Box::new(io::stdout_lock()),
    })
}

fn write_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    let mut w = destination(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn load(input: &Path) -> Result<FunctionalSample> {
    let sample = io::read_sample(input)?;
    let mesh = sample.grid().mesh_report();
    if mesh.warning {
        eprintln!(
            "warning: grid is far from quasi-uniform (largest gap / smallest gap = {:.3})",
            mesh.quasi_uniform_ratio
        );
    }
    Ok(sample)
}

fn t0_or_midpoint(t0: Option<f64>, model: &GPModel) -> f64 {
    t0.unwrap_or(model.horizon / 2.0)
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Estimate { input, estimator, out } => {
            let sample = load(&input)?;
            let trend = estimate_trend(&sample, &estimator.config(), estimator.eval_points)?;
            let mut w = destination(out.as_deref())?;
            io::write_trend(&mut w, &trend)?;
            w.flush()?;
        }
        Command::Band {
            input,
            estimator,
            gamma,
            kind,
            out,
        } => {
            let sample = load(&input)?;
            let request = BandRequest {
                estimator: estimator.config(),
                gamma,
                eval_points: estimator.eval_points,
                kind: kind.into(),
            };
            let result = build_band(&sample, &request)?;
            match out {
                Some(path) => {
                    let mut w = create(&path)?;
                    io::write_band(&mut w, &result.band)?;
                    w.flush()?;
                    let sidecar = path.with_extension("json");
                    let mut j = create(&sidecar)?;
                    serde_json::to_writer_pretty(&mut j, &result.header)?;
                    writeln!(j)?;
                    j.flush()?;
                }
                None => {
                    io::write_band(io::stdout_lock(), &result.band)?;
                    eprintln!("{}", serde_json::to_string(&result.header)?);
                }
            }
        }
        Command::Simulate { model, p, out } => {
            let gp = model.model()?;
            let grid = DesignGrid::equispaced(p, gp.horizon)?;
            let sample = simulate_sample(&gp, &model.noise(), &grid, model.n, model.seed)?;
            let mut w = destination(out.as_deref())?;
            io::write_sample(&mut w, &sample)?;
            w.flush()?;
        }
        Command::Coverage {
            model,
            estimator,
            p,
            gamma,
            reps,
            out,
        } => {
            let mut config = CoverageConfig::new(model.model()?, model.noise(), model.n, p, gamma, reps, model.seed);
            config.estimator = estimator.config();
            config.eval_points = estimator.eval_points;
            write_json(out.as_deref(), &coverage_experiment(&config)?)?;
        }
        Command::RateCheck {
            model,
            estimator,
            p_list,
            t0,
            reps,
            out,
        } => {
            let gp = model.model()?;
            let config = RateCheckConfig {
                t0: t0_or_midpoint(t0, &gp),
                model: gp,
                noise: model.noise(),
                n: model.n,
                p_list,
                estimator: estimator.config(),
                replications: reps,
                seed: model.seed,
            };
            write_json(out.as_deref(), &rate_check(&config)?)?;
        }
        Command::Normality {
            model,
            estimator,
            p,
            t0,
            reps,
            out,
        } => {
            let gp = model.model()?;
            let config = NormalityConfig {
                t0: t0_or_midpoint(t0, &gp),
                model: gp,
                noise: model.noise(),
                n: model.n,
                p,
                estimator: estimator.config(),
                replications: reps,
                seed: model.seed,
            };
            write_json(out.as_deref(), &normality_diagnostic(&config)?)?;
        }
    }
    Ok(())
}
