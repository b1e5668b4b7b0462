//! Command-line front end: `bench run`, `bench filters`, `bench rates`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{
    parse_kernel, parse_methods, parse_solution, DtPolicy, ExperimentConfig, Scaling, FULL_GRID,
};
use crate::csv::{emit_csv, write_file, write_filter_table, write_rates};
use crate::error::{BenchError, Result};
use crate::experiment::{run_experiment, TraceStatus};
use crate::rates::{filter_table, rate_study, RateStudy, SourceOmega};

#[derive(Debug, Parser)]
#[command(
    name = "bench",
    about = "Dynamic-programming regularization benchmarks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Error traces of the selected methods on one benchmark problem.
    Run(RunArgs),
    /// Tabulate both filter functions and their residual factors.
    Filters(FilterArgs),
    /// Noisy-data rates on a source-element problem under the a-priori choice.
    Rates(RateArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, default_value = "k1")]
    pub kernel: String,
    #[arg(long, default_value = "u1")]
    pub solution: String,
    #[arg(long, default_value_t = 64)]
    pub m: usize,
    /// Relative noise level `|e| / |y|`.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Comma-separated subset of dp_discrete,dp_continuous,landweber,cg.
    #[arg(long, default_value = "dp_discrete,dp_continuous,landweber,cg")]
    pub methods: String,
    #[arg(long, default_value_t = 100)]
    pub max_iters: usize,
    #[arg(long)]
    pub out: PathBuf,
    /// Use the full m = 300 grid.
    #[arg(long)]
    pub full_scale: bool,
    /// Record measured wall times instead of zeros (makes output nondeterministic).
    #[arg(long)]
    pub wall_time: bool,
    /// `unit` divides the operator and data by the operator norm; `raw` keeps them.
    #[arg(long, default_value = "unit")]
    pub scaling: String,
    /// Euler step of the continuous method.
    #[arg(long, conflicts_with = "dt_fraction")]
    pub dt: Option<f64>,
    /// Euler step as a fraction of `1 / sigma_max^2`.
    #[arg(long)]
    pub dt_fraction: Option<f64>,
    /// Landweber step; defaults to `1 / sigma_max^2`.
    #[arg(long)]
    pub relaxation: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long = "N", default_value_t = 10)]
    pub steps: usize,
    #[arg(long = "T", default_value_t = 10.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_max: f64,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[arg(long, default_value_t = 0.5)]
    pub mu: f64,
    /// Comma-separated relative noise levels.
    #[arg(long, default_value = "1e-2,1e-3,1e-4")]
    pub deltas: String,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "k1")]
    pub kernel: String,
    /// `omega` of the source element: `noise` (seeded Gaussian), `u1` or `u2`.
    #[arg(long, default_value = "noise")]
    pub omega: String,
    #[arg(long, default_value_t = 7)]
    pub omega_seed: u64,
    #[arg(long, default_value_t = 64)]
    pub m: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Noise realizations averaged per level.
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    /// Multiplier of the a-priori parameter.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
}

impl RunArgs {
    pub fn to_config(&self) -> Result<ExperimentConfig> {
        let scaling = match self.scaling.as_str() {
            "unit" => Scaling::UnitNorm,
            "raw" => Scaling::Raw,
            other => {
                return Err(BenchError::Config(format!(
                    "unknown scaling `{other}` (expected unit or raw)"
                )))
            }
        };
        let dt_policy = match (self.dt, self.dt_fraction) {
            (Some(dt), _) => DtPolicy::Fixed(dt),
            (None, Some(c)) => DtPolicy::StabilityFraction(c),
            (None, None) => DtPolicy::default(),
        };
        let config = ExperimentConfig {
            kernel: parse_kernel(&self.kernel)?,
            solution: parse_solution(&self.solution)?,
            m: if self.full_scale { FULL_GRID } else { self.m },
            noise_fraction: self.noise,
            seed: self.seed,
            methods: parse_methods(&self.methods)?,
            max_iters: self.max_iters,
            dt_policy,
            scaling,
            relaxation: self.relaxation,
        };
        config.validate()?;
        Ok(config)
    }
}

fn parse_list(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| BenchError::Config(format!("`{s}` is not a number")))
        })
        .collect()
}

/// Executes a parsed command; messages go to stderr.
pub fn execute(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Run(args) => {
            let config = args.to_config()?;
            let mut traces = run_experiment(&config)?;
            if !args.wall_time {
                for t in &mut traces {
                    t.wall_time = 0.0;
                }
            }
            emit_csv(&traces, &config, &args.out)?;
            let mut failure = None;
            for t in &traces {
                match &t.status {
                    TraceStatus::Complete => {}
                    TraceStatus::Stopped(reason) => {
                        eprintln!(
                            "{}: stopped after {} iterations ({reason:?})",
                            t.method,
                            t.len() - 1
                        )
                    }
                    TraceStatus::Failed(msg) => {
                        eprintln!("{}: failed: {msg}", t.method);
                        failure.get_or_insert_with(|| format!("{}: {msg}", t.method));
                    }
                }
            }
            match failure {
                Some(msg) => Err(BenchError::MethodFailed(msg)),
                None => Ok(()),
            }
        }
        Command::Filters(args) => {
            let rows = filter_table(args.steps, args.horizon, args.lambda_max, args.points)?;
            write_file(&args.out, |w| write_filter_table(w, &rows))
        }
        Command::Rates(args) => {
            let study = RateStudy {
                kernel: parse_kernel(&args.kernel)?,
                omega: match args.omega.as_str() {
                    "noise" => SourceOmega::WhiteNoise(args.omega_seed),
                    other => SourceOmega::Solution(parse_solution(other)?),
                },
                m: args.m,
                mu: args.mu,
                deltas: parse_list(&args.deltas)?,
                seed: args.seed,
                trials: args.trials,
                scale: args.scale,
            };
            let result = rate_study(&study)?;
            write_file(&args.out, |w| write_rates(w, &result.points))?;
            for (method, e) in &result.exponents {
                eprintln!("{method}: error ~ delta^{e:.3}");
            }
            Ok(())
        }
    }
}

/// Parses `args` and executes; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
