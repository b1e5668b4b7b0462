//! Runs the four regularizers on one problem instance and records error traces.

use std::ops::RangeInclusive;
use std::time::Instant;

use dpreg::baselines::{default_relaxation, CgStepper, LandweberStepper, StopReason};
use dpreg::benchprob::{make_problem, InverseProblem};
use dpreg::dp_continuous::riccati_backward_with_step;
use dpreg::dp_discrete::backward_pass;
use dpreg::{DMatrix, DVector};

use crate::config::{DtPolicy, ExperimentConfig, Method, Scaling};
use crate::error::{BenchError, Result};

/// How a trace ended.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceStatus {
    Complete,
    /// CG stopped before `max_iters`; the trace is truncated.
    Stopped(StopReason),
    /// The method failed; the trace holds the iterates computed before the failure.
    Failed(String),
}

/// Error and residual histories of one method; index 0 is `u_0 = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTrace {
    pub method: Method,
    /// `|u_k - u_exact|`.
    pub errors: Vec<f64>,
    /// `|F u_k - y|` against the data the method saw.
    pub residuals: Vec<f64>,
    pub wall_time: f64,
    pub fingerprint: String,
    pub status: TraceStatus,
}

impl ErrorTrace {
    pub fn len(&self) -> usize {
        self.errors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn final_error(&self) -> f64 {
        *self.errors.last().expect("trace holds u_0")
    }

    /// Index of the smallest error.
    pub fn argmin(&self) -> usize {
        self.errors
            .iter()
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |best, (k, &e)| if e < best.1 { (k, e) } else { best },
            )
            .0
    }
}

/// Options shared by every method of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub max_iters: usize,
    pub dt_policy: DtPolicy,
    pub relaxation: Option<f64>,
}

/// Builds the benchmark problem of `config`, applying its scaling.
pub fn build_problem(config: &ExperimentConfig) -> Result<InverseProblem> {
    config.validate()?;
    let p = make_problem(
        config.kernel,
        config.solution,
        config.m,
        config.noise_fraction,
        config.seed,
    )?;
    Ok(match config.scaling {
        Scaling::UnitNorm => p.scaled_to_unit_norm()?,
        Scaling::Raw => p,
    })
}

/// One trace per configured method, in configured order, all on the same noise realization.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ErrorTrace>> {
    let problem = build_problem(config)?;
    let options = RunOptions {
        max_iters: config.max_iters,
        dt_policy: config.dt_policy,
        relaxation: config.relaxation,
    };
    let fingerprint = config.fingerprint();
    config
        .methods
        .iter()
        .map(|&m| run_method(&problem, m, &options, &fingerprint))
        .collect()
}

/// Runs one method. Numerical failures end up in [`ErrorTrace::status`].
pub fn run_method(
    problem: &InverseProblem,
    method: Method,
    options: &RunOptions,
    fingerprint: &str,
) -> Result<ErrorTrace> {
    let Some(u_exact) = problem.u_exact.as_ref() else {
        return Err(BenchError::Config(
            "problem has no exact solution to measure errors against".into(),
        ));
    };
    let mut rec = Recorder::new(problem, u_exact);
    let start = Instant::now();
    let outcome = match method {
        Method::DpDiscrete => trace_dp_discrete(problem, options, &mut rec),
        Method::DpContinuous => trace_dp_continuous(problem, options, &mut rec),
        Method::Landweber => trace_landweber(problem, options, &mut rec),
        Method::Cg => trace_cg(problem, options, &mut rec),
    };
    let wall_time = start.elapsed().as_secs_f64();
    let status = match outcome {
        Ok(None) => TraceStatus::Complete,
        Ok(Some(reason)) => TraceStatus::Stopped(reason),
        Err(e) => TraceStatus::Failed(e.to_string()),
    };
    Ok(ErrorTrace {
        method,
        errors: rec.errors,
        residuals: rec.residuals,
        wall_time,
        fingerprint: fingerprint.to_owned(),
        status,
    })
}

struct Recorder<'a> {
    problem: &'a InverseProblem,
    u_exact: &'a DVector<f64>,
    errors: Vec<f64>,
    residuals: Vec<f64>,
}

impl<'a> Recorder<'a> {
    fn new(problem: &'a InverseProblem, u_exact: &'a DVector<f64>) -> Self {
        let mut rec = Recorder {
            problem,
            u_exact,
            errors: Vec::new(),
            residuals: Vec::new(),
        };
        rec.push(&DVector::zeros(problem.operator.cols()));
        rec
    }

    fn push(&mut self, u: &DVector<f64>) {
        let r = self.problem.operator.matrix() * u - &self.problem.y_noisy;
        self.push_with_residual(u, r.norm());
    }

    fn push_with_residual(&mut self, u: &DVector<f64>, residual: f64) {
        self.errors.push((u - self.u_exact).norm());
        self.residuals.push(residual);
    }

    fn check_finite(&self, iteration: usize) -> dpreg::Result<()> {
        let ok = self.errors.last().is_some_and(|e| e.is_finite())
            && self.residuals.last().is_some_and(|r| r.is_finite());
        if ok {
            Ok(())
        } else {
            Err(dpreg::Error::Diverged { iteration })
        }
    }
}

fn trace_dp_discrete(
    p: &InverseProblem,
    o: &RunOptions,
    rec: &mut Recorder,
) -> dpreg::Result<Option<StopReason>> {
    let op = &p.operator;
    let n = op.rows();
    let schedule = backward_pass(op, o.max_iters, &DMatrix::identity(n, n))?;
    let u0 = DVector::zeros(op.cols());
    for k in 1..=o.max_iters {
        let u = schedule.solve_horizon(op, k, &p.y_noisy, &u0)?;
        rec.push(&u);
        rec.check_finite(k)?;
    }
    Ok(None)
}

fn trace_dp_continuous(
    p: &InverseProblem,
    o: &RunOptions,
    rec: &mut Recorder,
) -> dpreg::Result<Option<StopReason>> {
    let op = &p.operator;
    let dt = o.dt_policy.step(op.norm()?);
    let path = riccati_backward_with_step(op, dt, o.max_iters)?;
    let u0 = DVector::zeros(op.cols());
    for k in 1..=o.max_iters {
        let u = path.solve_horizon(op, k, &p.y_noisy, &u0)?;
        rec.push(&u);
        rec.check_finite(k)?;
    }
    Ok(None)
}

fn trace_landweber(
    p: &InverseProblem,
    o: &RunOptions,
    rec: &mut Recorder,
) -> dpreg::Result<Option<StopReason>> {
    let omega = match o.relaxation {
        Some(w) => w,
        None => default_relaxation(&p.operator)?,
    };
    let mut stepper = LandweberStepper::new(&p.operator, &p.y_noisy, omega)?;
    for k in 1..=o.max_iters {
        stepper.step()?;
        rec.push_with_residual(stepper.iterate(), stepper.residual_norm());
        rec.check_finite(k)?;
    }
    Ok(None)
}

fn trace_cg(
    p: &InverseProblem,
    o: &RunOptions,
    rec: &mut Recorder,
) -> dpreg::Result<Option<StopReason>> {
    let mut stepper = CgStepper::new(&p.operator, &p.y_noisy)?;
    for k in 1..=o.max_iters {
        if let Some(reason) = stepper.step() {
            return Ok(Some(reason));
        }
        rec.push_with_residual(stepper.iterate(), stepper.residual_norm());
        rec.check_finite(k)?;
    }
    Ok(None)
}

/// Least-squares fit of `ln error` against `ln k`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateEstimate {
    pub slope: f64,
    pub window: RangeInclusive<usize>,
    pub r_squared: f64,
}

pub const MIN_WINDOW: usize = 5;

/// Fits `ln errors[k]` against `ln k` for `k` in `window`.
pub fn estimate_slope(errors: &[f64], window: RangeInclusive<usize>) -> Result<RateEstimate> {
    let (lo, hi) = (*window.start(), *window.end());
    if lo == 0 || hi < lo || hi >= errors.len() {
        return Err(BenchError::Config(format!(
            "window {lo}..={hi} must lie in 1..{}",
            errors.len()
        )));
    }
    let xs: Vec<f64> = (lo..=hi).map(|k| (k as f64).ln()).collect();
    let ys = errors[lo..=hi]
        .iter()
        .map(|&e| {
            if e > 0.0 && e.is_finite() {
                Ok(e.ln())
            } else {
                Err(BenchError::Config(format!(
                    "error {e} in fit window is not positive"
                )))
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    fit_line(&xs, &ys).map(|(slope, r_squared)| RateEstimate {
        slope,
        window,
        r_squared,
    })
}

/// Slope and `r^2` of the least-squares line through `(x, y)`; needs at least [`MIN_WINDOW`] points.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    if xs.len() != ys.len() || xs.len() < MIN_WINDOW {
        return Err(BenchError::Config(format!(
            "a fit needs at least {MIN_WINDOW} points"
        )));
    }
    fit_line_unchecked(xs, ys)
}

/// Least squares without the window-size requirement (needs two distinct abscissae).
pub fn fit_line_unchecked(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if !(sxx > 0.0) {
        return Err(BenchError::Config("fit abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok((slope, r_squared))
}

/// `scale * delta^(-1/(2 mu + 1))`.
pub fn apriori_choice(delta: f64, mu: f64, scale: f64) -> Result<f64> {
    if !(delta > 0.0) || !(mu > 0.0) || !(scale > 0.0) {
        return Err(BenchError::Config(
            "delta, mu and scale must be positive".into(),
        ));
    }
    Ok(scale * delta.powf(-1.0 / (2.0 * mu + 1.0)))
}

/// [`apriori_choice`] rounded up to a step count.
pub fn apriori_steps(delta: f64, mu: f64, scale: f64) -> Result<usize> {
    // a relative nudge keeps exact powers like 1e-4^(-1/2) = 100 from rounding up
    Ok((apriori_choice(delta, mu, scale)? * (1.0 - 1e-12))
        .ceil()
        .max(1.0) as usize)
}

pub const DEFAULT_TAU: f64 = 1.5;

/// First `k` with `residuals[k] <= tau * delta`, or the last index.
pub fn discrepancy_stop(residuals: &[f64], delta: f64, tau: f64) -> Result<usize> {
    if !(tau > 1.0) {
        return Err(BenchError::Config("tau must exceed 1".into()));
    }
    if residuals.is_empty() {
        return Err(BenchError::Config("empty residual series".into()));
    }
    Ok(residuals
        .iter()
        .position(|&r| r <= tau * delta)
        .unwrap_or(residuals.len() - 1))
}
