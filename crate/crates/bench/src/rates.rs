//! Noisy-data convergence rates on manufactured source elements, and filter tables.

use dpreg::benchprob::{
    build_operator, exact_solution, make_source_element, problem_from_solution, ExactSolution,
    Kernel,
};
use dpreg::dp_continuous::riccati_backward_with_step;
use dpreg::dp_discrete::backward_pass;
use dpreg::filters::{
    continuous_filter, continuous_residual, discrete_filter, discrete_residual, log_grid,
    Representation,
};
use dpreg::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::config::{DtPolicy, Method};
use crate::error::{BenchError, Result};
use crate::experiment::{apriori_steps, fit_line_unchecked, run_method, RunOptions};

/// The `omega` of a source element `(F*F)^mu omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SourceOmega {
    /// Nodal values of a benchmark solution. Smooth choices carry extra smoothness
    /// beyond order `mu`, so they converge faster than the worst-case rate.
    Solution(ExactSolution),
    /// Seeded standard Gaussian vectors, a fresh one per trial: spread over the whole
    /// spectrum, no extra smoothness.
    WhiteNoise(u64),
}

impl SourceOmega {
    /// `omega` of trial `trial`.
    pub fn vector(self, m: usize, trial: u64) -> Result<DVector<f64>> {
        match self {
            SourceOmega::Solution(s) => Ok(exact_solution(s, m)?),
            SourceOmega::WhiteNoise(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial));
                Ok(DVector::from_fn(m + 1, |_, _| {
                    StandardNormal.sample(&mut rng)
                }))
            }
        }
    }
}

/// Source-element rate study: `u = (F*F)^mu omega` with `F` scaled to unit norm,
/// errors averaged over trials.
/// Noise levels are relative to `|F u|`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateStudy {
    pub kernel: Kernel,
    pub omega: SourceOmega,
    pub m: usize,
    pub mu: f64,
    pub deltas: Vec<f64>,
    /// Trials `t = 0..trials` use noise seed `seed + t`; errors are averaged per level.
    pub seed: u64,
    pub trials: usize,
    /// Multiplier in the a-priori parameter `scale * delta^(-1/(2 mu + 1))`.
    pub scale: f64,
}

impl Default for RateStudy {
    fn default() -> Self {
        RateStudy {
            kernel: Kernel::BumpC6,
            omega: SourceOmega::WhiteNoise(7),
            m: 64,
            mu: 0.5,
            deltas: vec![1e-2, 1e-3, 1e-4],
            seed: 1,
            trials: 10,
            scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatePoint {
    pub method: Method,
    pub delta: f64,
    /// `N` for the discrete method, number of unit Euler steps for the continuous one.
    pub parameter: usize,
    /// Mean of `|u_k - u|` over the noise realizations.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateResult {
    pub points: Vec<RatePoint>,
    /// Fitted exponent of `error ~ delta^e` per method.
    pub exponents: Vec<(Method, f64)>,
}

/// Runs the a-priori choice for each noise level with both dynamic-programming methods.
pub fn rate_study(study: &RateStudy) -> Result<RateResult> {
    if study.deltas.len() < 2 || study.deltas.iter().any(|&d| !(d > 0.0 && d < 1.0)) {
        return Err(BenchError::Config(
            "need at least two noise levels in (0, 1)".into(),
        ));
    }
    let raw = build_operator(study.kernel, study.m)?;
    let op = raw.scaled(1.0 / raw.norm()?)?;
    let n = op.rows();
    let u0 = DVector::zeros(op.cols());

    let steps: Vec<usize> = study
        .deltas
        .iter()
        .map(|&d| apriori_steps(d, study.mu, study.scale))
        .collect::<Result<_>>()?;
    let max_steps = *steps.iter().max().expect("nonempty");
    let schedule = backward_pass(&op, max_steps, &DMatrix::identity(n, n))?;
    let path = riccati_backward_with_step(&op, 1.0, max_steps)?;

    if study.trials == 0 {
        return Err(BenchError::Config(
            "need at least one noise realization".into(),
        ));
    }
    let mut points = Vec::new();
    for (&delta, &k) in study.deltas.iter().zip(&steps) {
        let (mut ed, mut ec) = (0.0, 0.0);
        for t in 0..study.trials as u64 {
            let u = make_source_element(&op, study.mu, &study.omega.vector(study.m, t)?)?;
            let p =
                problem_from_solution(op.clone(), u.clone(), delta, study.seed.wrapping_add(t))?;
            ed += (schedule.solve_horizon(&op, k, &p.y_noisy, &u0)? - &u).norm();
            ec += (path.solve_horizon(&op, k, &p.y_noisy, &u0)? - &u).norm();
        }
        let n = study.trials as f64;
        points.push(RatePoint {
            method: Method::DpDiscrete,
            delta,
            parameter: k,
            error: ed / n,
        });
        points.push(RatePoint {
            method: Method::DpContinuous,
            delta,
            parameter: k,
            error: ec / n,
        });
    }

    let mut exponents = Vec::new();
    for method in [Method::DpDiscrete, Method::DpContinuous] {
        let (xs, ys): (Vec<f64>, Vec<f64>) = points
            .iter()
            .filter(|p| p.method == method)
            .map(|p| (p.delta.ln(), p.error.ln()))
            .unzip();
        exponents.push((method, fit_line_unchecked(&xs, &ys)?.0));
    }
    Ok(RateResult { points, exponents })
}

/// Mean exact-data error trace of `method` over `draws` white-noise source elements
/// `(F*F)^mu omega_t` with `F` the unit-norm benchmark operator.
pub fn mean_source_trace(
    kernel: Kernel,
    m: usize,
    mu: f64,
    method: Method,
    max_iters: usize,
    draws: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if draws == 0 {
        return Err(BenchError::Config(
            "need at least one source element".into(),
        ));
    }
    let raw = build_operator(kernel, m)?;
    let op = raw.scaled(1.0 / raw.norm()?)?;
    let options = RunOptions {
        max_iters,
        dt_policy: DtPolicy::default(),
        relaxation: None,
    };
    let mut mean = vec![0.0; max_iters + 1];
    for t in 0..draws as u64 {
        let u = make_source_element(&op, mu, &SourceOmega::WhiteNoise(seed).vector(m, t)?)?;
        let p = problem_from_solution(op.clone(), u, 0.0, 0)?;
        let trace = run_method(&p, method, &options, "")?;
        if trace.len() < mean.len() {
            mean.truncate(trace.len());
        }
        for (a, e) in mean.iter_mut().zip(&trace.errors) {
            *a += e / draws as f64;
        }
    }
    Ok(mean)
}

/// Rows `lambda, f(T, lambda), g_N(lambda), 1 - lambda f, 1 - lambda g` on `{0}` and a log grid up to `lambda_max`.
pub fn filter_table(
    steps: usize,
    horizon: f64,
    lambda_max: f64,
    points: usize,
) -> Result<Vec<[f64; 5]>> {
    if steps == 0 || !(horizon > 0.0) || !(lambda_max > 0.0) || points < 2 {
        return Err(BenchError::Config(
            "filter table needs N >= 1, T > 0, lambda_max > 0 and at least 2 points".into(),
        ));
    }
    let row = |l: f64| {
        [
            l,
            continuous_filter(horizon, l),
            discrete_filter(steps, l, Representation::Recursion),
            continuous_residual(horizon, l),
            discrete_residual(steps, l),
        ]
    };
    let mut rows = vec![row(0.0)];
    rows.extend(
        log_grid(lambda_max * 1e-8, lambda_max, points)
            .into_iter()
            .map(row),
    );
    Ok(rows)
}
