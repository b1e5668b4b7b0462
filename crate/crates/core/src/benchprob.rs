//! First-kind Fredholm benchmark problems `int_0^1 k(x, y) u(y) dy = f(x)`.
//!
//! The unknown is represented by its nodal values on `x_i = i/m`,
//! `i = 0..=m`, and the integral by the composite trapezoidal rule, giving an
//! `(m+1) x (m+1)` system with entries `w_j k(x_i, x_j)`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::{DenseOperator, Error, Result};

/// Convolution kernels of the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    /// `(1 - (x-y)^2 / 0.1)^6` on `(x-y)^2 <= 0.1`, zero elsewhere. Six times
    /// continuously differentiable; mildly ill-posed.
    BumpC6,
    /// `exp(-20 (x-y)^2) / (2 sqrt(20))`. Analytic; exponentially ill-posed.
    Gaussian,
}

const BUMP_WIDTH: f64 = 0.1;
const GAUSS_SCALE: f64 = 20.0;

impl Kernel {
    pub fn eval(self, x: f64, y: f64) -> f64 {
        let d2 = (x - y) * (x - y);
        match self {
            Kernel::BumpC6 => {
                if d2 > BUMP_WIDTH {
                    0.0
                } else {
                    (1.0 - d2 / BUMP_WIDTH).powi(6)
                }
            }
            Kernel::Gaussian => (-GAUSS_SCALE * d2).exp() / (2.0 * GAUSS_SCALE.sqrt()),
        }
    }
}

/// Exact solutions of the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExactSolution {
    /// `x (1 - x) + cos(20 x)`.
    U1,
    /// Indicator of `[0.3, 0.5]`.
    U2,
}

impl ExactSolution {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            ExactSolution::U1 => x * (1.0 - x) + (20.0 * x).cos(),
            ExactSolution::U2 => {
                if (0.3..=0.5).contains(&x) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

fn check_grid(m: usize) -> Result<()> {
    if m < 2 {
        Err(Error::InvalidParameter("grid size m must be at least 2"))
    } else {
        Ok(())
    }
}

/// Nodes `x_i = i/m`, `i = 0..=m`.
pub fn grid(m: usize) -> Vec<f64> {
    (0..=m).map(|i| i as f64 / m as f64).collect()
}

/// Composite trapezoidal weights on the uniform grid: `1/(2m)` at the ends, `1/m` inside.
pub fn trapezoid_weights(m: usize) -> Vec<f64> {
    let h = 1.0 / m as f64;
    (0..=m)
        .map(|j| if j == 0 || j == m { 0.5 * h } else { h })
        .collect()
}

/// Discretizes an arbitrary kernel on the `(m+1)`-point grid.
pub fn build_operator_with<K: Fn(f64, f64) -> f64>(kernel: K, m: usize) -> Result<DenseOperator> {
    check_grid(m)?;
    let x = grid(m);
    let w = trapezoid_weights(m);
    DenseOperator::new(DMatrix::from_fn(m + 1, m + 1, |i, j| {
        w[j] * kernel(x[i], x[j])
    }))
}

pub fn build_operator(kernel: Kernel, m: usize) -> Result<DenseOperator> {
    build_operator_with(|x, y| kernel.eval(x, y), m)
}

/// Nodal values of an exact solution.
pub fn exact_solution(which: ExactSolution, m: usize) -> Result<DVector<f64>> {
    check_grid(m)?;
    Ok(DVector::from_iterator(
        m + 1,
        grid(m).into_iter().map(|x| which.eval(x)),
    ))
}

/// A discretized inverse problem with clean and perturbed data.
#[derive(Debug, Clone)]
pub struct InverseProblem {
    pub operator: DenseOperator,
    pub y_clean: DVector<f64>,
    pub y_noisy: DVector<f64>,
    pub u_exact: Option<DVector<f64>>,
    /// `|y_noisy - y_clean|`.
    pub delta: f64,
    pub grid: Vec<f64>,
}

impl InverseProblem {
    /// Rescales `F` and both data vectors by `1/|F|`; the exact solution is unchanged.
    pub fn scaled_to_unit_norm(&self) -> Result<InverseProblem> {
        let norm = self.operator.norm()?;
        if norm == 0.0 {
            return Err(Error::InvalidParameter(
                "cannot normalize the zero operator",
            ));
        }
        let c = 1.0 / norm;
        Ok(InverseProblem {
            operator: self.operator.scaled(c)?,
            y_clean: &self.y_clean * c,
            y_noisy: &self.y_noisy * c,
            u_exact: self.u_exact.clone(),
            delta: self.delta * c,
            grid: self.grid.clone(),
        })
    }
}

/// Seeded Gaussian noise rescaled to `|e| = noise_fraction * |y_clean|`.
pub fn noise_vector(
    y_clean: &DVector<f64>,
    noise_fraction: f64,
    seed: u64,
) -> Result<DVector<f64>> {
    if !(0.0..1.0).contains(&noise_fraction) {
        return Err(Error::InvalidParameter("noise fraction must lie in [0, 1)"));
    }
    let n = y_clean.len();
    if noise_fraction == 0.0 {
        return Ok(DVector::zeros(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = DVector::from_iterator(n, (0..n).map(|_| StandardNormal.sample(&mut rng)));
    let norm = e.norm();
    if norm == 0.0 {
        return Ok(e);
    }
    Ok(e * (noise_fraction * y_clean.norm() / norm))
}

/// Builds a problem with `y_clean = F u_exact` and relative noise `noise_fraction`.
pub fn problem_from_solution(
    operator: DenseOperator,
    u_exact: DVector<f64>,
    noise_fraction: f64,
    seed: u64,
) -> Result<InverseProblem> {
    let y_clean = operator.apply(&u_exact)?;
    let e = noise_vector(&y_clean, noise_fraction, seed)?;
    let delta = e.norm();
    let y_noisy = &y_clean + &e;
    let m = operator.cols().saturating_sub(1).max(1);
    Ok(InverseProblem {
        grid: grid(m),
        operator,
        y_clean,
        y_noisy,
        u_exact: Some(u_exact),
        delta,
    })
}

pub fn make_problem(
    kernel: Kernel,
    which: ExactSolution,
    m: usize,
    noise_fraction: f64,
    seed: u64,
) -> Result<InverseProblem> {
    let operator = build_operator(kernel, m)?;
    let u = exact_solution(which, m)?;
    problem_from_solution(operator, u, noise_fraction, seed)
}

/// `(F*F)^mu omega`, a solution satisfying a source condition of order `mu`.
pub fn make_source_element(
    op: &DenseOperator,
    mu: f64,
    omega: &DVector<f64>,
) -> Result<DVector<f64>> {
    if !(mu > 0.0) {
        return Err(Error::InvalidParameter(
            "source exponent mu must be positive",
        ));
    }
    op.spectral_map(&|l: f64| if l == 0.0 { 0.0 } else { l.powf(mu) }, omega)
}
