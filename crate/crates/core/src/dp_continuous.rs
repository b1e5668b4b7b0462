//! Continuous dynamic-programming regularizer (Riccati flow).
//!
//! The value function of the residual control problem is `1/2 <e, Q(t) e>`
//! with `Q' = -I + Q F F* Q` and `Q(T) = 0`; the optimal trajectory solves
//! `u' = -F* Q(t) (F u - y)`, `u(0) = u_0`, and `u(T)` is the reconstruction.
//!
//! Both equations are integrated with explicit Euler steps. The Riccati
//! equation is stored through `B_n = F* Q_n`, which evolves as
//! `B_n = B_{n+1} + dt F* (I - B_{n+1}* B_{n+1})`, `B_steps = 0`, and avoids
//! the `rows x rows` matrix `Q_n` entirely. The scheme is stable for
//! `dt |F*F| <= 1`.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use crate::filters::{sech, ContinuousFilter};
use crate::linop::check_len;
use crate::{DenseOperator, Error, Result};

/// `q(t, lambda) = tanh(sqrt(lambda) (T - t)) / sqrt(lambda)`, the spectral
/// profile of `Q(t)`; equals `T - t` at `lambda = 0`.
pub fn q_profile(lambda: f64, t: f64, horizon: f64) -> f64 {
    let remaining = horizon - t;
    if lambda == 0.0 {
        return remaining;
    }
    let r = lambda.sqrt();
    (r * remaining).tanh() / r
}

/// Gains `B_0..B_steps` of the explicit Riccati scheme.
#[derive(Debug, Clone)]
pub struct RiccatiPath {
    dt: f64,
    gains: Vec<DMatrix<f64>>,
}

impl RiccatiPath {
    pub fn steps(&self) -> usize {
        self.gains.len() - 1
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Final time `T = steps * dt`.
    pub fn horizon(&self) -> f64 {
        self.dt * self.steps() as f64
    }

    /// `B_n = F* Q_n` for `n = 0..=steps`.
    pub fn gains(&self) -> &[DMatrix<f64>] {
        &self.gains
    }

    /// The flow with final time `horizon_steps * dt`.
    ///
    /// The Riccati equation is autonomous with a fixed final condition, so the
    /// last `horizon_steps` gains of a longer path are the gains of the shorter one.
    pub fn run_horizon(
        &self,
        op: &DenseOperator,
        horizon_steps: usize,
        y: &DVector<f64>,
        u0: &DVector<f64>,
    ) -> Result<ContinuousRun> {
        let start = self.horizon_start(horizon_steps)?;
        euler(op, &self.gains[start..self.steps()], self.dt, y, u0, true)
    }

    /// Final state of [`RiccatiPath::run_horizon`] without storing the trajectory.
    pub fn solve_horizon(
        &self,
        op: &DenseOperator,
        horizon_steps: usize,
        y: &DVector<f64>,
        u0: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        let start = self.horizon_start(horizon_steps)?;
        let run = euler(op, &self.gains[start..self.steps()], self.dt, y, u0, false)?;
        Ok(run.into_final())
    }

    fn horizon_start(&self, horizon_steps: usize) -> Result<usize> {
        if horizon_steps == 0 || horizon_steps > self.steps() {
            return Err(Error::InvalidParameter("horizon must lie in 1..=steps"));
        }
        Ok(self.steps() - horizon_steps)
    }
}

/// Euler trajectory `u_0..u_steps` of the Riccati flow.
#[derive(Debug, Clone)]
pub struct ContinuousRun {
    pub trajectory: Vec<DVector<f64>>,
}

impl ContinuousRun {
    /// Approximation of `u(T)`.
    pub fn final_state(&self) -> &DVector<f64> {
        self.trajectory.last().expect("trajectory holds u_0")
    }

    fn into_final(mut self) -> DVector<f64> {
        self.trajectory.pop().expect("trajectory holds u_0")
    }
}

/// `ceil(2 T sigma_max^2)`, i.e. `dt |F*F| <= 1/2`; at least one step.
pub fn default_steps(op: &DenseOperator, horizon: f64) -> Result<usize> {
    let s = op.norm()?;
    Ok(((2.0 * horizon * s * s).ceil() as usize).max(1))
}

/// Explicit backward Riccati recursion on `[0, horizon]` with `steps` steps.
pub fn riccati_backward(op: &DenseOperator, horizon: f64, steps: usize) -> Result<RiccatiPath> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidParameter("final time must be positive"));
    }
    if steps == 0 {
        return Err(Error::InvalidParameter(
            "number of time steps must be at least 1",
        ));
    }
    checked_integrate(op, horizon / steps as f64, steps)
}

/// Same as [`riccati_backward`] with a prescribed step size.
pub fn riccati_backward_with_step(
    op: &DenseOperator,
    dt: f64,
    steps: usize,
) -> Result<RiccatiPath> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter("time step must be positive"));
    }
    if steps == 0 {
        return Err(Error::InvalidParameter(
            "number of time steps must be at least 1",
        ));
    }
    checked_integrate(op, dt, steps)
}

// explicit Euler is stable for dt |F|^2 <= 1
fn checked_integrate(op: &DenseOperator, dt: f64, steps: usize) -> Result<RiccatiPath> {
    let s = op.norm()?;
    if dt * s * s > 1.0 + 1e-12 {
        let horizon = dt * steps as f64;
        return Err(Error::Unstable {
            steps,
            required_steps: ((horizon * s * s).ceil() as usize).max(1),
        });
    }
    Ok(integrate(op, dt, steps))
}

fn integrate(op: &DenseOperator, dt: f64, steps: usize) -> RiccatiPath {
    let f = op.matrix();
    let ft = f.transpose();
    let mut gains = Vec::with_capacity(steps + 1);
    let mut b = DMatrix::<f64>::zeros(op.cols(), op.rows());
    gains.push(b.clone());
    for _ in 0..steps {
        // F* (I - B* B) = F* - (B F)* B
        let bf = &b * f;
        let update = &ft - bf.tr_mul(&b);
        b += update * dt;
        gains.push(b.clone());
    }
    gains.reverse();
    RiccatiPath { dt, gains }
}

fn euler(
    op: &DenseOperator,
    gains: &[DMatrix<f64>],
    dt: f64,
    y: &DVector<f64>,
    u0: &DVector<f64>,
    keep: bool,
) -> Result<ContinuousRun> {
    check_len(op.rows(), y.len())?;
    check_len(op.cols(), u0.len())?;
    let f = op.matrix();
    let mut u = u0.clone();
    let mut trajectory = Vec::with_capacity(if keep { gains.len() + 1 } else { 1 });
    if keep {
        trajectory.push(u.clone());
    }
    for b in gains {
        let residual = f * &u - y;
        u -= (b * residual) * dt;
        if keep {
            trajectory.push(u.clone());
        }
    }
    if !keep {
        trajectory.push(u);
    }
    Ok(ContinuousRun { trajectory })
}

/// Explicit Euler sweep `u_{n+1} = u_n - dt B_n (F u_n - y)`.
pub fn flow_forward(
    op: &DenseOperator,
    path: &RiccatiPath,
    y: &DVector<f64>,
    u0: &DVector<f64>,
) -> Result<ContinuousRun> {
    if path.gains[0].nrows() != op.cols() || path.gains[0].ncols() != op.rows() {
        return Err(Error::DimensionMismatch {
            expected: op.cols(),
            found: path.gains[0].nrows(),
        });
    }
    euler(op, &path.gains[..path.steps()], path.dt, y, u0, true)
}

/// Exact `u(T) = f(T, F*F) F* y + sech(sqrt(F*F) T) u_0`.
pub fn closed_form_solution(
    op: &DenseOperator,
    horizon: f64,
    y: &DVector<f64>,
    u0: &DVector<f64>,
) -> Result<DVector<f64>> {
    let data_part = op.spectral_apply(&ContinuousFilter { horizon }, y)?;
    let start_part = op.spectral_map(&|l: f64| sech(l.sqrt() * horizon), u0)?;
    Ok(data_part + start_part)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn scalar(v: f64) -> DenseOperator {
        DenseOperator::from_row_major(1, 1, &[v]).unwrap()
    }

    #[test]
    fn single_step_gain_is_scaled_adjoint() {
        let op = DenseOperator::from_row_major(2, 2, &[0.5, 0.1, -0.2, 0.3]).unwrap();
        let path = riccati_backward(&op, 0.8, 1).unwrap();
        assert!((&path.gains()[0] - op.matrix().transpose() * 0.8).amax() < 1e-15);
        assert_eq!(path.gains()[1].amax(), 0.0);
    }

    #[test]
    fn zero_operator_has_zero_gains() {
        let op = DenseOperator::zeros(2, 3).unwrap();
        let path = riccati_backward(&op, 5.0, 10).unwrap();
        assert!(path.gains().iter().all(|b| b.amax() == 0.0));
    }

    #[test]
    fn scalar_gain_approaches_tanh() {
        let path = riccati_backward(&scalar(1.0), 1.0, 20_000).unwrap();
        let b0 = path.gains()[0][(0, 0)];
        assert!((b0 - 1.0f64.tanh()).abs() < 1e-4);
        assert!((1.0f64.tanh() - 0.7616).abs() < 1e-4);
    }

    #[test]
    fn unstable_step_is_rejected() {
        let op = scalar(2.0);
        assert_eq!(
            riccati_backward(&op, 1.0, 2).unwrap_err(),
            Error::Unstable {
                steps: 2,
                required_steps: 4
            }
        );
        assert!(riccati_backward(&op, 1.0, 4).is_ok());
        assert_eq!(default_steps(&op, 1.0).unwrap(), 8);
    }

    #[test]
    fn zero_residual_fixed_point() {
        let op = DenseOperator::from_row_major(2, 2, &[0.5, 0.1, -0.2, 0.3]).unwrap();
        let u0 = DVector::from_vec(vec![1.0, -2.0]);
        let y = op.apply(&u0).unwrap();
        let path = riccati_backward(&op, 3.0, 20).unwrap();
        let run = flow_forward(&op, &path, &y, &u0).unwrap();
        assert!(run.trajectory.iter().all(|u| (u - &u0).amax() < 1e-15));
    }

    #[test]
    fn scalar_flow_approaches_closed_form() {
        let op = scalar(1.0);
        let y = DVector::from_vec(vec![1.0]);
        let path = riccati_backward(&op, 1.0, 20_000).unwrap();
        let run = flow_forward(&op, &path, &y, &DVector::zeros(1)).unwrap();
        let exact = 1.0 - 1.0 / 1.0f64.cosh();
        assert!((run.final_state()[0] - exact).abs() < 1e-4);
    }

    #[test]
    fn closed_form_cases() {
        let op = scalar(1.0);
        let y = DVector::from_vec(vec![1.0]);
        let u = closed_form_solution(&op, 2.0, &y, &DVector::zeros(1)).unwrap();
        assert!((u[0] - (1.0 - 1.0 / 2.0f64.cosh())).abs() < 1e-15);
        assert!((u[0] - 0.7342).abs() < 1e-4);

        // vanishing final time keeps the start
        let op = DenseOperator::from_row_major(2, 2, &[1.0, 0.5, 0.0, 2.0]).unwrap();
        let u0 = DVector::from_vec(vec![0.4, -1.0]);
        let y = DVector::from_vec(vec![3.0, 1.0]);
        let u = closed_form_solution(&op, 1e-9, &y, &u0).unwrap();
        assert!((u - &u0).amax() < 1e-8);

        // long final time inverts
        let x = DVector::from_vec(vec![2.0, -1.0]);
        let y = op.apply(&x).unwrap();
        let u = closed_form_solution(&op, 80.0, &y, &DVector::zeros(2)).unwrap();
        assert!((u - x).amax() < 1e-10);
    }

    #[test]
    fn q_profile_values() {
        for &l in &[0.0, 0.3, 4.0, 100.0] {
            assert_eq!(q_profile(l, 2.5, 2.5), 0.0);
        }
        assert_eq!(q_profile(0.0, 0.5, 3.0), 2.5);
        assert!((q_profile(1.0, 0.0, 1.0) - 1.0f64.tanh()).abs() < 1e-15);
    }

    #[test]
    fn horizon_tail_matches_fresh_path() {
        let op = DenseOperator::from_row_major(2, 2, &[0.5, 0.1, -0.2, 0.3]).unwrap();
        let y = DVector::from_vec(vec![1.0, 2.0]);
        let u0 = DVector::zeros(2);
        let long = riccati_backward_with_step(&op, 0.25, 40).unwrap();
        for n in [1, 7, 40] {
            let fresh = riccati_backward_with_step(&op, 0.25, n).unwrap();
            let a = flow_forward(&op, &fresh, &y, &u0).unwrap();
            let b = long.solve_horizon(&op, n, &y, &u0).unwrap();
            let c = long.run_horizon(&op, n, &y, &u0).unwrap();
            assert!((a.final_state() - &b).amax() < 1e-14);
            assert!((c.final_state() - &b).amax() < 1e-14);
        }
    }
}
