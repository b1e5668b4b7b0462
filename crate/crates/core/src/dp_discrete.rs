//! Discrete dynamic-programming regularizer.
//!
//! Minimizes
//!
//! ```text
//! J = 1/2 <e_N, S e_N> + 1/2 sum_{k<N} |e_k|^2 + |v_k|^2,
//! e_k = F u_k - y,  u_{k+1} = u_k + v_k,
//! ```
//!
//! over controls `v_0..v_{N-1}`. The Bellman principle gives the backward
//! recursion (with `S_N = S`)
//!
//! ```text
//! K_k = (F* S_{k+1} F + I)^{-1} F* S_{k+1}
//! S_k = (I - F K_k)* S_{k+1} (I - F K_k) + K_k* K_k + I
//! ```
//!
//! and the optimal feedback `v_k = -K_k e_k`. The backward pass depends only
//! on `F` and `S`, so one [`DpSchedule`] serves any number of right-hand sides.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::benchprob::InverseProblem;
use crate::linop::{asymmetry, check_len, symmetrize, Cholesky, SYMMETRY_TOL};
use crate::{DenseOperator, Error, Result};

/// Gains `K_0..K_{N-1}` and value-function weights `S_0..S_N`.
#[derive(Debug, Clone)]
pub struct DpSchedule {
    gains: Vec<DMatrix<f64>>,
    costs: Vec<DMatrix<f64>>,
}

impl DpSchedule {
    /// Number of steps `N`.
    pub fn steps(&self) -> usize {
        self.gains.len()
    }

    pub fn gains(&self) -> &[DMatrix<f64>] {
        &self.gains
    }

    pub fn costs(&self) -> &[DMatrix<f64>] {
        &self.costs
    }

    pub fn endpoint_weight(&self) -> &DMatrix<f64> {
        &self.costs[self.steps()]
    }

    /// Runs the forward sweep of the `horizon`-step problem with the same endpoint weight.
    ///
    /// The recursion for `S_k` only depends on the number of remaining steps, so
    /// the last `horizon` gains of an `N`-step schedule are exactly the gains of
    /// the `horizon`-step schedule.
    pub fn run_horizon(
        &self,
        op: &DenseOperator,
        horizon: usize,
        y: &DVector<f64>,
        u0: &DVector<f64>,
    ) -> Result<DpRun> {
        let start = self.horizon_start(horizon)?;
        sweep(op, &self.gains[start..], &self.costs[start], y, u0)
    }

    /// Final iterate `u_horizon` of [`DpSchedule::run_horizon`], without storing the path.
    pub fn solve_horizon(
        &self,
        op: &DenseOperator,
        horizon: usize,
        y: &DVector<f64>,
        u0: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        let start = self.horizon_start(horizon)?;
        self.check_dims(op, y, u0)?;
        let f = op.matrix();
        let mut eps = f * u0 - y;
        let mut u = u0.clone();
        for gain in &self.gains[start..] {
            let v = -(gain * &eps);
            eps += f * &v;
            u += v;
        }
        Ok(u)
    }

    fn horizon_start(&self, horizon: usize) -> Result<usize> {
        if horizon == 0 || horizon > self.steps() {
            return Err(Error::InvalidParameter("horizon must lie in 1..=steps"));
        }
        Ok(self.steps() - horizon)
    }

    fn check_dims(&self, op: &DenseOperator, y: &DVector<f64>, u0: &DVector<f64>) -> Result<()> {
        let s = &self.costs[0];
        check_len(s.nrows(), op.rows())?;
        check_len(self.gains[0].nrows(), op.cols())?;
        check_len(op.rows(), y.len())?;
        check_len(op.cols(), u0.len())
    }
}

/// States, residuals and controls of one forward sweep.
#[derive(Debug, Clone)]
pub struct DpRun {
    /// `u_0..u_N`.
    pub iterates: Vec<DVector<f64>>,
    /// `e_0..e_N` with `e_k = F u_k - y`.
    pub residuals: Vec<DVector<f64>>,
    /// `v_0..v_{N-1}`.
    pub controls: Vec<DVector<f64>>,
    /// `1/2 <e_0, S_0 e_0>`.
    pub optimal_cost: f64,
}

impl DpRun {
    pub fn last(&self) -> &DVector<f64> {
        self.iterates.last().expect("a run holds at least u_0")
    }
}

/// Backward Bellman recursion for `steps` steps with endpoint weight `S`.
pub fn backward_pass(
    op: &DenseOperator,
    steps: usize,
    endpoint_weight: &DMatrix<f64>,
) -> Result<DpSchedule> {
    if steps == 0 {
        return Err(Error::InvalidParameter(
            "number of steps must be at least 1",
        ));
    }
    let (rows, cols) = (op.rows(), op.cols());
    check_len(rows, endpoint_weight.nrows())?;
    check_len(rows, endpoint_weight.ncols())?;
    let dev = asymmetry(endpoint_weight);
    if dev > SYMMETRY_TOL * endpoint_weight.amax().max(1.0) {
        return Err(Error::NotSymmetric { max_deviation: dev });
    }

    let f = op.matrix();
    let id_cols = DMatrix::<f64>::identity(cols, cols);
    let id_rows = DMatrix::<f64>::identity(rows, rows);

    let mut gains = Vec::with_capacity(steps);
    let mut costs = Vec::with_capacity(steps + 1);
    let mut s_next = endpoint_weight.clone();
    symmetrize(&mut s_next);
    costs.push(s_next.clone());

    for k in (0..steps).rev() {
        let ft_s = f.tr_mul(&s_next);
        let mut normal = &ft_s * f + &id_cols;
        symmetrize(&mut normal);
        let chol = Cholesky::factor(&normal).map_err(|e| match e {
            Error::NotPositiveDefinite { pivot } => Error::BackwardStep { step: k, pivot },
            other => other,
        })?;
        let gain = chol.solve_matrix(&ft_s)?;
        let closed_loop = &id_rows - f * &gain;
        let mut s = closed_loop.tr_mul(&(&s_next * &closed_loop)) + gain.tr_mul(&gain) + &id_rows;
        symmetrize(&mut s);
        gains.push(gain);
        costs.push(s.clone());
        s_next = s;
    }
    gains.reverse();
    costs.reverse();
    Ok(DpSchedule { gains, costs })
}

fn sweep(
    op: &DenseOperator,
    gains: &[DMatrix<f64>],
    s0: &DMatrix<f64>,
    y: &DVector<f64>,
    u0: &DVector<f64>,
) -> Result<DpRun> {
    check_len(op.rows(), y.len())?;
    check_len(op.cols(), u0.len())?;
    check_len(op.rows(), s0.nrows())?;
    if let Some(g) = gains.first() {
        check_len(op.cols(), g.nrows())?;
        check_len(op.rows(), g.ncols())?;
    }
    let f = op.matrix();
    let mut eps = f * u0 - y;
    let optimal_cost = 0.5 * eps.dot(&(s0 * &eps));

    let mut iterates = Vec::with_capacity(gains.len() + 1);
    let mut residuals = Vec::with_capacity(gains.len() + 1);
    let mut controls = Vec::with_capacity(gains.len());
    let mut u = u0.clone();
    iterates.push(u.clone());
    residuals.push(eps.clone());
    for gain in gains {
        let v = -(gain * &eps);
        eps += f * &v;
        u += &v;
        controls.push(v);
        iterates.push(u.clone());
        residuals.push(eps.clone());
    }
    Ok(DpRun {
        iterates,
        residuals,
        controls,
        optimal_cost,
    })
}

/// Forward sweep `e_0 = F u_0 - y`, `v_k = -K_k e_k`, `u_{k+1} = u_k + v_k`.
pub fn forward_pass(
    op: &DenseOperator,
    schedule: &DpSchedule,
    y: &DVector<f64>,
    u0: &DVector<f64>,
) -> Result<DpRun> {
    sweep(op, &schedule.gains, &schedule.costs[0], y, u0)
}

/// `N` steps with `S = I` and `u_0 = 0` against the noisy data.
pub fn run_dp_discrete(problem: &InverseProblem, steps: usize) -> Result<DpRun> {
    let op = &problem.operator;
    let schedule = backward_pass(op, steps, &DMatrix::identity(op.rows(), op.rows()))?;
    forward_pass(op, &schedule, &problem.y_noisy, &DVector::zeros(op.cols()))
}

/// `1/2 <e_N, S e_N> + 1/2 sum_{k<N} |e_k|^2 + |u_{k+1} - u_k|^2` for a trajectory `u_0..u_N`.
pub fn objective(
    op: &DenseOperator,
    y: &DVector<f64>,
    iterates: &[DVector<f64>],
    endpoint_weight: &DMatrix<f64>,
) -> Result<f64> {
    let Some((last, _)) = iterates.split_last() else {
        return Err(Error::InvalidParameter("trajectory must contain u_0"));
    };
    let mut total = 0.0;
    for pair in iterates.windows(2) {
        let eps = op.apply(&pair[0])? - y;
        total += eps.norm_squared() + (&pair[1] - &pair[0]).norm_squared();
    }
    let eps_n = op.apply(last)? - y;
    total += eps_n.dot(&(endpoint_weight * &eps_n));
    Ok(0.5 * total)
}
