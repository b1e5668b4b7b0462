//! Landweber iteration and conjugate gradients on the normal equations.
//!
//! Both start from `u_0 = 0` and keep every iterate. The steppers expose one
//! iteration at a time for callers that only need summaries of long runs.

use alloc::vec::Vec;

use nalgebra::DVector;
#[allow(unused_imports)]
use num_traits::Float;

use crate::benchprob::InverseProblem;
use crate::linop::check_len;
use crate::{DenseOperator, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineMethod {
    Landweber,
    Cg,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConfig {
    pub method: BaselineMethod,
    pub max_iters: usize,
    /// Landweber step `omega`; `None` selects `1 / sigma_max^2`.
    pub relaxation: Option<f64>,
}

impl BaselineConfig {
    pub fn landweber(max_iters: usize) -> Self {
        BaselineConfig {
            method: BaselineMethod::Landweber,
            max_iters,
            relaxation: None,
        }
    }

    pub fn cg(max_iters: usize) -> Self {
        BaselineConfig {
            method: BaselineMethod::Cg,
            max_iters,
            relaxation: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    MaxIters,
    /// The normal-equation residual vanished exactly.
    Converged,
    /// CG search direction had curvature `|F p|^2 <= 1e-14 |F|^2 |p|^2`.
    Breakdown,
}

/// `u_0, u_1, ...` of a baseline run.
#[derive(Debug, Clone)]
pub struct IterateSequence {
    pub iterates: Vec<DVector<f64>>,
    pub stop: StopReason,
}

/// `1 / sigma_max^2`.
pub fn default_relaxation(op: &DenseOperator) -> Result<f64> {
    let s = op.norm()?;
    if s == 0.0 {
        return Err(Error::InvalidParameter(
            "Landweber needs a nonzero operator",
        ));
    }
    Ok(1.0 / (s * s))
}

/// `u_{k+1} = u_k + omega F* (y - F u_k)`.
#[derive(Debug)]
pub struct LandweberStepper<'a> {
    op: &'a DenseOperator,
    y: &'a DVector<f64>,
    relaxation: f64,
    u: DVector<f64>,
    residual: DVector<f64>,
    initial_norm: f64,
    iteration: usize,
}

impl<'a> LandweberStepper<'a> {
    pub fn new(op: &'a DenseOperator, y: &'a DVector<f64>, relaxation: f64) -> Result<Self> {
        check_len(op.rows(), y.len())?;
        let s = op.norm()?;
        if !(relaxation > 0.0) || relaxation * s * s >= 2.0 {
            return Err(Error::InvalidParameter(
                "Landweber relaxation must satisfy 0 < omega |F|^2 < 2",
            ));
        }
        Ok(LandweberStepper {
            op,
            y,
            relaxation,
            u: DVector::zeros(op.cols()),
            residual: y.clone(),
            initial_norm: y.norm(),
            iteration: 0,
        })
    }

    pub fn iterate(&self) -> &DVector<f64> {
        &self.u
    }

    /// `|y - F u_k|`.
    pub fn residual_norm(&self) -> f64 {
        self.residual.norm()
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn step(&mut self) -> Result<()> {
        let f = self.op.matrix();
        self.u.axpy(self.relaxation, &f.tr_mul(&self.residual), 1.0);
        self.residual = self.y - f * &self.u;
        self.iteration += 1;
        if self.residual.norm() > 10.0 * self.initial_norm {
            return Err(Error::Diverged {
                iteration: self.iteration,
            });
        }
        Ok(())
    }
}

/// CGLS: conjugate gradients for `F*F u = F* y` with residuals kept in both spaces.
#[derive(Debug)]
pub struct CgStepper<'a> {
    op: &'a DenseOperator,
    u: DVector<f64>,
    residual: DVector<f64>,
    direction: DVector<f64>,
    gamma: f64,
    curvature_floor: f64,
    iteration: usize,
}

impl<'a> CgStepper<'a> {
    pub fn new(op: &'a DenseOperator, y: &'a DVector<f64>) -> Result<Self> {
        check_len(op.rows(), y.len())?;
        let s = op.norm()?;
        let grad = op.matrix().tr_mul(y);
        Ok(CgStepper {
            op,
            u: DVector::zeros(op.cols()),
            residual: y.clone(),
            gamma: grad.norm_squared(),
            direction: grad,
            curvature_floor: 1e-14 * s * s,
            iteration: 0,
        })
    }

    pub fn iterate(&self) -> &DVector<f64> {
        &self.u
    }

    /// `|y - F u_k|`.
    pub fn residual_norm(&self) -> f64 {
        self.residual.norm()
    }

    /// `|F* (y - F u_k)|`.
    pub fn normal_residual_norm(&self) -> f64 {
        self.gamma.sqrt()
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// Advances one iteration, or reports why it cannot.
    pub fn step(&mut self) -> Option<StopReason> {
        if self.gamma == 0.0 {
            return Some(StopReason::Converged);
        }
        let f = self.op.matrix();
        let q = f * &self.direction;
        let curvature = q.norm_squared();
        if !(curvature > self.curvature_floor * self.direction.norm_squared()) {
            return Some(StopReason::Breakdown);
        }
        let alpha = self.gamma / curvature;
        self.u.axpy(alpha, &self.direction, 1.0);
        self.residual.axpy(-alpha, &q, 1.0);
        let s = f.tr_mul(&self.residual);
        let gamma_next = s.norm_squared();
        let beta = gamma_next / self.gamma;
        self.direction = s + &self.direction * beta;
        self.gamma = gamma_next;
        self.iteration += 1;
        None
    }
}

pub fn landweber(problem: &InverseProblem, config: &BaselineConfig) -> Result<IterateSequence> {
    let op = &problem.operator;
    let omega = match config.relaxation {
        Some(w) => w,
        None => default_relaxation(op)?,
    };
    let mut stepper = LandweberStepper::new(op, &problem.y_noisy, omega)?;
    let mut iterates = Vec::with_capacity(config.max_iters + 1);
    iterates.push(stepper.iterate().clone());
    for _ in 0..config.max_iters {
        stepper.step()?;
        iterates.push(stepper.iterate().clone());
    }
    Ok(IterateSequence {
        iterates,
        stop: StopReason::MaxIters,
    })
}

/// CG on the normal equations. Stops early on exact convergence or curvature breakdown.
pub fn cg_normal(problem: &InverseProblem, config: &BaselineConfig) -> Result<IterateSequence> {
    let mut stepper = CgStepper::new(&problem.operator, &problem.y_noisy)?;
    let mut iterates = Vec::with_capacity(config.max_iters + 1);
    iterates.push(stepper.iterate().clone());
    let mut stop = StopReason::MaxIters;
    for _ in 0..config.max_iters {
        if let Some(reason) = stepper.step() {
            stop = reason;
            break;
        }
        iterates.push(stepper.iterate().clone());
    }
    Ok(IterateSequence { iterates, stop })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchprob::problem_from_solution;
    use alloc::vec;
    use nalgebra::DMatrix;

    fn problem(op: DenseOperator, y: DVector<f64>) -> InverseProblem {
        let n = op.cols();
        InverseProblem {
            operator: op,
            y_clean: y.clone(),
            y_noisy: y,
            u_exact: None,
            delta: 0.0,
            grid: (0..n).map(|i| i as f64).collect(),
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let op = DenseOperator::from_row_major(2, 2, &[1.0, 0.3, 0.0, 0.5]).unwrap();
        let p = problem(op, DVector::zeros(2));
        let lw = landweber(&p, &BaselineConfig::landweber(5)).unwrap();
        assert_eq!(lw.iterates.len(), 6);
        assert!(lw.iterates.iter().all(|u| u.amax() == 0.0));
        let cg = cg_normal(&p, &BaselineConfig::cg(5)).unwrap();
        assert!(cg.iterates.iter().all(|u| u.amax() == 0.0));
        assert_eq!(cg.stop, StopReason::Converged);
    }

    #[test]
    fn scalar_landweber_geometric() {
        let op = DenseOperator::from_row_major(1, 1, &[1.0]).unwrap();
        let p = problem(op, DVector::from_vec(vec![1.0]));
        let cfg = BaselineConfig {
            relaxation: Some(0.5),
            ..BaselineConfig::landweber(10)
        };
        let lw = landweber(&p, &cfg).unwrap();
        for (k, u) in lw.iterates.iter().enumerate() {
            assert!((u[0] - (1.0 - 0.5f64.powi(k as i32))).abs() < 1e-15);
        }
    }

    #[test]
    fn relaxation_bound_enforced() {
        let op = DenseOperator::from_row_major(1, 1, &[2.0]).unwrap();
        let p = problem(op, DVector::from_vec(vec![1.0]));
        let cfg = BaselineConfig {
            relaxation: Some(0.5),
            ..BaselineConfig::landweber(3)
        };
        assert!(landweber(&p, &cfg).is_err());
    }

    #[test]
    fn cg_on_orthogonal_operator_converges_in_one_step() {
        let c = 0.6;
        let s = 0.8;
        let op = DenseOperator::from_row_major(2, 2, &[c, -s, s, c]).unwrap();
        let y = DVector::from_vec(vec![1.0, 2.0]);
        let want = op.apply_adjoint(&y).unwrap();
        let p = problem(op, y);
        let cg = cg_normal(&p, &BaselineConfig::cg(2)).unwrap();
        assert!((&cg.iterates[1] - &want).amax() < 1e-14);
        for u in &cg.iterates[1..] {
            assert!((u - &want).amax() < 1e-14);
        }
    }

    #[test]
    fn cg_terminates_after_distinct_eigenvalues() {
        // F*F has three distinct eigenvalues {1, 4, 9}
        let f = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 2.0, 3.0, 1.0, 3.0]));
        let op = DenseOperator::new(f.clone()).unwrap();
        let x = DVector::from_vec(vec![1.0, -1.0, 0.5, 2.0, 0.25, -3.0]);
        let p = problem_from_solution(op, x.clone(), 0.0, 0).unwrap();
        let cg = cg_normal(&p, &BaselineConfig::cg(3)).unwrap();
        let direct = f.clone().lu().solve(&(&f * &x)).unwrap();
        assert!((&cg.iterates[3] - &direct).amax() < 1e-8);
        assert!((&cg.iterates[3] - &x).amax() < 1e-8);
    }
}
