mod common;

use common::*;
use dpreg::baselines::{cg_normal, landweber, BaselineConfig, CgStepper, LandweberStepper};
use dpreg::benchprob::{problem_from_solution, InverseProblem};
use dpreg::DVector;

fn data_problem(op: dpreg::DenseOperator, y: DVector<f64>) -> InverseProblem {
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
fn landweber_matches_its_filter() {
    let mut rng = rng(31);
    for _ in 0..10 {
        let (r, c) = random_dims(&mut rng, 10);
        let op = gaussian_operator(&mut rng, r, c);
        let y = gaussian_vector(&mut rng, r);
        let omega = 0.9 / op.norm().unwrap().powi(2);
        let p = data_problem(op.clone(), y.clone());
        let cfg = BaselineConfig {
            relaxation: Some(omega),
            ..BaselineConfig::landweber(30)
        };
        let seq = landweber(&p, &cfg).unwrap();
        for k in [1, 5, 30] {
            let filter = |l: f64| {
                if l == 0.0 {
                    omega * k as f64
                } else {
                    -f64::exp_m1(k as f64 * f64::ln_1p(-omega * l)) / l
                }
            };
            let oracle = op.spectral_apply(&filter, &y).unwrap();
            assert!((&seq.iterates[k] - &oracle).norm() <= 1e-10 * oracle.norm().max(1.0));
        }
    }
}

#[test]
fn landweber_residual_is_nonincreasing() {
    let mut rng = rng(32);
    let op = gaussian_operator(&mut rng, 8, 6);
    let y = gaussian_vector(&mut rng, 8);
    let omega = 1.0 / op.norm().unwrap().powi(2);
    let mut stepper = LandweberStepper::new(&op, &y, omega).unwrap();
    let mut previous = stepper.residual_norm();
    for _ in 0..200 {
        stepper.step().unwrap();
        assert!(stepper.residual_norm() <= previous * (1.0 + 1e-14));
        previous = stepper.residual_norm();
    }
}

#[test]
fn cg_normal_residual_is_nonincreasing() {
    let mut rng = rng(33);
    for _ in 0..10 {
        let op = gaussian_operator(&mut rng, 9, 7);
        let y = gaussian_vector(&mut rng, 9);
        let mut stepper = CgStepper::new(&op, &y).unwrap();
        let mut previous = stepper.residual_norm();
        for _ in 0..7 {
            if stepper.step().is_some() {
                break;
            }
            assert!(stepper.residual_norm() <= previous + 1e-10);
            previous = stepper.residual_norm();
        }
    }
}

#[test]
fn baselines_converge_on_well_conditioned_problems() {
    let mut rng = rng(34);
    for _ in 0..5 {
        let n = 6;
        // I + small perturbation keeps the condition number near one
        let pert = gaussian_operator(&mut rng, n, n);
        let m = dpreg::DMatrix::identity(n, n) + pert.matrix() * 0.05;
        let op = dpreg::DenseOperator::new(m).unwrap();
        let u = gaussian_vector(&mut rng, n);
        let p = problem_from_solution(op, u.clone(), 0.0, 0).unwrap();
        let cg = cg_normal(&p, &BaselineConfig::cg(n)).unwrap();
        assert!((cg.iterates.last().unwrap() - &u).norm() <= 1e-6);
        let lw = landweber(&p, &BaselineConfig::landweber(60)).unwrap();
        assert!((lw.iterates.last().unwrap() - &u).norm() <= 1e-6);
    }
}
