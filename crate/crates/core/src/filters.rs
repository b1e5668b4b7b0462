//! Spectral filter functions of the continuous and discrete regularizers.
//!
//! A regularizer acting as `u = g(F*F) F* y` is fully described by its filter
//! `g` and its residual factor `r(lambda) = 1 - lambda g(lambda)`. For the
//! Riccati flow with final time `T`
//!
//! ```text
//! f(T, lambda) = (1 - 1/cosh(sqrt(lambda) T)) / lambda,
//! ```
//!
//! and for the Bellman recursion with `N` steps
//!
//! ```text
//! g_N(lambda) = (1 - 1/prod_{j=1..N} h_j(lambda)) / lambda,
//! h_N = lambda + 1,  h_k = 2 + lambda - 1/h_{k+1},
//! ```
//!
//! which also equals `(1 - x / T_{2N+1}(x)) / lambda` with `x = sqrt(lambda/4 + 1)`
//! and `T_n` the Chebyshev polynomial of the first kind.
//!
//! All evaluators avoid the `0/0` at `lambda = 0` by returning the analytic
//! limits, and avoid cancellation in `1 - r` for small `lambda` by working with
//! algebraically rearranged differences.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::SpectralFunction;

/// `1/cosh(a)`, finite for every `a`.
pub fn sech(a: f64) -> f64 {
    let a = a.abs();
    let e = (-a).exp();
    2.0 * e / (1.0 + e * e)
}

/// `1 - 1/cosh(a)` without cancellation for small `a`.
fn one_minus_sech(a: f64) -> f64 {
    let a = a.abs();
    if a < 20.0 {
        let s = (0.5 * a).sinh();
        2.0 * s * s / a.cosh()
    } else {
        1.0 - sech(a)
    }
}

/// Filter `f(T, lambda)` of the Riccati flow at final time `horizon`.
pub fn continuous_filter(horizon: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 0.5 * horizon * horizon;
    }
    one_minus_sech(lambda.sqrt() * horizon) / lambda
}

/// Residual factor `1 - lambda f(T, lambda) = 1/cosh(sqrt(lambda) T)`.
pub fn continuous_residual(horizon: f64, lambda: f64) -> f64 {
    sech(lambda.sqrt() * horizon)
}

/// `h_1(lambda), ..., h_N(lambda)` from the backward recursion
/// `h_N = lambda + 1`, `h_k = 2 + lambda - 1/h_{k+1}`.
///
/// Element `k - 1` holds `h_k`; the recursion fills the vector from the back.
pub fn h_sequence(steps: usize, lambda: f64) -> Vec<f64> {
    let mut h = alloc::vec![0.0; steps];
    if steps == 0 {
        return h;
    }
    h[steps - 1] = lambda + 1.0;
    for k in (0..steps - 1).rev() {
        h[k] = 2.0 + lambda - 1.0 / h[k + 1];
    }
    h
}

/// `p_{-1}, p_0, ..., p_{N-1}` from the three-term recursion
/// `p_{i+1} = (2 + lambda) p_i - p_{i-1}`, `p_{-1} = 1`, `p_0 = lambda + 1`.
///
/// Element `i + 1` holds `p_i`. `p_i` is the product `h_{N-i} ... h_N`, so the
/// last element is `prod_{j=1..N} h_j`.
pub fn p_sequence(steps: usize, lambda: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(steps + 1);
    p.push(1.0);
    if steps == 0 {
        return p;
    }
    p.push(lambda + 1.0);
    for i in 1..steps {
        let next = (2.0 + lambda) * p[i] - p[i - 1];
        p.push(next);
    }
    p
}

/// Chebyshev polynomial of the first kind, `T_{n+1} = 2x T_n - T_{n-1}`.
pub fn chebyshev_t(n: usize, x: f64) -> f64 {
    match n {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for _ in 1..n {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `T_n'(x)` by differentiating the three-term recurrence.
pub fn chebyshev_t_derivative(n: usize, x: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let (mut t_prev, mut t_cur) = (1.0, x);
    let (mut d_prev, mut d_cur) = (0.0, 1.0);
    for _ in 1..n {
        let t_next = 2.0 * x * t_cur - t_prev;
        let d_next = 2.0 * t_cur + 2.0 * x * d_cur - d_prev;
        t_prev = t_cur;
        t_cur = t_next;
        d_prev = d_cur;
        d_cur = d_next;
    }
    d_cur
}

/// Evaluation route for the discrete filter `g_N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    /// Product of the `h_k` recursion.
    Recursion,
    /// `x / T_{2N+1}(x)` with `x = sqrt(lambda/4 + 1)`.
    Chebyshev,
    /// `cosh(y) / cosh((2N+1) y)` with `y = arcosh(x)`.
    CoshForm,
    /// Binomial expansion of `T_{2N+1}(x) / x` in powers of `lambda/4`.
    PolyForm,
}

impl Representation {
    pub const ALL: [Representation; 4] = [
        Representation::Recursion,
        Representation::Chebyshev,
        Representation::CoshForm,
        Representation::PolyForm,
    ];
}

/// `g_N(0) = ((2N+1)^2 - 1) / 8 = N (N+1) / 2`.
pub fn discrete_filter_at_zero(steps: usize) -> f64 {
    let n = steps as f64;
    0.5 * n * (n + 1.0)
}

/// Discrete filter `g_N(lambda)` evaluated through `representation`.
pub fn discrete_filter(steps: usize, lambda: f64, representation: Representation) -> f64 {
    if lambda == 0.0 {
        return discrete_filter_at_zero(steps);
    }
    if steps == 0 {
        return 0.0;
    }
    match representation {
        Representation::Recursion => discrete_by_recursion(steps, lambda),
        Representation::Chebyshev => discrete_by_chebyshev(steps, lambda),
        Representation::CoshForm => discrete_by_cosh(steps, lambda),
        Representation::PolyForm => discrete_by_poly(steps, lambda),
    }
}

/// Residual factor `1 - lambda g_N(lambda) = cosh(y) / cosh((2N+1) y)`.
pub fn discrete_residual(steps: usize, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 1.0;
    }
    let y = (0.5 * lambda.sqrt()).asinh();
    cosh_ratio(y, (2 * steps + 1) as f64)
}

/// `cosh(y) / cosh(n y)` for `y >= 0`, `n >= 1`, without overflow.
fn cosh_ratio(y: f64, n: f64) -> f64 {
    let e1 = (-2.0 * y).exp();
    let en = (-2.0 * n * y).exp();
    ((1.0 - n) * y).exp() * (1.0 + e1) / (1.0 + en)
}

fn discrete_by_recursion(steps: usize, lambda: f64) -> f64 {
    // d_k = h_k - 1 satisfies d_N = lambda, d_k = lambda + d_{k+1} / (1 + d_{k+1}),
    // and prod h_j = exp(sum ln(1 + d_j)).
    let mut d = lambda;
    let mut log_prod = d.ln_1p();
    for _ in 1..steps {
        d = lambda + d / (1.0 + d);
        log_prod += d.ln_1p();
    }
    -(-log_prod).exp_m1() / lambda
}

fn discrete_by_chebyshev(steps: usize, lambda: f64) -> f64 {
    let n = 2 * steps + 1;
    let x = (0.25 * lambda + 1.0).sqrt();
    let delta = 0.25 * lambda / (x + 1.0);
    if (n as f64) * (0.5 * lambda.sqrt()).asinh() > 600.0 {
        return discrete_by_cosh(steps, lambda);
    }
    // e_k = T_k(x) - 1, e_0 = 0, e_1 = x - 1, e_{k+1} = 2(x-1) + 2x e_k - e_{k-1}.
    let (mut prev, mut cur) = (0.0, delta);
    for _ in 1..n {
        let next = 2.0 * delta + 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    // 1 - x / T_n = (T_n - x) / T_n
    (cur - delta) / ((1.0 + cur) * lambda)
}

fn discrete_by_cosh(steps: usize, lambda: f64) -> f64 {
    let y = (0.5 * lambda.sqrt()).asinh();
    let n = (2 * steps + 1) as f64;
    let one_minus_r = if n * y > 40.0 {
        1.0 - cosh_ratio(y, n)
    } else {
        // cosh(ny) - cosh(y) = 2 sinh((N+1) y) sinh(N y)
        let big = ((steps + 1) as f64 * y).sinh();
        let small = (steps as f64 * y).sinh();
        2.0 * big * small / (n * y).cosh()
    };
    one_minus_r / lambda
}

fn discrete_by_poly(steps: usize, lambda: f64) -> f64 {
    let a = 0.25 * lambda;
    let n = steps;
    // P = sum_m C(2n+1, 2m) (1+a)^(n-m) a^m; the m = 0 term minus one is expm1.
    let mut p_minus_one = (n as f64 * a.ln_1p()).exp_m1();
    let mut binom = 1.0; // C(2n+1, 0)
    let top = (2 * n + 1) as f64;
    for m in 1..=n {
        let k = (2 * m) as f64;
        // C(2n+1, 2m) from C(2n+1, 2m-2)
        binom *= (top - k + 2.0) * (top - k + 1.0) / ((k - 1.0) * k);
        p_minus_one += binom * (1.0 + a).powi((n - m) as i32) * a.powi(m as i32);
    }
    let p = 1.0 + p_minus_one;
    if !p.is_finite() {
        return 1.0 / lambda;
    }
    p_minus_one / (p * lambda)
}

/// A regularization filter together with its residual factor.
pub trait RegularizationFilter: SpectralFunction {
    /// `1 - lambda g(lambda)`, computed without cancellation.
    fn residual(&self, lambda: f64) -> f64;
}

/// Filter of the Riccati flow, parameterized by the final time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuousFilter {
    pub horizon: f64,
}

impl SpectralFunction for ContinuousFilter {
    fn eval(&self, lambda: f64) -> f64 {
        continuous_filter(self.horizon, lambda)
    }
}

impl RegularizationFilter for ContinuousFilter {
    fn residual(&self, lambda: f64) -> f64 {
        continuous_residual(self.horizon, lambda)
    }
}

/// Filter of the Bellman recursion, parameterized by the number of steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiscreteFilter {
    pub steps: usize,
    pub representation: Representation,
}

impl DiscreteFilter {
    pub fn new(steps: usize) -> Self {
        DiscreteFilter {
            steps,
            representation: Representation::Recursion,
        }
    }
}

impl SpectralFunction for DiscreteFilter {
    fn eval(&self, lambda: f64) -> f64 {
        discrete_filter(self.steps, lambda, self.representation)
    }
}

impl RegularizationFilter for DiscreteFilter {
    fn residual(&self, lambda: f64) -> f64 {
        discrete_residual(self.steps, lambda)
    }
}

/// `n` log-spaced points covering `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi >= lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

const SCAN_POINTS: usize = 4000;

/// Numerical `sup_{0 < lambda <= lambda_max} lambda^mu |1 - lambda g(lambda)|`.
///
/// Scans a log-spaced grid from `lambda_max * 1e-14` upward, then refines
/// the best cell by golden-section search in `ln lambda`.
pub fn qualification_bound<F: RegularizationFilter + ?Sized>(
    filter: &F,
    mu: f64,
    lambda_max: f64,
) -> f64 {
    assert!(lambda_max > 0.0);
    let value = |l: f64| l.powf(mu) * filter.residual(l).abs();
    let grid = log_grid(lambda_max * 1e-14, lambda_max, SCAN_POINTS);
    let (best, mut sup) = grid.iter().enumerate().map(|(i, &l)| (i, value(l))).fold(
        (0, f64::NEG_INFINITY),
        |acc, cur| if cur.1 > acc.1 { cur } else { acc },
    );

    let lo = grid[best.saturating_sub(1)].ln();
    let hi = grid[(best + 1).min(grid.len() - 1)].ln();
    let (mut a, mut b) = (lo, hi);
    let ratio = 0.5 * (5.0f64.sqrt() - 1.0);
    for _ in 0..60 {
        let c = b - ratio * (b - a);
        let d = a + ratio * (b - a);
        let (fc, fd) = (value(c.exp()), value(d.exp()));
        sup = sup.max(fc).max(fd);
        if fc > fd {
            b = d;
        } else {
            a = c;
        }
    }
    sup
}

/// Explicit bound `2 (2 mu)^(2 mu) e^(-2 mu) T^(-2 mu)` on
/// `lambda^mu / cosh(sqrt(lambda) T)`.
pub fn continuous_qualification_limit(mu: f64, horizon: f64) -> f64 {
    2.0 * (2.0 * mu).powf(2.0 * mu) * (-2.0 * mu).exp() * horizon.powf(-2.0 * mu)
}

/// Numerical `sup_{lambda >= 0} |g(lambda)|` over `{0}` and a log grid on `[1e-12, 1e6]`.
pub fn filter_sup<F: SpectralFunction + ?Sized>(filter: &F) -> f64 {
    log_grid(1e-12, 1e6, SCAN_POINTS)
        .into_iter()
        .map(|l| filter.eval(l).abs())
        .fold(filter.eval(0.0).abs(), f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn continuous_filter_values() {
        assert_eq!(continuous_filter(3.0, 0.0), 4.5);
        let expected = 1.0 - 1.0 / 2.0f64.cosh();
        assert!(close(continuous_filter(2.0, 1.0), expected, 1e-14));
        assert!((continuous_filter(2.0, 1.0) - 0.7342).abs() < 1e-4);
        // small-lambda limit is continuous
        assert!(close(continuous_filter(2.0, 1e-14), 2.0, 1e-10));
    }

    #[test]
    fn sech_is_finite_for_huge_arguments() {
        assert_eq!(sech(0.0), 1.0);
        assert!(sech(1e6) == 0.0);
        assert!(close(sech(3.0), 1.0 / 3.0f64.cosh(), 1e-15));
    }

    #[test]
    fn h_recursion_by_hand() {
        assert_eq!(h_sequence(1, 1.0), alloc::vec![2.0]);
        let h = h_sequence(2, 1.0);
        assert_eq!(h[1], 2.0);
        assert_eq!(h[0], 2.5);
        assert!(h_sequence(7, 0.0).iter().all(|&v| v == 1.0));
        assert!(h_sequence(20, 0.3).iter().all(|&v| v >= 1.0));
    }

    #[test]
    fn discrete_filter_small_cases() {
        assert_eq!(discrete_filter(1, 0.0, Representation::Recursion), 1.0);
        for rep in Representation::ALL {
            assert!(close(discrete_filter(1, 1.0, rep), 0.5, 1e-14), "{rep:?}");
        }
        // N = 2: prod h = p_1 = lambda^2 + 3 lambda + 1
        for &l in &[0.01, 0.5, 2.0, 17.0] {
            let p1 = l * l + 3.0 * l + 1.0;
            let want = (1.0 - 1.0 / p1) / l;
            for rep in Representation::ALL {
                assert!(
                    close(discrete_filter(2, l, rep), want, 1e-12),
                    "{rep:?} at {l}"
                );
            }
        }
    }

    #[test]
    fn chebyshev_basics() {
        for &x in &[-0.7, 0.0, 0.3, 1.0, 2.5] {
            assert_eq!(chebyshev_t(1, x), x);
            assert!((chebyshev_t(3, x) - (4.0 * x * x * x - 3.0 * x)).abs() < 1e-12);
        }
        for n in 0..15 {
            assert!((chebyshev_t(n, 1.0) - 1.0).abs() < 1e-12);
            let d = chebyshev_t_derivative(n, 1.0);
            assert!((d - (n * n) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn p_sequence_is_h_product() {
        for n in 1..8 {
            for &l in &[0.0, 0.2, 1.0, 5.0] {
                let prod: f64 = h_sequence(n, l).iter().product();
                let p = p_sequence(n, l);
                assert!(close(*p.last().unwrap(), prod, 1e-12));
            }
        }
        assert_eq!(p_sequence(2, 2.0)[2], 4.0 + 6.0 + 1.0);
    }

    #[test]
    fn qualification_mu_zero_edge() {
        let f = DiscreteFilter::new(5);
        assert!(qualification_bound(&f, 1e-9, 10.0) <= 1.0 + 1e-12);
        let c = ContinuousFilter { horizon: 3.0 };
        assert!(qualification_bound(&c, 1e-9, 10.0) <= 1.0 + 1e-12);
    }

    #[test]
    fn continuous_qualification_example() {
        let c = ContinuousFilter { horizon: 10.0 };
        let limit = continuous_qualification_limit(1.0, 10.0);
        assert!((limit - 8.0 * (-2.0f64).exp() / 100.0).abs() < 1e-15);
        assert!((limit - 0.0108).abs() < 1e-4);
        assert!(qualification_bound(&c, 1.0, 100.0) <= limit);
    }

    #[test]
    fn sup_values() {
        assert!(close(
            filter_sup(&ContinuousFilter { horizon: 3.0 }),
            4.5,
            1e-12
        ));
        let s1 = filter_sup(&DiscreteFilter::new(1));
        assert!(close(s1, 1.0, 1e-12));
        assert!(s1 <= 8.0);
        for n in [2, 5, 13] {
            assert!(close(
                filter_sup(&DiscreteFilter::new(n)),
                discrete_filter_at_zero(n),
                1e-12
            ));
        }
    }
}
