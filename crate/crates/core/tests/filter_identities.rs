use dpreg::filters::{
    chebyshev_t, continuous_filter, discrete_filter, discrete_residual, h_sequence, log_grid,
    p_sequence, Representation,
};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

#[test]
fn representations_agree() {
    let grid = log_grid(1e-12, 1e4, 2000);
    for n in 1..=30 {
        for &l in &grid {
            let base = discrete_filter(n, l, Representation::Recursion);
            for rep in [Representation::Chebyshev, Representation::CoshForm] {
                assert!(
                    rel(discrete_filter(n, l, rep), base) <= 1e-9,
                    "{rep:?} N={n} lambda={l}"
                );
            }
            if n <= 8 && l <= 10.0 {
                assert!(
                    rel(discrete_filter(n, l, Representation::PolyForm), base) <= 1e-9,
                    "poly N={n} lambda={l}"
                );
            }
        }
    }
}

#[test]
fn p_is_a_scaled_chebyshev_polynomial() {
    for n in 1..=10 {
        for &l in &log_grid(1e-6, 1e3, 200) {
            let x = (l / 4.0 + 1.0).sqrt();
            let p = p_sequence(n, l)[n];
            assert!(
                rel(p, chebyshev_t(2 * n + 1, x) / x) <= 1e-9,
                "N={n} lambda={l}"
            );
        }
    }
}

#[test]
fn residual_factor_is_inverse_product_of_h() {
    for n in 1..=12 {
        for &l in &[1e-3, 0.1, 1.0, 3.0, 40.0] {
            let prod: f64 = h_sequence(n, l).iter().product();
            assert!(rel(discrete_residual(n, l), 1.0 / prod) <= 1e-12);
            assert!(rel(p_sequence(n, l)[n], prod) <= 1e-12);
        }
    }
}

#[test]
fn filters_are_bounded_by_inverse() {
    for &l in &log_grid(1e-10, 1e6, 500) {
        for t in [0.1, 1.0, 10.0, 100.0] {
            let v = l * continuous_filter(t, l);
            assert!((0.0..=1.0).contains(&v));
        }
        for n in [1, 3, 10, 50] {
            let v = l * discrete_filter(n, l, Representation::Recursion);
            assert!((0.0..=1.0 + 1e-15).contains(&v));
        }
    }
}

#[test]
fn filters_approach_inverse() {
    for &l in &[1e-4, 1e-2, 1.0, 50.0] {
        let target = 1.0 / l;
        let mut t = 1.0;
        while rel(continuous_filter(t, l), target) > 0.01 {
            t *= 2.0;
            assert!(t < 1e9);
        }
        let mut n = 1usize;
        while rel(discrete_filter(n, l, Representation::Recursion), target) > 0.01 {
            n *= 2;
            assert!(n < 1 << 24);
        }
    }
}
