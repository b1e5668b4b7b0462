//! Dense operators, their SVD, and functional calculus on `F*F`.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;
use once_cell::race::OnceBox;

use crate::{Error, Result};

/// Relative tolerance used by [`Cholesky::factor`] to accept a matrix as symmetric.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// A scalar map `lambda -> g(lambda)` on the spectrum of `F*F`.
pub trait SpectralFunction {
    fn eval(&self, lambda: f64) -> f64;
}

impl<G: Fn(f64) -> f64> SpectralFunction for G {
    fn eval(&self, lambda: f64) -> f64 {
        self(lambda)
    }
}

/// Thin singular value decomposition `F = U diag(sigma) V^T`.
///
/// `u` is `rows x k`, `v` is `cols x k` with `k = min(rows, cols)`, and the
/// singular values are sorted in descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: DMatrix<f64>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<f64>,
}

impl Svd {
    fn compute(matrix: &DMatrix<f64>) -> Result<Self> {
        let svd = matrix
            .clone()
            .try_svd(true, true, f64::EPSILON, 10_000)
            .ok_or(Error::SvdFailed)?;
        let (u, v_t) = match (svd.u, svd.v_t) {
            (Some(u), Some(v_t)) => (u, v_t),
            _ => return Err(Error::SvdFailed),
        };
        let sigma = svd.singular_values;
        let mut order: Vec<usize> = (0..sigma.len()).collect();
        order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));

        let k = order.len();
        let mut u_sorted = DMatrix::zeros(u.nrows(), k);
        let mut v_sorted = DMatrix::zeros(v_t.ncols(), k);
        let mut singular_values = Vec::with_capacity(k);
        for (dst, &src) in order.iter().enumerate() {
            u_sorted.set_column(dst, &u.column(src));
            v_sorted.set_column(dst, &v_t.row(src).transpose());
            singular_values.push(sigma[src].max(0.0));
        }
        Ok(Svd {
            u: u_sorted,
            singular_values,
            v: v_sorted,
        })
    }

    /// `U diag(sigma) V^T`.
    pub fn reconstruct(&self) -> DMatrix<f64> {
        let mut us = self.u.clone();
        for (j, s) in self.singular_values.iter().enumerate() {
            us.column_mut(j).scale_mut(*s);
        }
        us * self.v.transpose()
    }
}

/// Matrix form of the forward map `F: R^cols -> R^rows`.
///
/// The SVD is computed on first spectral use and cached. The cache is filled
/// with a compare-and-swap, so concurrent first access is safe; a losing
/// thread simply drops its copy.
pub struct DenseOperator {
    matrix: DMatrix<f64>,
    svd: OnceBox<Svd>,
}

impl DenseOperator {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::InvalidParameter(
                "operator must have at least one row and column",
            ));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("operator entries must be finite"));
        }
        Ok(DenseOperator {
            matrix,
            svd: OnceBox::new(),
        })
    }

    pub fn from_row_major(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(DMatrix::zeros(rows, cols))
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// `c F`, with a fresh SVD cache.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(&self.matrix * c)
    }

    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_len(self.cols(), x.len())?;
        Ok(&self.matrix * x)
    }

    pub fn apply_adjoint(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        check_len(self.rows(), y.len())?;
        Ok(self.matrix.tr_mul(y))
    }

    pub fn svd(&self) -> Result<&Svd> {
        self.svd
            .get_or_try_init(|| Svd::compute(&self.matrix).map(Box::new))
    }

    /// Operator norm `sigma_max`.
    pub fn norm(&self) -> Result<f64> {
        Ok(self.svd()?.singular_values.first().copied().unwrap_or(0.0))
    }

    /// `g(F*F) F* y = sum_i g(sigma_i^2) sigma_i <u_i, y> v_i`.
    pub fn spectral_apply<G: SpectralFunction + ?Sized>(
        &self,
        g: &G,
        y: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        check_len(self.rows(), y.len())?;
        let svd = self.svd()?;
        let coeffs = svd.u.tr_mul(y);
        let mut out = DVector::zeros(self.cols());
        for (i, &s) in svd.singular_values.iter().enumerate() {
            if s == 0.0 {
                continue;
            }
            let c = g.eval(s * s) * s * coeffs[i];
            out.axpy(c, &svd.v.column(i), 1.0);
        }
        Ok(out)
    }

    /// `g(F*F) x` for `x` in the domain, including the null space of `F`,
    /// where `g(0)` applies.
    pub fn spectral_map<G: SpectralFunction + ?Sized>(
        &self,
        g: &G,
        x: &DVector<f64>,
    ) -> Result<DVector<f64>> {
        check_len(self.cols(), x.len())?;
        let svd = self.svd()?;
        let coeffs = svd.v.tr_mul(x);
        let g0 = g.eval(0.0);
        // g(0) x + sum_i (g(sigma_i^2) - g(0)) <v_i, x> v_i
        let mut out = x * g0;
        for (i, &s) in svd.singular_values.iter().enumerate() {
            let c = (g.eval(s * s) - g0) * coeffs[i];
            out.axpy(c, &svd.v.column(i), 1.0);
        }
        Ok(out)
    }
}

impl Clone for DenseOperator {
    fn clone(&self) -> Self {
        let svd = OnceBox::new();
        if let Some(cached) = self.svd.get() {
            let _ = svd.set(Box::new(cached.clone()));
        }
        DenseOperator {
            matrix: self.matrix.clone(),
            svd,
        }
    }
}

impl fmt::Debug for DenseOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DenseOperator")
            .field("rows", &self.rows())
            .field("cols", &self.cols())
            .field("svd_cached", &self.svd.get().is_some())
            .finish()
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Largest `|a_ij - a_ji|`.
pub fn asymmetry(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in (j + 1)..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

/// `(M + M^T) / 2` in place.
pub fn symmetrize(a: &mut DMatrix<f64>) {
    let n = a.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            let avg = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = avg;
            a[(j, i)] = avg;
        }
    }
}

/// Lower Cholesky factor `A = L L^T` of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: DMatrix<f64>,
}

impl Cholesky {
    pub fn factor(a: &DMatrix<f64>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                found: a.ncols(),
            });
        }
        let scale = a.amax().max(1.0);
        let dev = asymmetry(a);
        if !(dev <= SYMMETRY_TOL * scale) {
            return Err(Error::NotSymmetric { max_deviation: dev });
        }

        let n = a.nrows();
        let mut l = DMatrix::<f64>::zeros(n, n);
        let mut col = alloc::vec![0.0; n];
        for j in 0..n {
            col[j..].copy_from_slice(&a.column(j).as_slice()[j..]);
            for k in 0..j {
                let ljk = l[(j, k)];
                if ljk != 0.0 {
                    let lk = l.column(k);
                    for (c, &lik) in col[j..].iter_mut().zip(lk.iter().skip(j)) {
                        *c -= ljk * lik;
                    }
                }
            }
            let d = col[j];
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            let ljj = d.sqrt();
            let lj = &mut l.column_mut(j);
            lj[j] = ljj;
            for i in (j + 1)..n {
                lj[i] = col[i] / ljj;
            }
        }
        Ok(Cholesky { l })
    }

    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    pub fn lower(&self) -> &DMatrix<f64> {
        &self.l
    }

    fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.dim();
        // L z = b, column oriented
        for k in 0..n {
            let lk = self.l.column(k);
            let lk = lk.as_slice();
            let xk = x[k] / lk[k];
            x[k] = xk;
            if xk != 0.0 {
                for i in (k + 1)..n {
                    x[i] -= lk[i] * xk;
                }
            }
        }
        // L^T x = z
        for i in (0..n).rev() {
            let li = self.l.column(i);
            let li = li.as_slice();
            let mut acc = x[i];
            for k in (i + 1)..n {
                acc -= li[k] * x[k];
            }
            x[i] = acc / li[i];
        }
    }

    pub fn solve(&self, b: &DVector<f64>) -> Result<DVector<f64>> {
        check_len(self.dim(), b.len())?;
        let mut x = b.clone();
        self.solve_in_place(x.as_mut_slice());
        Ok(x)
    }

    /// Solves `A X = B` column by column.
    pub fn solve_matrix(&self, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        check_len(self.dim(), b.nrows())?;
        let mut x = b.clone();
        for j in 0..x.ncols() {
            let mut col = x.column_mut(j);
            self.solve_in_place(col.as_mut_slice());
        }
        Ok(x)
    }
}

/// Solves `A x = b` for symmetric positive definite `A` by Cholesky factorization.
pub fn solve_spd(a: &DenseOperator, b: &DVector<f64>) -> Result<DVector<f64>> {
    Cholesky::factor(a.matrix())?.solve(b)
}
