//! Regularization of linear ill-posed problems `F u = y` by dynamic programming.
//!
//! Two regularizers are provided, both derived from linear-quadratic optimal
//! control of the residual `F u - y`:
//!
//! - [`dp_discrete`]: a Bellman backward recursion for operator weights `S_k`
//!   and gains `K_k`, followed by a forward sweep producing iterates `u_k`. The
//!   number of steps `N` is the regularization parameter.
//! - [`dp_continuous`]: an explicit backward integration of the Riccati flow
//!   `Q' = -I + Q F F* Q`, `Q(T) = 0`, then an Euler sweep of
//!   `u' = -F* Q (F u - y)`. The final time `T` is the regularization parameter.
//!
//! Every method has a scalar filter `g` with `u = g(F*F) F* y`; [`filters`]
//! evaluates the filters in several independent representations and
//! [`linop::DenseOperator::spectral_apply`] applies them through an SVD, which
//! serves as the oracle for the iterative schemes. [`baselines`] holds the
//! Landweber and CGLS reference iterations and [`benchprob`] builds the
//! first-kind Fredholm test problems.
//!
//! The crate is `no_std` and only needs `alloc`.

// negated comparisons are used on purpose: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod baselines;
pub mod benchprob;
pub mod dp_continuous;
pub mod dp_discrete;
mod error;
pub mod filters;
pub mod linop;

pub use error::{Error, Result};
pub use linop::{DenseOperator, SpectralFunction};

pub use nalgebra::{DMatrix, DVector};
