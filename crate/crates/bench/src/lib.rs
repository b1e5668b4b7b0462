//! Experiment harness for the `dpreg` regularizers.
//!
//! Builds the Fredholm benchmark problems, runs the discrete and continuous
//! dynamic-programming methods next to Landweber and CG, and writes error
//! traces, filter tables and rate studies as CSV.

// negated comparisons are used on purpose: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod csv;
mod error;
pub mod experiment;
pub mod rates;

pub use error::{BenchError, Result};
