//! Rank-based tests for high-dimensional one-sample and two-sample mean problems.
//!
//! The crate is organised in layers:
//!
//! - [`rank_core`]: signed-rank and Wilcoxon–Mann–Whitney kernels plus their
//!   closed-form null moments.
//! - [`limit_dists`]: the standard normal and Gumbel-type limits used for
//!   calibration, and the two-term Cauchy p-value combination.
//! - [`testkit`]: the max-type, sum-type and combined procedures (`MAX1`,
//!   `SUM1`, `COM1`) for both problems, including long-run variance estimation.
//! - [`simlab`]: a reproducible Monte Carlo laboratory for empirical size and
//!   power studies and analytic moments under shift alternatives.
//! - [`cli`]: the command-line front end used by the `hdrank` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod limit_dists;
pub mod matrix;
pub mod rank_core;
pub mod simlab;
pub mod testkit;

pub use error::{Error, Result};
pub use limit_dists::PValue;
pub use matrix::DataMatrix;
pub use rank_core::{MomentPair, StandardizedVector};
pub use testkit::{Method, Problem, TauEstimate, TauMethod, TestOptions, TestResult};
