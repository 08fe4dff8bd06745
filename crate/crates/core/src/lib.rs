//! Numerical toolkit for the multiplicative Gaussian wiretap channel
//! `Y = A_b W X`, `Z = A_e W X` with binary support input `X` and diagonal
//! Gaussian `W`.
//!
//! The crate evaluates finite-dimension and asymptotic secrecy-capacity
//! bounds, verifies the random-matrix concentration results behind them by
//! exact moments and Monte Carlo, and simulates the channel together with
//! the exhaustive subspace-membership decoder.
//!
//! All public quantities are in bits (per dimension where applicable);
//! internal arithmetic is carried out in nats.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod channel;
pub mod cli;
mod error;
pub mod matrixcore;
pub mod specfun;
pub mod stats;
pub mod verify;

pub use bounds::{AsymptoticRatios, BoundKind, BoundValue, ChannelDims};
pub use error::{Error, Result};
pub use matrixcore::{Matrix, SeededStream, Support, SupportSearch};
pub use specfun::QuadratureSpec;
pub use stats::TrialReport;

/// Library version recorded in every CLI report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
