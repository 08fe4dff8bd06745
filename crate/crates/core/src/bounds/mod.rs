//! Secrecy-capacity and main-channel capacity bounds, in bits per dimension.

mod asymptotic;
mod finite;

use std::collections::BTreeMap;

use serde::Serialize;

pub use asymptotic::{lb3, lb3_left_limit, ub2, ub3, ub3_branch_check, AsymptoticRatios, Ub3BranchCheck};
pub use finite::{identity_secrecy, lb1_exact, lb1_sampled, lb2_expected, ub1, ub1_terms, ChannelDims, Ub1Terms};

/// Which bound a [`BoundValue`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BoundKind {
    Lb1Exact,
    Lb1Sampled,
    Lb2Expected,
    Ub1,
    IdentityCs,
    Lb3,
    Ub2,
    Ub3,
}

impl BoundKind {
    /// Kinds that carry a Monte Carlo standard error.
    pub fn is_sampled(self) -> bool {
        matches!(self, BoundKind::Lb1Sampled)
    }
}

/// A bound evaluation in bits per dimension with reproducibility notes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundValue {
    pub bits_per_dim: f64,
    pub kind: BoundKind,
    /// Present exactly when `kind` is a sampled estimator.
    pub std_error: Option<f64>,
    pub meta: BTreeMap<String, String>,
}

impl BoundValue {
    pub(crate) fn exact(kind: BoundKind, bits_per_dim: f64) -> Self {
        debug_assert!(!kind.is_sampled());
        Self { bits_per_dim, kind, std_error: None, meta: BTreeMap::new() }
    }

    pub(crate) fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.insert(key.to_string(), value.to_string());
        self
    }
}
