//! Integer-decidable inequalities on a [`PartitionTable`](crate::PartitionTable)
//! and range scans producing [`VerificationReport`]s.

mod checks;
mod jensen;
mod report;

pub use checks::{
    conjecture_threshold, dlog_margin, dlog_sign, logconcave_at, logconcave_margin, theta_monotone_at,
    theta_monotone_margin, turan3_at, turan3_margin, ConjectureScan, ExactCheck,
};
pub use jensen::{jensen_hyperbolic, jensen_poly, jensen_threshold};
pub use report::{run_scan, PointResult, VerificationReport, Verdict};

use std::cmp::Ordering;

use rug::Integer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SignOutcome {
    Positive,
    Zero,
    Negative,
}

impl SignOutcome {
    pub fn of(x: &Integer) -> SignOutcome {
        x.cmp0().into()
    }

    pub fn is_positive(self) -> bool {
        self == SignOutcome::Positive
    }

    pub fn negate(self) -> SignOutcome {
        match self {
            SignOutcome::Positive => SignOutcome::Negative,
            SignOutcome::Zero => SignOutcome::Zero,
            SignOutcome::Negative => SignOutcome::Positive,
        }
    }
}

impl From<Ordering> for SignOutcome {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Greater => SignOutcome::Positive,
            Ordering::Equal => SignOutcome::Zero,
            Ordering::Less => SignOutcome::Negative,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("index {n} outside the valid range {lo}..={hi} for this table")]
    OutOfRange { n: usize, lo: usize, hi: usize },
    #[error("difference order r must be at least 1")]
    ZeroOrder,
    #[error("Jensen degree d must be at least 1")]
    ZeroDegree,
    #[error("empty range {from}..={to}")]
    EmptyRange { from: usize, to: usize },
}
