//! Block construction of a decreasing weight sequence `r` with
//! `sum a_n r_n < inf` but `sum a_n c_n r_n = inf`, and the counterexample
//! pipeline that turns it into a summable sequence whose prefix means are
//! certified to have divergent sum.

mod blocks;
mod certificate;
mod counterexample;
mod rseq;

use serde::Serialize;
use thiserror::Error;

pub use blocks::{block_identities, build_blocks_case1, build_blocks_case2, BlockGroup, BlockIdentity, BlockPartition, Case};
pub use certificate::{certify, CertificateCheck, CERTIFICATE_SLACK};
pub use counterexample::{
    counterexample, select_case, CounterexampleOptions, CounterexampleOutcome, CounterexampleReport, Refusal,
    CASE_ONE_THRESHOLD, IDENTITY_TOL, STABILIZATION_TOL,
};
pub use rseq::{emit_r, RSequence};

use crate::hardy::HardyError;
use crate::means::MeanError;
use crate::sequence::SeqError;

#[derive(Debug, Clone, Error)]
pub enum LemmaError {
    #[error("ratio sequence never exceeds {threshold} over the {n} scanned entries: no crossing for the first block")]
    NoCrossing { threshold: usize, n: usize },
    #[error("scan budget N = {n} exhausted before the first block reached weight 1 (accumulated {accumulated})")]
    BudgetExhausted { n: usize, accumulated: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("certificate violated at n = {n}: M(b_1..b_n) = {lhs} < c_n a_n r_n = {rhs}")]
    CertificateViolation { n: usize, lhs: f64, rhs: f64 },
    #[error(transparent)]
    Hardy(#[from] HardyError),
    #[error(transparent)]
    Mean(#[from] MeanError),
    #[error(transparent)]
    Sequence(#[from] SeqError),
}

impl LemmaError {
    /// Numerical faults, as opposed to inputs the construction cannot use.
    pub fn is_numerical_fault(&self) -> bool {
        matches!(self, LemmaError::CertificateViolation { .. } | LemmaError::Mean(_))
    }
}

/// Discrepancies between the printed argument and what is implemented,
/// carried in every report.
#[derive(Debug, Clone, Serialize)]
pub struct ConstructionNotes {
    pub starred_ratio: &'static str,
    pub gap_monotonicity: &'static str,
}

impl Default for ConstructionNotes {
    fn default() -> Self {
        Self {
            starred_ratio: "the final chain's c_n^* is undefined in the source argument; c_n is used",
            gap_monotonicity: "block gaps (and block weights) are enforced nondecreasing, not strictly increasing",
        }
    }
}
