//! Hardy-constant estimation and the negative tests for the Hardy and
//! weak-Hardy properties.

mod decade;
mod estimate;
mod negative;
mod ratio;

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

pub use decade::{classify_decades, DecadeClass, DecadeEvidence};
pub use estimate::{
    checkpoints, hardy_constant_estimate, Checkpoint, Diagnostics, EstimateOptions, EstimateVerdict,
    HardyEstimate, LogFit, MIN_ESTIMATE_N,
};
pub use negative::{
    condition_iii_scan, hardy_divergence_test, log_growth_check, nearly_increasing_epsilon,
    sum_divergence_evidence, NearlyIncreasing, STABILIZATION_BAND,
};
pub(crate) use negative::divergence_verdict;
pub use ratio::{hardy_ratio, ratio_sequence, ratio_sequence_of, HardyRatio};

use crate::means::MeanError;
use crate::sequence::SeqError;

#[derive(Debug, Clone, Error)]
pub enum HardyError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Mean(#[from] MeanError),
    #[error(transparent)]
    Sequence(#[from] SeqError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Holds {
    Holds,
    Fails,
    Inconclusive,
}

/// Outcome of one finite test together with the numbers that decided it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestVerdict {
    pub test: String,
    pub holds: Holds,
    pub evidence: BTreeMap<String, Value>,
}

impl TestVerdict {
    pub fn new(test: impl Into<String>, holds: Holds) -> Self {
        Self {
            test: test.into(),
            holds,
            evidence: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.evidence.insert(key.to_string(), value.into());
        self
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.evidence.insert(key.to_string(), value.into());
    }
}
