//! Numerical laboratory for multivariable means and Hardy-type inequalities.
//!
//! Everything is generic over the scalar type ([`scalar::Scalar`], implemented
//! for `f32` and `f64`); the aliases below fix it to `f64`.

pub mod export;
pub mod genparse;
pub mod hardy;
pub mod lemma1;
pub mod means;
pub mod scalar;
pub mod sequence;
pub mod summation;

pub use genparse::{Expr, Generator};
pub use hardy::{Holds, TestVerdict};
pub use means::{Mean, MeanFamily, MeanSpec};
pub use sequence::{SeqRule, SeqSpec};

pub type PositiveVector = means::PositiveVector<f64>;
pub type MeanAccumulator = means::MeanAccumulator<f64>;
pub type SeriesBuffer = sequence::SeriesBuffer<f64>;
pub type KahanSum = summation::KahanSum<f64>;
pub type HardyEstimate = hardy::HardyEstimate<f64>;
pub type HardyRatio = hardy::HardyRatio<f64>;
pub type NearlyIncreasing = hardy::NearlyIncreasing<f64>;
pub type BlockPartition = lemma1::BlockPartition<f64>;
pub type RSequence = lemma1::RSequence<f64>;
pub type CounterexampleReport = lemma1::CounterexampleReport<f64>;
pub type CounterexampleOutcome = lemma1::CounterexampleOutcome<f64>;
