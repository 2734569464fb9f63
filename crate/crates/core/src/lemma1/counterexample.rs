use std::ops::RangeInclusive;

use serde::Serialize;

use super::{
    block_identities, build_blocks_case1, build_blocks_case2, certify, emit_r, BlockIdentity, BlockPartition,
    Case, CertificateCheck, ConstructionNotes, LemmaError,
};
use crate::hardy::{ratio_sequence_of, Holds, TestVerdict};
use crate::hardy::divergence_verdict;
use crate::means::{check_axioms, prefix_means_of, Axiom, MeanSpec, PropertyReport};
use crate::scalar::Scalar;
use crate::sequence::SeqSpec;
use crate::summation::partial_sums;

/// Case one is used when `min a > CASE_ONE_THRESHOLD * max a` on the scanned
/// prefix and the sequence does not declare its infimum.
pub const CASE_ONE_THRESHOLD: f64 = 1e-9;
/// Relative tolerance on the exact per-block identity `sum a r = 1/(k+1)^2`.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Relative contribution of the last decade below which `sum b` counts as
/// numerically stabilized.
pub const STABILIZATION_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct CounterexampleOptions {
    pub axiom_trials: usize,
    pub axiom_dims: RangeInclusive<usize>,
    pub axiom_tol: f64,
    pub seed: u64,
    /// Window of the divergence test; `N / 10` when unset.
    pub window: Option<usize>,
}

impl Default for CounterexampleOptions {
    fn default() -> Self {
        Self {
            axiom_trials: 200,
            axiom_dims: 1..=8,
            axiom_tol: 1e-9,
            seed: 42,
            window: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Refusal {
    pub mean: MeanSpec,
    pub seq: SeqSpec,
    pub n: usize,
    pub stage: &'static str,
    pub reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axioms: Option<PropertyReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divergence: Option<TestVerdict>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CounterexampleReport<T> {
    pub mean: MeanSpec,
    pub seq: SeqSpec,
    pub n: usize,
    pub case: Case,
    pub case_rule: &'static str,
    pub n0: usize,
    pub bound_on_a: f64,
    pub bound_verified: bool,
    pub divergence: TestVerdict,
    pub partition: BlockPartition<T>,
    pub r_strictly_decreasing: bool,
    pub certificates: CertificateCheck,
    pub block_identities: Vec<BlockIdentity>,
    pub max_identity_error: f64,
    /// `sum_{k <= K} k/(k+1)^2` over the complete groups.
    pub lower_bound_total: f64,
    /// The same quantity summed directly from `a c r` over the groups.
    pub materialized_lower_total: f64,
    pub sum_b_total: f64,
    pub mean_sum_total: f64,
    pub tail_decade_relative: f64,
    pub cauchy_stabilized: bool,
    /// `sum b <= 2 sum_k 1/(k+1)^2 = pi^2/3` holds for every `N`.
    pub structural_sum_bound: f64,
    pub within_structural_bound: bool,
    pub notes: ConstructionNotes,
    #[serde(skip)]
    pub a: Vec<T>,
    #[serde(skip)]
    pub c: Vec<T>,
    #[serde(skip)]
    pub r: Vec<T>,
    #[serde(skip)]
    pub b: Vec<T>,
    #[serde(skip)]
    pub sum_b: Vec<T>,
    #[serde(skip)]
    pub mean_b: Vec<T>,
    #[serde(skip)]
    pub mean_sums: Vec<T>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
#[allow(clippy::large_enum_variant)]
pub enum CounterexampleOutcome<T> {
    Constructed(Box<CounterexampleReport<T>>),
    Refused(Refusal),
}

impl<T> CounterexampleOutcome<T> {
    pub fn is_constructed(&self) -> bool {
        matches!(self, CounterexampleOutcome::Constructed(_))
    }

    pub fn report(&self) -> Option<&CounterexampleReport<T>> {
        match self {
            CounterexampleOutcome::Constructed(r) => Some(r),
            CounterexampleOutcome::Refused(_) => None,
        }
    }

    pub fn refusal(&self) -> Option<&Refusal> {
        match self {
            CounterexampleOutcome::Refused(r) => Some(r),
            CounterexampleOutcome::Constructed(_) => None,
        }
    }
}

/// Case two when `inf a = 0`: taken from the sequence rule when it is known
/// analytically, otherwise decided on the prefix by [`CASE_ONE_THRESHOLD`].
pub fn select_case<T: Scalar>(seq: &SeqSpec, a: &[T]) -> (Case, &'static str) {
    match seq.infimum_is_zero() {
        Some(true) => (Case::CaseTwo, "declared infimum"),
        Some(false) => (Case::CaseOne, "declared infimum"),
        None => {
            let lo = a.iter().copied().fold(T::infinity(), T::min).as_f64();
            let hi = a.iter().copied().fold(T::zero(), T::max).as_f64();
            if lo > CASE_ONE_THRESHOLD * hi {
                (Case::CaseOne, "prefix threshold")
            } else {
                (Case::CaseTwo, "prefix threshold")
            }
        }
    }
}

/// Builds a summable `b = a r` with `r` strictly decreasing such that
/// `M(b_1..b_n) >= c_n a_n r_n` for every `n`, where `c_n = M(a_1..a_n)/a_n`.
/// Together with the block identities this shows `sum M(b_1..b_n)` diverges
/// while `sum b_n` converges, i.e. the mean is not weak-Hardy.
///
/// Means that fail the monotonicity-type axioms, or pairs `(M, a)` for which
/// `sum a = inf` with `c_n -> inf` is not observed, are refused.
pub fn counterexample<T: Scalar>(
    spec: &MeanSpec,
    seq: &SeqSpec,
    n: usize,
    opts: &CounterexampleOptions,
) -> Result<CounterexampleOutcome<T>, LemmaError> {
    let window = opts.window.unwrap_or(n / 10);
    if window == 0 || n < 2 * window {
        return Err(LemmaError::InvalidInput(format!("N = {n} too small for window {window}")));
    }
    let refuse = |stage, reason: String, axioms, divergence| {
        Ok(CounterexampleOutcome::Refused(Refusal {
            mean: spec.clone(),
            seq: seq.clone(),
            n,
            stage,
            reason,
            axioms,
            divergence,
        }))
    };

    let axioms = check_axioms::<T>(spec, opts.axiom_trials, opts.axiom_dims.clone(), opts.seed, opts.axiom_tol);
    let failed: Vec<String> = [Axiom::Bounds, Axiom::Homogeneity, Axiom::Monotonicity]
        .into_iter()
        .filter(|&ax| !axioms.passed(ax))
        .map(|ax| format!("{ax:?}").to_lowercase())
        .collect();
    if !failed.is_empty() {
        return refuse("axioms", format!("mean fails {}", failed.join(", ")), Some(axioms), None);
    }

    let a = seq.terms::<T>(n)?;
    let c = ratio_sequence_of(spec, &a)?;
    let divergence = divergence_verdict(seq, &a, &c, window);
    if divergence.holds != Holds::Holds {
        let reason = match divergence.holds {
            Holds::Fails => "sum a_n converges or c_n stays bounded",
            _ => "divergence of sum a_n and c_n not established",
        };
        return refuse("divergence", reason.to_string(), None, Some(divergence));
    }

    // boundedness: beyond n0, a_n < M(a_1..a_n) <= max(a_1..a_n)
    let n0 = c.iter().rposition(|&x| x <= T::one()).map_or(0, |i| i + 1);
    let bound = a[..n0.max(1)].iter().copied().fold(T::zero(), T::max);
    let bound_verified = a.iter().all(|&x| x <= bound);

    let (case, case_rule) = select_case(seq, &a);
    let partition = match case {
        Case::CaseOne => build_blocks_case1(&c, Some(&a))?,
        Case::CaseTwo => build_blocks_case2(&a, &c)?,
    };
    let rseq = emit_r(&partition, true, n)?;

    let identities = block_identities(&partition, &a, &c, &rseq.base, 0.0);
    let max_identity_error = identities.iter().map(|i| i.relative_error).fold(0.0, f64::max);
    if let Some(bad) = identities
        .iter()
        .find(|i| i.relative_error > IDENTITY_TOL || i.sum_acr < i.lower_bound_acr * (1.0 - IDENTITY_TOL))
    {
        return Err(LemmaError::InvalidInput(format!(
            "block {} identity off: sum a r = {} (expected {}), sum a c r = {} (bound {})",
            bad.k, bad.sum_ar, bad.expected_sum_ar, bad.sum_acr, bad.lower_bound_acr
        )));
    }

    let mean_a = prefix_means_of(spec, &a)?;
    let (certificates, mean_b) = certify(spec, &a, &mean_a, &rseq.values)?;
    if let Some((n, lhs, rhs)) = certificates.first_violation {
        return Err(LemmaError::CertificateViolation { n, lhs, rhs });
    }

    let b: Vec<T> = a.iter().zip(&rseq.values).map(|(&x, &y)| x * y).collect();
    let sum_b = partial_sums(&b);
    let mean_sums = partial_sums(&mean_b);
    let total = sum_b[n - 1].as_f64();
    let tail = (total - sum_b[n / 10 - 1].as_f64()) / total;
    let structural = std::f64::consts::PI.powi(2) / 3.0;

    Ok(CounterexampleOutcome::Constructed(Box::new(CounterexampleReport {
        mean: spec.clone(),
        seq: seq.clone(),
        n,
        case,
        case_rule,
        n0,
        bound_on_a: bound.as_f64(),
        bound_verified,
        divergence,
        r_strictly_decreasing: rseq.is_strictly_decreasing(),
        certificates,
        lower_bound_total: identities.iter().map(|i| i.lower_bound_acr).sum(),
        materialized_lower_total: identities.iter().map(|i| i.sum_acr).sum(),
        block_identities: identities,
        max_identity_error,
        partition,
        sum_b_total: total,
        mean_sum_total: mean_sums[n - 1].as_f64(),
        tail_decade_relative: tail,
        cauchy_stabilized: tail < STABILIZATION_TOL,
        structural_sum_bound: structural,
        within_structural_bound: total <= structural,
        notes: ConstructionNotes::default(),
        a,
        c,
        r: rseq.values,
        b,
        sum_b,
        mean_b,
        mean_sums,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_harmonic_small() {
        let out = counterexample::<f64>(&MeanSpec::arithmetic(), &SeqSpec::harmonic(), 20_000, &Default::default())
            .unwrap();
        let r = out.report().expect("constructed");
        assert_eq!(r.case, Case::CaseTwo);
        assert!(r.certificates.holds);
        assert!(r.r_strictly_decreasing);
        assert!(r.bound_verified);
        assert_eq!(r.n0, 1);
        assert!(r.within_structural_bound);
    }

    #[test]
    fn min_is_refused() {
        let out = counterexample::<f64>(&MeanSpec::min(), &SeqSpec::harmonic(), 10_000, &Default::default()).unwrap();
        assert_eq!(out.refusal().unwrap().stage, "divergence");
    }

    #[test]
    fn max_fails_no_precheck_but_is_refused_later() {
        // max is monotone and homogeneous, but c_n = 1/a_n * a_1 grows with a
        // convergent sum of 1/n^2
        let out = counterexample::<f64>(&MeanSpec::max(), &SeqSpec::power_law(2.0).unwrap(), 10_000, &Default::default())
            .unwrap();
        assert!(out.refusal().is_some());
    }
}
