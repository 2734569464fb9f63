//! Decade-block heuristic for deciding whether a positive series converges.
//!
//! The prefix is cut into decades `(N/10^j, N/10^(j-1)]`. If the last decade
//! carries less than `1e-9` of the total and is no larger than the one before,
//! the series is called convergent. Otherwise the decay of decade sums is
//! modelled as `B ~ u^(-sigma)` with `u = log10` of the decade's upper end,
//! which is how `sum 1/(n (ln n)^s)` behaves (decade sums decay like
//! `u^(-s)`); `sigma > 1.25` reads as convergent, `sigma < 0.75` or
//! nondecreasing decade sums as divergent, anything between as inconclusive.

use serde::Serialize;

use crate::scalar::Scalar;
use crate::summation::kahan_sum;

pub const TAIL_FRACTION: f64 = 1e-9;
pub const SIGMA_CONVERGENT: f64 = 1.25;
pub const SIGMA_DIVERGENT: f64 = 0.75;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecadeClass {
    Convergent,
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecadeEvidence {
    pub class: DecadeClass,
    pub total: f64,
    pub last_decade: f64,
    pub previous_decade: f64,
    pub tail_fraction: f64,
    pub sigma: Option<f64>,
    pub rule: &'static str,
}

/// Classifies `sum terms` from its last two decades; needs at least 100 terms.
pub fn classify_decades<T: Scalar>(terms: &[T]) -> Option<DecadeEvidence> {
    let n = terms.len();
    if n < 100 {
        return None;
    }
    let (mid, lo) = (n / 10, n / 100);
    let total = kahan_sum(terms.iter().copied()).as_f64();
    let last = kahan_sum(terms[mid..].iter().copied()).as_f64();
    let prev = kahan_sum(terms[lo..mid].iter().copied()).as_f64();
    let tail_fraction = if total > 0.0 { last / total } else { 0.0 };
    let (u_last, u_prev) = ((n as f64).log10(), (mid as f64).log10());
    let sigma = (last > 0.0 && prev > 0.0).then(|| (prev / last).ln() / (u_last / u_prev).ln());

    let (class, rule) = if tail_fraction < TAIL_FRACTION && last <= prev {
        (DecadeClass::Convergent, "tail decade below 1e-9 of total and not growing")
    } else if last >= prev {
        (DecadeClass::Divergent, "decade sums nondecreasing")
    } else {
        match sigma {
            Some(s) if s > SIGMA_CONVERGENT => (DecadeClass::Convergent, "decade-sum decay exponent above 1.25"),
            Some(s) if s < SIGMA_DIVERGENT => (DecadeClass::Divergent, "decade-sum decay exponent below 0.75"),
            _ => (DecadeClass::Inconclusive, "decade-sum decay exponent near 1"),
        }
    };
    Some(DecadeEvidence {
        class,
        total,
        last_decade: last,
        previous_decade: prev,
        tail_fraction,
        sigma,
        rule,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (1..=n).map(|k| f(k as f64)).collect()
    }

    #[test]
    fn classic_series() {
        let n = 1_000_000;
        let harmonic = classify_decades(&series(n, |k| 1.0 / k)).unwrap();
        assert_eq!(harmonic.class, DecadeClass::Divergent);
        let square = classify_decades(&series(n, |k| 1.0 / (k * k))).unwrap();
        assert_eq!(square.class, DecadeClass::Convergent);
        let geometric = classify_decades(&series(n, |k| 0.5f64.powf(k))).unwrap();
        assert_eq!(geometric.class, DecadeClass::Convergent);
        assert_eq!(geometric.rule, "tail decade below 1e-9 of total and not growing");
    }

    #[test]
    fn borderline_is_inconclusive() {
        // sum 1/(n ln n) diverges like ln ln n
        let terms = series(1_000_000, |k| 1.0 / ((k + 1.0) * (k + 1.0).ln()));
        assert_eq!(classify_decades(&terms).unwrap().class, DecadeClass::Inconclusive);
    }

    #[test]
    fn too_short() {
        assert!(classify_decades(&[1.0f64; 99]).is_none());
    }
}
