//! Finite tests for the hypotheses of the negative Hardy and weak-Hardy
//! criteria. Every verdict carries the numbers that produced it.

use serde::Serialize;
use serde_json::json;

use super::decade::{classify_decades, DecadeClass};
use super::ratio::ratio_sequence_of;
use super::{HardyError, Holds, TestVerdict};
use crate::means::MeanSpec;
use crate::scalar::Scalar;
use crate::sequence::{Divergence, SeqSpec};

/// Relative band within which the last-window maximum of `c` must sit around
/// its value one decade earlier for `c` to count as stabilized (bounded).
pub const STABILIZATION_BAND: f64 = 0.01;

/// Status of `sum a_n`: declared from the rule when known, otherwise the
/// decade-block heuristic on the prefix.
pub fn sum_divergence_evidence<T: Scalar>(seq: &SeqSpec, terms: &[T]) -> (Divergence, serde_json::Value) {
    match seq.sum_divergence() {
        Divergence::Unknown => {
            let Some(ev) = classify_decades(terms) else {
                return (Divergence::Unknown, json!({"source": "heuristic", "note": "prefix shorter than 100 terms"}));
            };
            let d = match ev.class {
                DecadeClass::Divergent => Divergence::Diverges,
                DecadeClass::Convergent => Divergence::Converges,
                DecadeClass::Inconclusive => Divergence::Unknown,
            };
            (d, json!({"source": "heuristic", "status": d, "decades": ev}))
        }
        d => (d, json!({"source": "declared", "status": d, "rule": seq.label})),
    }
}

/// Evidence for `sum a_n = inf` and `c_n = M(a_1..a_n)/a_n -> inf`.
///
/// `holds` means both parts were observed (so the mean is not Hardy, on
/// truncated evidence); `fails` means `sum a_n` is known to converge or
/// `c_n` has stabilized; anything else is `inconclusive`.
pub fn hardy_divergence_test<T: Scalar>(
    spec: &MeanSpec,
    a: &SeqSpec,
    n: usize,
    window: usize,
) -> Result<TestVerdict, HardyError> {
    if window == 0 || n < 2 * window {
        return Err(HardyError::InvalidArgument(format!(
            "need N >= 2 * window, got N = {n}, window = {window}"
        )));
    }
    let terms = a.terms::<T>(n)?;
    let c = ratio_sequence_of(spec, &terms)?;
    Ok(divergence_verdict(a, &terms, &c, window))
}

pub(crate) fn divergence_verdict<T: Scalar>(a: &SeqSpec, terms: &[T], c: &[T], window: usize) -> TestVerdict {
    let n = c.len();
    let (sum_status, sum_evidence) = sum_divergence_evidence(a, terms);
    let cf: Vec<f64> = c.iter().map(|x| x.as_f64()).collect();
    let max_of = |s: &[f64]| s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_of = |s: &[f64]| s.iter().copied().fold(f64::INFINITY, f64::min);

    let last = &cf[n - window..];
    let last_max = max_of(last);
    let reference = max_of(&cf[..(n / 10).max(1)]);
    let spread = (last_max - reference).abs() / last_max;
    let stabilized = spread <= STABILIZATION_BAND;

    let mut verdict = TestVerdict::new("hardy_divergence", Holds::Inconclusive)
        .with("n", n)
        .with("window", window)
        .with("sum_a", sum_evidence)
        .with("c_last", cf[n - 1])
        .with("c_last_window_max", last_max)
        .with("c_decade_reference_max", reference)
        .with("c_relative_spread", spread);

    let mut growing = false;
    if n >= 3 * window {
        let mins: Vec<f64> = (0..3)
            .rev()
            .map(|j| min_of(&cf[n - (j + 1) * window..n - j * window]))
            .collect();
        let prior_max = max_of(&cf[..n - window]);
        growing = mins[0] < mins[1] && mins[1] < mins[2] && mins[2] > prior_max;
        verdict.set("window_minima", json!(mins));
        verdict.set("prior_max", prior_max);
    } else {
        verdict.set("note", "fewer than three complete windows");
    }
    verdict.set("c_stabilized", stabilized);
    verdict.set("c_growing", growing);

    verdict.holds = if sum_status == Divergence::Converges || stabilized {
        Holds::Fails
    } else if growing && sum_status == Divergence::Diverges {
        Holds::Holds
    } else {
        Holds::Inconclusive
    };
    verdict
}

/// Largest `eps` with `eps * c_m <= c_n` for all `m <= n` on the prefix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NearlyIncreasing<T> {
    pub epsilon: T,
    /// 1-based indices of the pair attaining `epsilon`.
    pub m: usize,
    pub n: usize,
}

pub fn nearly_increasing_epsilon<T: Scalar>(c: &[T]) -> NearlyIncreasing<T> {
    let mut best = NearlyIncreasing {
        epsilon: T::one(),
        m: 1,
        n: 1,
    };
    let Some(&first) = c.first() else {
        return best;
    };
    let (mut run_max, mut arg_max) = (first, 0usize);
    for (i, &x) in c.iter().enumerate() {
        if x > run_max {
            run_max = x;
            arg_max = i;
        }
        let ratio = x / run_max;
        if ratio < best.epsilon {
            best = NearlyIncreasing {
                epsilon: ratio,
                m: arg_max + 1,
                n: i + 1,
            };
        }
    }
    best
}

/// Heuristic scan of `sum a_n^(1+s) m_n^(-s)` for each `s`. `holds` means
/// the series looks convergent for that `s`.
pub fn condition_iii_scan<T: Scalar>(a: &[T], m: &[T], s_grid: &[f64]) -> Result<Vec<TestVerdict>, HardyError> {
    if a.len() != m.len() {
        return Err(HardyError::InvalidArgument(format!(
            "sequence has {} terms but prefix means have {}",
            a.len(),
            m.len()
        )));
    }
    if let Some(s) = s_grid.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(HardyError::InvalidArgument(format!("s must be positive, got {s}")));
    }
    Ok(s_grid
        .iter()
        .map(|&s| {
            let st = T::lit(s);
            let terms: Vec<T> = a.iter().zip(m).map(|(&x, &mx)| x * (x / mx).powf(st)).collect();
            let mut v = TestVerdict::new(format!("condition_iii(s={s})"), Holds::Inconclusive)
                .with("s", s)
                .with("heuristic", true);
            match classify_decades(&terms) {
                Some(ev) => {
                    v.holds = match ev.class {
                        DecadeClass::Convergent => Holds::Holds,
                        DecadeClass::Divergent => Holds::Fails,
                        DecadeClass::Inconclusive => Holds::Inconclusive,
                    };
                    v.set("decades", json!(ev));
                }
                None => v.set("note", "prefix shorter than 100 terms"),
            }
            v
        })
        .collect())
}

/// Checks `n * m_n >= C (ln n)^D` for every `n` in `[n0, N]`.
pub fn log_growth_check<T: Scalar>(m: &[T], c: f64, d: f64, n0: usize, n: usize) -> Result<TestVerdict, HardyError> {
    if !(n > n0 && n0 >= 2) {
        return Err(HardyError::InvalidArgument(format!("need N > n0 >= 2, got n0 = {n0}, N = {n}")));
    }
    if !(c > 0.0 && d > 0.0) {
        return Err(HardyError::InvalidArgument(format!("C and D must be positive, got C = {c}, D = {d}")));
    }
    if m.len() < n {
        return Err(HardyError::InvalidArgument(format!("only {} prefix means for N = {n}", m.len())));
    }
    let base = TestVerdict::new("log_growth", Holds::Holds)
        .with("C", c)
        .with("D", d)
        .with("n0", n0)
        .with("N", n);
    let (ct, dt) = (T::lit(c), T::lit(d));
    let mut tightest = (f64::INFINITY, n0);
    for k in n0..=n {
        let kt = T::from_index(k);
        let lhs = kt * m[k - 1];
        let rhs = ct * kt.ln().powf(dt);
        if lhs < rhs {
            return Ok(TestVerdict {
                holds: Holds::Fails,
                ..base
            }
            .with("first_violation", k)
            .with("lhs", lhs.as_f64())
            .with("rhs", rhs.as_f64()));
        }
        let margin = (lhs / rhs).as_f64();
        if margin < tightest.0 {
            tightest = (margin, k);
        }
    }
    Ok(base.with("min_ratio", tightest.0).with("min_ratio_at", tightest.1))
}
