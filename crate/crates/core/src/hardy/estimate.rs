//! Hardy-constant estimation from the trajectory `t_n = n * M(1, 1/2, ..., 1/n)`.

use serde::Serialize;

use super::HardyError;
use crate::means::MeanSpec;
use crate::scalar::Scalar;

pub const MIN_ESTIMATE_N: usize = 1000;
/// Largest last-step contraction `(t_j - t_{j-1}) / (t_{j-1} - t_{j-2})`
/// for which Aitken extrapolation of the trajectory is trusted.
pub const MAX_CONTRACTION: f64 = 0.95;
/// Smallest contraction (and slope t-statistic, fit quality) read as logarithmic growth.
pub const MIN_LOG_CONTRACTION: f64 = 0.95;
pub const MIN_SLOPE_T: f64 = 10.0;
pub const MIN_R_SQUARED: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateOptions {
    pub tol: f64,
    pub checkpoints_per_decade: f64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            tol: 1e-3,
            checkpoints_per_decade: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EstimateVerdict {
    Converged,
    Diverging,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Checkpoint<T> {
    pub n: usize,
    pub value: T,
}

/// Least-squares fit `t = intercept + slope * ln n` over the checkpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogFit {
    pub intercept: f64,
    pub slope: f64,
    pub slope_t: f64,
    pub r_squared: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Relative change between the last two checkpoints.
    pub last_drift: f64,
    /// Ratio of the last two trajectory increments.
    pub contraction: Option<f64>,
    /// Aitken-extrapolated limit from the last three checkpoints.
    pub accelerated_limit: Option<f64>,
    /// Relative change between the last two extrapolated limits.
    pub accelerated_drift: Option<f64>,
    pub log_fit: Option<LogFit>,
    pub rule: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardyEstimate<T> {
    pub mean: MeanSpec,
    pub n: usize,
    pub options: EstimateOptions,
    pub trajectory: Vec<Checkpoint<T>>,
    #[serde(rename = "final")]
    pub final_value: T,
    pub verdict: EstimateVerdict,
    pub diagnostics: Diagnostics,
}

/// Checkpoints `round(10^(3 + j/per_decade))` up to `n`, always ending at
/// `n`. Grids with fewer than three points are extended downwards by the same
/// spacing.
pub fn checkpoints(n: usize, per_decade: f64) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    let top = (n as f64).log10();
    let mut j = 0usize;
    loop {
        let e = 3.0 + j as f64 / per_decade;
        if e > top + 1e-12 {
            break;
        }
        let c = (10f64.powf(e).round() as usize).min(n);
        if out.last() != Some(&c) {
            out.push(c);
        }
        j += 1;
    }
    if out.last() != Some(&n) {
        out.push(n);
    }
    let step = 10f64.powf(1.0 / per_decade);
    while out.len() < 3 {
        let below = (out[0] as f64 / step).round() as usize;
        if below == 0 || below >= out[0] {
            break;
        }
        out.insert(0, below);
    }
    out
}

/// Streams `M(1, 1/2, ..., 1/n)` up to `n` and records `t_n` at the
/// checkpoints. `t_n` is computed as `M(...) / a_n`, so that `Min` yields
/// exactly 1.
///
/// Verdict: `converged` when the relative drift over the last two
/// checkpoints is below `tol`, or when the trajectory contracts
/// geometrically and its Aitken-extrapolated limits drift less than `tol`;
/// `diverging` when `t = c1 + c2 ln n` fits with a significantly positive
/// slope and the increments do not contract; otherwise `inconclusive`.
pub fn hardy_constant_estimate<T: Scalar>(
    spec: &MeanSpec,
    n: usize,
    options: EstimateOptions,
) -> Result<HardyEstimate<T>, HardyError> {
    if n < MIN_ESTIMATE_N {
        return Err(HardyError::InvalidArgument(format!(
            "N = {n} is below the minimum {MIN_ESTIMATE_N}"
        )));
    }
    if !(options.checkpoints_per_decade > 0.0 && options.checkpoints_per_decade.is_finite()) {
        return Err(HardyError::InvalidArgument(format!(
            "checkpoints per decade must be positive, got {}",
            options.checkpoints_per_decade
        )));
    }
    let marks = checkpoints(n, options.checkpoints_per_decade);
    let mut acc = spec.accumulator::<T>();
    let mut trajectory = Vec::with_capacity(marks.len());
    let mut next = marks.iter().peekable();
    for k in 1..=n {
        let a_k = T::one() / T::from_index(k);
        acc.push(a_k)?;
        if next.peek() == Some(&&k) {
            next.next();
            trajectory.push(Checkpoint {
                n: k,
                value: acc.value()? / a_k,
            });
        }
    }
    let final_value = trajectory.last().expect("at least one checkpoint").value;
    let (verdict, diagnostics) = judge(&trajectory, options.tol);
    Ok(HardyEstimate {
        mean: spec.clone(),
        n,
        options,
        trajectory,
        final_value,
        verdict,
        diagnostics,
    })
}

fn aitken(t0: f64, t1: f64, t2: f64) -> Option<f64> {
    let (d1, d2) = (t1 - t0, t2 - t1);
    let denom = d2 - d1;
    (denom != 0.0 && denom.is_finite()).then(|| t2 - d2 * d2 / denom)
}

fn log_fit<T: Scalar>(traj: &[Checkpoint<T>]) -> Option<LogFit> {
    let m = traj.len();
    if m < 3 {
        return None;
    }
    let xs: Vec<f64> = traj.iter().map(|c| (c.n as f64).ln()).collect();
    let ys: Vec<f64> = traj.iter().map(|c| c.value.as_f64()).collect();
    let mf = m as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / mf, ys.iter().sum::<f64>() / mf);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    let se = (sse / (mf - 2.0) / sxx).sqrt();
    let slope_t = if se > 0.0 {
        slope / se
    } else if slope > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Some(LogFit {
        intercept,
        slope,
        slope_t,
        r_squared,
    })
}

fn judge<T: Scalar>(traj: &[Checkpoint<T>], tol: f64) -> (EstimateVerdict, Diagnostics) {
    let v: Vec<f64> = traj.iter().map(|c| c.value.as_f64()).collect();
    let m = v.len();
    let last_drift = if m >= 2 {
        (v[m - 1] - v[m - 2]).abs() / v[m - 1].abs()
    } else {
        f64::INFINITY
    };
    let contraction = (m >= 3).then(|| (v[m - 1] - v[m - 2]) / (v[m - 2] - v[m - 3]));
    let contraction = contraction.filter(|q| q.is_finite());
    let accelerated_limit = (m >= 3).then(|| aitken(v[m - 3], v[m - 2], v[m - 1])).flatten();
    let previous_limit = (m >= 4).then(|| aitken(v[m - 4], v[m - 3], v[m - 2])).flatten();
    let accelerated_drift = match (accelerated_limit, previous_limit) {
        (Some(a), Some(b)) if a != 0.0 => Some((a - b).abs() / a.abs()),
        _ => None,
    };
    let fit = log_fit(traj);

    let contracting = matches!(contraction, Some(q) if q > 0.0 && q <= MAX_CONTRACTION);
    let (verdict, rule) = if last_drift < tol {
        (EstimateVerdict::Converged, "last-checkpoint drift below tolerance")
    } else if contracting && matches!(accelerated_drift, Some(d) if d < tol) {
        (EstimateVerdict::Converged, "geometric contraction; extrapolated drift below tolerance")
    } else if matches!(fit, Some(f) if f.slope > 0.0 && f.slope_t > MIN_SLOPE_T && f.r_squared > MIN_R_SQUARED)
        && matches!(contraction, Some(q) if q >= MIN_LOG_CONTRACTION)
    {
        (EstimateVerdict::Diverging, "logarithmic growth with non-contracting increments")
    } else {
        (EstimateVerdict::Inconclusive, "neither convergence nor logarithmic growth established")
    };
    (
        verdict,
        Diagnostics {
            last_drift,
            contraction,
            accelerated_limit,
            accelerated_drift,
            log_fit: fit,
            rule: rule.to_string(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoint_grid() {
        assert_eq!(checkpoints(1000, 2.0), vec![100, 316, 1000]);
        assert_eq!(checkpoints(10_000, 2.0), vec![1000, 3162, 10_000]);
        assert_eq!(checkpoints(2000, 2.0), vec![316, 1000, 2000]);
        assert_eq!(checkpoints(20_000, 2.0), vec![1000, 3162, 10_000, 20_000]);
        assert_eq!(checkpoints(1_000_000, 1.0), vec![1000, 10_000, 100_000, 1_000_000]);
    }

    #[test]
    fn min_is_exactly_one() {
        for n in [1000, 1234, 54_321] {
            let est = hardy_constant_estimate::<f64>(&MeanSpec::min(), n, EstimateOptions::default()).unwrap();
            assert!(est.trajectory.iter().all(|c| c.value == 1.0));
            assert_eq!(est.final_value, 1.0);
            assert_eq!(est.verdict, EstimateVerdict::Converged);
        }
    }

    #[test]
    fn below_minimum_n() {
        assert!(hardy_constant_estimate::<f64>(&MeanSpec::min(), 999, EstimateOptions::default()).is_err());
    }

    #[test]
    fn arithmetic_trajectory_is_harmonic_numbers() {
        let est = hardy_constant_estimate::<f64>(&MeanSpec::arithmetic(), 10_000, EstimateOptions::default()).unwrap();
        for c in &est.trajectory {
            let h: f64 = (1..=c.n).map(|k| 1.0 / k as f64).sum();
            assert!((c.value - h).abs() / h < 1e-12);
        }
    }

    #[test]
    fn aitken_recovers_geometric_limit() {
        let l = aitken(1.0, 1.5, 1.75).unwrap();
        assert!((l - 2.0).abs() < 1e-15);
        assert!(aitken(1.0, 2.0, 3.0).is_none());
    }
}
