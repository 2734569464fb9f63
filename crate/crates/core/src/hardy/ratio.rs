use serde::Serialize;

use super::HardyError;
use crate::means::{prefix_means_of, MeanSpec};
use crate::scalar::Scalar;
use crate::sequence::{SeqSpec, SeriesBuffer};

/// `sum_{n<=N} M(a_1..a_n) / sum_{n<=N} a_n` with both compensated partial sums.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardyRatio<T> {
    pub ratio: T,
    pub mean_sum: T,
    pub seq_sum: T,
    pub mean_partial_sums: Vec<T>,
    pub seq_partial_sums: Vec<T>,
}

pub fn hardy_ratio<T: Scalar>(spec: &MeanSpec, a: &SeqSpec, n: usize) -> Result<HardyRatio<T>, HardyError> {
    if n == 0 {
        return Err(HardyError::InvalidArgument("N must be at least 1".into()));
    }
    let seq = SeriesBuffer::<T>::materialize(a, n)?;
    let means = SeriesBuffer::from_terms(prefix_means_of(spec, seq.terms())?);
    let (mean_sum, seq_sum) = (means.total(), seq.total());
    Ok(HardyRatio {
        ratio: mean_sum / seq_sum,
        mean_sum,
        seq_sum,
        mean_partial_sums: means.partial_sums().to_vec(),
        seq_partial_sums: seq.partial_sums().to_vec(),
    })
}

/// `c_n = M(a_1..a_n) / a_n` for `n = 1..=N`.
pub fn ratio_sequence<T: Scalar>(spec: &MeanSpec, a: &SeqSpec, n: usize) -> Result<Vec<T>, HardyError> {
    let terms = a.terms::<T>(n)?;
    ratio_sequence_of(spec, &terms)
}

pub fn ratio_sequence_of<T: Scalar>(spec: &MeanSpec, a: &[T]) -> Result<Vec<T>, HardyError> {
    let mut acc = spec.accumulator::<T>();
    a.iter()
        .map(|&x| {
            acc.push(x)?;
            Ok(acc.value()? / x)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_on_decreasing_is_exactly_one() {
        let r = hardy_ratio::<f64>(&MeanSpec::min(), &SeqSpec::geometric(0.5).unwrap(), 50).unwrap();
        assert_eq!(r.ratio, 1.0);
    }

    #[test]
    fn max_on_harmonic() {
        let r = hardy_ratio::<f64>(&MeanSpec::max(), &SeqSpec::harmonic(), 100).unwrap();
        // 100 / H_100, H_100 = 5.187377517639620...
        assert!((r.ratio - 19.277_563_597_396_006).abs() < 1e-12);
        assert_eq!(r.mean_sum, 100.0);
    }

    #[test]
    fn ratio_sequence_examples() {
        let c = ratio_sequence::<f64>(&MeanSpec::arithmetic(), &SeqSpec::harmonic(), 3).unwrap();
        assert!((c[2] - 11.0 / 6.0).abs() < 1e-15);
        let g = ratio_sequence::<f64>(&MeanSpec::geometric(), &SeqSpec::harmonic(), 2).unwrap();
        assert!((g[1] - 2f64.sqrt()).abs() < 1e-15);
        let m = ratio_sequence::<f64>(&MeanSpec::min(), &SeqSpec::power_law(1.5).unwrap(), 100).unwrap();
        assert!(m.iter().all(|&x| x == 1.0));
    }
}
