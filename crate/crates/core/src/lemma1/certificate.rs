use serde::Serialize;

use crate::means::{Mean, MeanError};
use crate::scalar::Scalar;

/// Relative slack allowed when comparing the two sides of a certificate.
pub const CERTIFICATE_SLACK: f64 = 1e-12;

/// Outcome of checking `M(b_1..b_n) >= M(a_1..a_n) r_n = c_n a_n r_n` for
/// every prefix, where `b = a r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateCheck {
    pub checked: usize,
    pub holds: bool,
    /// Smallest `lhs / rhs - 1` over all prefixes.
    pub min_relative_margin: f64,
    /// `(n, lhs, rhs)` for the first prefix that fails.
    pub first_violation: Option<(usize, f64, f64)>,
    #[serde(skip)]
    pub per_index: Vec<bool>,
}

/// Checks the certificate for any mean given the prefix means of `a` and
/// the nonincreasing weights `r`. Returns the prefix means of `b` alongside
/// the check. Monotone means always pass; non-monotone ones need not.
pub fn certify<T: Scalar, M: Mean<T> + ?Sized>(
    mean: &M,
    a: &[T],
    mean_a: &[T],
    r: &[T],
) -> Result<(CertificateCheck, Vec<T>), MeanError> {
    let n = a.len().min(r.len()).min(mean_a.len());
    let b: Vec<T> = a[..n].iter().zip(&r[..n]).map(|(&x, &y)| x * y).collect();
    let mean_b = mean.prefix_values(&b)?;
    let mut per_index = Vec::with_capacity(n);
    let mut min_margin = f64::INFINITY;
    let mut first_violation = None;
    for i in 0..n {
        let lhs = mean_b[i].as_f64();
        let rhs = mean_a[i].as_f64() * r[i].as_f64();
        let ok = lhs >= rhs * (1.0 - CERTIFICATE_SLACK);
        min_margin = min_margin.min(lhs / rhs - 1.0);
        if !ok && first_violation.is_none() {
            first_violation = Some((i + 1, lhs, rhs));
        }
        per_index.push(ok);
    }
    Ok((
        CertificateCheck {
            checked: n,
            holds: first_violation.is_none(),
            min_relative_margin: min_margin,
            first_violation,
            per_index,
        },
        mean_b,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::means::MeanSpec;

    /// Lehmer mean of order 2: a mean that is not monotone.
    struct Lehmer2;

    impl Mean<f64> for Lehmer2 {
        fn eval(&self, v: &[f64]) -> Result<f64, MeanError> {
            Ok(v.iter().map(|x| x * x).sum::<f64>() / v.iter().sum::<f64>())
        }
    }

    #[test]
    fn monotone_means_certify() {
        let a: Vec<f64> = (1..=200).map(|n| 1.0 / n as f64).collect();
        let r: Vec<f64> = (1..=200).map(|n| 1.0 / (n as f64).sqrt()).collect();
        for spec in MeanSpec::builtins() {
            let mean_a = spec.prefix_values(&a).unwrap();
            let (check, _) = certify(&spec, &a, &mean_a, &r).unwrap();
            assert!(check.holds, "{spec:?}: {check:?}");
        }
    }

    #[test]
    fn non_monotone_mean_is_caught() {
        let a = [0.01, 1.0];
        let r = [10.0, 1.0];
        let mean_a = Lehmer2.prefix_values(&a).unwrap();
        let (check, _) = certify(&Lehmer2, &a, &mean_a, &r).unwrap();
        assert!(!check.holds);
        assert_eq!(check.first_violation.unwrap().0, 2);
    }
}
