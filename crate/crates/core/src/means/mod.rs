//! Mean families, batch and streaming evaluation, and sampled axiom checks.

mod accumulator;
mod axioms;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use accumulator::MeanAccumulator;
pub use axioms::{check_axioms, Axiom, AxiomResult, PropertyReport, Witness};

use crate::genparse::{Generator, GeneratorError, DEFAULT_DOMAIN};
use crate::scalar::Scalar;
use crate::sequence::{SeqError, SeqSpec};
use crate::summation::kahan_sum;

#[derive(Debug, Clone, Error)]
pub enum MeanError {
    #[error("cannot take the mean of an empty vector")]
    Empty,
    #[error("entry {index} is not a positive finite number: {value}")]
    NonPositive { index: usize, value: f64 },
    #[error("power mean exponent must be finite, got {0}")]
    InvalidExponent(f64),
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Sequence(#[from] SeqError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeanFamily {
    Power(f64),
    Geometric,
    Arithmetic,
    Harmonic,
    Min,
    Max,
    Quasiarithmetic(Generator),
}

/// Declarative description of a mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeanSpecRepr", into = "MeanSpecRepr")]
pub struct MeanSpec {
    pub family: MeanFamily,
    pub label: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
enum FamilyRepr {
    Power {
        p: f64,
    },
    Geometric,
    Arithmetic,
    Harmonic,
    Min,
    Max,
    Quasiarithmetic {
        generator: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        domain: Option<[f64; 2]>,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MeanSpecRepr {
    #[serde(flatten)]
    family: FamilyRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

impl TryFrom<MeanSpecRepr> for MeanSpec {
    type Error = MeanError;

    fn try_from(repr: MeanSpecRepr) -> Result<Self, MeanError> {
        let family = match repr.family {
            FamilyRepr::Power { p } => MeanFamily::Power(p),
            FamilyRepr::Geometric => MeanFamily::Geometric,
            FamilyRepr::Arithmetic => MeanFamily::Arithmetic,
            FamilyRepr::Harmonic => MeanFamily::Harmonic,
            FamilyRepr::Min => MeanFamily::Min,
            FamilyRepr::Max => MeanFamily::Max,
            FamilyRepr::Quasiarithmetic { generator, domain } => {
                let domain = domain.map_or(DEFAULT_DOMAIN, |[lo, hi]| (lo, hi));
                MeanFamily::Quasiarithmetic(Generator::with_domain(&generator, domain)?)
            }
        };
        let mut spec = MeanSpec::new(family)?;
        if let Some(label) = repr.label {
            spec.label = label;
        }
        Ok(spec)
    }
}

impl From<MeanSpec> for MeanSpecRepr {
    fn from(spec: MeanSpec) -> Self {
        let family = match &spec.family {
            MeanFamily::Power(p) => FamilyRepr::Power { p: *p },
            MeanFamily::Geometric => FamilyRepr::Geometric,
            MeanFamily::Arithmetic => FamilyRepr::Arithmetic,
            MeanFamily::Harmonic => FamilyRepr::Harmonic,
            MeanFamily::Min => FamilyRepr::Min,
            MeanFamily::Max => FamilyRepr::Max,
            MeanFamily::Quasiarithmetic(g) => FamilyRepr::Quasiarithmetic {
                generator: g.text().to_string(),
                domain: (g.domain() != DEFAULT_DOMAIN).then(|| [g.domain().0, g.domain().1]),
            },
        };
        let label = (spec.label != default_label(&spec.family)).then_some(spec.label);
        MeanSpecRepr { family, label }
    }
}

fn default_label(family: &MeanFamily) -> String {
    match family {
        MeanFamily::Power(p) => format!("power:{p}"),
        MeanFamily::Geometric => "geometric".into(),
        MeanFamily::Arithmetic => "arithmetic".into(),
        MeanFamily::Harmonic => "harmonic".into(),
        MeanFamily::Min => "min".into(),
        MeanFamily::Max => "max".into(),
        MeanFamily::Quasiarithmetic(g) => format!("quasiarithmetic:{}", g.text()),
    }
}

impl MeanSpec {
    pub fn new(family: MeanFamily) -> Result<Self, MeanError> {
        if let MeanFamily::Power(p) = family {
            if !p.is_finite() {
                return Err(MeanError::InvalidExponent(p));
            }
        }
        let label = default_label(&family);
        Ok(Self { family, label })
    }

    pub fn power(p: f64) -> Result<Self, MeanError> {
        Self::new(MeanFamily::Power(p))
    }

    pub fn geometric() -> Self {
        Self::new(MeanFamily::Geometric).unwrap()
    }

    pub fn arithmetic() -> Self {
        Self::new(MeanFamily::Arithmetic).unwrap()
    }

    pub fn harmonic() -> Self {
        Self::new(MeanFamily::Harmonic).unwrap()
    }

    pub fn min() -> Self {
        Self::new(MeanFamily::Min).unwrap()
    }

    pub fn max() -> Self {
        Self::new(MeanFamily::Max).unwrap()
    }

    pub fn quasiarithmetic(generator: &str) -> Result<Self, MeanError> {
        Self::new(MeanFamily::Quasiarithmetic(Generator::new(generator)?))
    }

    /// The built-in catalogue used by the axiom and Hardy-constant suites.
    pub fn builtins() -> Vec<MeanSpec> {
        vec![
            Self::power(0.5).unwrap(),
            Self::geometric(),
            Self::arithmetic(),
            Self::harmonic(),
            Self::min(),
            Self::max(),
        ]
    }

    /// Power means with `p` in {-1, 0, 1} collapse to their named family.
    pub(crate) fn canonical_family(&self) -> &MeanFamily {
        match self.family {
            MeanFamily::Power(0.0) => &MeanFamily::Geometric,
            MeanFamily::Power(1.0) => &MeanFamily::Arithmetic,
            MeanFamily::Power(-1.0) => &MeanFamily::Harmonic,
            ref f => f,
        }
    }

    pub fn accumulator<T: Scalar>(&self) -> MeanAccumulator<T> {
        MeanAccumulator::new(self.clone())
    }
}

/// Nonempty vector of positive finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct PositiveVector<T>(Vec<T>);

impl<T: Scalar> PositiveVector<T> {
    pub fn new(entries: Vec<T>) -> Result<Self, MeanError> {
        validate(&entries)?;
        Ok(Self(entries))
    }

    pub fn entries(&self) -> &[T] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }
}

impl<T> AsRef<[T]> for PositiveVector<T> {
    fn as_ref(&self) -> &[T] {
        &self.0
    }
}

fn validate<T: Scalar>(v: &[T]) -> Result<(), MeanError> {
    if v.is_empty() {
        return Err(MeanError::Empty);
    }
    match v.iter().position(|x| !(*x > T::zero() && x.is_finite())) {
        Some(index) => Err(MeanError::NonPositive {
            index,
            value: v[index].as_f64(),
        }),
        None => Ok(()),
    }
}

/// Anything that maps finite positive vectors to a mean value.
///
/// Implementors only need `eval`; `prefix_values` defaults to batch
/// evaluation of every prefix.
pub trait Mean<T: Scalar> {
    fn eval(&self, v: &[T]) -> Result<T, MeanError>;

    fn prefix_values(&self, a: &[T]) -> Result<Vec<T>, MeanError> {
        (1..=a.len()).map(|n| self.eval(&a[..n])).collect()
    }
}

impl<T: Scalar> Mean<T> for MeanSpec {
    fn eval(&self, v: &[T]) -> Result<T, MeanError> {
        validate(v)?;
        eval_unchecked(self, v)
    }

    fn prefix_values(&self, a: &[T]) -> Result<Vec<T>, MeanError> {
        prefix_means_of(self, a)
    }
}

pub fn eval_mean<T: Scalar>(spec: &MeanSpec, v: &PositiveVector<T>) -> Result<T, MeanError> {
    eval_unchecked(spec, v.entries())
}

fn min_max<T: Scalar>(v: &[T]) -> (T, T) {
    v.iter()
        .fold((v[0], v[0]), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

fn eval_unchecked<T: Scalar>(spec: &MeanSpec, v: &[T]) -> Result<T, MeanError> {
    let (lo, hi) = min_max(v);
    let n = T::from_index(v.len());
    let value = match spec.canonical_family() {
        MeanFamily::Min => lo,
        MeanFamily::Max => hi,
        MeanFamily::Arithmetic => kahan_sum(v.iter().copied()) / n,
        MeanFamily::Geometric => (kahan_sum(v.iter().map(|x| x.ln())) / n).exp(),
        MeanFamily::Harmonic => lo * n / kahan_sum(v.iter().map(|&x| lo / x)),
        &MeanFamily::Power(p) => {
            // scale by the entry that dominates the sum so nothing overflows
            let p = T::lit(p);
            let s = if p > T::zero() { hi } else { lo };
            let avg = kahan_sum(v.iter().map(|&x| (x / s).powf(p))) / n;
            s * avg.powf(p.recip())
        }
        MeanFamily::Quasiarithmetic(g) => {
            for &x in v {
                g.in_domain(x)?;
            }
            let images = v.iter().map(|&x| g.apply(x)).collect::<Result<Vec<_>, _>>()?;
            let avg = kahan_sum(images) / n;
            g.invert(avg, lo, hi)?
        }
    };
    Ok(value.max(lo).min(hi))
}

/// `M(a_1), M(a_1, a_2), ..., M(a_1, ..., a_N)` in one streaming pass.
pub fn prefix_means<T: Scalar>(spec: &MeanSpec, seq: &SeqSpec, n: usize) -> Result<Vec<T>, MeanError> {
    let terms = seq.terms::<T>(n)?;
    prefix_means_of(spec, &terms)
}

pub fn prefix_means_of<T: Scalar>(spec: &MeanSpec, a: &[T]) -> Result<Vec<T>, MeanError> {
    let mut acc = spec.accumulator::<T>();
    a.iter()
        .map(|&x| {
            acc.push(x)?;
            acc.value()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: &[f64]) -> PositiveVector<f64> {
        PositiveVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn worked_values() {
        assert_eq!(eval_mean(&MeanSpec::arithmetic(), &pv(&[1.0, 2.0, 3.0])).unwrap(), 2.0);
        let p = eval_mean(&MeanSpec::power(0.5).unwrap(), &pv(&[1.0, 4.0])).unwrap();
        assert!((p - 2.25).abs() < 1e-15);
        let g = eval_mean(&MeanSpec::geometric(), &pv(&[2.0, 8.0])).unwrap();
        assert!((g - 4.0).abs() < 1e-15);
        let q = eval_mean(&MeanSpec::quasiarithmetic("log(x)").unwrap(), &pv(&[2.0, 8.0])).unwrap();
        assert!((q - g).abs() < 1e-15);
        let h = eval_mean(&MeanSpec::harmonic(), &pv(&[1.0, 3.0])).unwrap();
        assert!((h - 1.5).abs() < 1e-15);
    }

    #[test]
    fn invalid_vectors() {
        assert!(matches!(PositiveVector::<f64>::new(vec![]), Err(MeanError::Empty)));
        assert!(matches!(
            PositiveVector::new(vec![1.0, 0.0]),
            Err(MeanError::NonPositive { index: 1, .. })
        ));
        assert!(MeanSpec::power(f64::NAN).is_err());
    }

    #[test]
    fn generator_domain_is_enforced() {
        let spec: MeanSpec =
            serde_json::from_str(r#"{"family":"quasiarithmetic","generator":"x^2","domain":[1,10]}"#).unwrap();
        assert!(matches!(
            Mean::<f64>::eval(&spec, &[0.5, 2.0]),
            Err(MeanError::Generator(GeneratorError::OutsideDomain { .. }))
        ));
        assert!(Mean::<f64>::eval(&spec, &[1.0, 7.0]).is_ok());
    }

    #[test]
    fn running_minimum() {
        let m = prefix_means_of(&MeanSpec::min(), &[3.0f64, 1.0, 2.0]).unwrap();
        assert_eq!(m, vec![3.0, 1.0, 1.0]);
    }

    #[test]
    fn arithmetic_prefix_of_harmonic() {
        let m: Vec<f64> = prefix_means(&MeanSpec::arithmetic(), &SeqSpec::harmonic(), 3).unwrap();
        let oracle = [1.0, 1.5 / 2.0, (11.0 / 6.0) / 3.0];
        for (x, y) in m.iter().zip(oracle) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!((m[2] - 0.61111).abs() < 1e-5);
    }

    #[test]
    fn extreme_entries_do_not_overflow() {
        let v = [1e-300, 1e-290, 1e300];
        for spec in [MeanSpec::geometric(), MeanSpec::power(3.0).unwrap(), MeanSpec::power(-3.0).unwrap()] {
            let m = Mean::<f64>::eval(&spec, &v).unwrap();
            assert!((1e-300..=1e300).contains(&m), "{spec:?} gave {m}");
        }
        let g = Mean::<f64>::eval(&MeanSpec::geometric(), &v).unwrap();
        assert!((g / 10f64.powf(-290.0 / 3.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn json_field_names() {
        let p = MeanSpec::power(0.5).unwrap();
        assert_eq!(serde_json::to_string(&p).unwrap(), r#"{"family":"power","p":0.5}"#);
        let q = MeanSpec::quasiarithmetic("log(x)").unwrap();
        assert_eq!(
            serde_json::to_string(&q).unwrap(),
            r#"{"family":"quasiarithmetic","generator":"log(x)"}"#
        );
        let back: MeanSpec = serde_json::from_str(r#"{"family":"quasiarithmetic","generator":"log(x)"}"#).unwrap();
        assert_eq!(back, q);
        assert!(serde_json::from_str::<MeanSpec>(r#"{"family":"lehmer"}"#).is_err());
        assert!(serde_json::from_str::<MeanSpec>(r#"{"family":"quasiarithmetic","generator":"log("}"#).is_err());
    }

    #[test]
    fn f32_evaluation() {
        let v = [1.0f32, 4.0];
        let m = Mean::<f32>::eval(&MeanSpec::power(0.5).unwrap(), &v).unwrap();
        assert!((m - 2.25).abs() < 1e-6);
    }
}
