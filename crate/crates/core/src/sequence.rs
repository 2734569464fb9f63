//! Rule-defined positive sequences and their materialized prefixes.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::genparse::{parse_with_variable, EvalError, Expr, ParseError};
use crate::scalar::Scalar;
use crate::summation::KahanSum;

#[derive(Debug, Clone, Error)]
pub enum SeqError {
    #[error("term {n} is not strictly positive and finite: {value}")]
    NonPositive { n: usize, value: f64 },
    #[error("explicit sequence has {len} terms, term {n} requested")]
    Exhausted { n: usize, len: usize },
    #[error("invalid sequence parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("custom sequence failed at term {n}")]
    Eval { n: usize, source: EvalError },
}

/// What is known about `sum a_n` without summing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Divergence {
    Diverges,
    Converges,
    Unknown,
}

#[derive(Debug, Clone)]
pub enum SeqRule {
    /// `a_n = 1/n`
    Harmonic,
    /// `a_n = n^(-alpha)`
    PowerLaw(f64),
    Constant(f64),
    /// `a_n = q^n`
    Geometric(f64),
    Explicit(Vec<f64>),
    /// Expression in the index variable `n`.
    Custom { text: String, expr: Arc<Expr> },
}

impl PartialEq for SeqRule {
    fn eq(&self, other: &Self) -> bool {
        SeqRepr::from(self) == SeqRepr::from(other)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeqSpecRepr", into = "SeqSpecRepr")]
pub struct SeqSpec {
    pub rule: SeqRule,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
enum SeqRepr {
    Harmonic,
    PowerLaw { alpha: f64 },
    Constant { value: f64 },
    Geometric { q: f64 },
    Explicit { values: Vec<f64> },
    Custom { expr: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SeqSpecRepr {
    #[serde(flatten)]
    rule: SeqRepr,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
}

impl From<&SeqRule> for SeqRepr {
    fn from(rule: &SeqRule) -> Self {
        match rule {
            SeqRule::Harmonic => SeqRepr::Harmonic,
            SeqRule::PowerLaw(alpha) => SeqRepr::PowerLaw { alpha: *alpha },
            SeqRule::Constant(value) => SeqRepr::Constant { value: *value },
            SeqRule::Geometric(q) => SeqRepr::Geometric { q: *q },
            SeqRule::Explicit(values) => SeqRepr::Explicit {
                values: values.clone(),
            },
            SeqRule::Custom { text, .. } => SeqRepr::Custom { expr: text.clone() },
        }
    }
}

impl TryFrom<SeqSpecRepr> for SeqSpec {
    type Error = SeqError;

    fn try_from(repr: SeqSpecRepr) -> Result<Self, SeqError> {
        let rule = match repr.rule {
            SeqRepr::Harmonic => SeqRule::Harmonic,
            SeqRepr::PowerLaw { alpha } => SeqRule::PowerLaw(alpha),
            SeqRepr::Constant { value } => SeqRule::Constant(value),
            SeqRepr::Geometric { q } => SeqRule::Geometric(q),
            SeqRepr::Explicit { values } => SeqRule::Explicit(values),
            SeqRepr::Custom { expr } => SeqRule::custom(&expr)?,
        };
        let mut spec = SeqSpec::new(rule)?;
        if let Some(label) = repr.label {
            spec.label = label;
        }
        Ok(spec)
    }
}

impl From<SeqSpec> for SeqSpecRepr {
    fn from(spec: SeqSpec) -> Self {
        let label = (spec.label != spec.rule.default_label()).then_some(spec.label);
        SeqSpecRepr {
            rule: SeqRepr::from(&spec.rule),
            label,
        }
    }
}

impl SeqRule {
    pub fn custom(text: &str) -> Result<Self, SeqError> {
        let expr = parse_with_variable(text, "n")?;
        Ok(SeqRule::Custom {
            text: text.to_string(),
            expr: Arc::new(expr),
        })
    }

    fn default_label(&self) -> String {
        match self {
            SeqRule::Harmonic => "harmonic".into(),
            SeqRule::PowerLaw(alpha) => format!("powerlaw:{alpha}"),
            SeqRule::Constant(v) => format!("constant:{v}"),
            SeqRule::Geometric(q) => format!("geometric:{q}"),
            SeqRule::Explicit(values) => format!("explicit[{}]", values.len()),
            SeqRule::Custom { text, .. } => format!("custom:{text}"),
        }
    }
}

impl SeqSpec {
    pub fn new(rule: SeqRule) -> Result<Self, SeqError> {
        let bad = |msg: String| Err(SeqError::InvalidParameter(msg));
        match &rule {
            SeqRule::PowerLaw(alpha) if !alpha.is_finite() => return bad(format!("alpha = {alpha}")),
            SeqRule::Constant(v) if !(*v > 0.0 && v.is_finite()) => return bad(format!("constant = {v}")),
            SeqRule::Geometric(q) if !(*q > 0.0 && q.is_finite()) => return bad(format!("q = {q}")),
            SeqRule::Explicit(values) => {
                if values.is_empty() {
                    return bad("explicit sequence is empty".into());
                }
                if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
                    return Err(SeqError::NonPositive { n: i + 1, value: *v });
                }
            }
            _ => {}
        }
        let label = rule.default_label();
        Ok(Self { rule, label })
    }

    pub fn harmonic() -> Self {
        Self::new(SeqRule::Harmonic).unwrap()
    }

    pub fn power_law(alpha: f64) -> Result<Self, SeqError> {
        Self::new(SeqRule::PowerLaw(alpha))
    }

    pub fn constant(value: f64) -> Result<Self, SeqError> {
        Self::new(SeqRule::Constant(value))
    }

    pub fn geometric(q: f64) -> Result<Self, SeqError> {
        Self::new(SeqRule::Geometric(q))
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self, SeqError> {
        Self::new(SeqRule::Explicit(values))
    }

    pub fn custom(text: &str) -> Result<Self, SeqError> {
        Self::new(SeqRule::custom(text)?)
    }

    /// Term `a_n` for `n >= 1`.
    pub fn term<T: Scalar>(&self, n: usize) -> Result<T, SeqError> {
        assert!(n >= 1, "sequences are indexed from 1");
        let nn = T::from_index(n);
        let value = match &self.rule {
            SeqRule::Harmonic => nn.recip(),
            SeqRule::PowerLaw(alpha) => nn.powf(-T::lit(*alpha)),
            SeqRule::Constant(v) => T::lit(*v),
            SeqRule::Geometric(q) => T::lit(*q).powf(nn),
            SeqRule::Explicit(values) => {
                let v = values.get(n - 1).ok_or(SeqError::Exhausted { n, len: values.len() })?;
                T::lit(*v)
            }
            SeqRule::Custom { expr, .. } => expr.eval(nn).map_err(|source| SeqError::Eval { n, source })?,
        };
        if !(value > T::zero() && value.is_finite()) {
            return Err(SeqError::NonPositive {
                n,
                value: value.as_f64(),
            });
        }
        Ok(value)
    }

    /// Terms `a_1, ..., a_n`.
    pub fn terms<T: Scalar>(&self, n: usize) -> Result<Vec<T>, SeqError> {
        (1..=n).map(|k| self.term(k)).collect()
    }

    /// Analytic status of `sum a_n`; `Unknown` for explicit and custom rules.
    pub fn sum_divergence(&self) -> Divergence {
        match &self.rule {
            SeqRule::Harmonic | SeqRule::Constant(_) => Divergence::Diverges,
            SeqRule::PowerLaw(alpha) if *alpha <= 1.0 => Divergence::Diverges,
            SeqRule::PowerLaw(_) => Divergence::Converges,
            SeqRule::Geometric(q) if *q < 1.0 => Divergence::Converges,
            SeqRule::Geometric(_) => Divergence::Diverges,
            SeqRule::Explicit(_) | SeqRule::Custom { .. } => Divergence::Unknown,
        }
    }

    /// `Some(true)` when `inf a_n = 0` is known analytically, `Some(false)`
    /// when it is known to be positive.
    pub fn infimum_is_zero(&self) -> Option<bool> {
        match &self.rule {
            SeqRule::Harmonic => Some(true),
            SeqRule::PowerLaw(alpha) => Some(*alpha > 0.0),
            SeqRule::Constant(_) => Some(false),
            SeqRule::Geometric(q) => Some(*q < 1.0),
            SeqRule::Explicit(_) | SeqRule::Custom { .. } => None,
        }
    }

    /// True when the rule is known to produce a nonincreasing sequence.
    pub fn is_nonincreasing(&self) -> bool {
        match &self.rule {
            SeqRule::Harmonic | SeqRule::Constant(_) => true,
            SeqRule::PowerLaw(alpha) => *alpha >= 0.0,
            SeqRule::Geometric(q) => *q <= 1.0,
            SeqRule::Explicit(v) => v.windows(2).all(|w| w[1] <= w[0]),
            SeqRule::Custom { .. } => false,
        }
    }
}

/// A materialized prefix `a_1..a_N` with compensated running sums.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesBuffer<T> {
    terms: Vec<T>,
    partial_sums: Vec<T>,
}

impl<T: Scalar> SeriesBuffer<T> {
    pub fn from_terms(terms: Vec<T>) -> Self {
        let mut acc = KahanSum::new();
        let partial_sums = terms
            .iter()
            .map(|&t| {
                acc.add(t);
                acc.value()
            })
            .collect();
        Self { terms, partial_sums }
    }

    pub fn materialize(seq: &SeqSpec, n: usize) -> Result<Self, SeqError> {
        Ok(Self::from_terms(seq.terms(n)?))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[T] {
        &self.terms
    }

    pub fn partial_sums(&self) -> &[T] {
        &self.partial_sums
    }

    /// Sum of the first `n` terms (`n = 0` gives zero).
    pub fn sum_to(&self, n: usize) -> T {
        if n == 0 {
            T::zero()
        } else {
            self.partial_sums[n - 1]
        }
    }

    pub fn total(&self) -> T {
        self.sum_to(self.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_generate_expected_terms() {
        assert_eq!(SeqSpec::harmonic().terms::<f64>(3).unwrap(), vec![1.0, 0.5, 1.0 / 3.0]);
        assert_eq!(SeqSpec::power_law(2.0).unwrap().term::<f64>(4).unwrap(), 1.0 / 16.0);
        assert_eq!(SeqSpec::geometric(0.5).unwrap().term::<f64>(3).unwrap(), 0.125);
        assert_eq!(SeqSpec::custom("1/n^2").unwrap().term::<f64>(2).unwrap(), 0.25);
    }

    #[test]
    fn explicit_sequences_validate() {
        assert!(matches!(
            SeqSpec::explicit(vec![1.0, -2.0]),
            Err(SeqError::NonPositive { n: 2, .. })
        ));
        let s = SeqSpec::explicit(vec![3.0, 1.0]).unwrap();
        assert!(matches!(s.term::<f64>(3), Err(SeqError::Exhausted { n: 3, len: 2 })));
    }

    #[test]
    fn custom_rule_must_stay_positive() {
        let s = SeqSpec::custom("1 - n").unwrap();
        assert!(matches!(s.term::<f64>(1), Err(SeqError::NonPositive { n: 1, .. })));
    }

    #[test]
    fn divergence_is_declared_analytically() {
        assert_eq!(SeqSpec::harmonic().sum_divergence(), Divergence::Diverges);
        assert_eq!(SeqSpec::power_law(1.0).unwrap().sum_divergence(), Divergence::Diverges);
        assert_eq!(SeqSpec::power_law(1.5).unwrap().sum_divergence(), Divergence::Converges);
        assert_eq!(SeqSpec::geometric(0.5).unwrap().sum_divergence(), Divergence::Converges);
        assert_eq!(SeqSpec::constant(1.0).unwrap().sum_divergence(), Divergence::Diverges);
        assert_eq!(SeqSpec::custom("1/n").unwrap().sum_divergence(), Divergence::Unknown);
    }

    #[test]
    fn json_shape() {
        let s = SeqSpec::power_law(0.5).unwrap();
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, r#"{"rule":"power_law","alpha":0.5}"#);
        let back: SeqSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        let custom: SeqSpec = serde_json::from_str(r#"{"rule":"custom","expr":"1/n","label":"h"}"#).unwrap();
        assert_eq!(custom.label, "h");
        assert!(serde_json::from_str::<SeqSpec>(r#"{"rule":"constant","value":0}"#).is_err());
    }

    #[test]
    fn buffer_sums() {
        let b = SeriesBuffer::<f64>::materialize(&SeqSpec::harmonic(), 3).unwrap();
        assert_eq!(b.len(), 3);
        assert!((b.total() - 11.0 / 6.0f64).abs() < 1e-15);
        assert_eq!(b.sum_to(0), 0.0);
        assert!(b.partial_sums().windows(2).all(|w| w[1] > w[0]));
    }
}
