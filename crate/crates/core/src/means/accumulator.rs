use super::{MeanError, MeanFamily, MeanSpec};
use crate::scalar::Scalar;
use crate::summation::KahanSum;

#[derive(Debug, Clone)]
enum State<T> {
    Arithmetic(KahanSum<T>),
    /// Sum of logarithms.
    Geometric(KahanSum<T>),
    /// Sum of `(x / scale)^p`; the scale moves only when a term would overflow.
    Power { p: T, scale: T, sum: KahanSum<T> },
    Extremum,
    Quasiarithmetic(KahanSum<T>),
}

/// Streaming evaluator: after pushing `a_1..a_n`, [`value`](Self::value)
/// equals batch evaluation on that prefix.
#[derive(Debug, Clone)]
pub struct MeanAccumulator<T> {
    spec: MeanSpec,
    count: usize,
    min: T,
    max: T,
    state: State<T>,
}

impl<T: Scalar> MeanAccumulator<T> {
    pub fn new(spec: MeanSpec) -> Self {
        let state = match spec.canonical_family() {
            MeanFamily::Arithmetic => State::Arithmetic(KahanSum::new()),
            MeanFamily::Geometric => State::Geometric(KahanSum::new()),
            MeanFamily::Harmonic => State::Power {
                p: -T::one(),
                scale: T::zero(),
                sum: KahanSum::new(),
            },
            &MeanFamily::Power(p) => State::Power {
                p: T::lit(p),
                scale: T::zero(),
                sum: KahanSum::new(),
            },
            MeanFamily::Min | MeanFamily::Max => State::Extremum,
            MeanFamily::Quasiarithmetic(_) => State::Quasiarithmetic(KahanSum::new()),
        };
        Self {
            spec,
            count: 0,
            min: T::infinity(),
            max: T::neg_infinity(),
            state,
        }
    }

    pub fn spec(&self) -> &MeanSpec {
        &self.spec
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn push(&mut self, x: T) -> Result<(), MeanError> {
        if !(x > T::zero() && x.is_finite()) {
            return Err(MeanError::NonPositive {
                index: self.count,
                value: x.as_f64(),
            });
        }
        match &mut self.state {
            State::Arithmetic(sum) => sum.add(x),
            State::Geometric(sum) => sum.add(x.ln()),
            State::Power { p, scale, sum } => {
                if self.count == 0 {
                    *scale = x;
                } else {
                    let limit = T::max_value().log2() / T::lit(2.0);
                    if *p * (x / *scale).log2() > limit {
                        sum.scale((*scale / x).powf(*p));
                        *scale = x;
                    }
                }
                sum.add(power_term(x, *scale, *p));
            }
            State::Extremum => {}
            State::Quasiarithmetic(sum) => {
                let MeanFamily::Quasiarithmetic(g) = &self.spec.family else {
                    unreachable!("state matches family")
                };
                g.in_domain(x)?;
                sum.add(g.apply(x)?);
            }
        }
        self.count += 1;
        self.min = self.min.min(x);
        self.max = self.max.max(x);
        Ok(())
    }

    pub fn value(&self) -> Result<T, MeanError> {
        if self.count == 0 {
            return Err(MeanError::Empty);
        }
        let n = T::from_index(self.count);
        let value = match &self.state {
            State::Arithmetic(sum) => sum.value() / n,
            State::Geometric(sum) => (sum.value() / n).exp(),
            State::Power { p, scale, sum } => {
                if *p == -T::one() {
                    *scale * n / sum.value()
                } else {
                    *scale * (sum.value() / n).powf(p.recip())
                }
            }
            State::Extremum => match self.spec.family {
                MeanFamily::Min => self.min,
                _ => self.max,
            },
            State::Quasiarithmetic(sum) => {
                let MeanFamily::Quasiarithmetic(g) = &self.spec.family else {
                    unreachable!("state matches family")
                };
                g.invert(sum.value() / n, self.min, self.max)?
            }
        };
        Ok(value.max(self.min).min(self.max))
    }
}

#[inline]
fn power_term<T: Scalar>(x: T, scale: T, p: T) -> T {
    if p == -T::one() {
        scale / x
    } else {
        (x / scale).powf(p)
    }
}
