//! Generator expressions for quasiarithmetic means: parsing, evaluation and
//! monotone inversion.

mod expr;
mod invert;
mod parser;

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use expr::{EvalError, Expr};
pub use invert::{
    check_monotone, invert_monotone, sample_points, Direction, InvertError, INVERSION_TOL,
    MAX_BISECTIONS, MONOTONE_SAMPLES,
};
pub use parser::{parse_generator, parse_with_variable, ParseError};

use crate::scalar::Scalar;

/// Default working domain for generators, `[1e-12, 1e12]`.
pub const DEFAULT_DOMAIN: (f64, f64) = (1e-12, 1e12);

#[derive(Debug, Clone, Error)]
pub enum GeneratorError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Invert(#[from] InvertError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("value {value:e} outside generator domain [{lo:e}, {hi:e}]")]
    OutsideDomain { value: f64, lo: f64, hi: f64 },
}

/// Closed forms recognised for common generators.
#[derive(Debug, Clone, Copy, PartialEq)]
enum ClosedInverse {
    /// `log(x)`, inverted by `exp`.
    Exp,
    /// `exp(x)`, inverted by `log`.
    Log,
    /// `x^p`, inverted by `y^(1/p)`.
    Root(f64),
}

/// A parsed generator together with its working domain, validated to be
/// strictly monotone there (checked at 64 points).
#[derive(Clone)]
pub struct Generator {
    text: String,
    expr: Arc<Expr>,
    domain: (f64, f64),
    direction: Direction,
    inverse: Option<ClosedInverse>,
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Generator")
            .field("text", &self.text)
            .field("domain", &self.domain)
            .field("direction", &self.direction)
            .finish()
    }
}

impl PartialEq for Generator {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text && self.domain == other.domain
    }
}

impl Generator {
    pub fn new(text: &str) -> Result<Self, GeneratorError> {
        Self::with_domain(text, DEFAULT_DOMAIN)
    }

    pub fn with_domain(text: &str, domain: (f64, f64)) -> Result<Self, GeneratorError> {
        let expr = parse_generator(text)?;
        let direction = check_monotone(&expr, domain.0, domain.1)?;
        let inverse = match &expr {
            Expr::Log(inner) if **inner == Expr::Var => Some(ClosedInverse::Exp),
            Expr::Exp(inner) if **inner == Expr::Var => Some(ClosedInverse::Log),
            Expr::Pow(base, exp) if **base == Expr::Var => match **exp {
                Expr::Lit(p) if p != 0.0 => Some(ClosedInverse::Root(p)),
                _ => None,
            },
            _ => None,
        };
        Ok(Self {
            text: text.to_string(),
            expr: Arc::new(expr),
            domain,
            direction,
            inverse,
        })
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn has_closed_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn in_domain<T: Scalar>(&self, x: T) -> Result<(), GeneratorError> {
        let x64 = x.as_f64();
        if x64 >= self.domain.0 && x64 <= self.domain.1 {
            Ok(())
        } else {
            Err(GeneratorError::OutsideDomain {
                value: x64,
                lo: self.domain.0,
                hi: self.domain.1,
            })
        }
    }

    pub fn apply<T: Scalar>(&self, x: T) -> Result<T, GeneratorError> {
        Ok(self.expr.eval(x)?)
    }

    /// Solves `f(x) = y` for `x` in `[lo, hi]`, which must contain the root.
    pub fn invert<T: Scalar>(&self, y: T, lo: T, hi: T) -> Result<T, GeneratorError> {
        if lo == hi {
            return Ok(lo);
        }
        let x = match self.inverse {
            Some(ClosedInverse::Exp) => y.exp(),
            Some(ClosedInverse::Log) => y.ln(),
            Some(ClosedInverse::Root(p)) => y.powf(T::lit(p).recip()),
            None => {
                // the average of f over the entries can land a rounding error
                // outside [f(lo), f(hi)]
                let (f_lo, f_hi) = (self.apply(lo)?, self.apply(hi)?);
                let y = y.max(f_lo.min(f_hi)).min(f_lo.max(f_hi));
                invert::bisect(&self.expr, y, lo, hi, self.direction)?
            }
        };
        Ok(x.max(lo).min(hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_are_recognised() {
        assert!(Generator::new("log(x)").unwrap().has_closed_inverse());
        assert!(Generator::new("x^0.5").unwrap().has_closed_inverse());
        assert!(!Generator::new("x^0.5 + 1").unwrap().has_closed_inverse());
    }

    #[test]
    fn non_monotone_generator_rejected_at_construction() {
        let err = Generator::with_domain("x^2 - x", (0.1, 1.0)).unwrap_err();
        assert!(matches!(err, GeneratorError::Invert(InvertError::NotMonotone { .. })));
    }

    #[test]
    fn generator_undefined_on_domain_is_rejected() {
        assert!(Generator::new("log(x - 1)").is_err());
    }

    #[test]
    fn bisection_and_closed_form_agree() {
        let closed = Generator::new("x^3").unwrap();
        let shifted = Generator::new("x^3 + 0").unwrap();
        let y = 27.0f64;
        let a = closed.invert(y, 1.0, 10.0).unwrap();
        let b = shifted.invert(y, 1.0, 10.0).unwrap();
        assert!((a - 3.0).abs() < 1e-13);
        assert!((b - 3.0).abs() < 1e-12);
    }
}
