use std::fmt;

use thiserror::Error;

use crate::scalar::Scalar;

/// Generator expression tree over a single variable.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lit(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Log(Box<Expr>),
    Exp(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("log of non-positive value {value} at node {node} `{expr}`")]
    LogDomain { node: usize, expr: String, value: f64 },
    #[error("division by zero at node {node} `{expr}`")]
    DivisionByZero { node: usize, expr: String },
    #[error("non-finite result {value} at node {node} `{expr}`")]
    NonFinite { node: usize, expr: String, value: f64 },
}

impl EvalError {
    /// Pre-order index of the offending node.
    pub fn node(&self) -> usize {
        match self {
            EvalError::LogDomain { node, .. }
            | EvalError::DivisionByZero { node, .. }
            | EvalError::NonFinite { node, .. } => *node,
        }
    }
}

// Tree constructors, deliberately named after the operators they build.
#[allow(clippy::should_implement_trait)]
impl Expr {
    pub fn lit(v: f64) -> Self {
        Expr::Lit(v)
    }

    pub fn neg(e: Expr) -> Self {
        Expr::Neg(Box::new(e))
    }

    pub fn add(a: Expr, b: Expr) -> Self {
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Self {
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Self {
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Self {
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, b: Expr) -> Self {
        Expr::Pow(Box::new(a), Box::new(b))
    }

    pub fn log(e: Expr) -> Self {
        Expr::Log(Box::new(e))
    }

    pub fn exp(e: Expr) -> Self {
        Expr::Exp(Box::new(e))
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match self {
            Expr::Lit(_) | Expr::Var => 1,
            Expr::Neg(e) | Expr::Log(e) | Expr::Exp(e) => 1 + e.size(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    pub fn eval<T: Scalar>(&self, x: T) -> Result<T, EvalError> {
        let mut next = 0;
        self.eval_at(x, &mut next)
    }

    // `next` is the pre-order index of `self`; on return it points past the subtree.
    fn eval_at<T: Scalar>(&self, x: T, next: &mut usize) -> Result<T, EvalError> {
        let node = *next;
        *next += 1;
        let value = match self {
            Expr::Lit(v) => T::lit(*v),
            Expr::Var => x,
            Expr::Neg(e) => -e.eval_at(x, next)?,
            Expr::Add(a, b) => a.eval_at(x, next)? + b.eval_at(x, next)?,
            Expr::Sub(a, b) => a.eval_at(x, next)? - b.eval_at(x, next)?,
            Expr::Mul(a, b) => a.eval_at(x, next)? * b.eval_at(x, next)?,
            Expr::Div(a, b) => {
                let num = a.eval_at(x, next)?;
                let den = b.eval_at(x, next)?;
                if den == T::zero() {
                    return Err(EvalError::DivisionByZero {
                        node,
                        expr: self.to_string(),
                    });
                }
                num / den
            }
            Expr::Pow(a, b) => {
                let base = a.eval_at(x, next)?;
                let exponent = b.eval_at(x, next)?;
                base.powf(exponent)
            }
            Expr::Log(e) => {
                let arg = e.eval_at(x, next)?;
                if arg <= T::zero() {
                    return Err(EvalError::LogDomain {
                        node,
                        expr: self.to_string(),
                        value: arg.as_f64(),
                    });
                }
                arg.ln()
            }
            Expr::Exp(e) => e.eval_at(x, next)?.exp(),
        };
        if !value.is_finite() {
            return Err(EvalError::NonFinite {
                node,
                expr: self.to_string(),
                value: value.as_f64(),
            });
        }
        Ok(value)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Lit(v) if v.is_sign_negative() => 3,
            Expr::Pow(..) => 4,
            Expr::Lit(_) | Expr::Var | Expr::Log(_) | Expr::Exp(_) => 5,
        }
    }

    fn fmt_child(child: &Expr, min_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if child.precedence() < min_prec {
            write!(f, "({child})")
        } else {
            write!(f, "{child}")
        }
    }
}

/// Prints with the minimal parentheses needed to parse back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Lit(v) => write!(f, "{v}"),
            Expr::Var => write!(f, "x"),
            // `-3` would read back as a literal, so keep the node visible
            Expr::Neg(e) if matches!(**e, Expr::Lit(v) if !v.is_sign_negative()) => write!(f, "-({e})"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                Expr::fmt_child(e, 3, f)
            }
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                let (op, prec) = match self {
                    Expr::Add(..) => ("+", 1),
                    Expr::Sub(..) => ("-", 1),
                    Expr::Mul(..) => ("*", 2),
                    _ => ("/", 2),
                };
                Expr::fmt_child(a, prec, f)?;
                write!(f, " {op} ")?;
                Expr::fmt_child(b, prec + 1, f)
            }
            Expr::Pow(a, b) => {
                Expr::fmt_child(a, 5, f)?;
                write!(f, "^")?;
                Expr::fmt_child(b, 4, f)
            }
            Expr::Log(e) => write!(f, "log({e})"),
            Expr::Exp(e) => write!(f, "exp({e})"),
        }
    }
}
