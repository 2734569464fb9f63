//! Recursive descent parser for generator expressions.
//!
//! Grammar, loosest to tightest:
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' (('-')* power))?
//! atom    := number | VAR | ('log' | 'exp') '(' sum ')' | '(' sum ')'
//! ```

use thiserror::Error;

use super::expr::Expr;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("unbalanced parenthesis at offset {offset}")]
    UnbalancedParen { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::UnbalancedParen { offset } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn describe(tok: &Option<(usize, Token)>) -> String {
    match tok {
        None => "unexpected end of input".into(),
        Some((_, t)) => format!("unexpected token {t:?}"),
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'/' => Some(Token::Slash),
            b'^' => Some(Token::Caret),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((start, t));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent only when digits follow, so `2exp(x)` is not swallowed
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lexeme = &text[start..i];
            let v: f64 = lexeme.parse().map_err(|_| ParseError::Syntax {
                offset: start,
                message: format!("malformed number `{lexeme}`"),
            })?;
            out.push((start, Token::Num(v)));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Token::Ident(text[start..i].to_string())));
            continue;
        }
        return Err(ParseError::Syntax {
            offset: start,
            message: format!("unexpected character `{}`", text[start..].chars().next().unwrap()),
        });
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
    var: &'a str,
    open_parens: Vec<usize>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn bump(&mut self) -> Option<(usize, Token)> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn unexpected(&self) -> ParseError {
        let tok = self.tokens.get(self.pos).cloned();
        if let Some((offset, Token::RParen)) = tok {
            if self.open_parens.is_empty() {
                return ParseError::UnbalancedParen { offset };
            }
        }
        if tok.is_none() {
            if let Some(&offset) = self.open_parens.last() {
                // input ended inside a group: report the end when nothing
                // followed the paren, otherwise the dangling paren itself
                if self.tokens.last().map(|(o, _)| *o) == Some(offset) {
                    return ParseError::Syntax {
                        offset: self.end,
                        message: describe(&tok),
                    };
                }
                return ParseError::UnbalancedParen { offset };
            }
        }
        ParseError::Syntax {
            offset: self.offset(),
            message: describe(&tok),
        }
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.product()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    lhs = Expr::add(lhs, self.product()?);
                }
                Some(Token::Minus) => {
                    self.bump();
                    lhs = Expr::sub(lhs, self.product()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    lhs = Expr::mul(lhs, self.unary()?);
                }
                Some(Token::Slash) => {
                    self.bump();
                    lhs = Expr::div(lhs, self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    /// `-` directly before a number that is not a power base is a negative
    /// literal; any other `-` is a negation node.
    fn signed_literal(&mut self) -> Option<Expr> {
        let at = |i: usize| self.tokens.get(self.pos + i).map(|(_, t)| t);
        match (at(0), at(1), at(2)) {
            (Some(Token::Minus), Some(&Token::Num(v)), next) if !matches!(next, Some(Token::Caret)) => {
                self.pos += 2;
                Some(Expr::Lit(-v))
            }
            _ => None,
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if let Some(lit) = self.signed_literal() {
            return Ok(lit);
        }
        if let Some(Token::Minus) = self.peek() {
            self.bump();
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if let Some(Token::Caret) = self.peek() {
            self.bump();
            let exponent = self.exponent()?;
            return Ok(Expr::pow(base, exponent));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Expr, ParseError> {
        if let Some(lit) = self.signed_literal() {
            return Ok(lit);
        }
        if let Some(Token::Minus) = self.peek() {
            self.bump();
            return Ok(Expr::neg(self.exponent()?));
        }
        self.power()
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Token::Num(v)) => {
                self.bump();
                Ok(Expr::Lit(v))
            }
            Some(Token::Ident(name)) => {
                let offset = self.offset();
                self.bump();
                if name == self.var {
                    return Ok(Expr::Var);
                }
                let ctor: fn(Expr) -> Expr = match name.as_str() {
                    "log" | "ln" => Expr::log,
                    "exp" => Expr::exp,
                    _ => return Err(ParseError::UnknownIdentifier { offset, name }),
                };
                match self.peek() {
                    Some(Token::LParen) => Ok(ctor(self.group()?)),
                    _ => Err(self.unexpected()),
                }
            }
            Some(Token::LParen) => self.group(),
            _ => Err(self.unexpected()),
        }
    }

    fn group(&mut self) -> Result<Expr, ParseError> {
        let (open, _) = self.bump().expect("caller checked for `(`");
        self.open_parens.push(open);
        let inner = self.sum()?;
        match self.peek() {
            Some(Token::RParen) => {
                self.bump();
                self.open_parens.pop();
                Ok(inner)
            }
            None => Err(ParseError::UnbalancedParen { offset: open }),
            _ => Err(self.unexpected()),
        }
    }
}

/// Folds negation of a literal into a negative literal.
/// Parses `text` with `x` as the variable.
pub fn parse_generator(text: &str) -> Result<Expr, ParseError> {
    parse_with_variable(text, "x")
}

/// Parses `text` treating identifier `var` as the variable.
pub fn parse_with_variable(text: &str, var: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end: text.len(),
        var,
        open_parens: Vec::new(),
    };
    let expr = p.sum()?;
    if p.pos < p.tokens.len() {
        return Err(p.unexpected());
    }
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_of_x() {
        assert_eq!(parse_generator("log(x)").unwrap(), Expr::log(Expr::Var));
    }

    #[test]
    fn power_plus_literal() {
        assert_eq!(
            parse_generator("x^0.5 + 1").unwrap(),
            Expr::add(Expr::pow(Expr::Var, Expr::lit(0.5)), Expr::lit(1.0))
        );
    }

    #[test]
    fn truncated_call_reports_end_offset() {
        let err = parse_generator("log(").unwrap_err();
        assert_eq!(err.offset(), 4);
        assert!(matches!(err, ParseError::Syntax { .. }));
    }

    #[test]
    fn unbalanced_parens() {
        assert_eq!(
            parse_generator("(x + 1").unwrap_err(),
            ParseError::UnbalancedParen { offset: 0 }
        );
        assert_eq!(
            parse_generator("x + 1)").unwrap_err(),
            ParseError::UnbalancedParen { offset: 5 }
        );
    }

    #[test]
    fn unknown_identifier() {
        assert_eq!(
            parse_generator("sin(x)").unwrap_err(),
            ParseError::UnknownIdentifier {
                offset: 0,
                name: "sin".into()
            }
        );
        assert!(matches!(
            parse_generator("2*y"),
            Err(ParseError::UnknownIdentifier { offset: 2, .. })
        ));
    }

    #[test]
    fn precedence_and_associativity() {
        // -x^2 is -(x^2)
        assert_eq!(
            parse_generator("-x^2").unwrap(),
            Expr::neg(Expr::pow(Expr::Var, Expr::lit(2.0)))
        );
        // right-associative power
        assert_eq!(
            parse_generator("x^2^3").unwrap(),
            Expr::pow(Expr::Var, Expr::pow(Expr::lit(2.0), Expr::lit(3.0)))
        );
        // left-associative subtraction
        assert_eq!(
            parse_generator("x - 1 - 2").unwrap(),
            Expr::sub(Expr::sub(Expr::Var, Expr::lit(1.0)), Expr::lit(2.0))
        );
        assert_eq!(
            parse_generator("x^-1").unwrap(),
            Expr::pow(Expr::Var, Expr::lit(-1.0))
        );
        assert_eq!(
            parse_generator("2*x + 3/x").unwrap(),
            Expr::add(
                Expr::mul(Expr::lit(2.0), Expr::Var),
                Expr::div(Expr::lit(3.0), Expr::Var)
            )
        );
    }

    #[test]
    fn scientific_literals() {
        assert_eq!(parse_generator("1e-3").unwrap(), Expr::lit(1e-3));
        assert_eq!(
            parse_generator("2exp(x)").unwrap_err(),
            ParseError::Syntax {
                offset: 1,
                message: "unexpected token Ident(\"exp\")".into()
            }
        );
    }

    #[test]
    fn alternate_variable() {
        assert_eq!(
            parse_with_variable("1/n", "n").unwrap(),
            Expr::div(Expr::lit(1.0), Expr::Var)
        );
        assert!(parse_with_variable("1/x", "n").is_err());
    }
}
