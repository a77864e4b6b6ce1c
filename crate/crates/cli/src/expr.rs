//! Form expressions: the little language accepted wherever a subcommand
//! expects a modular form, e.g. `E4^6*Delta + 2*Delta^3`.
//!
//! Grammar:
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ('^' uint)?
//! atom   := 'E4' | 'E6' | 'Delta' | uint | '(' expr ')'
//! ```
//!
//! Weights are checked as part of parsing: the two sides of `+` and `-`
//! must have equal weight, integer literals have weight 0, and a product
//! weighs the sum of its factors. `E4 + Delta` is rejected with the two
//! conflicting weights.

use modpm_core::error::Error as CoreError;
use modpm_core::forms::{delta, eisenstein};
use modpm_core::qseries::{reduce_integral, QExpansion};
use modpm_core::ring::{IntegerRing, ResidueRing};
use num_bigint::{BigInt, BigUint};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FormExpression {
    E4,
    E6,
    Delta,
    Int(BigUint),
    Pow(Box<FormExpression>, u32),
    Mul(Box<FormExpression>, Box<FormExpression>),
    Add(Box<FormExpression>, Box<FormExpression>),
    Sub(Box<FormExpression>, Box<FormExpression>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExprError {
    /// Byte position of the offending token and what went wrong there.
    Syntax { position: usize, message: String },
    /// The two conflicting weights of an additive node.
    WeightMismatch(i64, i64),
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprError::Syntax { position, message } => {
                write!(f, "syntax error at byte {}: {}", position, message)
            }
            ExprError::WeightMismatch(a, b) => write!(f, "weight mismatch: {} vs {}", a, b),
        }
    }
}

impl std::error::Error for ExprError {}

impl FormExpression {
    /// The weight of the expression, rejecting mixed-weight sums.
    pub fn weight(&self) -> Result<i64, ExprError> {
        Ok(match self {
            FormExpression::E4 => 4,
            FormExpression::E6 => 6,
            FormExpression::Delta => 12,
            FormExpression::Int(_) => 0,
            FormExpression::Pow(base, e) => base.weight()? * i64::from(*e),
            FormExpression::Mul(a, b) => a.weight()? + b.weight()?,
            FormExpression::Add(a, b) | FormExpression::Sub(a, b) => {
                let (wa, wb) = (a.weight()?, b.weight()?);
                if wa != wb {
                    return Err(ExprError::WeightMismatch(wa, wb));
                }
                wa
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Name(&'static str),
    Int(BigUint),
    Plus,
    Minus,
    Star,
    Caret,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            c if c.is_ascii_whitespace() => i += 1,
            '+' | '-' | '*' | '^' | '(' | ')' => {
                let tok = match c {
                    '+' => Token::Plus,
                    '-' => Token::Minus,
                    '*' => Token::Star,
                    '^' => Token::Caret,
                    '(' => Token::Open,
                    _ => Token::Close,
                };
                out.push((i, tok));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let lit: BigUint = text[start..i].parse().expect("digit run");
                out.push((start, Token::Int(lit)));
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let name = match &text[start..i] {
                    "E4" => "E4",
                    "E6" => "E6",
                    "Delta" => "Delta",
                    other => {
                        return Err(ExprError::Syntax {
                            position: start,
                            message: format!(
                                "unknown name '{}' (expected E4, E6 or Delta)",
                                other
                            ),
                        })
                    }
                };
                out.push((start, Token::Name(name)));
            }
            other => {
                return Err(ExprError::Syntax {
                    position: i,
                    message: format!("unexpected character '{}'", other),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(usize, Token)],
    pos: usize,
    end: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a (usize, Token)> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |(p, _)| *p)
    }

    fn expr(&mut self) -> Result<FormExpression, ExprError> {
        let mut lhs = self.term()?;
        while let Some((_, tok)) = self.peek() {
            let sub = match tok {
                Token::Plus => false,
                Token::Minus => true,
                _ => break,
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if sub {
                FormExpression::Sub(Box::new(lhs), Box::new(rhs))
            } else {
                FormExpression::Add(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<FormExpression, ExprError> {
        let mut lhs = self.factor()?;
        while matches!(self.peek(), Some((_, Token::Star))) {
            self.pos += 1;
            let rhs = self.factor()?;
            lhs = FormExpression::Mul(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<FormExpression, ExprError> {
        let base = self.atom()?;
        if !matches!(self.peek(), Some((_, Token::Caret))) {
            return Ok(base);
        }
        self.pos += 1;
        match self.peek() {
            Some((pos, Token::Int(e))) => {
                let e = u32::try_from(e).map_err(|_| ExprError::Syntax {
                    position: *pos,
                    message: "exponent does not fit in 32 bits".into(),
                })?;
                self.pos += 1;
                Ok(FormExpression::Pow(Box::new(base), e))
            }
            _ => Err(ExprError::Syntax {
                position: self.here(),
                message: "expected an integer exponent after '^'".into(),
            }),
        }
    }

    fn atom(&mut self) -> Result<FormExpression, ExprError> {
        match self.peek() {
            Some((_, Token::Name(name))) => {
                self.pos += 1;
                Ok(match *name {
                    "E4" => FormExpression::E4,
                    "E6" => FormExpression::E6,
                    _ => FormExpression::Delta,
                })
            }
            Some((_, Token::Int(n))) => {
                let n = n.clone();
                self.pos += 1;
                Ok(FormExpression::Int(n))
            }
            Some((_, Token::Open)) => {
                self.pos += 1;
                let inner = self.expr()?;
                match self.peek() {
                    Some((_, Token::Close)) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(ExprError::Syntax {
                        position: self.here(),
                        message: "expected ')'".into(),
                    }),
                }
            }
            _ => Err(ExprError::Syntax {
                position: self.here(),
                message: "expected E4, E6, Delta, an integer or '('".into(),
            }),
        }
    }
}

/// Parse and weight-check an expression.
pub fn parse_form(text: &str) -> Result<FormExpression, ExprError> {
    let toks = tokenize(text)?;
    let mut parser = Parser {
        toks: &toks,
        pos: 0,
        end: text.len(),
    };
    let e = parser.expr()?;
    if parser.peek().is_some() {
        return Err(ExprError::Syntax {
            position: parser.here(),
            message: "unexpected trailing input".into(),
        });
    }
    e.weight()?;
    Ok(e)
}

/// Evaluate over Z to the given q-precision. The result carries no weight
/// tag; callers attach the parse-time weight where one is needed.
pub fn eval_integral(
    e: &FormExpression,
    prec: usize,
) -> Result<QExpansion<IntegerRing>, CoreError> {
    Ok(match e {
        FormExpression::E4 => eisenstein(4, prec)?.with_weight(None),
        FormExpression::E6 => eisenstein(6, prec)?.with_weight(None),
        FormExpression::Delta => delta(prec).with_weight(None),
        FormExpression::Int(n) => {
            QExpansion::one(IntegerRing, prec, None).scale(&BigInt::from(n.clone()))
        }
        FormExpression::Pow(base, exp) => eval_integral(base, prec)?.pow(*exp),
        FormExpression::Mul(a, b) => eval_integral(a, prec)?.mul(&eval_integral(b, prec)?),
        FormExpression::Add(a, b) => eval_integral(a, prec)?.add(&eval_integral(b, prec)?),
        FormExpression::Sub(a, b) => eval_integral(a, prec)?.sub(&eval_integral(b, prec)?),
    })
}

/// Evaluate and reduce into Z/p^m, tagged with the expression weight.
pub fn eval_mod(
    e: &FormExpression,
    p: u64,
    m: u32,
    prec: usize,
) -> Result<QExpansion<ResidueRing>, CoreError> {
    let weight = e.weight().expect("parse_form already checked the weight");
    let ring = ResidueRing::new(p, m);
    Ok(reduce_integral(&eval_integral(e, prec)?, &ring).with_weight(Some(weight)))
}
