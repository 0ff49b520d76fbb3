use std::fmt;

use super::lexer::{Cursor, Tok};
use crate::algebra::{Basis, Octonion, SplitUnit};
use crate::error::{Error, Result};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OctLiteral {
    /// The imaginary unit of the coefficient field.
    I,
    /// `e_1..e_7`.
    Real(usize),
    Split(SplitUnit),
}

impl OctLiteral {
    pub fn value(self) -> Octonion {
        match self {
            OctLiteral::I => Octonion::scalar(Scalar::new(0.0, 1.0), Basis::Split),
            OctLiteral::Real(a) => Octonion::real_unit(a).to_split(),
            OctLiteral::Split(u) => Octonion::split_unit(u),
        }
    }

    fn name(self) -> String {
        match self {
            OctLiteral::I => "i".into(),
            OctLiteral::Real(a) => format!("e{a}"),
            OctLiteral::Split(u) => u.name().into(),
        }
    }

    fn parse(name: &str) -> Option<OctLiteral> {
        if name == "i" {
            return Some(OctLiteral::I);
        }
        if let Some(u) = SplitUnit::from_name(name) {
            return Some(OctLiteral::Split(u));
        }
        match name.strip_prefix('e')?.parse::<usize>() {
            Ok(a) if (1..=7).contains(&a) => Some(OctLiteral::Real(a)),
            _ => None,
        }
    }
}

/// Octonion expression. `Mul` nodes keep the source grouping.
#[derive(Debug, Clone, PartialEq)]
pub enum OctExpr {
    Num(f64),
    Lit(OctLiteral),
    Neg(Box<OctExpr>),
    Add(Box<OctExpr>, Box<OctExpr>),
    Sub(Box<OctExpr>, Box<OctExpr>),
    Mul(Box<OctExpr>, Box<OctExpr>),
}

/// How to treat an unparenthesized chain of three or more non-scalar factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroupingMode {
    /// Reject with [`Error::AmbiguousGrouping`].
    #[default]
    Strict,
    /// Associate to the left and record a warning.
    Lenient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OctParse {
    pub expr: OctExpr,
    pub warnings: Vec<String>,
}

/// Strict-mode parse.
///
/// ```text
/// sum     := product (('+' | '-') product)*
/// product := unary ('*' unary)*
/// unary   := '-' unary | atom
/// atom    := number | 'i' | 'e1'..'e7' | 'u0' | 'u0c' | 'u1'..'u3' | 'u1c'..'u3c' | '(' sum ')'
/// ```
///
/// Scalar factors (numbers, `i`, and anything built only from them) lie in
/// the nucleus, so they never make a chain ambiguous.
pub fn parse_oct_expr(text: &str) -> Result<OctExpr> {
    parse_oct_expr_with(text, GroupingMode::Strict).map(|p| p.expr)
}

pub fn parse_oct_expr_with(text: &str, mode: GroupingMode) -> Result<OctParse> {
    let mut parser = Parser {
        cur: Cursor::new(text)?,
        mode,
        warnings: Vec::new(),
    };
    let expr = parser.sum()?;
    if parser.cur.peek().tok != Tok::End {
        return Err(parser.cur.error(&["`+`", "`-`", "`*`", "end of input"]));
    }
    Ok(OctParse {
        expr,
        warnings: parser.warnings,
    })
}

/// Evaluates with the exact grouping of the tree; the result is in the split basis.
pub fn eval_oct_expr(e: &OctExpr) -> Octonion {
    match e {
        OctExpr::Num(v) => Octonion::scalar(Scalar::new(*v, 0.0), Basis::Split),
        OctExpr::Lit(l) => l.value(),
        OctExpr::Neg(a) => -eval_oct_expr(a),
        OctExpr::Add(a, b) => eval_oct_expr(a) + eval_oct_expr(b),
        OctExpr::Sub(a, b) => eval_oct_expr(a) - eval_oct_expr(b),
        OctExpr::Mul(a, b) => eval_oct_expr(a).mul_oct(&eval_oct_expr(b)),
    }
}

impl OctExpr {
    pub fn is_scalar(&self) -> bool {
        match self {
            OctExpr::Num(_) | OctExpr::Lit(OctLiteral::I) => true,
            OctExpr::Lit(_) => false,
            OctExpr::Neg(a) => a.is_scalar(),
            OctExpr::Add(a, b) | OctExpr::Sub(a, b) | OctExpr::Mul(a, b) => a.is_scalar() && b.is_scalar(),
        }
    }

    pub fn eval(&self) -> Octonion {
        eval_oct_expr(self)
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, wrap_products: bool) -> fmt::Result {
        let wrap = match self {
            OctExpr::Add(..) | OctExpr::Sub(..) => true,
            OctExpr::Mul(..) => wrap_products,
            OctExpr::Num(v) => *v < 0.0,
            _ => false,
        };
        if wrap {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for OctExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OctExpr::Num(v) => write!(f, "{v}"),
            OctExpr::Lit(l) => f.write_str(&l.name()),
            OctExpr::Neg(a) => {
                f.write_str("-")?;
                a.write_child(f, true)
            }
            OctExpr::Add(a, b) | OctExpr::Sub(a, b) => {
                write!(f, "{a}")?;
                f.write_str(if matches!(self, OctExpr::Add(..)) { " + " } else { " - " })?;
                b.write_child(f, false)
            }
            OctExpr::Mul(a, b) => {
                a.write_child(f, true)?;
                f.write_str("*")?;
                b.write_child(f, true)
            }
        }
    }
}

struct Parser {
    cur: Cursor,
    mode: GroupingMode,
    warnings: Vec<String>,
}

impl Parser {
    fn sum(&mut self) -> Result<OctExpr> {
        let mut lhs = self.product()?;
        loop {
            if self.cur.eat(&Tok::Plus) {
                lhs = OctExpr::Add(Box::new(lhs), Box::new(self.product()?));
            } else if self.cur.eat(&Tok::Minus) {
                lhs = OctExpr::Sub(Box::new(lhs), Box::new(self.product()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn product(&mut self) -> Result<OctExpr> {
        let start = self.cur.peek().offset;
        let mut factors = vec![self.unary()?];
        while self.cur.eat(&Tok::Star) {
            factors.push(self.unary()?);
        }
        let non_scalar = factors.iter().filter(|f| !f.is_scalar()).count();
        if non_scalar >= 3 {
            match self.mode {
                GroupingMode::Strict => {
                    return Err(Error::AmbiguousGrouping {
                        offset: start,
                        factors: non_scalar,
                    })
                }
                GroupingMode::Lenient => self.warnings.push(format!(
                    "product of {non_scalar} non-scalar factors at byte {start} was associated to the left"
                )),
            }
        }
        let mut it = factors.into_iter();
        let first = it.next().expect("at least one factor");
        Ok(it.fold(first, |acc, f| OctExpr::Mul(Box::new(acc), Box::new(f))))
    }

    fn unary(&mut self) -> Result<OctExpr> {
        if self.cur.eat(&Tok::Minus) {
            return Ok(OctExpr::Neg(Box::new(self.unary()?)));
        }
        let t = self.cur.peek().clone();
        match t.tok {
            Tok::Num(v) => {
                self.cur.bump();
                Ok(OctExpr::Num(v))
            }
            Tok::Int(v) => {
                self.cur.bump();
                Ok(OctExpr::Num(v as f64))
            }
            Tok::LParen => {
                self.cur.bump();
                let e = self.sum()?;
                self.cur.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(ref name) => {
                self.cur.bump();
                OctLiteral::parse(name).map(OctExpr::Lit).ok_or(Error::UnknownIdentifier {
                    name: name.clone(),
                    offset: t.offset,
                })
            }
            _ => Err(self.cur.error(&["number", "octonion literal", "`(`", "`-`"])),
        }
    }
}
