use std::f64::consts::PI;
use std::fmt;

use super::lexer::{Cursor, Tok};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X, Var::Y, Var::Z];

    pub fn axis(self) -> usize {
        self as usize
    }

    pub fn from_axis(axis: usize) -> Var {
        Self::ALL[axis]
    }

    pub fn name(self) -> &'static str {
        ["x", "y", "z"][self.axis()]
    }
}

/// Functions available in expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
}

impl Func {
    /// Registry of supported function names.
    pub const REGISTRY: [(&'static str, Func); 3] = [("sin", Func::Sin), ("cos", Func::Cos), ("exp", Func::Exp)];

    pub fn lookup(name: &str) -> Option<Func> {
        Self::REGISTRY.iter().find(|(n, _)| *n == name).map(|&(_, f)| f)
    }

    pub fn name(self) -> &'static str {
        Self::REGISTRY.iter().find(|(_, f)| *f == self).map(|(n, _)| *n).unwrap()
    }

    pub fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
        }
    }
}

/// Real-valued expression over `x, y, z`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScalarExpr {
    Num(f64),
    Var(Var),
    Neg(Box<ScalarExpr>),
    Add(Box<ScalarExpr>, Box<ScalarExpr>),
    Sub(Box<ScalarExpr>, Box<ScalarExpr>),
    Mul(Box<ScalarExpr>, Box<ScalarExpr>),
    Div(Box<ScalarExpr>, Box<ScalarExpr>),
    Pow(Box<ScalarExpr>, i32),
    Call(Func, Box<ScalarExpr>),
}

use ScalarExpr as E;

const OPERAND: &[&str] = &["number", "variable", "function call", "`(`", "`-`"];

/// Parses an expression.
///
/// ```text
/// expr  := term (('+' | '-') term)*
/// term  := unary (('*' | '/') unary)*
/// unary := '-' unary | power
/// power := atom ('^' '-'? integer)?
/// atom  := number | 'pi' | 'x' | 'y' | 'z' | func '(' expr ')' | '(' expr ')'
/// func  := 'sin' | 'cos' | 'exp'
/// ```
pub fn parse_scalar_expr(text: &str) -> Result<ScalarExpr> {
    let mut cur = Cursor::new(text)?;
    let e = parse_sum(&mut cur)?;
    if cur.peek().tok != Tok::End {
        return Err(cur.error(&["operator", "end of input"]));
    }
    Ok(e)
}

fn parse_sum(cur: &mut Cursor) -> Result<ScalarExpr> {
    let mut lhs = parse_term(cur)?;
    loop {
        if cur.eat(&Tok::Plus) {
            lhs = E::Add(Box::new(lhs), Box::new(parse_term(cur)?));
        } else if cur.eat(&Tok::Minus) {
            lhs = E::Sub(Box::new(lhs), Box::new(parse_term(cur)?));
        } else {
            return Ok(lhs);
        }
    }
}

fn parse_term(cur: &mut Cursor) -> Result<ScalarExpr> {
    let mut lhs = parse_unary(cur)?;
    loop {
        if cur.eat(&Tok::Star) {
            lhs = E::Mul(Box::new(lhs), Box::new(parse_unary(cur)?));
        } else if cur.eat(&Tok::Slash) {
            lhs = E::Div(Box::new(lhs), Box::new(parse_unary(cur)?));
        } else {
            return Ok(lhs);
        }
    }
}

fn parse_unary(cur: &mut Cursor) -> Result<ScalarExpr> {
    if cur.eat(&Tok::Minus) {
        return Ok(E::Neg(Box::new(parse_unary(cur)?)));
    }
    let base = parse_atom(cur)?;
    if !cur.eat(&Tok::Caret) {
        return Ok(base);
    }
    let negative = cur.eat(&Tok::Minus);
    match cur.peek().tok {
        Tok::Int(n) if n <= i64::from(i32::MAX) => {
            cur.bump();
            let n = n as i32;
            Ok(E::Pow(Box::new(base), if negative { -n } else { n }))
        }
        _ => Err(cur.error(&["integer exponent"])),
    }
}

fn parse_atom(cur: &mut Cursor) -> Result<ScalarExpr> {
    let t = cur.peek().clone();
    match t.tok {
        Tok::Num(v) => {
            cur.bump();
            Ok(E::Num(v))
        }
        Tok::Int(v) => {
            cur.bump();
            Ok(E::Num(v as f64))
        }
        Tok::LParen => {
            cur.bump();
            let e = parse_sum(cur)?;
            cur.expect(Tok::RParen, "`)`")?;
            Ok(e)
        }
        Tok::Ident(ref name) => {
            cur.bump();
            match name.as_str() {
                "x" => Ok(E::Var(Var::X)),
                "y" => Ok(E::Var(Var::Y)),
                "z" => Ok(E::Var(Var::Z)),
                "pi" => Ok(E::Num(PI)),
                _ => match Func::lookup(name) {
                    Some(f) => {
                        cur.expect(Tok::LParen, "`(`")?;
                        let arg = parse_sum(cur)?;
                        cur.expect(Tok::RParen, "`)`")?;
                        Ok(E::Call(f, Box::new(arg)))
                    }
                    None => Err(Error::UnknownIdentifier {
                        name: name.clone(),
                        offset: t.offset,
                    }),
                },
            }
        }
        _ => Err(cur.error(OPERAND)),
    }
}

// Constant-folding constructors.

pub(crate) fn num(v: f64) -> ScalarExpr {
    E::Num(v)
}

fn as_num(e: &ScalarExpr) -> Option<f64> {
    match e {
        E::Num(v) => Some(*v),
        _ => None,
    }
}

pub(crate) fn neg(a: ScalarExpr) -> ScalarExpr {
    match a {
        E::Num(v) => E::Num(-v),
        E::Neg(inner) => *inner,
        a => E::Neg(Box::new(a)),
    }
}

pub(crate) fn add(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), Some(y)) => E::Num(x + y),
        (Some(x), _) if x == 0.0 => b,
        (_, Some(y)) if y == 0.0 => a,
        _ => E::Add(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn sub(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), Some(y)) => E::Num(x - y),
        (Some(x), _) if x == 0.0 => neg(b),
        (_, Some(y)) if y == 0.0 => a,
        _ => E::Sub(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn mul(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), Some(y)) => E::Num(x * y),
        (Some(x), _) | (_, Some(x)) if x == 0.0 => E::Num(0.0),
        (Some(x), _) if x == 1.0 => b,
        (_, Some(y)) if y == 1.0 => a,
        _ => E::Mul(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn div(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr {
    match (as_num(&a), as_num(&b)) {
        (Some(x), Some(y)) if y != 0.0 => E::Num(x / y),
        (_, Some(y)) if y == 1.0 => a,
        _ => E::Div(Box::new(a), Box::new(b)),
    }
}

pub(crate) fn pow(a: ScalarExpr, n: i32) -> ScalarExpr {
    match (n, as_num(&a)) {
        (0, _) => E::Num(1.0),
        (1, _) => a,
        (_, Some(x)) if x != 0.0 || n > 0 => E::Num(x.powi(n)),
        _ => E::Pow(Box::new(a), n),
    }
}

pub(crate) fn call(f: Func, a: ScalarExpr) -> ScalarExpr {
    match as_num(&a) {
        Some(x) => E::Num(f.apply(x)),
        None => E::Call(f, Box::new(a)),
    }
}

impl ScalarExpr {
    pub fn var(v: Var) -> Self {
        E::Var(v)
    }

    /// Exact symbolic derivative, simplified by constant folding only.
    pub fn differentiate(&self, var: Var) -> ScalarExpr {
        match self {
            E::Num(_) => num(0.0),
            E::Var(v) => num(if *v == var { 1.0 } else { 0.0 }),
            E::Neg(a) => neg(a.differentiate(var)),
            E::Add(a, b) => add(a.differentiate(var), b.differentiate(var)),
            E::Sub(a, b) => sub(a.differentiate(var), b.differentiate(var)),
            E::Mul(a, b) => add(
                mul(a.differentiate(var), (**b).clone()),
                mul((**a).clone(), b.differentiate(var)),
            ),
            E::Div(a, b) => div(
                sub(
                    mul(a.differentiate(var), (**b).clone()),
                    mul((**a).clone(), b.differentiate(var)),
                ),
                pow((**b).clone(), 2),
            ),
            E::Pow(a, n) => mul(
                mul(num(f64::from(*n)), pow((**a).clone(), n - 1)),
                a.differentiate(var),
            ),
            E::Call(f, a) => {
                let outer = match f {
                    Func::Sin => call(Func::Cos, (**a).clone()),
                    Func::Cos => neg(call(Func::Sin, (**a).clone())),
                    Func::Exp => call(Func::Exp, (**a).clone()),
                };
                mul(outer, a.differentiate(var))
            }
        }
    }

    /// Evaluates at `point = (x, y, z)`.
    pub fn eval(&self, point: [f64; 3]) -> Result<f64> {
        let v = match self {
            E::Num(v) => *v,
            E::Var(v) => point[v.axis()],
            E::Neg(a) => -a.eval(point)?,
            E::Add(a, b) => a.eval(point)? + b.eval(point)?,
            E::Sub(a, b) => a.eval(point)? - b.eval(point)?,
            E::Mul(a, b) => a.eval(point)? * b.eval(point)?,
            E::Div(a, b) => {
                let d = b.eval(point)?;
                if d == 0.0 {
                    return Err(Error::Domain(format!("division by zero in `{self}` at {point:?}")));
                }
                a.eval(point)? / d
            }
            E::Pow(a, n) => {
                let base = a.eval(point)?;
                if base == 0.0 && *n < 0 {
                    return Err(Error::Domain(format!("zero to a negative power in `{self}` at {point:?}")));
                }
                base.powi(*n)
            }
            E::Call(f, a) => f.apply(a.eval(point)?),
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("non-finite value of `{self}` at {point:?}")))
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            E::Num(_) => true,
            E::Var(_) => false,
            E::Neg(a) | E::Pow(a, _) | E::Call(_, a) => a.is_constant(),
            E::Add(a, b) | E::Sub(a, b) | E::Mul(a, b) | E::Div(a, b) => a.is_constant() && b.is_constant(),
        }
    }

    /// `c0 + c . (x, y, z)` if the expression is affine.
    fn affine(&self) -> Option<(f64, [f64; 3])> {
        match self {
            _ if self.is_constant() => Some((self.eval([0.0; 3]).ok()?, [0.0; 3])),
            E::Var(v) => {
                let mut c = [0.0; 3];
                c[v.axis()] = 1.0;
                Some((0.0, c))
            }
            E::Neg(a) => a.affine().map(|(c0, c)| (-c0, c.map(|x| -x))),
            E::Add(a, b) | E::Sub(a, b) => {
                let (a0, ac) = a.affine()?;
                let (b0, bc) = b.affine()?;
                let s = if matches!(self, E::Add(..)) { 1.0 } else { -1.0 };
                Some((a0 + s * b0, std::array::from_fn(|i| ac[i] + s * bc[i])))
            }
            E::Mul(a, b) => {
                let (k, (c0, c)) = if a.is_constant() {
                    (a.eval([0.0; 3]).ok()?, b.affine()?)
                } else if b.is_constant() {
                    (b.eval([0.0; 3]).ok()?, a.affine()?)
                } else {
                    return None;
                };
                Some((k * c0, c.map(|x| k * x)))
            }
            E::Div(a, b) if b.is_constant() => {
                let d = b.eval([0.0; 3]).ok()?;
                let (c0, c) = a.affine()?;
                Some((c0 / d, c.map(|x| x / d)))
            }
            _ => None,
        }
    }

    /// Per-axis Fourier bandwidth on a periodic box of side `length`, in units
    /// of the fundamental `2 pi / length`.
    ///
    /// Returns `None` unless the expression is a trigonometric polynomial whose
    /// frequencies are integer multiples of the fundamental.
    pub fn trig_bandwidth(&self, length: f64) -> Option<[u32; 3]> {
        if self.is_constant() {
            return Some([0; 3]);
        }
        match self {
            E::Num(_) => Some([0; 3]),
            E::Var(_) => None,
            E::Neg(a) => a.trig_bandwidth(length),
            E::Add(a, b) | E::Sub(a, b) => {
                let (x, y) = (a.trig_bandwidth(length)?, b.trig_bandwidth(length)?);
                Some(std::array::from_fn(|i| x[i].max(y[i])))
            }
            E::Mul(a, b) => {
                let (x, y) = (a.trig_bandwidth(length)?, b.trig_bandwidth(length)?);
                Some(std::array::from_fn(|i| x[i] + y[i]))
            }
            E::Div(a, b) if b.is_constant() => a.trig_bandwidth(length),
            E::Div(..) => None,
            E::Pow(a, n) if *n >= 0 => a.trig_bandwidth(length).map(|x| x.map(|k| k * (*n as u32))),
            E::Pow(..) => None,
            E::Call(Func::Exp, _) => None,
            E::Call(_, a) => {
                let (_, c) = a.affine()?;
                let mut out = [0u32; 3];
                for (slot, coeff) in out.iter_mut().zip(c) {
                    let m = coeff * length / (2.0 * PI);
                    let r = m.round();
                    if (m - r).abs() > 1e-9 {
                        return None;
                    }
                    *slot = r.abs() as u32;
                }
                Some(out)
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            E::Add(..) | E::Sub(..) => 1,
            E::Mul(..) | E::Div(..) => 2,
            E::Neg(_) => 3,
            E::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => 3,
            E::Pow(..) => 4,
            _ => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            f.write_str("(")?;
            self.write_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            E::Num(v) if *v < 0.0 => write!(f, "-{}", -v),
            E::Num(v) => write!(f, "{v}"),
            E::Var(v) => f.write_str(v.name()),
            E::Neg(a) => {
                f.write_str("-")?;
                a.write_at(f, 3)
            }
            E::Add(a, b) | E::Sub(a, b) => {
                a.write_at(f, 1)?;
                f.write_str(if matches!(self, E::Add(..)) { " + " } else { " - " })?;
                b.write_at(f, 2)
            }
            E::Mul(a, b) | E::Div(a, b) => {
                a.write_at(f, 2)?;
                f.write_str(if matches!(self, E::Mul(..)) { "*" } else { "/" })?;
                b.write_at(f, 3)
            }
            E::Pow(a, n) => {
                a.write_at(f, 5)?;
                write!(f, "^{n}")
            }
            E::Call(func, a) => {
                write!(f, "{}(", func.name())?;
                a.write_at(f, 0)?;
                f.write_str(")")
            }
        }
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

impl std::str::FromStr for ScalarExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_scalar_expr(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> ScalarExpr {
        parse_scalar_expr(s).unwrap()
    }

    fn bx(e: ScalarExpr) -> Box<ScalarExpr> {
        Box::new(e)
    }

    #[test]
    fn harmonic_superpotential_tree() {
        let sq = |v| E::Pow(bx(E::Var(v)), 2);
        let expected = E::Mul(
            bx(E::Num(0.5)),
            bx(E::Add(bx(E::Add(bx(sq(Var::X)), bx(sq(Var::Y)))), bx(sq(Var::Z)))),
        );
        assert_eq!(p("0.5*(x^2+y^2+z^2)"), expected);
    }

    #[test]
    fn function_product() {
        assert_eq!(
            p("sin(x)*cos(y)"),
            E::Mul(bx(E::Call(Func::Sin, bx(E::Var(Var::X)))), bx(E::Call(Func::Cos, bx(E::Var(Var::Y)))))
        );
    }

    #[test]
    fn precedence() {
        assert_eq!(p("-x^2"), E::Neg(bx(E::Pow(bx(E::Var(Var::X)), 2))));
        assert_eq!(p("1-2-3").eval([0.0; 3]).unwrap(), -4.0);
        assert_eq!(p("8/4/2").eval([0.0; 3]).unwrap(), 1.0);
        assert_eq!(p("2*x^-1").eval([4.0, 0.0, 0.0]).unwrap(), 0.5);
    }

    #[test]
    fn malformed_input_reports_offset() {
        match parse_scalar_expr("x +* y") {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_scalar_expr("x^1.5"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse_scalar_expr("(x"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse_scalar_expr("x y"), Err(Error::Syntax { offset: 2, .. })));
        assert!(matches!(parse_scalar_expr("x # y"), Err(Error::Syntax { offset: 2, .. })));
    }

    #[test]
    fn unknown_identifier() {
        match parse_scalar_expr("2*tan(x)") {
            Err(Error::UnknownIdentifier { name, offset }) => {
                assert_eq!(name, "tan");
                assert_eq!(offset, 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn derivatives() {
        let d = p("x^2/2").differentiate(Var::X);
        for x in [-1.5, 0.0, 2.0] {
            assert!((d.eval([x, 0.3, 0.0]).unwrap() - x).abs() < 1e-15);
        }
        let d = p("sin(x)*cos(y)").differentiate(Var::Y);
        for (x, y) in [(0.3, 0.7), (-1.0, 2.0)] {
            let expected = -f64::sin(x) * f64::sin(y);
            assert!((d.eval([x, y, 0.0]).unwrap() - expected).abs() < 1e-15);
        }
        assert_eq!(p("3").differentiate(Var::Z), E::Num(0.0));
        assert_eq!(p("y*z").differentiate(Var::X), E::Num(0.0));
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(p("1/x").eval([0.0; 3]), Err(Error::Domain(_))));
        assert!(matches!(p("x^-2").eval([0.0; 3]), Err(Error::Domain(_))));
        assert!(matches!(p("exp(x)").eval([1000.0, 0.0, 0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn printing_round_trips() {
        for s in ["0.5*(x^2+y^2+z^2)", "-x^2", "(-x)^2", "x-(y-z)", "x/(y*z)", "--x", "x*-y", "(x^2)^3", "exp(-x)*2"] {
            let e = p(s);
            assert_eq!(p(&e.to_string()), e, "{s} -> {e}");
        }
    }

    #[test]
    fn trig_bandwidth() {
        let l = 2.0 * PI;
        assert_eq!(p("cos(x)+cos(y)+cos(z)").trig_bandwidth(l), Some([1, 1, 1]));
        assert_eq!(p("sin(2*x)*cos(y) + 0.3").trig_bandwidth(l), Some([2, 1, 0]));
        assert_eq!(p("cos(x)^2").trig_bandwidth(l), Some([2, 0, 0]));
        assert_eq!(p("sin(x+y)").trig_bandwidth(l), Some([1, 1, 0]));
        assert_eq!(p("0.5*x^2").trig_bandwidth(l), None);
        assert_eq!(p("exp(cos(x))").trig_bandwidth(l), None);
        assert_eq!(p("cos(1.5*x)").trig_bandwidth(l), None);
        assert_eq!(p("cos(pi*x/6)").trig_bandwidth(12.0), Some([1, 0, 0]));
    }
}

impl ScalarExpr {
    pub fn constant(v: f64) -> Self {
        num(v)
    }

    /// Integer power with constant folding.
    pub fn powi(self, n: i32) -> Self {
        pow(self, n)
    }
}

macro_rules! folding_op {
    ($trait:ident, $method:ident, $ctor:ident) => {
        impl std::ops::$trait for ScalarExpr {
            type Output = ScalarExpr;
            fn $method(self, rhs: ScalarExpr) -> ScalarExpr {
                $ctor(self, rhs)
            }
        }
    };
}

folding_op!(Add, add, add);
folding_op!(Sub, sub, sub);
folding_op!(Mul, mul, mul);
folding_op!(Div, div, div);

impl std::ops::Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        neg(self)
    }
}
