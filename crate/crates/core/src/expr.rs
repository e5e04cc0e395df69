//! A small expression language for user-supplied functions of `z`.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' ['+' | '-'] integer)?
//! atom    := number | 'z' | 'x' | 'pi' | 'i' | func '(' expr ')' | '(' expr ')'
//! func    := 'exp' | 'log' | 'sqrt'
//! ```

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{cr, csqrt, czero, Real};

/// Source offset carried by AST nodes. Ignored by equality so that ASTs
/// parsed from differently formatted sources compare equal.
#[derive(Clone, Copy, Debug, Default)]
pub struct Pos(pub usize);

impl PartialEq for Pos {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constant {
    Pi,
    I,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Const(Constant),
    Neg(Box<Expr>),
    Bin {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
        pos: Pos,
    },
    Pow {
        base: Box<Expr>,
        exp: i32,
        pos: Pos,
    },
    Call {
        func: Func,
        arg: Box<Expr>,
        pos: Pos,
    },
}

/// A parsed function of one complex variable.
#[derive(Clone, Debug, PartialEq)]
pub struct FuncExpr {
    ast: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("parse error at column {}: {message}", .position + 1)]
pub struct ParseError {
    /// Byte offset into the source.
    pub position: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("evaluation error at column {}: {message}", .position + 1)]
pub struct EvalError {
    /// Byte offset of the failing node in the source.
    pub position: usize,
    pub message: String,
}

/// A complex function that may fail at some points.
pub trait ComplexFunction<T: Real>: Sync {
    fn eval(&self, z: Complex<T>) -> Result<Complex<T>, EvalError>;
}

impl<T: Real, F> ComplexFunction<T> for F
where
    F: Fn(Complex<T>) -> Complex<T> + Sync,
{
    fn eval(&self, z: Complex<T>) -> Result<Complex<T>, EvalError> {
        Ok(self(z))
    }
}

impl<T: Real> ComplexFunction<T> for FuncExpr {
    fn eval(&self, z: Complex<T>) -> Result<Complex<T>, EvalError> {
        FuncExpr::eval(self, z)
    }
}

pub fn parse(src: &str) -> Result<FuncExpr, ParseError> {
    let mut p = Parser { src, pos: 0 };
    if src.trim().is_empty() {
        return Err(p.error("empty expression"));
    }
    let ast = p.expr()?;
    p.skip_ws();
    if p.pos < src.len() {
        let msg = if p.peek() == Some(')') {
            "unbalanced ')'".to_string()
        } else {
            format!("unexpected '{}'", p.peek().unwrap_or(' '))
        };
        return Err(p.error(msg));
    }
    Ok(FuncExpr { ast })
}

impl FromStr for FuncExpr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            position: self.pos,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            self.skip_ws();
            let pos = Pos(self.pos);
            let op = match self.peek() {
                Some('+') => BinOp::Add,
                Some('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Bin {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                pos,
            };
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            self.skip_ws();
            let pos = Pos(self.pos);
            let op = match self.peek() {
                Some('*') => BinOp::Mul,
                Some('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Bin {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
                pos,
            };
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        self.skip_ws();
        let pos = Pos(self.pos);
        if !self.eat('^') {
            return Ok(base);
        }
        self.skip_ws();
        let start = self.pos;
        let negative = if self.peek() == Some('-') || self.peek() == Some('+') {
            let neg = self.peek() == Some('-');
            self.pos += 1;
            neg
        } else {
            false
        };
        let digits_start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_start || matches!(self.peek(), Some('.' | 'e' | 'E')) {
            self.pos = start;
            return Err(self.error("exponent must be an integer literal"));
        }
        let magnitude: i64 = self.src[digits_start..self.pos].parse().map_err(|_| ParseError {
            position: start,
            message: "exponent out of range".into(),
        })?;
        let exp = if negative { -magnitude } else { magnitude };
        let exp = i32::try_from(exp).map_err(|_| ParseError {
            position: start,
            message: "exponent out of range".into(),
        })?;
        Ok(Expr::Pow {
            base: Box::new(base),
            exp,
            pos,
        })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    self.skip_ws();
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let name = &self.src[start..self.pos];
                let func = match name {
                    "z" | "x" => return Ok(Expr::Var),
                    "pi" => return Ok(Expr::Const(Constant::Pi)),
                    "i" => return Ok(Expr::Const(Constant::I)),
                    "exp" => Func::Exp,
                    "log" => Func::Log,
                    "sqrt" => Func::Sqrt,
                    _ => {
                        self.pos = start;
                        return Err(self.error(format!("unknown identifier '{name}'")));
                    }
                };
                if !self.eat('(') {
                    self.skip_ws();
                    return Err(self.error(format!("expected '(' after '{name}'")));
                }
                let arg = self.expr()?;
                if !self.eat(')') {
                    self.skip_ws();
                    return Err(self.error("expected ')'"));
                }
                Ok(Expr::Call {
                    func,
                    arg: Box::new(arg),
                    pos: Pos(start),
                })
            }
            Some(c) => Err(self.error(format!("unexpected '{c}'"))),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut i = self.pos;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
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
        self.pos = i;
        let text = &self.src[start..i];
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Expr::Num(v)),
            _ => Err(ParseError {
                position: start,
                message: format!("invalid number '{text}'"),
            }),
        }
    }
}

impl FuncExpr {
    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    pub fn eval<T: Real>(&self, z: Complex<T>) -> Result<Complex<T>, EvalError> {
        eval_node(&self.ast, z)
    }
}

fn eval_node<T: Real>(e: &Expr, z: Complex<T>) -> Result<Complex<T>, EvalError> {
    let fail = |pos: &Pos, msg: &str| EvalError {
        position: pos.0,
        message: msg.to_string(),
    };
    Ok(match e {
        Expr::Num(v) => cr(T::lit(*v)),
        Expr::Var => z,
        Expr::Const(Constant::Pi) => cr(T::PI()),
        Expr::Const(Constant::I) => Complex::new(T::zero(), T::one()),
        Expr::Neg(inner) => -eval_node(inner, z)?,
        Expr::Bin { op, lhs, rhs, pos } => {
            let a = eval_node(lhs, z)?;
            let b = eval_node(rhs, z)?;
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b == czero() {
                        return Err(fail(pos, "division by zero"));
                    }
                    a / b
                }
            }
        }
        Expr::Pow { base, exp, pos } => {
            let b = eval_node(base, z)?;
            if *exp < 0 && b == czero() {
                return Err(fail(pos, "zero raised to a negative power"));
            }
            let mut acc = cr(T::one());
            let mut sq = b;
            let mut k = exp.unsigned_abs();
            while k > 0 {
                if k & 1 == 1 {
                    acc = acc * sq;
                }
                sq = sq * sq;
                k >>= 1;
            }
            if *exp < 0 {
                cr(T::one()) / acc
            } else {
                acc
            }
        }
        Expr::Call { func, arg, pos } => {
            let a = eval_node(arg, z)?;
            match func {
                Func::Exp => a.exp(),
                Func::Sqrt => csqrt(a),
                Func::Log => {
                    if a == czero() {
                        return Err(fail(pos, "log of zero"));
                    }
                    // keep the upper edge of the cut for a negative real
                    // argument with a signed-zero imaginary part
                    let im = if a.im == T::zero() { T::zero() } else { a.im };
                    Complex::new(a.norm().ln(), im.atan2(a.re))
                }
            }
        }
    })
}

// Binding strength used by the printer.
fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Bin {
            op: BinOp::Add | BinOp::Sub,
            ..
        } => 1,
        Expr::Bin { .. } => 2,
        Expr::Neg(_) => 3,
        Expr::Pow { .. } => 4,
        _ => 5,
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var => f.write_str("z"),
            Expr::Const(Constant::Pi) => f.write_str("pi"),
            Expr::Const(Constant::I) => f.write_str("i"),
            Expr::Neg(inner) => {
                f.write_str("-")?;
                write_wrapped(f, inner, prec(inner) < 3)
            }
            Expr::Bin { op, lhs, rhs, .. } => {
                let (sym, p) = match op {
                    BinOp::Add => (" + ", 1),
                    BinOp::Sub => (" - ", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                };
                write_wrapped(f, lhs, prec(lhs) < p)?;
                f.write_str(sym)?;
                // left associative: an equal-precedence right operand needs parentheses
                write_wrapped(f, rhs, prec(rhs) <= p)
            }
            Expr::Pow { base, exp, .. } => {
                write_wrapped(f, base, prec(base) < 5)?;
                write!(f, "^{exp}")
            }
            Expr::Call { func, arg, .. } => write!(f, "{}({arg})", func.name()),
        }
    }
}

/// Canonical printed form; re-parses to an identical AST.
impl fmt::Display for FuncExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ast.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn num(v: f64) -> Box<Expr> {
        Box::new(Expr::Num(v))
    }

    #[test]
    fn parses_example_function() {
        let e = parse("37/(x-3)").unwrap();
        let want = Expr::Bin {
            op: BinOp::Div,
            lhs: num(37.0),
            rhs: Box::new(Expr::Bin {
                op: BinOp::Sub,
                lhs: Box::new(Expr::Var),
                rhs: num(3.0),
                pos: Pos(0),
            }),
            pos: Pos(0),
        };
        assert_eq!(e.ast(), &want);
        assert_eq!(e.eval(c(0.5, 0.0)).unwrap(), c(-14.8, 0.0));
    }

    #[test]
    fn simple_evaluations() {
        assert_eq!(parse("1/(z-2)").unwrap().eval(c(0.0, 0.0)).unwrap(), c(-0.5, 0.0));
        let s = parse("sqrt(3-z)").unwrap().eval(c(0.0, 0.0)).unwrap();
        assert!((s - c(3f64.sqrt(), 0.0)).norm() < 1e-15);
        let e = parse("exp(z)").unwrap().eval(c(0.0, std::f64::consts::PI)).unwrap();
        assert!((e - c(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn unbalanced_parenthesis_position() {
        let err = parse("sqrt(3-z").unwrap_err();
        assert_eq!(err.position, 8);
        assert!(err.to_string().contains("column 9"), "{err}");
        assert_eq!(parse("(1+z))").unwrap_err().position, 5);
    }

    #[test]
    fn parse_errors() {
        let err = parse("y + 1").unwrap_err();
        assert_eq!(err.position, 0);
        assert!(err.message.contains("unknown identifier"));
        assert!(parse("z^0.5").unwrap_err().message.contains("integer"));
        assert!(parse("z^(2)").is_err());
        assert!(parse("").is_err());
        assert!(parse("2 +").is_err());
        assert!(parse("1e999").is_err());
    }

    #[test]
    fn precedence_and_exponents() {
        let e = parse("-z^2").unwrap();
        assert_eq!(e.eval(c(3.0, 0.0)).unwrap(), c(-9.0, 0.0));
        let e = parse("2*z^-2 + 1 - 4/2/2").unwrap();
        assert_eq!(e.eval(c(2.0, 0.0)).unwrap(), c(0.5, 0.0));
        assert_eq!(parse("i*i").unwrap().eval(c(0.0, 0.0)).unwrap(), c(-1.0, 0.0));
        assert_eq!(parse("X").unwrap_err().position, 0);
    }

    #[test]
    fn evaluation_errors() {
        let e = parse("1/(z-2)").unwrap();
        let err = e.eval(c(2.0, 0.0)).unwrap_err();
        assert_eq!(err.position, 1);
        assert!(parse("log(z)").unwrap().eval(c(0.0, 0.0)).is_err());
        assert_eq!(parse("sqrt(z)").unwrap().eval(c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert!(parse("z^-1").unwrap().eval(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn principal_branches() {
        let s = parse("sqrt(z)").unwrap().eval(c(-4.0, 0.0)).unwrap();
        assert_eq!(s, c(0.0, 2.0));
        let l = parse("log(z)").unwrap().eval(c(-1.0, 0.0)).unwrap();
        assert!((l - c(0.0, std::f64::consts::PI)).norm() < 1e-15);
    }

    #[test]
    fn print_reparse_round_trip() {
        for src in [
            "37/(x-3)",
            "-(z-1)^3",
            "1 - (2 - z)",
            "z/(2*z)/3",
            "exp(-z^2)*sqrt(3-z) + log(2+i*pi)",
            "(-z)^-2",
            "0.1 + 1e-20*z",
            "--z",
        ] {
            let e = parse(src).unwrap();
            let printed = e.to_string();
            let again = parse(&printed).unwrap();
            assert_eq!(e, again, "{src} -> {printed}");
            assert_eq!(printed, again.to_string());
        }
    }

    #[test]
    fn closures_are_functions() {
        fn apply<F: ComplexFunction<f64>>(f: &F) -> Complex<f64> {
            f.eval(c(1.0, 0.0)).unwrap()
        }
        assert_eq!(apply(&|z: Complex<f64>| z * 2.0), c(2.0, 0.0));
        assert_eq!(apply(&parse("z+1").unwrap()), c(2.0, 0.0));
    }
}
