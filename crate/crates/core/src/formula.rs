//! Holomorphic expressions in one complex variable with exact forward-mode
//! derivatives.
//!
//! Expressions are parsed from standard infix notation (`^` binds tighter
//! than unary minus, which binds tighter than `*` `/`, which bind tighter
//! than `+` `-`). The variable is `z`, the imaginary unit is `i`, and the
//! function set is `exp`, `log`, `sqrt`, `sin`, `cos` with principal
//! branches for `log` and `sqrt`. Powers are restricted to integer
//! exponents so every well-formed expression is holomorphic off its
//! singular set.

use num_complex::Complex64;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Denominators below this magnitude are treated as singular.
const SINGULAR_EPS: f64 = 1e-300;

/// A complex value paired with its derivative with respect to the variable.
///
/// Arithmetic obeys the sum/product/quotient/chain rules exactly (up to
/// floating rounding), so propagating `Dual::var(z)` through an expression
/// yields the analytic derivative alongside the value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub value: Complex64,
    pub deriv: Complex64,
}

impl Dual {
    pub fn constant(value: Complex64) -> Self {
        Dual {
            value,
            deriv: Complex64::new(0.0, 0.0),
        }
    }

    /// Seed for the variable: derivative 1.
    pub fn var(value: Complex64) -> Self {
        Dual {
            value,
            deriv: Complex64::new(1.0, 0.0),
        }
    }

    pub fn add(self, rhs: Dual) -> Dual {
        Dual {
            value: self.value + rhs.value,
            deriv: self.deriv + rhs.deriv,
        }
    }

    pub fn sub(self, rhs: Dual) -> Dual {
        Dual {
            value: self.value - rhs.value,
            deriv: self.deriv - rhs.deriv,
        }
    }

    pub fn mul(self, rhs: Dual) -> Dual {
        Dual {
            value: self.value * rhs.value,
            deriv: self.deriv * rhs.value + self.value * rhs.deriv,
        }
    }

    pub fn div(self, rhs: Dual) -> Result<Dual> {
        if rhs.value.norm() < SINGULAR_EPS {
            return Err(Error::EvalSingular("division by ~0"));
        }
        let value = self.value / rhs.value;
        Ok(Dual {
            value,
            deriv: (self.deriv - value * rhs.deriv) / rhs.value,
        })
    }

    pub fn neg(self) -> Dual {
        Dual {
            value: -self.value,
            deriv: -self.deriv,
        }
    }

    pub fn powi(self, n: i32) -> Result<Dual> {
        if n == 0 {
            return Ok(Dual::constant(Complex64::new(1.0, 0.0)));
        }
        if n < 0 && self.value.norm() < SINGULAR_EPS {
            return Err(Error::EvalSingular("negative power of ~0"));
        }
        let value = self.value.powi(n);
        let deriv = Complex64::new(n as f64, 0.0) * self.value.powi(n - 1) * self.deriv;
        Ok(Dual { value, deriv })
    }

    pub fn exp(self) -> Dual {
        let value = self.value.exp();
        Dual {
            value,
            deriv: value * self.deriv,
        }
    }

    pub fn log(self) -> Result<Dual> {
        if self.value.norm() < SINGULAR_EPS {
            return Err(Error::EvalSingular("log at ~0"));
        }
        Ok(Dual {
            value: self.value.ln(),
            deriv: self.deriv / self.value,
        })
    }

    pub fn sqrt(self) -> Result<Dual> {
        if self.value.norm() < SINGULAR_EPS {
            return Err(Error::EvalSingular("sqrt at ~0"));
        }
        let value = self.value.sqrt();
        Ok(Dual {
            value,
            deriv: self.deriv / (value * 2.0),
        })
    }

    pub fn sin(self) -> Dual {
        Dual {
            value: self.value.sin(),
            deriv: self.value.cos() * self.deriv,
        }
    }

    pub fn cos(self) -> Dual {
        Dual {
            value: self.value.cos(),
            deriv: -self.value.sin() * self.deriv,
        }
    }
}

/// Expression tree for a holomorphic function of `z`.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Var,
    Const(Complex64),
    Add(Arc<Expr>, Arc<Expr>),
    Sub(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Div(Arc<Expr>, Arc<Expr>),
    Pow(Arc<Expr>, i32),
    Neg(Arc<Expr>),
    Exp(Arc<Expr>),
    Log(Arc<Expr>),
    Sqrt(Arc<Expr>),
    Sin(Arc<Expr>),
    Cos(Arc<Expr>),
}

impl Expr {
    /// Evaluate value and first derivative by dual-number propagation.
    pub fn eval_dual(&self, z: Complex64) -> Result<Dual> {
        match self {
            Expr::Var => Ok(Dual::var(z)),
            Expr::Const(c) => Ok(Dual::constant(*c)),
            Expr::Add(a, b) => Ok(a.eval_dual(z)?.add(b.eval_dual(z)?)),
            Expr::Sub(a, b) => Ok(a.eval_dual(z)?.sub(b.eval_dual(z)?)),
            Expr::Mul(a, b) => Ok(a.eval_dual(z)?.mul(b.eval_dual(z)?)),
            Expr::Div(a, b) => a.eval_dual(z)?.div(b.eval_dual(z)?),
            Expr::Pow(a, n) => a.eval_dual(z)?.powi(*n),
            Expr::Neg(a) => Ok(a.eval_dual(z)?.neg()),
            Expr::Exp(a) => Ok(a.eval_dual(z)?.exp()),
            Expr::Log(a) => a.eval_dual(z)?.log(),
            Expr::Sqrt(a) => a.eval_dual(z)?.sqrt(),
            Expr::Sin(a) => Ok(a.eval_dual(z)?.sin()),
            Expr::Cos(a) => Ok(a.eval_dual(z)?.cos()),
        }
    }

    /// Evaluate the value only.
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.eval_dual(z)?.value)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn paren(f: &mut fmt::Formatter<'_>, e: &Expr, need: bool) -> fmt::Result {
            if need {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            Expr::Var => write!(f, "z"),
            Expr::Const(c) => {
                if c.im == 0.0 {
                    if c.re < 0.0 {
                        // Negative literals never come out of the parser; keep
                        // them unambiguous for programmatic trees.
                        write!(f, "({})", c.re)
                    } else {
                        write!(f, "{}", c.re)
                    }
                } else if c.re == 0.0 && c.im == 1.0 {
                    write!(f, "i")
                } else {
                    write!(f, "({}+{}*i)", c.re, c.im)
                }
            }
            // the parser is left-associative, so right children at equal
            // precedence need parentheses to keep the tree shape
            Expr::Add(a, b) => {
                paren(f, a, a.precedence() < 1)?;
                write!(f, " + ")?;
                paren(f, b, b.precedence() <= 1)
            }
            Expr::Sub(a, b) => {
                paren(f, a, a.precedence() < 1)?;
                write!(f, " - ")?;
                paren(f, b, b.precedence() <= 1)
            }
            Expr::Mul(a, b) => {
                paren(f, a, a.precedence() < 2)?;
                write!(f, "*")?;
                paren(f, b, b.precedence() <= 2)
            }
            Expr::Div(a, b) => {
                paren(f, a, a.precedence() < 2)?;
                write!(f, "/")?;
                paren(f, b, b.precedence() <= 2)
            }
            Expr::Pow(a, n) => {
                paren(f, a, a.precedence() < 5)?;
                write!(f, "^{n}")
            }
            Expr::Neg(a) => {
                write!(f, "-")?;
                paren(f, a, a.precedence() <= 3)
            }
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Log(a) => write!(f, "log({a})"),
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
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

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    tokens: Vec<(Token, usize)>,
}

impl<'a> Lexer<'a> {
    fn run(text: &'a str) -> Result<Vec<(Token, usize)>> {
        let mut lx = Lexer {
            src: text.as_bytes(),
            pos: 0,
            tokens: Vec::new(),
        };
        while lx.pos < lx.src.len() {
            let start = lx.pos;
            let b = lx.src[lx.pos];
            match b {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    lx.pos += 1;
                }
                b'+' => lx.push(Token::Plus, start),
                b'-' => lx.push(Token::Minus, start),
                b'*' => lx.push(Token::Star, start),
                b'/' => lx.push(Token::Slash, start),
                b'^' => lx.push(Token::Caret, start),
                b'(' => lx.push(Token::LParen, start),
                b')' => lx.push(Token::RParen, start),
                b'0'..=b'9' | b'.' => lx.number(start)?,
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => lx.ident(start),
                _ => {
                    return Err(Error::Syntax {
                        offset: start,
                        message: format!("unexpected character `{}`", b as char),
                    })
                }
            }
        }
        Ok(lx.tokens)
    }

    fn push(&mut self, t: Token, at: usize) {
        self.tokens.push((t, at));
        self.pos += 1;
    }

    fn number(&mut self, start: usize) -> Result<()> {
        let mut end = self.pos;
        while end < self.src.len() && (self.src[end].is_ascii_digit() || self.src[end] == b'.') {
            end += 1;
        }
        // optional exponent part
        if end < self.src.len() && (self.src[end] == b'e' || self.src[end] == b'E') {
            let mut k = end + 1;
            if k < self.src.len() && (self.src[k] == b'+' || self.src[k] == b'-') {
                k += 1;
            }
            if k < self.src.len() && self.src[k].is_ascii_digit() {
                while k < self.src.len() && self.src[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        let text = std::str::from_utf8(&self.src[start..end]).unwrap();
        let value: f64 = text.parse().map_err(|_| Error::Syntax {
            offset: start,
            message: format!("malformed number `{text}`"),
        })?;
        self.tokens.push((Token::Num(value), start));
        self.pos = end;
        Ok(())
    }

    fn ident(&mut self, start: usize) {
        let mut end = self.pos;
        while end < self.src.len()
            && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
        {
            end += 1;
        }
        let name = std::str::from_utf8(&self.src[start..end]).unwrap().to_owned();
        self.tokens.push((Token::Ident(name), start));
        self.pos = end;
    }
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end_offset: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(_, o)| *o)
            .unwrap_or(self.end_offset)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    lhs = Expr::Add(Arc::new(lhs), Arc::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.bump();
                    lhs = Expr::Sub(Arc::new(lhs), Arc::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    lhs = Expr::Mul(Arc::new(lhs), Arc::new(self.unary()?));
                }
                Some(Token::Slash) => {
                    self.bump();
                    lhs = Expr::Div(Arc::new(lhs), Arc::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if let Some(Token::Minus) = self.peek() {
            self.bump();
            return Ok(Expr::Neg(Arc::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if let Some(Token::Caret) = self.peek() {
            self.bump();
            let off = self.offset();
            let neg = if let Some(Token::Minus) = self.peek() {
                self.bump();
                true
            } else {
                false
            };
            match self.bump() {
                Some(Token::Num(v)) if v.fract() == 0.0 && v.abs() <= i32::MAX as f64 => {
                    let n = v as i32;
                    Ok(Expr::Pow(Arc::new(base), if neg { -n } else { n }))
                }
                _ => Err(Error::Syntax {
                    offset: off,
                    message: "exponent must be an integer literal".into(),
                }),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        let off = self.offset();
        match self.bump() {
            Some(Token::Num(v)) => Ok(Expr::Const(Complex64::new(v, 0.0))),
            Some(Token::Ident(name)) => match name.as_str() {
                "z" => Ok(Expr::Var),
                "i" => Ok(Expr::Const(Complex64::new(0.0, 1.0))),
                "exp" | "log" | "sqrt" | "sin" | "cos" => {
                    let o = self.offset();
                    match self.bump() {
                        Some(Token::LParen) => {}
                        _ => {
                            return Err(Error::Syntax {
                                offset: o,
                                message: format!("expected `(` after `{name}`"),
                            })
                        }
                    }
                    let arg = Arc::new(self.expr()?);
                    let o = self.offset();
                    match self.bump() {
                        Some(Token::RParen) => {}
                        _ => {
                            return Err(Error::Syntax {
                                offset: o,
                                message: "expected `)`".into(),
                            })
                        }
                    }
                    Ok(match name.as_str() {
                        "exp" => Expr::Exp(arg),
                        "log" => Expr::Log(arg),
                        "sqrt" => Expr::Sqrt(arg),
                        "sin" => Expr::Sin(arg),
                        _ => Expr::Cos(arg),
                    })
                }
                _ => Err(Error::UnknownIdentifier { offset: off, name }),
            },
            Some(Token::LParen) => {
                let inner = self.expr()?;
                let o = self.offset();
                match self.bump() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(Error::Syntax {
                        offset: o,
                        message: "expected `)`".into(),
                    }),
                }
            }
            Some(tok) => Err(Error::Syntax {
                offset: off,
                message: format!("unexpected token {tok:?}"),
            }),
            None => Err(Error::Syntax {
                offset: off,
                message: "incomplete expression".into(),
            }),
        }
    }
}

/// Parse an infix expression in the variable `z`.
pub fn parse(text: &str) -> Result<Expr> {
    if text.trim().is_empty() {
        return Err(Error::Syntax {
            offset: 0,
            message: "empty expression".into(),
        });
    }
    let tokens = Lexer::run(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        end_offset: text.len(),
    };
    let e = p.expr()?;
    if p.pos != p.tokens.len() {
        return Err(Error::Syntax {
            offset: p.offset(),
            message: "trailing input".into(),
        });
    }
    Ok(e)
}
