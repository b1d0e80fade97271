//! The cost-expression language used by framework configuration files.
//!
//! Grammar:
//!
//! ```text
//! expr  := term (("+" | "-") term)*
//! term  := unary (("*" | "/") unary)*
//! unary := ["-"] atom
//! atom  := number | ident | fn "(" expr {"," expr} ")" | "(" expr ")"
//! fn    := ceil | floor | log2 | min | max | if | slice_sum
//! ```
//!
//! Evaluation is exact rational arithmetic; callers round the final value.
//! `log2` is integer-valued: it returns the smallest n with 2^n >= x, which
//! is how round formulas written as `log2(k)` are meant to be read. `if`
//! evaluates only the taken branch. `slice_sum(mod, start, end)` sums a slice
//! of the coefficient-modulus list; `end <= 0` counts back from the end of
//! the list and `mod` may appear nowhere else.

use crate::cost::EvalScope;
use crate::error::{Error, Result};
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use std::str::FromStr;

/// Identifiers a formula may reference.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ident {
    K,
    KappaS,
    Kappa,
    F,
    M,
    Size,
    P,
    Q,
    R,
    Deg,
    Knownmsb,
    Batch,
    InChannel,
    OutChannel,
    Inw,
    Inh,
    Outw,
    Outh,
    Kw,
    Kh,
}

impl Ident {
    fn from_name(name: &str) -> Option<Ident> {
        Some(match name {
            "k" => Ident::K,
            "kappa_s" => Ident::KappaS,
            "kappa" => Ident::Kappa,
            "f" => Ident::F,
            "m" => Ident::M,
            "size" => Ident::Size,
            "p" => Ident::P,
            "q" => Ident::Q,
            "r" => Ident::R,
            "deg" => Ident::Deg,
            "knownmsb" => Ident::Knownmsb,
            "batch" => Ident::Batch,
            "in_channel" => Ident::InChannel,
            "out_channel" => Ident::OutChannel,
            "inw" => Ident::Inw,
            "inh" => Ident::Inh,
            "outw" => Ident::Outw,
            "outh" => Ident::Outh,
            "kw" => Ident::Kw,
            "kh" => Ident::Kh,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Ident::K => "k",
            Ident::KappaS => "kappa_s",
            Ident::Kappa => "kappa",
            Ident::F => "f",
            Ident::M => "m",
            Ident::Size => "size",
            Ident::P => "p",
            Ident::Q => "q",
            Ident::R => "r",
            Ident::Deg => "deg",
            Ident::Knownmsb => "knownmsb",
            Ident::Batch => "batch",
            Ident::InChannel => "in_channel",
            Ident::OutChannel => "out_channel",
            Ident::Inw => "inw",
            Ident::Inh => "inh",
            Ident::Outw => "outw",
            Ident::Outh => "outh",
            Ident::Kw => "kw",
            Ident::Kh => "kh",
        }
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
    Ceil,
    Floor,
    Log2,
    Min,
    Max,
    If,
}

/// Parsed cost expression.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Number(BigRational),
    Ident(Ident),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
    /// slice_sum(mod, start, end); the receiver is implicit.
    SliceSum(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr> {
        let tokens = lex(text)?;
        let mut p = Parser { tokens, pos: 0 };
        let e = p.expr()?;
        match p.peek() {
            Token::End => Ok(e),
            _ => Err(p.error("unexpected trailing input")),
        }
    }

    /// Evaluates against a scope; exact rational result.
    pub fn eval(&self, scope: &EvalScope) -> Result<BigRational> {
        match self {
            Expr::Number(n) => Ok(n.clone()),
            Expr::Ident(id) => lookup(*id, scope),
            Expr::Neg(e) => Ok(-e.eval(scope)?),
            Expr::Binary(op, a, b) => {
                let x = a.eval(scope)?;
                let y = b.eval(scope)?;
                match op {
                    BinOp::Add => Ok(x + y),
                    BinOp::Sub => Ok(x - y),
                    BinOp::Mul => Ok(x * y),
                    BinOp::Div => {
                        if y.is_zero() {
                            Err(Error::DivisionByZero)
                        } else {
                            Ok(x / y)
                        }
                    }
                }
            }
            Expr::Call(f, args) => match f {
                Func::Ceil => Ok(args[0].eval(scope)?.ceil()),
                Func::Floor => Ok(args[0].eval(scope)?.floor()),
                Func::Log2 => ceil_log2(&args[0].eval(scope)?),
                Func::Min => {
                    let mut best = args[0].eval(scope)?;
                    for a in &args[1..] {
                        let v = a.eval(scope)?;
                        if v < best {
                            best = v;
                        }
                    }
                    Ok(best)
                }
                Func::Max => {
                    let mut best = args[0].eval(scope)?;
                    for a in &args[1..] {
                        let v = a.eval(scope)?;
                        if v > best {
                            best = v;
                        }
                    }
                    Ok(best)
                }
                Func::If => {
                    let cond = args[0].eval(scope)?;
                    if cond.is_zero() {
                        args[2].eval(scope)
                    } else {
                        args[1].eval(scope)
                    }
                }
            },
            Expr::SliceSum(start, end) => {
                let modulus = scope.modulus()?;
                let s = to_i64(&start.eval(scope)?)?;
                let e = to_i64(&end.eval(scope)?)?;
                Ok(BigRational::from_integer(BigInt::from(crate::cost::slice_sum(
                    modulus, s, e,
                ))))
            }
        }
    }
}

fn lookup(id: Ident, scope: &EvalScope) -> Result<BigRational> {
    let int = |v: u64| Ok(BigRational::from_integer(BigInt::from(v)));
    match id {
        Ident::K => int(scope.k()),
        Ident::KappaS => int(scope.kappa_s()),
        Ident::Kappa => int(scope.kappa()),
        Ident::F => int(scope.f()),
        Ident::M => int(scope.m()),
        Ident::Size => int(scope.size()),
        Ident::P => int(scope.p()?),
        Ident::Q => int(scope.q()?),
        Ident::R => int(scope.r()?),
        Ident::Deg => int(scope.deg()?),
        Ident::Knownmsb => int(u64::from(scope.knownmsb())),
        Ident::Batch => int(scope.conv()?.batch),
        Ident::InChannel => int(scope.conv()?.in_channel),
        Ident::OutChannel => int(scope.conv()?.out_channel),
        Ident::Inw => int(scope.conv()?.inw),
        Ident::Inh => int(scope.conv()?.inh),
        Ident::Outw => int(scope.conv()?.outw),
        Ident::Outh => int(scope.conv()?.outh),
        Ident::Kw => int(scope.conv()?.kw),
        Ident::Kh => int(scope.conv()?.kh),
    }
}

/// Smallest integer n with 2^n >= x, exact for any positive rational.
fn ceil_log2(x: &BigRational) -> Result<BigRational> {
    if !x.is_positive() {
        return Err(Error::Log2NonPositive);
    }
    let one = BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));
    let mut n: i64 = 0;
    let mut pow = one.clone();
    if *x <= one {
        // 2^0 = 1 >= x for x in (0, 1]
        return Ok(BigRational::zero());
    }
    while pow < *x {
        pow *= &two;
        n += 1;
    }
    Ok(BigRational::from_integer(BigInt::from(n)))
}

fn to_i64(x: &BigRational) -> Result<i64> {
    if !x.is_integer() {
        return Err(Error::InvalidDimension(format!(
            "slice_sum indices must be integers, got {x}"
        )));
    }
    x.to_integer()
        .to_i64()
        .ok_or(Error::CostOverflow)
}

// ---------------------------------------------------------------------------
// lexer / parser
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(BigRational),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Comma,
    End,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Num(_) => write!(f, "number"),
            Token::Name(n) => write!(f, "`{n}`"),
            Token::Plus => write!(f, "`+`"),
            Token::Minus => write!(f, "`-`"),
            Token::Star => write!(f, "`*`"),
            Token::Slash => write!(f, "`/`"),
            Token::LParen => write!(f, "`(`"),
            Token::RParen => write!(f, "`)`"),
            Token::Comma => write!(f, "`,`"),
            Token::End => write!(f, "end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Token, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((Token::Plus, i));
                i += 1;
            }
            '-' => {
                out.push((Token::Minus, i));
                i += 1;
            }
            '*' => {
                out.push((Token::Star, i));
                i += 1;
            }
            '/' => {
                out.push((Token::Slash, i));
                i += 1;
            }
            '(' => {
                out.push((Token::LParen, i));
                i += 1;
            }
            ')' => {
                out.push((Token::RParen, i));
                i += 1;
            }
            ',' => {
                out.push((Token::Comma, i));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let mut frac_digits = 0usize;
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    let fs = i;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                    frac_digits = i - fs;
                    if frac_digits == 0 {
                        return Err(Error::Parse {
                            pos: i,
                            msg: "expected digits after decimal point".into(),
                        });
                    }
                }
                let digits: String = text[start..i].chars().filter(|c| *c != '.').collect();
                let num = BigInt::from_str(&digits).map_err(|e| Error::Parse {
                    pos: start,
                    msg: format!("bad number: {e}"),
                })?;
                let den = BigInt::from(10u32).pow(frac_digits as u32);
                out.push((Token::Num(BigRational::new(num, den)), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((Token::Name(text[start..i].to_string()), start));
            }
            _ => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    out.push((Token::End, bytes.len()));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> usize {
        self.tokens[self.pos].1
    }

    fn error(&self, msg: &str) -> Error {
        Error::Parse { pos: self.here(), msg: msg.to_string() }
    }

    fn expect(&mut self, t: Token) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&format!("expected {t}, found {}", self.peek())))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Token::Plus => BinOp::Add,
                Token::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Token::Star => BinOp::Mul,
                Token::Slash => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if *self.peek() == Token::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.atom()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.here();
        match self.bump() {
            Token::Num(n) => Ok(Expr::Number(n)),
            Token::LParen => {
                let e = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(e)
            }
            Token::Name(name) => {
                if *self.peek() == Token::LParen {
                    self.call(&name, pos)
                } else if name == "mod" {
                    Err(Error::Parse {
                        pos,
                        msg: "`mod` may only appear inside slice_sum".into(),
                    })
                } else if let Some(id) = Ident::from_name(&name) {
                    Ok(Expr::Ident(id))
                } else {
                    Err(Error::UnknownIdent { ident: name, pos })
                }
            }
            other => Err(Error::Parse {
                pos,
                msg: format!("expected a value, found {other}"),
            }),
        }
    }

    fn call(&mut self, name: &str, pos: usize) -> Result<Expr> {
        self.expect(Token::LParen)?;
        if name == "slice_sum" {
            // first argument must be the literal `mod`
            match self.bump() {
                Token::Name(n) if n == "mod" => {}
                other => {
                    return Err(Error::Parse {
                        pos,
                        msg: format!("slice_sum expects `mod` as its first argument, found {other}"),
                    })
                }
            }
            self.expect(Token::Comma)?;
            let start = self.expr()?;
            self.expect(Token::Comma)?;
            let end = self.expr()?;
            self.expect(Token::RParen)?;
            return Ok(Expr::SliceSum(Box::new(start), Box::new(end)));
        }
        let func = match name {
            "ceil" => Func::Ceil,
            "floor" => Func::Floor,
            "log2" => Func::Log2,
            "min" => Func::Min,
            "max" => Func::Max,
            "if" => Func::If,
            other => {
                return Err(Error::Parse {
                    pos,
                    msg: format!("unknown function `{other}`"),
                })
            }
        };
        let mut args = vec![self.expr()?];
        while *self.peek() == Token::Comma {
            self.bump();
            args.push(self.expr()?);
        }
        self.expect(Token::RParen)?;
        let ok = match func {
            Func::Ceil | Func::Floor | Func::Log2 => args.len() == 1,
            Func::Min | Func::Max => args.len() >= 2,
            Func::If => args.len() == 3,
        };
        if !ok {
            return Err(Error::Parse {
                pos,
                msg: format!("wrong number of arguments for `{name}`"),
            });
        }
        Ok(Expr::Call(func, args))
    }
}

/// Rounds an evaluated component up to an integer, rejecting negatives.
pub fn finalize_component(value: &BigRational, component: &'static str) -> Result<u64> {
    if value.is_negative() {
        return Err(Error::NegativeCost {
            component,
            value: value.to_string(),
        });
    }
    value
        .ceil()
        .to_integer()
        .to_u64()
        .ok_or(Error::CostOverflow)
}
