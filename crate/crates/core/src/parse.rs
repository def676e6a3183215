//! Tokeniser and polynomial expression parser shared by the formula reader.
//!
//! Coefficients may be rational (`1/4`, `0.25`); the parser keeps a common
//! positive denominator so the caller can clear it without changing signs.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::poly::Poly;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.msg)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Num(BigInt, BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Semi,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    And,
    Or,
    Not,
    Implies,
    EcMark,
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, msg: &str| ParseError { line, col, msg: msg.to_string() };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let adv = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            adv(1, &mut i, &mut col);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let tok = match two.as_str() {
            "/\\" => Some((Tok::And, 2)),
            "\\/" => Some((Tok::Or, 2)),
            "->" => Some((Tok::Implies, 2)),
            "!=" => Some((Tok::Ne, 2)),
            "<=" => Some((Tok::Le, 2)),
            ">=" => Some((Tok::Ge, 2)),
            "==" => Some((Tok::Eq, 2)),
            _ => None,
        };
        if let Some((t, n)) = tok {
            out.push(Token { tok: t, line: l0, col: c0 });
            adv(n, &mut i, &mut col);
            continue;
        }
        if src[char_offset(&chars, i)..].starts_with("[ec]") {
            out.push(Token { tok: Tok::EcMark, line: l0, col: c0 });
            adv(4, &mut i, &mut col);
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            '=' => Some(Tok::Eq),
            '<' => Some(Tok::Lt),
            '>' => Some(Tok::Gt),
            '~' => Some(Tok::Not),
            _ => None,
        };
        if let Some(t) = single {
            out.push(Token { tok: t, line: l0, col: c0 });
            adv(1, &mut i, &mut col);
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            col += i - start;
            let (num, den) = parse_decimal(&text).ok_or_else(|| err(l0, c0, "malformed number"))?;
            out.push(Token { tok: Tok::Num(num, den), line: l0, col: c0 });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            let text: String = chars[start..i].iter().collect();
            let t = match text.as_str() {
                "and" => Tok::And,
                "or" => Tok::Or,
                "not" => Tok::Not,
                _ => Tok::Ident(text),
            };
            out.push(Token { tok: t, line: l0, col: c0 });
            continue;
        }
        return Err(err(l0, c0, "unexpected character"));
    }
    Ok(out)
}

fn char_offset(chars: &[char], i: usize) -> usize {
    chars[..i].iter().map(|c| c.len_utf8()).sum()
}

fn parse_decimal(s: &str) -> Option<(BigInt, BigInt)> {
    let mut parts = s.split('.');
    let int = parts.next()?;
    let frac = parts.next().unwrap_or("");
    if parts.next().is_some() || (int.is_empty() && frac.is_empty()) {
        return None;
    }
    let digits: String = [int, frac].concat();
    let num: BigInt = digits.parse().ok()?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    Some((num, den))
}

/// A polynomial with rational coefficients kept as `num / den`, `den > 0`.
#[derive(Clone, Debug)]
pub struct RatPoly {
    pub num: Poly,
    pub den: BigInt,
}

impl RatPoly {
    fn constant(n: BigInt, d: BigInt) -> Self {
        RatPoly { num: Poly::Const(n), den: d }.reduced()
    }

    pub fn reduced(self) -> Self {
        let g = self.num.int_content().gcd(&self.den);
        if g.is_zero() || g.is_one() {
            return self;
        }
        RatPoly { num: self.num.div_exact(&Poly::Const(g.clone())).unwrap_or(self.num), den: &self.den / g }
    }

    pub fn add(&self, o: &RatPoly) -> RatPoly {
        RatPoly {
            num: self.num.scale(&o.den) + o.num.scale(&self.den),
            den: &self.den * &o.den,
        }
        .reduced()
    }

    pub fn neg(&self) -> RatPoly {
        RatPoly { num: -self.num.clone(), den: self.den.clone() }
    }

    pub fn mul(&self, o: &RatPoly) -> RatPoly {
        RatPoly { num: self.num.mul_ref(&o.num), den: &self.den * &o.den }.reduced()
    }
}

/// Recursive-descent parser over a token slice; variables are resolved by name.
pub struct ExprParser<'a> {
    pub toks: &'a [Token],
    pub pos: usize,
    pub vars: &'a [String],
}

impl<'a> ExprParser<'a> {
    pub fn new(toks: &'a [Token], vars: &'a [String]) -> Self {
        ExprParser { toks, pos: 0, vars }
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    pub fn error(&self, msg: &str) -> ParseError {
        let (line, col) = match self.toks.get(self.pos).or_else(|| self.toks.last()) {
            Some(t) => (t.line, t.col),
            None => (1, 1),
        };
        ParseError { line, col, msg: msg.to_string() }
    }

    pub fn expect(&mut self, t: &Tok, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&alloc::format!("expected {}", what)))
        }
    }

    pub fn expr(&mut self) -> Result<RatPoly, ParseError> {
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                self.term()?.neg()
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RatPoly, ParseError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = acc.mul(&self.power()?);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let d = self.power()?;
                    let Some(c) = d.num.as_const().cloned() else {
                        return Err(self.error("division only by numeric constants"));
                    };
                    if c.is_zero() {
                        return Err(self.error("division by zero"));
                    }
                    let sign = if c.is_negative() { -BigInt::one() } else { BigInt::one() };
                    acc = RatPoly { num: acc.num.scale(&(&d.den * sign)), den: &acc.den * c.abs() }.reduced();
                }
                // implicit multiplication: `2x`, `3(x+1)`
                Some(Tok::Ident(_)) | Some(Tok::LParen) => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<RatPoly, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let e = match self.toks.get(self.pos).map(|t| &t.tok) {
                Some(Tok::Num(n, d)) if d.is_one() => {
                    u32::try_from(n).map_err(|_| self.error("exponent too large"))?
                }
                _ => return Err(self.error("expected nonnegative integer exponent")),
            };
            self.pos += 1;
            let mut r = RatPoly::constant(BigInt::one(), BigInt::one());
            for _ in 0..e {
                r = r.mul(&base);
            }
            return Ok(r);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatPoly, ParseError> {
        match self.toks.get(self.pos).map(|t| t.tok.clone()) {
            Some(Tok::Num(n, d)) => {
                self.pos += 1;
                Ok(RatPoly::constant(n, d))
            }
            Some(Tok::Ident(name)) => {
                let Some(i) = self.vars.iter().position(|v| *v == name) else {
                    return Err(self.error(&alloc::format!("unknown variable `{}`", name)));
                };
                self.pos += 1;
                Ok(RatPoly { num: Poly::var(i), den: BigInt::one() })
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                Ok(e)
            }
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(self.power()?.neg())
            }
            _ => Err(self.error("expected polynomial term")),
        }
    }
}

/// Parse a polynomial and clear denominators (multiplying by a positive integer).
pub fn parse_poly(src: &str, vars: &[String]) -> Result<Poly, ParseError> {
    let toks = tokenize(src)?;
    let mut p = ExprParser::new(&toks, vars);
    let e = p.expr()?;
    if p.pos != toks.len() {
        return Err(p.error("trailing input"));
    }
    Ok(e.num)
}

/// Convenience for tests and fixtures: variables named by a comma list.
pub fn poly(src: &str, vars: &str) -> Poly {
    let names: Vec<String> = vars.split(',').map(|s| s.trim().to_string()).collect();
    parse_poly(src, &names).expect("valid polynomial")
}
