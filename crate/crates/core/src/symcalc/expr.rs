//! Raw expression trees and the string grammar used by scenario files:
//! `+ - * /`, integer powers `^`, `sin`, `cos`, rational or decimal
//! constants, parentheses, and chart symbols.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::chart::{Angle, Chart, Symbol};
use super::scalar::{Rational, Scalar, Trig};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    Sym(String),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Neg(Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
}

impl Expr {
    pub fn sym(name: &str) -> Expr {
        Expr::Sym(name.to_string())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Num(Rational::from_integer(BigInt::from(n)))
    }
}

/// Reduces a raw expression tree to canonical form.
pub fn normalize(e: &Expr, chart: &Chart) -> Result<Scalar> {
    match e {
        Expr::Num(c) => Ok(Scalar::constant(c.clone())),
        Expr::Sym(name) => match chart.symbol(name)? {
            Symbol::Var(v) => Ok(Scalar::var(v)),
            Symbol::Angle(_) => Err(Error::UnsupportedExpression(format!(
                "angle `{name}` may only appear inside sin/cos"
            ))),
        },
        Expr::Add(xs) => xs.iter().map(|x| normalize(x, chart)).sum(),
        Expr::Mul(xs) => {
            let mut acc = Scalar::one();
            for x in xs {
                acc = &acc * &normalize(x, chart)?;
            }
            Ok(acc)
        }
        Expr::Neg(x) => Ok(-normalize(x, chart)?),
        Expr::Div(num, den) => {
            let d = normalize(den, chart)?;
            match d.as_constant() {
                Some(c) if !c.is_zero() => Ok(normalize(num, chart)?.scale(&(Rational::one() / c))),
                Some(_) => Err(Error::UnsupportedExpression("division by zero".into())),
                None => Err(Error::UnsupportedExpression(
                    "division by a non-constant expression".into(),
                )),
            }
        }
        Expr::Pow(x, k) => Ok(normalize(x, chart)?.pow(*k)),
        Expr::Sin(arg) => Ok(Scalar::trig(Trig::Sin, &angle_combination(arg, chart)?)),
        Expr::Cos(arg) => Ok(Scalar::trig(Trig::Cos, &angle_combination(arg, chart)?)),
    }
}

/// Interprets a trig argument as an integer combination of angles.
fn angle_combination(e: &Expr, chart: &Chart) -> Result<Vec<(Angle, i64)>> {
    let (coeffs, constant) = linear_in_angles(e, chart)?;
    if !constant.is_zero() {
        return Err(Error::UnsupportedExpression(
            "trig arguments may not carry constant phases".into(),
        ));
    }
    coeffs
        .into_iter()
        .map(|(a, c)| {
            if c.is_integer() {
                let k: i64 = c
                    .to_integer()
                    .try_into()
                    .map_err(|_| Error::UnsupportedExpression("frequency too large".into()))?;
                Ok((a, k))
            } else {
                Err(Error::UnsupportedExpression(format!(
                    "non-integer frequency {c} for angle `{}`",
                    chart.angle_name(a)
                )))
            }
        })
        .collect()
}

type Linear = (BTreeMap<Angle, Rational>, Rational);

fn linear_in_angles(e: &Expr, chart: &Chart) -> Result<Linear> {
    let not_linear = || Error::UnsupportedExpression("trig arguments must be linear in the angles".into());
    match e {
        Expr::Num(c) => Ok((BTreeMap::new(), c.clone())),
        Expr::Sym(name) => match chart.symbol(name)? {
            Symbol::Angle(a) => Ok((BTreeMap::from([(a, Rational::one())]), Rational::zero())),
            Symbol::Var(_) => Err(Error::UnsupportedExpression(format!(
                "coordinate `{name}` inside a trig argument"
            ))),
        },
        Expr::Add(xs) => {
            let mut acc: Linear = (BTreeMap::new(), Rational::zero());
            for x in xs {
                let (m, c) = linear_in_angles(x, chart)?;
                for (a, k) in m {
                    *acc.0.entry(a).or_insert_with(Rational::zero) += k;
                }
                acc.1 += c;
            }
            Ok(acc)
        }
        Expr::Neg(x) => {
            let (m, c) = linear_in_angles(x, chart)?;
            Ok((m.into_iter().map(|(a, k)| (a, -k)).collect(), -c))
        }
        Expr::Mul(xs) => {
            let mut acc: Linear = (BTreeMap::new(), Rational::one());
            let mut has_angle = false;
            for x in xs {
                let (m, c) = linear_in_angles(x, chart)?;
                let x_has_angle = m.values().any(|k| !k.is_zero());
                match (has_angle, x_has_angle) {
                    (true, true) => return Err(not_linear()),
                    (false, true) => {
                        acc.0 = m.into_iter().map(|(a, k)| (a, k * &acc.1)).collect();
                        acc.1 = &acc.1 * c;
                        has_angle = true;
                    }
                    (_, false) => {
                        acc.0 = acc.0.into_iter().map(|(a, k)| (a, k * &c)).collect();
                        acc.1 = &acc.1 * c;
                    }
                }
            }
            Ok(acc)
        }
        Expr::Div(num, den) => {
            let (dm, dc) = linear_in_angles(den, chart)?;
            if dm.values().any(|k| !k.is_zero()) || dc.is_zero() {
                return Err(not_linear());
            }
            let (m, c) = linear_in_angles(num, chart)?;
            Ok((m.into_iter().map(|(a, k)| (a, k / &dc)).collect(), c / dc))
        }
        Expr::Pow(x, 1) => linear_in_angles(x, chart),
        _ => Err(not_linear()),
    }
}

/// Parses and normalizes an expression string on `chart`.
pub fn parse_scalar(source: &str, chart: &Chart) -> Result<Scalar> {
    normalize(&parse_expr(source)?, chart)
}

pub fn parse_expr(source: &str) -> Result<Expr> {
    let tokens = tokenize(source)?;
    let mut parser = Parser { tokens, pos: 0, source };
    let e = parser.expr()?;
    if parser.pos < parser.tokens.len() {
        return Err(parser.error_here("unexpected trailing input"));
    }
    Ok(e)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let int_part: String = chars[start..i].iter().collect();
            let mut value = if int_part.is_empty() {
                Rational::zero()
            } else {
                Rational::from_integer(int_part.parse::<BigInt>().unwrap())
            };
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                let fs = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let frac: String = chars[fs..i].iter().collect();
                if !frac.is_empty() {
                    let num = frac.parse::<BigInt>().unwrap();
                    let den = BigInt::from(10u32).pow(frac.len() as u32);
                    value += Rational::new(num, den);
                }
            }
            out.push((Tok::Num(value), start));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), start));
        } else if "+-*/^()".contains(c) {
            out.push((Tok::Op(c), i));
            i += 1;
        } else {
            let (line, column) = line_col(src, i);
            return Err(Error::Parse {
                line,
                column,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

fn line_col(src: &str, char_index: usize) -> (usize, usize) {
    let mut line = 1;
    let mut column = 1;
    for c in src.chars().take(char_index) {
        if c == '\n' {
            line += 1;
            column = 1;
        } else {
            column += 1;
        }
    }
    (line, column)
}

struct Parser<'a> {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    source: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn error_here(&self, message: &str) -> Error {
        let offset = self
            .tokens
            .get(self.pos)
            .map(|(_, o)| *o)
            .unwrap_or_else(|| self.source.chars().count());
        let (line, column) = line_col(self.source, offset);
        Error::Parse {
            line,
            column,
            message: message.to_string(),
        }
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = vec![self.term()?];
        loop {
            if self.eat('+') {
                terms.push(self.term()?);
            } else if self.eat('-') {
                terms.push(Expr::Neg(Box::new(self.term()?)));
            } else {
                break;
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Expr::Add(terms)
        })
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                let rhs = self.unary()?;
                acc = match acc {
                    Expr::Mul(mut xs) => {
                        xs.push(rhs);
                        Expr::Mul(xs)
                    }
                    other => Expr::Mul(vec![other, rhs]),
                };
            } else if self.eat('/') {
                let rhs = self.unary()?;
                acc = Expr::Div(Box::new(acc), Box::new(rhs));
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.peek().cloned() {
                Some(Tok::Num(n)) if n.is_integer() => {
                    let k: u32 = n
                        .to_integer()
                        .try_into()
                        .map_err(|_| self.error_here("exponent out of range"))?;
                    self.pos += 1;
                    Ok(Expr::Pow(Box::new(base), k))
                }
                _ => Err(self.error_here("expected a non-negative integer exponent")),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if self.peek() == Some(&Tok::Op('(')) {
                    let call_pos = self.pos - 1;
                    self.pos += 1;
                    let arg = self.expr()?;
                    if !self.eat(')') {
                        return Err(self.error_here("expected `)`"));
                    }
                    match name.as_str() {
                        "sin" => Ok(Expr::Sin(Box::new(arg))),
                        "cos" => Ok(Expr::Cos(Box::new(arg))),
                        _ => {
                            self.pos = call_pos;
                            Err(self.error_here(&format!("unknown function `{name}`")))
                        }
                    }
                } else {
                    Ok(Expr::Sym(name))
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error_here("expected `)`"));
                }
                Ok(e)
            }
            _ => Err(self.error_here("expected a number, symbol or `(`")),
        }
    }
}
