//! Scalar expressions over domain coordinates, used for base coordinate maps
//! that are not polynomial (for example `cos(t)` or `abs(x) - abs(y)`).

use std::fmt;

use num_traits::Zero;

use crate::algebra::rational::{self, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum ScalarExpr {
    Const(Rational),
    Var(usize),
    Neg(Box<ScalarExpr>),
    Add(Box<ScalarExpr>, Box<ScalarExpr>),
    Sub(Box<ScalarExpr>, Box<ScalarExpr>),
    Mul(Box<ScalarExpr>, Box<ScalarExpr>),
    Div(Box<ScalarExpr>, Box<ScalarExpr>),
    Pow(Box<ScalarExpr>, u32),
    Call(Func, Box<ScalarExpr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Abs,
    Sign,
    Sqrt,
    Cbrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Abs => "abs",
            Func::Sign => "sign",
            Func::Sqrt => "sqrt",
            Func::Cbrt => "cbrt",
        }
    }

    fn from_name(s: &str) -> Option<Func> {
        Some(match s {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "abs" => Func::Abs,
            "sign" => Func::Sign,
            "sqrt" => Func::Sqrt,
            "cbrt" => Func::Cbrt,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Exp => x.exp(),
            Func::Abs => x.abs(),
            Func::Sign => {
                if x > 0.0 {
                    1.0
                } else if x < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            Func::Sqrt => x.max(0.0).sqrt(),
            Func::Cbrt => x.cbrt(),
        }
    }

    /// Continuous on its whole domain of definition.
    fn is_continuous(self) -> bool {
        !matches!(self, Func::Sign)
    }
}

impl ScalarExpr {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            ScalarExpr::Const(q) => rational::to_f64(q),
            ScalarExpr::Var(i) => x[*i],
            ScalarExpr::Neg(a) => -a.eval(x),
            ScalarExpr::Add(a, b) => a.eval(x) + b.eval(x),
            ScalarExpr::Sub(a, b) => a.eval(x) - b.eval(x),
            ScalarExpr::Mul(a, b) => a.eval(x) * b.eval(x),
            ScalarExpr::Div(a, b) => a.eval(x) / b.eval(x),
            ScalarExpr::Pow(a, e) => a.eval(x).powi(*e as i32),
            ScalarExpr::Call(f, a) => f.apply(a.eval(x)),
        }
    }

    /// Conservative continuity flag: division and `sign` count as discontinuous.
    pub fn is_continuous(&self) -> bool {
        match self {
            ScalarExpr::Const(_) | ScalarExpr::Var(_) => true,
            ScalarExpr::Neg(a) | ScalarExpr::Pow(a, _) => a.is_continuous(),
            ScalarExpr::Add(a, b) | ScalarExpr::Sub(a, b) | ScalarExpr::Mul(a, b) => {
                a.is_continuous() && b.is_continuous()
            }
            ScalarExpr::Div(..) => false,
            ScalarExpr::Call(f, a) => f.is_continuous() && a.is_continuous(),
        }
    }

    pub fn parse(text: &str, names: &[String]) -> Result<ScalarExpr> {
        let toks = lex(text)?;
        let mut p = ExprParser { toks, pos: 0, names };
        let e = p.sum()?;
        if p.pos != p.toks.len() {
            return Err(Error::Parse(format!("trailing input in `{text}`")));
        }
        Ok(e)
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> ExprDisplay<'a> {
        ExprDisplay { e: self, names }
    }
}

pub struct ExprDisplay<'a> {
    e: &'a ScalarExpr,
    names: &'a [String],
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.names;
        let sub = |e: &'_ ScalarExpr| ExprDisplay { e, names: n }.to_string();
        match self.e {
            ScalarExpr::Const(q) => write!(f, "({})", rational::format(q)),
            ScalarExpr::Var(i) => f.write_str(&n[*i]),
            ScalarExpr::Neg(a) => write!(f, "(-{})", sub(a)),
            ScalarExpr::Add(a, b) => write!(f, "({} + {})", sub(a), sub(b)),
            ScalarExpr::Sub(a, b) => write!(f, "({} - {})", sub(a), sub(b)),
            ScalarExpr::Mul(a, b) => write!(f, "({}*{})", sub(a), sub(b)),
            ScalarExpr::Div(a, b) => write!(f, "({}/{})", sub(a), sub(b)),
            ScalarExpr::Pow(a, e) => write!(f, "{}^{e}", sub(a)),
            ScalarExpr::Call(func, a) => write!(f, "{}({})", func.name(), sub(a)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Lex {
    Num(String),
    Ident(String),
    Sym(char),
}

fn lex(text: &str) -> Result<Vec<Lex>> {
    let cs: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let s = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            out.push(Lex::Num(cs[s..i].iter().collect()));
        } else if c.is_alphabetic() || c == '_' {
            let s = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Lex::Ident(cs[s..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Lex::Sym(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

fn negate(e: ScalarExpr) -> ScalarExpr {
    match e {
        ScalarExpr::Const(q) => ScalarExpr::Const(-q),
        e => ScalarExpr::Neg(Box::new(e)),
    }
}

struct ExprParser<'a> {
    toks: Vec<Lex>,
    pos: usize,
    names: &'a [String],
}

impl ExprParser<'_> {
    fn eat(&mut self, c: char) -> bool {
        if matches!(self.toks.get(self.pos), Some(Lex::Sym(s)) if *s == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<ScalarExpr> {
        let mut acc = if self.eat('-') { negate(self.product()?) } else { self.product()? };
        loop {
            if self.eat('+') {
                acc = ScalarExpr::Add(Box::new(acc), Box::new(self.product()?));
            } else if self.eat('-') {
                acc = ScalarExpr::Sub(Box::new(acc), Box::new(self.product()?));
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<ScalarExpr> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = ScalarExpr::Mul(Box::new(acc), Box::new(self.power()?));
            } else if self.eat('/') {
                let den = self.power()?;
                acc = match (acc, den) {
                    (ScalarExpr::Const(a), ScalarExpr::Const(b)) if !b.is_zero() => ScalarExpr::Const(a / b),
                    (a, b) => ScalarExpr::Div(Box::new(a), Box::new(b)),
                };
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<ScalarExpr> {
        let base = self.atom()?;
        if self.eat('^') {
            match self.toks.get(self.pos).cloned() {
                Some(Lex::Num(s)) => {
                    self.pos += 1;
                    let e: u32 = s.parse().map_err(|_| Error::Parse(format!("bad exponent `{s}`")))?;
                    Ok(ScalarExpr::Pow(Box::new(base), e))
                }
                _ => Err(Error::Parse("expected integer exponent".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<ScalarExpr> {
        match self.toks.get(self.pos).cloned() {
            Some(Lex::Num(s)) => {
                self.pos += 1;
                Ok(ScalarExpr::Const(rational::parse(&s)?))
            }
            Some(Lex::Ident(name)) => {
                self.pos += 1;
                if let Some(f) = Func::from_name(&name) {
                    if !self.eat('(') {
                        return Err(Error::Parse(format!("expected `(` after `{name}`")));
                    }
                    let arg = self.sum()?;
                    if !self.eat(')') {
                        return Err(Error::Parse("expected `)`".into()));
                    }
                    return Ok(ScalarExpr::Call(f, Box::new(arg)));
                }
                let i = self
                    .names
                    .iter()
                    .position(|n| *n == name)
                    .ok_or_else(|| Error::Parse(format!("unknown domain variable `{name}`")))?;
                Ok(ScalarExpr::Var(i))
            }
            Some(Lex::Sym('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(Error::Parse("expected `)`".into()));
                }
                Ok(e)
            }
            Some(Lex::Sym('-')) => {
                self.pos += 1;
                Ok(negate(self.power()?))
            }
            _ => Err(Error::Parse("unexpected end of expression".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_and_round_trips() {
        let names = vec!["x".to_string(), "y".to_string()];
        let e = ScalarExpr::parse("abs(x) - abs(y)", &names).unwrap();
        assert_eq!(e.eval(&[-0.5, 0.25]), 0.25);
        let shown = e.display(&names).to_string();
        assert_eq!(ScalarExpr::parse(&shown, &names).unwrap().eval(&[0.3, -0.9]), e.eval(&[0.3, -0.9]));

        let t = vec!["t".to_string()];
        let c = ScalarExpr::parse("1/(1+t^2)", &t).unwrap();
        assert!((c.eval(&[2.0]) - 0.2).abs() < 1e-15);
        assert!(!c.is_continuous());
        assert!(ScalarExpr::parse("cos(t)", &t).unwrap().is_continuous());
        assert!(ScalarExpr::parse("foo(t)", &t).is_err());

        for text in ["-1/2*t + exp(-t)", "(1/3)^2 - abs(t)/t", "-(t - 2)"] {
            let e = ScalarExpr::parse(text, &t).unwrap();
            let once = e.display(&t).to_string();
            let twice = ScalarExpr::parse(&once, &t).unwrap().display(&t).to_string();
            assert_eq!(once, twice);
        }
    }
}
