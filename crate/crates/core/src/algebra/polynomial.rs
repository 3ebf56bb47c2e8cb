//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::order::TermOrder;
use super::rational::{self, Rational};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Checked binary arithmetic; fails when the ambient variable counts differ.
pub fn poly_arith(a: &Polynomial, b: &Polynomial, op: ArithOp) -> Result<Polynomial> {
    if a.nvars != b.nvars {
        return Err(Error::VariableMismatch { left: a.nvars, right: b.nvars });
    }
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
    })
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Monomial::one(nvars), c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Rational::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(Monomial::var(nvars, i, 1), Rational::one())
    }

    pub fn monomial(m: Monomial, c: Rational) -> Self {
        let mut p = Self::zero(m.nvars());
        p.add_term(m, c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Self::zero(nvars);
        for (m, c) in terms {
            assert_eq!(m.nvars(), nvars);
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Monomial::one(self.nvars))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn as_constant(&self) -> Option<Rational> {
        self.is_constant().then(|| self.constant_term())
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn leading_term(&self, order: &TermOrder) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|a, b| order.compare(a.0, b.0))
    }

    pub fn leading_monomial(&self, order: &TermOrder) -> Option<&Monomial> {
        self.leading_term(order).map(|(m, _)| m)
    }

    pub fn scale(&self, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    /// `c * m * self`
    pub fn mul_term(&self, m: &Monomial, c: &Rational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, a)| (k.mul(m), a * c)).collect(),
        }
    }

    pub fn monic(&self, order: &TermOrder) -> Polynomial {
        match self.leading_term(order) {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(self.nvars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Embeds into a ring with more variables (new variables appended).
    pub fn extended(&self, nvars: usize) -> Polynomial {
        assert!(nvars >= self.nvars);
        Polynomial {
            nvars,
            terms: self.terms.iter().map(|(m, c)| (m.extended(nvars), c.clone())).collect(),
        }
    }

    /// Variables that occur with a nonzero exponent.
    pub fn support_vars(&self) -> Vec<usize> {
        let mut seen = vec![false; self.nvars];
        for m in self.terms.keys() {
            for v in m.support() {
                seen[v] = true;
            }
        }
        (0..self.nvars).filter(|&i| seen[i]).collect()
    }

    /// True when every occurring variable has index below `k`.
    pub fn only_uses_first(&self, k: usize) -> bool {
        self.support_vars().iter().all(|&v| v < k)
    }

    /// Dense coefficient vector (lowest degree first) if the polynomial only involves `var`.
    pub fn to_univariate(&self, var: usize) -> Option<Vec<Rational>> {
        let mut out: Vec<Rational> = Vec::new();
        for (m, c) in &self.terms {
            for (i, &e) in m.exponents().iter().enumerate() {
                if i != var && e != 0 {
                    return None;
                }
            }
            let e = m.exponents()[var] as usize;
            if out.len() <= e {
                out.resize(e + 1, Rational::zero());
            }
            out[e] = c.clone();
        }
        Some(out)
    }

    pub fn from_univariate(nvars: usize, var: usize, coeffs: &[Rational]) -> Polynomial {
        Polynomial::from_terms(
            nvars,
            coeffs.iter().enumerate().map(|(e, c)| (Monomial::var(nvars, var, e as u32), c.clone())),
        )
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms.iter().map(|(m, c)| rational::to_f64(c) * m.eval(point)).sum()
    }

    pub fn eval_exact(&self, point: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[i].clone(), e as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coeff(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Rational::zero)
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }

    /// Parses the polynomial text format over the given variable names.
    ///
    /// Accepts the canonical `coef*var^e*...` term lists as well as general
    /// expressions with parentheses, products, integer powers and division by
    /// nonzero constants, e.g. `-t^2*(t+1)*(t-1)` or `1/2*x`.
    pub fn parse(text: &str, names: &[String]) -> Result<Polynomial> {
        let mut p = Parser { toks: tokenize(text)?, pos: 0, names };
        let out = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(Error::Parse(format!("unexpected `{}` in `{text}`", p.toks[p.pos])));
        }
        Ok(out)
    }
}

impl std::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl std::ops::Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.nvars, rhs.nvars);
        let mut out = Polynomial::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl std::ops::Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl std::ops::$tr for Polynomial {
            type Output = Polynomial;
            fn $f(self, rhs: Polynomial) -> Polynomial {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

pub struct PolyDisplay<'a> {
    poly: &'a Polynomial,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    /// Canonical text: terms by descending total degree, then descending exponent
    /// vector; each term as `coef*monomial` with `num/den` coefficients.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        let mut terms: Vec<_> = self.poly.terms.iter().collect();
        terms.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then_with(|| b.0.cmp(a.0)));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.is_one() {
                f.write_str(&rational::format(&abs))?;
            } else {
                write!(f, "{}*{}", rational::format(&abs), m.display(self.names))?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Sym(char),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(q) => f.write_str(&rational::format(q)),
            Tok::Ident(s) => f.write_str(s),
            Tok::Sym(c) => write!(f, "{c}"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Tok::Num(rational::parse(&s)?));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}` in `{text}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn peek_sym(&self, c: char) -> bool {
        matches!(self.toks.get(self.pos), Some(Tok::Sym(s)) if *s == c)
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let n = self.names.len();
        let mut acc = Polynomial::zero(n);
        let mut sign = if self.peek_sym('-') {
            self.pos += 1;
            -1
        } else {
            if self.peek_sym('+') {
                self.pos += 1;
            }
            1
        };
        loop {
            let t = self.term()?;
            acc = if sign > 0 { &acc + &t } else { &acc - &t };
            if self.peek_sym('+') {
                sign = 1;
            } else if self.peek_sym('-') {
                sign = -1;
            } else {
                break;
            }
            self.pos += 1;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.factor()?;
        loop {
            if self.peek_sym('*') {
                self.pos += 1;
                let f = self.factor()?;
                acc = &acc * &f;
            } else if self.peek_sym('/') {
                self.pos += 1;
                let f = self.factor()?;
                match f.as_constant() {
                    Some(c) if !c.is_zero() => acc = acc.scale(&c.recip()),
                    _ => return Err(Error::Parse("division only by nonzero constants".into())),
                }
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek_sym('^') {
            self.pos += 1;
            match self.toks.get(self.pos) {
                Some(Tok::Num(q)) if q.is_integer() && !q.is_negative() => {
                    let e: u32 = q.to_integer().try_into().map_err(|_| Error::Parse("exponent too large".into()))?;
                    self.pos += 1;
                    return Ok(base.pow(e));
                }
                other => {
                    return Err(Error::Parse(format!(
                        "expected nonnegative integer exponent, found {}",
                        other.map(|t| t.to_string()).unwrap_or_else(|| "end of input".into())
                    )))
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let n = self.names.len();
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(q)) => {
                self.pos += 1;
                Ok(Polynomial::constant(n, q))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let i = self
                    .names
                    .iter()
                    .position(|s| *s == name)
                    .ok_or_else(|| Error::Parse(format!("unknown variable `{name}`")))?;
                Ok(Polynomial::var(n, i))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.peek_sym(')') {
                    return Err(Error::Parse("expected `)`".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(Tok::Sym('-')) => {
                self.pos += 1;
                let f = self.factor()?;
                Ok(-&f)
            }
            Some(t) => Err(Error::Parse(format!("unexpected `{t}`"))),
            None => Err(Error::Parse("unexpected end of expression".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, ratio};

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn difference_of_squares() {
        let n = names(&["x"]);
        let a = Polynomial::parse("x + 1", &n).unwrap();
        let b = Polynomial::parse("x - 1", &n).unwrap();
        assert_eq!(poly_arith(&a, &b, ArithOp::Mul).unwrap(), Polynomial::parse("x^2 - 1", &n).unwrap());
    }

    #[test]
    fn hand_expansion() {
        let n = names(&["x", "y"]);
        let a = Polynomial::parse("x^2+y^2-1", &n).unwrap();
        let b = Polynomial::parse("2*y+2", &n).unwrap();
        let want = Polynomial::from_terms(
            2,
            [
                (Monomial::new(vec![2, 0]), int(1)),
                (Monomial::new(vec![0, 2]), int(1)),
                (Monomial::new(vec![0, 1]), int(2)),
                (Monomial::new(vec![0, 0]), int(1)),
            ],
        );
        assert_eq!(poly_arith(&a, &b, ArithOp::Add).unwrap(), want);
    }

    #[test]
    fn annihilator_and_mismatch() {
        let p = Polynomial::parse("x*y - 3", &names(&["x", "y"])).unwrap();
        let z = Polynomial::zero(2);
        let prod = poly_arith(&p, &z, ArithOp::Mul).unwrap();
        assert!(prod.is_zero());
        assert_eq!(prod.len(), 0);
        assert!(matches!(
            poly_arith(&p, &Polynomial::zero(3), ArithOp::Add),
            Err(Error::VariableMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn canonical_text_round_trip() {
        let n = names(&["x", "y"]);
        let p = Polynomial::parse("1/2*x^2*y - 3/4 + y", &n).unwrap();
        let s = p.display(&n).to_string();
        assert_eq!(s, "1/2*x^2*y + 1*y - 3/4");
        assert_eq!(Polynomial::parse(&s, &n).unwrap(), p);
        let q = Polynomial::parse(" -t^2 * ( t + 1 ) * (t-1)", &names(&["t"])).unwrap();
        assert_eq!(q, Polynomial::parse("-1*t^4 + 1*t^2", &names(&["t"])).unwrap());
        assert_eq!(Polynomial::parse("x/2", &n).unwrap().coeff(&Monomial::var(2, 0, 1)), ratio(1, 2));
    }

    #[test]
    fn parse_errors() {
        let n = names(&["x"]);
        assert!(Polynomial::parse("x +", &n).is_err());
        assert!(Polynomial::parse("z", &n).is_err());
        assert!(Polynomial::parse("1/x", &n).is_err());
        assert!(Polynomial::parse("x^-1", &n).is_err());
    }
}
