//! The problem-script language: a `;`-terminated statement list that declares
//! a domain, builds a tower and asks questions about it.
//!
//! ```text
//! domain t in [-1, 1];
//! base_gen 1 - t^2 check;
//! adjoin u = evenroot(t^2, 2);
//! adjoin c = chi(t) mode=compact;
//! certify u eps=1/10 dmax=4;
//! ```

use std::fmt;

use hidpos::algebra::rational;
use hidpos::expr::ScalarExpr;
use hidpos::{CharVariant, Mode, Polynomial, Rational};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Loc {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScriptError {
    #[error("{loc}: expected {expected}, found {found}")]
    Syntax { loc: Loc, expected: String, found: String },
    #[error("{loc}: `{name}` is used before it is declared")]
    ForwardReference { loc: Loc, name: String },
    #[error("{loc}: symbol `{name}` is already declared")]
    DuplicateSymbol { loc: Loc, name: String },
    #[error("{loc}: {msg}")]
    Invalid { loc: Loc, msg: String },
}

impl ScriptError {
    pub fn loc(&self) -> Loc {
        match self {
            ScriptError::Syntax { loc, .. }
            | ScriptError::ForwardReference { loc, .. }
            | ScriptError::DuplicateSymbol { loc, .. }
            | ScriptError::Invalid { loc, .. } => *loc,
        }
    }
}

type Result<T> = std::result::Result<T, ScriptError>;

/// An expression kept in normalized source form; compared by text only.
#[derive(Clone, Debug)]
pub struct Expr {
    pub text: String,
    pub loc: Loc,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Bounds {
    /// A compact box.
    Box(Vec<(Rational, Rational)>),
    /// All of `R^n`, sampled inside the window.
    Window(Vec<(Rational, Rational)>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum AdjoinKind {
    OddRoot { g: Expr, r: u32 },
    EvenRoot { g: Expr, s: u32 },
    Recip { g: Expr, bound: Option<Rational> },
    Piecewise { g: Expr, h: Expr, q: Expr, mode: Mode },
    Chi { q: Expr, variant: CharVariant },
}

#[derive(Clone, Debug, PartialEq)]
pub enum StmtKind {
    Domain { vars: Vec<String>, bounds: Bounds, constraints: Vec<Expr>, exclusions: Vec<Expr> },
    Coords(Vec<(String, Expr)>),
    Relation(Expr),
    BaseGen { poly: Expr, check: bool },
    BallBound(Rational),
    AssumeMode(Mode),
    Adjoin { name: String, kind: AdjoinKind, force: bool },
    AddGen { poly: Expr, check: bool, assert: Option<Mode> },
    Exclude { point: Vec<Rational>, eps: Rational },
    Explore { samples: Option<usize>, delta: Option<f64>, seed: Option<u64> },
    Certify { poly: Expr, eps: Option<Rational>, dmax: Option<u32> },
    Report,
}

impl StmtKind {
    pub fn keyword(&self) -> &'static str {
        match self {
            StmtKind::Domain { .. } => "domain",
            StmtKind::Coords(_) => "coords",
            StmtKind::Relation(_) => "relation",
            StmtKind::BaseGen { .. } => "base_gen",
            StmtKind::BallBound(_) => "ball_bound",
            StmtKind::AssumeMode(_) => "assume_mode",
            StmtKind::Adjoin { .. } => "adjoin",
            StmtKind::AddGen { .. } => "add_gen",
            StmtKind::Exclude { .. } => "exclude",
            StmtKind::Explore { .. } => "explore",
            StmtKind::Certify { .. } => "certify",
            StmtKind::Report => "report",
        }
    }

    /// Statements that only shape the base stage.
    pub fn is_base(&self) -> bool {
        matches!(
            self,
            StmtKind::Domain { .. }
                | StmtKind::Coords(_)
                | StmtKind::BaseGen { .. }
                | StmtKind::BallBound(_)
                | StmtKind::AssumeMode(_)
        )
    }
}

/// A statement with the location of its keyword; equality ignores locations.
#[derive(Clone, Debug)]
pub struct Statement {
    pub loc: Loc,
    pub kind: StmtKind,
}

impl PartialEq for Statement {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemScript {
    pub statements: Vec<Statement>,
}

impl ProblemScript {
    pub fn len(&self) -> usize {
        self.statements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }
}

const STATEMENTS: &[&str] = &[
    "domain",
    "coords",
    "relation",
    "base_gen",
    "ball_bound",
    "assume_mode",
    "adjoin",
    "add_gen",
    "exclude",
    "explore",
    "certify",
    "report",
];

/// Words that end an expression and cannot name a symbol.
const STOP_WORDS: &[&str] = &["force", "check", "where", "excluding", "window"];

const MAP_FUNCTIONS: &[&str] = &["sin", "cos", "exp", "abs", "sign", "sqrt", "cbrt"];

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    Punct(char),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Num(s) => write!(f, "`{s}`"),
            Tok::Punct(c) => write!(f, "`{c}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    loc: Loc,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let loc = Loc { line, col };
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                bump(&mut chars);
            }
        } else if c.is_whitespace() {
            bump(&mut chars);
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while chars.peek().is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_') {
                s.push(bump(&mut chars));
            }
            out.push(Token { tok: Tok::Ident(s), loc });
        } else if c.is_ascii_digit() || c == '.' {
            let mut s = String::new();
            while chars.peek().is_some_and(|c| c.is_ascii_digit() || *c == '.') {
                s.push(bump(&mut chars));
            }
            out.push(Token { tok: Tok::Num(s), loc });
        } else if ";,()[]=+-*/^".contains(c) {
            bump(&mut chars);
            out.push(Token { tok: Tok::Punct(c), loc });
        } else {
            return Err(ScriptError::Syntax { loc, expected: "a token".into(), found: format!("`{c}`") });
        }
    }
    out.push(Token { tok: Tok::Eof, loc: Loc { line, col } });
    Ok(out)
}

/// Parses a script, checking that every symbol is declared before use.
pub fn parse_script(text: &str) -> Result<ProblemScript> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, domain: Vec::new(), scope: Vec::new(), tower_started: false };
    let mut statements = Vec::new();
    if !matches!(&p.peek().tok, Tok::Ident(s) if s == "domain") {
        return Err(p.expected("domain"));
    }
    while p.peek().tok != Tok::Eof {
        statements.push(p.statement(statements.len())?);
    }
    Ok(ProblemScript { statements })
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    domain: Vec<String>,
    /// Names usable in polynomials: the base coordinates and adjoined symbols.
    scope: Vec<String>,
    tower_started: bool,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn expected(&self, what: &str) -> ScriptError {
        let t = self.peek();
        ScriptError::Syntax { loc: t.loc, expected: what.into(), found: t.tok.to_string() }
    }

    fn punct(&mut self, c: char) -> Result<()> {
        if self.peek().tok == Tok::Punct(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.expected(&format!("`{c}`")))
        }
    }

    fn is_punct(&self, c: char) -> bool {
        self.peek().tok == Tok::Punct(c)
    }

    fn word(&mut self, w: &str) -> Result<()> {
        match &self.peek().tok {
            Tok::Ident(s) if s == w => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.expected(&format!("`{w}`"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Loc)> {
        match self.peek().tok.clone() {
            Tok::Ident(s) => {
                let loc = self.next().loc;
                Ok((s, loc))
            }
            _ => Err(self.expected(what)),
        }
    }

    /// A fresh symbol name that is neither reserved nor already in `taken`.
    fn new_name(&mut self, taken: &[String]) -> Result<String> {
        let (name, loc) = self.ident("a symbol name")?;
        if STATEMENTS.contains(&name.as_str()) || STOP_WORDS.contains(&name.as_str()) || name == "R" {
            return Err(ScriptError::Invalid { loc, msg: format!("`{name}` is a reserved word") });
        }
        if taken.contains(&name) {
            return Err(ScriptError::DuplicateSymbol { loc, name });
        }
        Ok(name)
    }

    fn statement(&mut self, index: usize) -> Result<Statement> {
        let (kw, loc) = self.ident("a statement keyword")?;
        let kind = match kw.as_str() {
            "domain" if index > 0 => {
                return Err(ScriptError::Invalid { loc, msg: "a script has exactly one `domain` statement".into() })
            }
            "domain" => self.domain()?,
            "coords" if index != 1 => {
                return Err(ScriptError::Invalid { loc, msg: "`coords` must directly follow `domain`".into() })
            }
            "coords" => self.coords()?,
            "relation" => StmtKind::Relation(self.poly()?),
            "base_gen" => {
                self.base_only(loc, &kw)?;
                let poly = self.poly()?;
                let check = self.flag("check");
                StmtKind::BaseGen { poly, check }
            }
            "ball_bound" => {
                self.base_only(loc, &kw)?;
                StmtKind::BallBound(self.constant()?)
            }
            "assume_mode" => {
                self.base_only(loc, &kw)?;
                let (m, mloc) = self.ident("a mode")?;
                let mode = Mode::from_name(&m)
                    .ok_or(ScriptError::Syntax { loc: mloc, expected: "exact, closure or unverified".into(), found: format!("`{m}`") })?;
                StmtKind::AssumeMode(mode)
            }
            "adjoin" => {
                self.tower_started = true;
                self.adjoin()?
            }
            "add_gen" => {
                self.tower_started = true;
                let poly = self.poly()?;
                let mut check = false;
                let mut assert = None;
                loop {
                    if self.flag("check") {
                        check = true;
                    } else if let Some((opt, oloc)) = self.option_name(&["assert"])? {
                        debug_assert_eq!(opt, "assert");
                        if assert.is_some() {
                            return Err(duplicate_option(oloc, &opt));
                        }
                        assert = Some(self.mode_value(&[Mode::Exact, Mode::Closure, Mode::Unverified])?);
                    } else {
                        break;
                    }
                }
                StmtKind::AddGen { poly, check, assert }
            }
            "exclude" => {
                self.tower_started = true;
                self.punct('(')?;
                let mut point = vec![self.constant()?];
                while self.is_punct(',') {
                    self.pos += 1;
                    point.push(self.constant()?);
                }
                self.punct(')')?;
                self.word("eps")?;
                self.punct('=')?;
                let eps = self.constant()?;
                StmtKind::Exclude { point, eps }
            }
            "explore" => {
                self.tower_started = true;
                let (mut samples, mut delta, mut seed) = (None, None, None);
                while let Some((opt, oloc)) = self.option_name(&["samples", "delta", "seed"])? {
                    let dup = match opt.as_str() {
                        "samples" => samples.replace(self.integer::<usize>("a sample count")?).is_some(),
                        "delta" => delta.replace(self.float("a distance")?).is_some(),
                        _ => seed.replace(self.integer::<u64>("a seed")?).is_some(),
                    };
                    if dup {
                        return Err(duplicate_option(oloc, &opt));
                    }
                }
                StmtKind::Explore { samples, delta, seed }
            }
            "certify" => {
                self.tower_started = true;
                let poly = self.poly()?;
                let (mut eps, mut dmax) = (None, None);
                while let Some((opt, oloc)) = self.option_name(&["eps", "dmax"])? {
                    let dup = match opt.as_str() {
                        "eps" => eps.replace(self.constant()?).is_some(),
                        _ => dmax.replace(self.integer::<u32>("a degree")?).is_some(),
                    };
                    if dup {
                        return Err(duplicate_option(oloc, &opt));
                    }
                }
                StmtKind::Certify { poly, eps, dmax }
            }
            "report" => {
                self.tower_started = true;
                StmtKind::Report
            }
            _ => {
                return Err(ScriptError::Syntax { loc, expected: "a statement keyword".into(), found: format!("`{kw}`") })
            }
        };
        self.punct(';')?;
        Ok(Statement { loc, kind })
    }

    fn base_only(&self, loc: Loc, kw: &str) -> Result<()> {
        if self.tower_started {
            return Err(ScriptError::Invalid { loc, msg: format!("`{kw}` must come before the first adjunction or query") });
        }
        Ok(())
    }

    fn domain(&mut self) -> Result<StmtKind> {
        let mut vars = Vec::new();
        let mut boxes = Vec::new();
        let mut windows = Vec::new();
        loop {
            let name = self.new_name(&vars)?;
            vars.push(name);
            self.word("in")?;
            if matches!(&self.peek().tok, Tok::Ident(s) if s == "R") {
                self.pos += 1;
                self.word("window")?;
                windows.push(self.interval()?);
            } else {
                boxes.push(self.interval()?);
            }
            if !self.is_punct(',') {
                break;
            }
            self.pos += 1;
        }
        let bounds = match (boxes.is_empty(), windows.is_empty()) {
            (false, true) => Bounds::Box(boxes),
            (true, false) => Bounds::Window(windows),
            _ => {
                let loc = self.peek().loc;
                return Err(ScriptError::Invalid { loc, msg: "either every variable has a box or every variable is unbounded".into() });
            }
        };
        self.domain = vars.clone();
        self.scope = vars.clone();
        let (mut constraints, mut exclusions) = (Vec::new(), Vec::new());
        loop {
            if self.flag("where") {
                constraints.push(self.poly()?);
            } else if self.flag("excluding") {
                exclusions.push(self.poly()?);
            } else {
                break;
            }
        }
        Ok(StmtKind::Domain { vars, bounds, constraints, exclusions })
    }

    fn coords(&mut self) -> Result<StmtKind> {
        let mut out: Vec<(String, Expr)> = Vec::new();
        loop {
            let taken: Vec<String> = out.iter().map(|(n, _)| n.clone()).collect();
            let name = self.new_name(&taken)?;
            self.punct('=')?;
            let e = self.map_expr()?;
            out.push((name, e));
            if !self.is_punct(',') {
                break;
            }
            self.pos += 1;
        }
        self.scope = out.iter().map(|(n, _)| n.clone()).collect();
        Ok(StmtKind::Coords(out))
    }

    fn adjoin(&mut self) -> Result<StmtKind> {
        let name = self.new_name(&self.scope.clone())?;
        self.punct('=')?;
        let (kind, kloc) = self.ident("oddroot, evenroot, recip, piecewise or chi")?;
        self.punct('(')?;
        let kind = match kind.as_str() {
            "oddroot" | "evenroot" => {
                let g = self.poly()?;
                self.punct(',')?;
                let k = self.integer::<u32>("a root index")?;
                self.punct(')')?;
                if kind == "oddroot" {
                    AdjoinKind::OddRoot { g, r: k }
                } else {
                    AdjoinKind::EvenRoot { g, s: k }
                }
            }
            "recip" => {
                let g = self.poly()?;
                self.punct(')')?;
                let bound = match self.option_name(&["bound"])? {
                    Some(_) => Some(self.constant()?),
                    None => None,
                };
                AdjoinKind::Recip { g, bound }
            }
            "piecewise" => {
                let g = self.poly()?;
                self.punct(',')?;
                let h = self.poly()?;
                self.punct(',')?;
                let q = self.poly()?;
                self.punct(')')?;
                let mode = match self.option_name(&["mode"])? {
                    Some(_) => self.mode_value(&[Mode::Exact, Mode::Closure])?,
                    None => Mode::Exact,
                };
                AdjoinKind::Piecewise { g, h, q, mode }
            }
            "chi" => {
                let q = self.poly()?;
                self.punct(')')?;
                let variant = match self.option_name(&["mode"])? {
                    Some(_) => {
                        let (m, mloc) = self.ident("compact or closure")?;
                        match m.as_str() {
                            "compact" => CharVariant::CompactContinuous,
                            "closure" => CharVariant::GeneralClosure,
                            _ => {
                                return Err(ScriptError::Syntax {
                                    loc: mloc,
                                    expected: "compact or closure".into(),
                                    found: format!("`{m}`"),
                                })
                            }
                        }
                    }
                    None => CharVariant::CompactContinuous,
                };
                AdjoinKind::Chi { q, variant }
            }
            _ => {
                return Err(ScriptError::Syntax {
                    loc: kloc,
                    expected: "oddroot, evenroot, recip, piecewise or chi".into(),
                    found: format!("`{kind}`"),
                })
            }
        };
        let force = self.flag("force");
        self.scope.push(name.clone());
        Ok(StmtKind::Adjoin { name, kind, force })
    }

    fn flag(&mut self, w: &str) -> bool {
        if matches!(&self.peek().tok, Tok::Ident(s) if s == w) && self.peek_at(1) != &Tok::Punct('=') {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// `NAME =` for one of the allowed option names, consuming both tokens.
    fn option_name(&mut self, allowed: &[&str]) -> Result<Option<(String, Loc)>> {
        let Tok::Ident(name) = self.peek().tok.clone() else { return Ok(None) };
        if self.peek_at(1) != &Tok::Punct('=') {
            return Ok(None);
        }
        let loc = self.peek().loc;
        if !allowed.contains(&name.as_str()) {
            return Err(ScriptError::Syntax { loc, expected: format!("one of: {}", allowed.join(", ")), found: format!("`{name}`") });
        }
        self.pos += 2;
        Ok(Some((name, loc)))
    }

    fn mode_value(&mut self, allowed: &[Mode]) -> Result<Mode> {
        let (m, loc) = self.ident("a mode")?;
        let names: Vec<&str> = allowed.iter().map(|m| m.name()).collect();
        match Mode::from_name(&m) {
            Some(mode) if allowed.contains(&mode) => Ok(mode),
            _ => Err(ScriptError::Syntax { loc, expected: names.join(" or "), found: format!("`{m}`") }),
        }
    }

    fn integer<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        match self.peek().tok.clone() {
            Tok::Num(s) => {
                let loc = self.next().loc;
                s.parse().map_err(|_| ScriptError::Syntax { loc, expected: what.into(), found: format!("`{s}`") })
            }
            _ => Err(self.expected(what)),
        }
    }

    fn float(&mut self, what: &str) -> Result<f64> {
        match self.peek().tok.clone() {
            Tok::Num(s) => {
                let loc = self.next().loc;
                match s.parse::<f64>() {
                    Ok(v) if v > 0.0 => Ok(v),
                    _ => Err(ScriptError::Syntax { loc, expected: what.into(), found: format!("`{s}`") }),
                }
            }
            _ => Err(self.expected(what)),
        }
    }

    fn interval(&mut self) -> Result<(Rational, Rational)> {
        let open = self.peek().loc;
        self.punct('[')?;
        let lo = self.constant()?;
        self.punct(',')?;
        let hi = self.constant()?;
        self.punct(']')?;
        if lo > hi {
            return Err(ScriptError::Invalid { loc: open, msg: "empty interval".into() });
        }
        Ok((lo, hi))
    }

    /// The tokens of one expression, stopping at a separator, an option or a
    /// flag at nesting depth zero. Returns the normalized text.
    fn raw_expr(&mut self) -> Result<(Expr, Vec<Token>)> {
        let start = self.pos;
        let mut depth = 0usize;
        loop {
            match &self.peek().tok {
                Tok::Eof => break,
                Tok::Punct(';') => break,
                Tok::Punct(',' | ')' | ']') if depth == 0 => break,
                Tok::Punct('(') => depth += 1,
                Tok::Punct(')') => depth -= 1,
                Tok::Ident(s) if depth == 0 && (STOP_WORDS.contains(&s.as_str()) || self.peek_at(1) == &Tok::Punct('=')) => {
                    break
                }
                Tok::Punct('[' | ']' | '=') => break,
                _ => {}
            }
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.expected("an expression"));
        }
        let toks = self.toks[start..self.pos].to_vec();
        Ok((Expr { text: normalize(&toks), loc: toks[0].loc }, toks))
    }

    fn poly(&mut self) -> Result<Expr> {
        let (e, toks) = self.raw_expr()?;
        check_idents(&toks, &self.scope, &[])?;
        Polynomial::parse(&e.text, &self.scope)
            .map_err(|err| ScriptError::Invalid { loc: e.loc, msg: format!("invalid polynomial `{}`: {err}", e.text) })?;
        Ok(e)
    }

    fn map_expr(&mut self) -> Result<Expr> {
        let (e, toks) = self.raw_expr()?;
        check_idents(&toks, &self.domain, MAP_FUNCTIONS)?;
        ScalarExpr::parse(&e.text, &self.domain)
            .map_err(|err| ScriptError::Invalid { loc: e.loc, msg: format!("invalid map `{}`: {err}", e.text) })?;
        Ok(e)
    }

    fn constant(&mut self) -> Result<Rational> {
        let (e, toks) = self.raw_expr()?;
        if let Some(t) = toks.iter().find(|t| matches!(t.tok, Tok::Ident(_))) {
            return Err(ScriptError::Syntax { loc: t.loc, expected: "a rational constant".into(), found: t.tok.to_string() });
        }
        Polynomial::parse(&e.text, &[])
            .ok()
            .and_then(|p| p.as_constant())
            .ok_or(ScriptError::Invalid { loc: e.loc, msg: format!("invalid rational constant `{}`", e.text) })
    }
}

fn duplicate_option(loc: Loc, name: &str) -> ScriptError {
    ScriptError::Invalid { loc, msg: format!("option `{name}` given twice") }
}

fn check_idents(toks: &[Token], scope: &[String], functions: &[&str]) -> Result<()> {
    for t in toks {
        if let Tok::Ident(s) = &t.tok {
            if !scope.contains(s) && !functions.contains(&s.as_str()) {
                return Err(ScriptError::ForwardReference { loc: t.loc, name: s.clone() });
            }
        }
    }
    Ok(())
}

/// Spaces around binary `+` and `-`, after commas, and nowhere else.
fn normalize(toks: &[Token]) -> String {
    let mut out = String::new();
    let mut prev: Option<&Tok> = None;
    for t in toks {
        let operand_before = matches!(prev, Some(Tok::Ident(_) | Tok::Num(_) | Tok::Punct(')')));
        match &t.tok {
            Tok::Punct(c @ ('+' | '-')) if operand_before => {
                out.push(' ');
                out.push(*c);
                out.push(' ');
            }
            Tok::Punct(',') => out.push_str(", "),
            Tok::Punct(c) => out.push(*c),
            Tok::Ident(s) | Tok::Num(s) => {
                if matches!(prev, Some(Tok::Ident(_) | Tok::Num(_))) {
                    out.push(' ');
                }
                out.push_str(s);
            }
            Tok::Eof => {}
        }
        prev = Some(&t.tok);
    }
    out
}

fn fmt_interval((lo, hi): &(Rational, Rational)) -> String {
    format!("[{}, {}]", rational::format(lo), rational::format(hi))
}

fn variant_name(v: CharVariant) -> &'static str {
    match v {
        CharVariant::CompactContinuous => "compact",
        CharVariant::GeneralClosure => "closure",
    }
}

impl fmt::Display for AdjoinKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdjoinKind::OddRoot { g, r } => write!(f, "oddroot({g}, {r})"),
            AdjoinKind::EvenRoot { g, s } => write!(f, "evenroot({g}, {s})"),
            AdjoinKind::Recip { g, bound } => {
                write!(f, "recip({g})")?;
                if let Some(b) = bound {
                    write!(f, " bound={}", rational::format(b))?;
                }
                Ok(())
            }
            AdjoinKind::Piecewise { g, h, q, mode } => write!(f, "piecewise({g}, {h}, {q}) mode={mode}"),
            AdjoinKind::Chi { q, variant } => write!(f, "chi({q}) mode={}", variant_name(*variant)),
        }
    }
}

impl fmt::Display for StmtKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())?;
        match self {
            StmtKind::Domain { vars, bounds, constraints, exclusions } => {
                let parts: Vec<String> = match bounds {
                    Bounds::Box(b) => vars.iter().zip(b).map(|(v, i)| format!("{v} in {}", fmt_interval(i))).collect(),
                    Bounds::Window(w) => {
                        vars.iter().zip(w).map(|(v, i)| format!("{v} in R window {}", fmt_interval(i))).collect()
                    }
                };
                write!(f, " {}", parts.join(", "))?;
                for c in constraints {
                    write!(f, " where {c}")?;
                }
                for e in exclusions {
                    write!(f, " excluding {e}")?;
                }
            }
            StmtKind::Coords(cs) => {
                let parts: Vec<String> = cs.iter().map(|(n, e)| format!("{n} = {e}")).collect();
                write!(f, " {}", parts.join(", "))?;
            }
            StmtKind::Relation(e) => write!(f, " {e}")?,
            StmtKind::BaseGen { poly, check } => {
                write!(f, " {poly}")?;
                if *check {
                    f.write_str(" check")?;
                }
            }
            StmtKind::BallBound(b) => write!(f, " {}", rational::format(b))?,
            StmtKind::AssumeMode(m) => write!(f, " {m}")?,
            StmtKind::Adjoin { name, kind, force } => {
                write!(f, " {name} = {kind}")?;
                if *force {
                    f.write_str(" force")?;
                }
            }
            StmtKind::AddGen { poly, check, assert } => {
                write!(f, " {poly}")?;
                if *check {
                    f.write_str(" check")?;
                }
                if let Some(m) = assert {
                    write!(f, " assert={m}")?;
                }
            }
            StmtKind::Exclude { point, eps } => {
                let c: Vec<String> = point.iter().map(rational::format).collect();
                write!(f, " ({}) eps={}", c.join(", "), rational::format(eps))?;
            }
            StmtKind::Explore { samples, delta, seed } => {
                if let Some(n) = samples {
                    write!(f, " samples={n}")?;
                }
                if let Some(d) = delta {
                    write!(f, " delta={d}")?;
                }
                if let Some(s) = seed {
                    write!(f, " seed={s}")?;
                }
            }
            StmtKind::Certify { poly, eps, dmax } => {
                write!(f, " {poly}")?;
                if let Some(e) = eps {
                    write!(f, " eps={}", rational::format(e))?;
                }
                if let Some(d) = dmax {
                    write!(f, " dmax={d}")?;
                }
            }
            StmtKind::Report => {}
        }
        Ok(())
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.kind)
    }
}

/// One statement per line.
impl fmt::Display for ProblemScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ABS_TOWER: &str =
        "domain t in [-1,1]; base_gen 1 - t^2; adjoin u = evenroot(t^2, 2); adjoin c = chi(t) mode=compact;";

    #[test]
    fn construction_sequence_has_four_statements() {
        let s = parse_script(ABS_TOWER).unwrap();
        assert_eq!(s.len(), 4);
        assert!(matches!(&s.statements[2].kind, StmtKind::Adjoin { name, kind: AdjoinKind::EvenRoot { s: 2, .. }, .. } if name == "u"));
    }

    #[test]
    fn empty_input_expects_domain() {
        let err = parse_script("").unwrap_err();
        assert!(err.to_string().contains("expected domain"), "{err}");
        assert_eq!(err.loc(), Loc { line: 1, col: 1 });
    }

    #[test]
    fn reciprocal_of_vanishing_function_parses() {
        let s = parse_script("domain t in [-1, 1]; adjoin v = recip(t);").unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn forward_reference_is_rejected() {
        let err = parse_script("domain t in [-1, 1];\nadjoin v = recip(u);\nadjoin u = oddroot(t, 3);").unwrap_err();
        assert_eq!(err, ScriptError::ForwardReference { loc: Loc { line: 2, col: 18 }, name: "u".into() });
    }

    #[test]
    fn duplicate_symbol_is_rejected() {
        let err = parse_script("domain t in [-1, 1]; adjoin u = oddroot(t, 3); adjoin u = oddroot(t, 5);").unwrap_err();
        assert!(matches!(err, ScriptError::DuplicateSymbol { ref name, .. } if name == "u"), "{err}");
    }

    #[test]
    fn syntax_errors_carry_position_and_expectation() {
        let err = parse_script("domain t in [-1, 1];\nadjoin u = evenroot(t^2 2);").unwrap_err();
        match err {
            ScriptError::Invalid { loc, .. } => assert_eq!(loc, Loc { line: 2, col: 21 }),
            other => panic!("{other:?}"),
        }
        let err = parse_script("domain t in [-1, 1] base_gen t;").unwrap_err();
        assert_eq!(
            err,
            ScriptError::Syntax { loc: Loc { line: 1, col: 21 }, expected: "`;`".into(), found: "`base_gen`".into() }
        );
    }

    #[test]
    fn base_statements_must_precede_the_tower() {
        let err = parse_script("domain t in [-1, 1]; adjoin u = oddroot(t, 3); base_gen 1 - t^2;").unwrap_err();
        assert!(matches!(err, ScriptError::Invalid { .. }), "{err}");
    }

    #[test]
    fn printing_normalizes_whitespace_and_round_trips() {
        let text = "domain t in R window [ -4 ,4 ] ;coords x=cos( t ),y = sin(t);relation x^2+y^2 -1;\
                    assume_mode exact; adjoin c=chi( y )mode=closure force; exclude (0, -1/2) eps=1/4;\
                    explore samples=500 delta=0.1 seed=3; certify 2+2*y eps=0 dmax=2; report;";
        let s = parse_script(text).unwrap();
        let printed = s.to_string();
        assert!(printed.starts_with("domain t in R window [-4, 4];\ncoords x = cos(t), y = sin(t);\nrelation x^2 + y^2 - 1;"));
        let again = parse_script(&printed).unwrap();
        assert_eq!(again, s);
        assert_eq!(again.to_string(), printed);
    }

    #[test]
    fn comments_and_unary_minus() {
        let s = parse_script("# header\ndomain t in [-2, 2]; # trailing\nadd_gen -t^2*(t + 1) + 4;").unwrap();
        match &s.statements[1].kind {
            StmtKind::AddGen { poly, .. } => assert_eq!(poly.text, "-t^2*(t + 1) + 4"),
            other => panic!("{other:?}"),
        }
    }
}
