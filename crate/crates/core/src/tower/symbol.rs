use std::fmt;

use crate::algebra::Polynomial;
use crate::expr::ScalarExpr;

/// How a base coordinate is computed from a domain point.
#[derive(Clone, Debug, PartialEq)]
pub enum BaseCoord {
    /// A polynomial in the domain variables.
    Poly(Polynomial),
    /// A general scalar map such as `cos(t)`; its relations must be declared.
    Map(ScalarExpr),
}

/// Evaluation recipe of a presentation variable.
///
/// Polynomials inside a symbol live in the ring of the variables that precede
/// it, so their variable count equals the symbol's index in the tower.
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionSymbol {
    Base(BaseCoord),
    /// Real `r`-th root of `g`, `r` odd.
    OddRoot { g: Polynomial, r: u32 },
    /// Nonnegative `s`-th root of `g >= 0`, `s` even.
    EvenRoot { g: Polynomial, s: u32 },
    Reciprocal { g: Polynomial },
    /// `g` where `q >= 0`, `h` where `q < 0`.
    Piecewise { g: Polynomial, h: Polynomial, q: Polynomial },
    /// Indicator of `q >= 0`.
    Characteristic { q: Polynomial },
}

impl FunctionSymbol {
    pub fn tag(&self) -> &'static str {
        match self {
            FunctionSymbol::Base(BaseCoord::Poly(_)) => "base",
            FunctionSymbol::Base(BaseCoord::Map(_)) => "map",
            FunctionSymbol::OddRoot { .. } => "oddroot",
            FunctionSymbol::EvenRoot { .. } => "evenroot",
            FunctionSymbol::Reciprocal { .. } => "recip",
            FunctionSymbol::Piecewise { .. } => "piecewise",
            FunctionSymbol::Characteristic { .. } => "chi",
        }
    }

    pub fn is_base(&self) -> bool {
        matches!(self, FunctionSymbol::Base(_))
    }

    /// Polynomials in earlier variables that this symbol refers to.
    pub fn references(&self) -> Vec<&Polynomial> {
        match self {
            FunctionSymbol::Base(_) => vec![],
            FunctionSymbol::OddRoot { g, .. } | FunctionSymbol::EvenRoot { g, .. } | FunctionSymbol::Reciprocal { g } => {
                vec![g]
            }
            FunctionSymbol::Piecewise { g, h, q } => vec![g, h, q],
            FunctionSymbol::Characteristic { q } => vec![q],
        }
    }

    /// Value of the symbol given the values of all earlier variables, or
    /// `None` at a pole or outside the root's domain.
    pub fn eval(&self, domain_point: &[f64], prev: &[f64]) -> Option<f64> {
        let v = match self {
            FunctionSymbol::Base(BaseCoord::Poly(p)) => p.eval_f64(domain_point),
            FunctionSymbol::Base(BaseCoord::Map(e)) => e.eval(domain_point),
            FunctionSymbol::OddRoot { g, r } => {
                let x = g.eval_f64(prev);
                x.signum() * x.abs().powf(1.0 / *r as f64)
            }
            FunctionSymbol::EvenRoot { g, s } => {
                let x = g.eval_f64(prev);
                if x < -1e-12 {
                    return None;
                }
                x.max(0.0).powf(1.0 / *s as f64)
            }
            FunctionSymbol::Reciprocal { g } => {
                let x = g.eval_f64(prev);
                if x == 0.0 {
                    return None;
                }
                1.0 / x
            }
            FunctionSymbol::Piecewise { g, h, q } => {
                if q.eval_f64(prev) >= 0.0 {
                    g.eval_f64(prev)
                } else {
                    h.eval_f64(prev)
                }
            }
            FunctionSymbol::Characteristic { q } => {
                if q.eval_f64(prev) >= 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        };
        v.is_finite().then_some(v)
    }
}

/// A named presentation variable together with its continuity flag.
#[derive(Clone, Debug, PartialEq)]
pub struct Symbol {
    pub name: String,
    pub kind: FunctionSymbol,
    pub continuous: bool,
}

/// The claimed relation between the image `m(X)` and `K_{Q,Y}`.
///
/// Ordered by strength: `Unverified < Closure < Exact`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Unverified,
    /// `cl m(X) = K_{Q,Y}`.
    Closure,
    /// `m(X) = K_{Q,Y}`.
    Exact,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Closure => "closure",
            Mode::Unverified => "unverified",
        }
    }

    pub fn from_name(s: &str) -> Option<Mode> {
        match s {
            "exact" => Some(Mode::Exact),
            "closure" => Some(Mode::Closure),
            "unverified" => Some(Mode::Unverified),
            _ => None,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}
