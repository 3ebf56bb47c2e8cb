use std::fmt;

use crate::algebra::{normal_form, GroebnerBasis, Polynomial};

/// Where a quadratic-module generator came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// A base generator describing `X`.
    Base,
    /// The ball bound `N - sum x_i^2`.
    Ball,
    /// Prescribed by the adjunction of the named symbol.
    Adjunction(String),
    /// The bound `N - f^2` of the named reciprocal.
    Bound(String),
    /// A point separator `sum (v_j - y_j)^2 - eps`.
    Separator,
    /// Added by the caller; `claimed` records whether nonnegativity on `X` was claimed.
    User { claimed: bool },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Base => f.write_str("base"),
            Provenance::Ball => f.write_str("ball"),
            Provenance::Adjunction(s) => write!(f, "adjunction:{s}"),
            Provenance::Bound(s) => write!(f, "bound:{s}"),
            Provenance::Separator => f.write_str("separator"),
            Provenance::User { claimed: true } => f.write_str("user:claimed"),
            Provenance::User { claimed: false } => f.write_str("user:unclaimed"),
        }
    }
}

impl Provenance {
    pub fn parse(s: &str) -> Option<Provenance> {
        Some(match s {
            "base" => Provenance::Base,
            "ball" => Provenance::Ball,
            "separator" => Provenance::Separator,
            "user:claimed" => Provenance::User { claimed: true },
            "user:unclaimed" => Provenance::User { claimed: false },
            _ => {
                if let Some(n) = s.strip_prefix("adjunction:") {
                    Provenance::Adjunction(n.to_string())
                } else {
                    let n = s.strip_prefix("bound:")?;
                    Provenance::Bound(n.to_string())
                }
            }
        })
    }

    /// Generators whose nonnegativity on `X` holds by construction or by claim.
    pub fn nonneg_on_domain(&self) -> bool {
        !matches!(self, Provenance::User { claimed: false } | Provenance::Separator)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Generator {
    pub poly: Polynomial,
    pub provenance: Provenance,
}

/// Generators of `QM(g_1, ..., g_s)`; the generator `1` is implicit.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct QuadraticModuleDesc {
    pub generators: Vec<Generator>,
}

impl QuadraticModuleDesc {
    pub fn polys(&self) -> impl Iterator<Item = &Polynomial> {
        self.generators.iter().map(|g| &g.poly)
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Appends `p` reduced modulo the ideal unless it is zero, a positive
    /// constant, or already present. Returns whether it was added.
    pub fn push(&mut self, p: &Polynomial, provenance: Provenance, ideal: &GroebnerBasis) -> bool {
        let nf = normal_form(&p.extended(ideal.nvars()), ideal);
        if nf.is_zero() || nf.as_constant().is_some_and(|c| c > num_traits::Zero::zero()) {
            return false;
        }
        if self.generators.iter().any(|g| g.poly == nf) {
            return false;
        }
        self.generators.push(Generator { poly: nf, provenance });
        true
    }

    /// Re-embeds every generator into a larger ring and re-reduces it.
    pub fn renormalized(&self, ideal: &GroebnerBasis) -> QuadraticModuleDesc {
        let mut out = QuadraticModuleDesc::default();
        for g in &self.generators {
            out.push(&g.poly, g.provenance.clone(), ideal);
        }
        out
    }
}
