use std::fmt;

use num_traits::{Signed, Zero};

use super::qmodule::QuadraticModuleDesc;
use super::symbol::{FunctionSymbol, Symbol};
use crate::algebra::rational::{self, Rational};
use crate::algebra::{Monomial, Polynomial};

/// Why a presentation variable is bounded on `K_{Q,Y}`.
#[derive(Clone, Debug, PartialEq)]
pub enum VarStatus {
    /// Satisfies a monic relation over the earlier variables.
    Integral { via: String },
    /// `N - v^2` lies in `Q`; `interval` is the box used for sampling.
    Bounded { bound: Rational, interval: (Rational, Rational), via: String },
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArchimedeanWitness {
    pub statuses: Vec<(String, VarStatus)>,
    pub archimedean: bool,
}

impl fmt::Display for ArchimedeanWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "archimedean {}", self.archimedean)?;
        for (name, st) in &self.statuses {
            match st {
                VarStatus::Integral { via } => writeln!(f, "  {name}: integral via {via}")?,
                VarStatus::Bounded { bound, via, .. } => {
                    writeln!(f, "  {name}: bounded N={} via {via}", rational::format(bound))?
                }
                VarStatus::Unbounded => writeln!(f, "  {name}: unbounded")?,
            }
        }
        Ok(())
    }
}

/// A one-sided bound on a variable and the generator that gives it.
type Side = Option<(Rational, String)>;

/// Recomputes the per-variable witness from the presentation.
pub fn compute_witness(
    symbols: &[Symbol],
    relations: &[Polynomial],
    qmodule: &QuadraticModuleDesc,
    names: &[String],
) -> ArchimedeanWitness {
    let n = symbols.len();
    let mut statuses = Vec::with_capacity(n);
    for (i, sym) in symbols.iter().enumerate() {
        let st = match &sym.kind {
            FunctionSymbol::OddRoot { r, .. } => VarStatus::Integral { via: format!("{}^{r} - g", sym.name) },
            FunctionSymbol::EvenRoot { s, .. } => VarStatus::Integral { via: format!("{}^{s} - g", sym.name) },
            FunctionSymbol::Piecewise { .. } => VarStatus::Integral { via: format!("({0} - g)*({0} - h)", sym.name) },
            FunctionSymbol::Characteristic { .. } => VarStatus::Integral { via: format!("{0}^2 - {0}", sym.name) },
            FunctionSymbol::Reciprocal { .. } => bound_from_generators(i, n, qmodule, names).unwrap_or(VarStatus::Unbounded),
            FunctionSymbol::Base(_) => bound_from_generators(i, n, qmodule, names)
                .or_else(|| bound_from_relations(i, relations, names))
                .or_else(|| integral_from_relations(i, relations, names))
                .unwrap_or(VarStatus::Unbounded),
        };
        statuses.push((sym.name.clone(), st));
    }
    let archimedean = n > 0 && statuses.iter().all(|(_, s)| !matches!(s, VarStatus::Unbounded));
    ArchimedeanWitness { statuses, archimedean }
}

/// Splits `p` into its constant and the coefficients of pure squares `v^2`,
/// provided those are the only terms.
fn square_form(p: &Polynomial) -> Option<(Rational, Vec<(usize, Rational)>)> {
    let mut c = Rational::zero();
    let mut sq = Vec::new();
    for (m, k) in p.terms() {
        if m.is_one() {
            c = k.clone();
            continue;
        }
        let supp: Vec<usize> = m.support().collect();
        if supp.len() != 1 || m.exponents()[supp[0]] != 2 {
            return None;
        }
        sq.push((supp[0], k.clone()));
    }
    Some((c, sq))
}

fn sym_interval(bound: &Rational) -> (Rational, Rational) {
    let r = rational::from_f64(rational::to_f64(bound).sqrt() * (1.0 + 1e-12));
    (-r.clone(), r)
}

fn bound_from_generators(i: usize, n: usize, qm: &QuadraticModuleDesc, names: &[String]) -> Option<VarStatus> {
    // c - sum k_j v_j^2 with k_j > 0
    for g in qm.polys() {
        if g.nvars() != n {
            continue;
        }
        if let Some((c, sq)) = square_form(g) {
            if c.is_positive() && !sq.is_empty() && sq.iter().all(|(_, k)| k.is_negative()) {
                if let Some((_, k)) = sq.iter().find(|(v, _)| *v == i) {
                    let bound = &c / -k;
                    return Some(VarStatus::Bounded {
                        interval: sym_interval(&bound),
                        bound,
                        via: g.display(names).to_string(),
                    });
                }
            }
        }
    }
    // a pair a - v >= 0 and v - b >= 0
    let (mut upper, mut lower): (Side, Side) = (None, None);
    let v = Monomial::var(n, i, 1);
    for g in qm.polys() {
        if g.nvars() != n || g.len() > 2 || g.total_degree() != 1 {
            continue;
        }
        let k = g.coeff(&v);
        if k.is_zero() || g.len() != 1 + usize::from(!g.constant_term().is_zero()) {
            continue;
        }
        let root = -g.constant_term() / &k;
        let text = g.display(names).to_string();
        if k.is_negative() {
            if upper.as_ref().is_none_or(|(u, _)| root < *u) {
                upper = Some((root, text));
            }
        } else if lower.as_ref().is_none_or(|(l, _)| root > *l) {
            lower = Some((root, text));
        }
    }
    if let (Some((a, ta)), Some((b, tb))) = (upper, lower) {
        let bound = if a.abs() > b.abs() { &a * &a } else { &b * &b };
        return Some(VarStatus::Bounded { bound, interval: (b, a), via: format!("{ta}, {tb}") });
    }
    None
}

fn bound_from_relations(i: usize, relations: &[Polynomial], names: &[String]) -> Option<VarStatus> {
    for r in relations {
        if let Some((c, sq)) = square_form(r) {
            // sum k_j v_j^2 = -c with all k_j of one sign
            let (c, sq) = if sq.first().is_some_and(|(_, k)| k.is_negative()) {
                (-c, sq.into_iter().map(|(v, k)| (v, -k)).collect::<Vec<_>>())
            } else {
                (c, sq)
            };
            if c.is_negative() && sq.iter().all(|(_, k)| k.is_positive()) {
                if let Some((_, k)) = sq.iter().find(|(v, _)| *v == i) {
                    let bound = -&c / k;
                    return Some(VarStatus::Bounded {
                        interval: sym_interval(&bound),
                        bound,
                        via: r.display(names).to_string(),
                    });
                }
            }
        }
    }
    None
}

/// A relation `k*v^e + (terms of lower degree in v, in earlier variables only)`.
fn integral_from_relations(i: usize, relations: &[Polynomial], names: &[String]) -> Option<VarStatus> {
    'rel: for r in relations {
        let e = r.terms().map(|(m, _)| m.exponents()[i]).max().unwrap_or(0);
        if e == 0 {
            continue;
        }
        for (m, _) in r.terms() {
            let ex = m.exponents();
            if ex.iter().enumerate().any(|(j, &x)| j > i && x > 0) {
                continue 'rel;
            }
            if ex[i] == e && m.degree() != e {
                continue 'rel;
            }
        }
        if r.coeff(&Monomial::var(r.nvars(), i, e)).is_zero() {
            continue;
        }
        return Some(VarStatus::Integral { via: r.display(names).to_string() });
    }
    None
}

/// Crude magnitude bound for a variable that is integral through `rel`,
/// given intervals for the earlier variables (Cauchy bound).
pub fn integral_radius(i: usize, rel: &Polynomial, radii: &[f64]) -> f64 {
    let e = rel.terms().map(|(m, _)| m.exponents()[i]).max().unwrap_or(0);
    let lead = rational::to_f64(&rel.coeff(&Monomial::var(rel.nvars(), i, e))).abs();
    let mut worst: f64 = 0.0;
    for k in 0..e {
        let mut s = 0.0;
        for (m, c) in rel.terms() {
            if m.exponents()[i] != k {
                continue;
            }
            let mut t = rational::to_f64(c).abs();
            for (j, &x) in m.exponents().iter().enumerate() {
                if j != i && x > 0 {
                    t *= radii.get(j).copied().unwrap_or(f64::INFINITY).powi(x as i32);
                }
            }
            s += t;
        }
        worst = worst.max(s / lead);
    }
    1.0 + worst
}
