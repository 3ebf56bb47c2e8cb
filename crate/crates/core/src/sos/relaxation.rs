use std::collections::HashMap;

use num_traits::Zero;

use super::sdp::{SdpProblem, SparseSym};
use crate::algebra::rational::{self, Rational};
use crate::algebra::{normal_form, standard_monomials, Monomial, NormalFormCache, Polynomial};
use crate::error::{Error, Result};
use crate::tower::TowerState;

/// Default cap on the number of moment variables (standard monomials of degree `<= 2d`).
pub const DEFAULT_MONOMIAL_CAP: usize = 2000;

/// One Gram block: the multiplier `g` (the constant 1 for the SOS part) and
/// the monomial basis of its sum of squares.
#[derive(Clone, Debug, PartialEq)]
pub struct RelaxationBlock {
    /// Index into the tower's generator list; `None` for the SOS part.
    pub generator: Option<usize>,
    pub poly: Polynomial,
    pub basis: Vec<Monomial>,
}

/// The degree-`d` search for `f - lambda = sum_i g_i * (b' X_i b)` modulo the
/// ideal, with exact constraint data indexed by standard monomials.
#[derive(Clone, Debug, PartialEq)]
pub struct RelaxationProblem {
    pub degree: u32,
    pub nvars: usize,
    pub blocks: Vec<RelaxationBlock>,
    /// Standard monomials of degree `<= 2d`: the moment variables.
    pub moments: Vec<Monomial>,
    /// For each moment, the entries `(block, i, j, coefficient)` with `i <= j`
    /// such that the moment's coefficient in `sum_i g_i b' X_i b` is
    /// `sum coefficient * X[i][j]` (off-diagonal entries counted twice).
    pub entries: Vec<Vec<(usize, usize, usize, Rational)>>,
    /// Coefficients of `NF(f)` over `moments`.
    pub objective: Vec<Rational>,
    /// Position of the monomial `1` in `moments`.
    pub one: usize,
    pub skipped_generators: Vec<usize>,
}

fn ceil_half(d: u32) -> u32 {
    d.div_ceil(2)
}

pub fn build_relaxation(tw: &TowerState, f: &Polynomial, d: u32) -> Result<RelaxationProblem> {
    build_relaxation_capped(tw, f, d, DEFAULT_MONOMIAL_CAP)
}

pub fn build_relaxation_capped(tw: &TowerState, f: &Polynomial, d: u32, cap: usize) -> Result<RelaxationProblem> {
    let n = tw.nvars();
    if f.nvars() != n {
        return Err(Error::VariableMismatch { left: f.nvars(), right: n });
    }
    if !tw.is_archimedean() {
        log::warn!("relaxation over a non-archimedean quadratic module");
    }
    let gb = tw.ideal();
    let fnf = normal_form(f, gb);
    if fnf.total_degree() > 2 * d {
        return Err(Error::InvalidArgument(format!(
            "degree {d} too small: normal form of f has degree {}",
            fnf.total_degree()
        )));
    }
    let moments = standard_monomials(gb, 2 * d);
    if moments.len() > cap {
        return Err(Error::RelaxationTooLarge { count: moments.len(), cap });
    }
    let index: HashMap<&Monomial, usize> = moments.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let one = *index.get(&Monomial::one(n)).ok_or_else(|| Error::InvalidArgument("ideal is the unit ideal".into()))?;

    let mut blocks = vec![RelaxationBlock { generator: None, poly: Polynomial::one(n), basis: standard_monomials(gb, d) }];
    let mut skipped = Vec::new();
    for (k, g) in tw.generators().iter().enumerate() {
        let half = ceil_half(g.total_degree());
        if half > d {
            skipped.push(k);
            continue;
        }
        blocks.push(RelaxationBlock { generator: Some(k), poly: g.clone(), basis: standard_monomials(gb, d - half) });
    }

    let mut cache = NormalFormCache::new(gb);
    let mut entries: Vec<Vec<(usize, usize, usize, Rational)>> = vec![Vec::new(); moments.len()];
    for (bk, block) in blocks.iter().enumerate() {
        let b = &block.basis;
        for i in 0..b.len() {
            for j in i..b.len() {
                let bij = b[i].mul(&b[j]);
                let mut acc: HashMap<usize, Rational> = HashMap::new();
                for (m, c) in block.poly.terms() {
                    let nf = cache.monomial(&bij.mul(m)).clone();
                    for (m2, c2) in nf.terms() {
                        let pos = *index.get(m2).ok_or_else(|| {
                            Error::InvalidArgument("normal form leaves the moment index; term order not degree-compatible".into())
                        })?;
                        *acc.entry(pos).or_insert_with(Rational::zero) += c * c2;
                    }
                }
                for (pos, c) in acc {
                    if !c.is_zero() {
                        entries[pos].push((bk, i, j, c));
                    }
                }
            }
        }
    }
    for e in &mut entries {
        e.sort_by_key(|a| (a.0, a.1, a.2));
    }
    let objective = moments.iter().map(|m| fnf.coeff(m)).collect();
    Ok(RelaxationProblem { degree: d, nvars: n, blocks, moments, entries, objective, one, skipped_generators: skipped })
}

impl RelaxationProblem {
    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.basis.len()).collect()
    }

    fn sparse(&self, pos: usize) -> SparseSym {
        let mut s = SparseSym::new();
        for (bk, i, j, c) in &self.entries[pos] {
            s.push(*bk, *i, *j, rational::to_f64(c));
        }
        s
    }

    /// `min <A_1, X>  s.t.  <A_alpha, X> = f_alpha (alpha != 1)`; the bound is
    /// `f_1 - <A_1, X>`.
    pub fn to_sdp(&self) -> SdpProblem {
        let mut constraints = Vec::with_capacity(self.moments.len() - 1);
        let mut b = Vec::with_capacity(self.moments.len() - 1);
        for pos in 0..self.moments.len() {
            if pos == self.one {
                continue;
            }
            constraints.push(self.sparse(pos));
            b.push(rational::to_f64(&self.objective[pos]));
        }
        SdpProblem { block_sizes: self.block_sizes(), c: self.sparse(self.one), constraints, b }
    }

    /// `<A_alpha, X> = f_alpha` for every moment, with `f_1` lowered by
    /// `lambda`, and a zero objective: interior solvers then return the
    /// analytic center of the set of certificates for `f - lambda`.
    pub fn to_feasibility_sdp(&self, lambda: f64) -> SdpProblem {
        let mut constraints = Vec::with_capacity(self.moments.len());
        let mut b = Vec::with_capacity(self.moments.len());
        for pos in 0..self.moments.len() {
            constraints.push(self.sparse(pos));
            let v = rational::to_f64(&self.objective[pos]);
            b.push(if pos == self.one { v - lambda } else { v });
        }
        SdpProblem { block_sizes: self.block_sizes(), c: SparseSym::new(), constraints, b }
    }

    pub fn constant_term(&self) -> &Rational {
        &self.objective[self.one]
    }

    /// `sum_k g_k * (b' X_k b)` for exact Gram matrices, reduced modulo the ideal.
    pub fn combine(&self, grams: &[Vec<Vec<Rational>>]) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (pos, es) in self.entries.iter().enumerate() {
            let mut c = Rational::zero();
            for (bk, i, j, v) in es {
                let x = &grams[*bk][*i][*j];
                if i == j {
                    c += v * x;
                } else {
                    c += v * x * Rational::from_integer(2.into());
                }
            }
            if !c.is_zero() {
                out.add_term(self.moments[pos].clone(), c);
            }
        }
        out
    }
}
