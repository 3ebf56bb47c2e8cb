//! Buchberger's algorithm with the normal selection strategy and the two
//! classical pair criteria (coprime leading monomials, chain criterion).

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Zero};

use super::monomial::Monomial;
use super::order::TermOrder;
use super::polynomial::Polynomial;
use super::rational::Rational;

/// A reduced, monic Gröbner basis. The empty basis describes the zero ideal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    generators: Vec<Polynomial>,
    order: TermOrder,
    nvars: usize,
}

impl GroebnerBasis {
    pub fn zero_ideal(order: TermOrder) -> Self {
        let nvars = order.nvars();
        GroebnerBasis { generators: Vec::new(), order, nvars }
    }

    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn order(&self) -> &TermOrder {
        &self.order
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn leading_monomials(&self) -> Vec<Monomial> {
        self.generators
            .iter()
            .map(|g| g.leading_monomial(&self.order).expect("nonzero generator").clone())
            .collect()
    }

    /// True when the ideal is the whole ring.
    pub fn is_unit_ideal(&self) -> bool {
        self.generators.iter().any(|g| g.is_constant() && !g.is_zero())
    }

    pub fn contains(&self, p: &Polynomial) -> bool {
        normal_form(p, self).is_zero()
    }

    /// The same ideal in a ring with one more variable appended as the largest.
    pub fn extended_by_one(&self) -> GroebnerBasis {
        let nvars = self.nvars + 1;
        GroebnerBasis {
            generators: self.generators.iter().map(|g| g.extended(nvars)).collect(),
            order: self.order.with_new_largest(),
            nvars,
        }
    }

    /// Basis of the ideal generated by this one together with `extra`.
    pub fn with_added(&self, extra: &[Polynomial]) -> GroebnerBasis {
        let mut gens = self.generators.clone();
        gens.extend(extra.iter().filter(|p| !p.is_zero()).cloned());
        if gens.is_empty() {
            return GroebnerBasis::zero_ideal(self.order.clone());
        }
        buchberger(&gens, &self.order)
    }
}

/// Reduced Gröbner basis of the ideal generated by `gens` (zero polynomials ignored).
pub fn buchberger(gens: &[Polynomial], order: &TermOrder) -> GroebnerBasis {
    let nvars = order.nvars();
    let mut basis: Vec<Polynomial> = Vec::new();
    for g in gens {
        assert_eq!(g.nvars(), nvars, "generator ring mismatch");
        if !g.is_zero() {
            basis.push(g.monic(order));
        }
    }
    if basis.is_empty() {
        return GroebnerBasis::zero_ideal(order.clone());
    }
    let mut lms: Vec<Monomial> = basis.iter().map(|g| g.leading_monomial(order).unwrap().clone()).collect();

    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.insert((i, j));
        }
    }

    while !pairs.is_empty() {
        // normal strategy: smallest lcm first
        let &(i, j) = pairs
            .iter()
            .min_by(|a, b| order.compare(&lms[a.0].lcm(&lms[a.1]), &lms[b.0].lcm(&lms[b.1])).then(a.cmp(b)))
            .unwrap();
        pairs.remove(&(i, j));
        if !basis[i].is_zero() && !basis[j].is_zero() {
            if lms[i].is_coprime(&lms[j]) {
                continue;
            }
            let lcm = lms[i].lcm(&lms[j]);
            let chain = (0..basis.len()).any(|k| {
                k != i
                    && k != j
                    && !basis[k].is_zero()
                    && lms[k].divides(&lcm)
                    && !pairs.contains(&(i.min(k), i.max(k)))
                    && !pairs.contains(&(j.min(k), j.max(k)))
            });
            if chain {
                continue;
            }
            let s = s_polynomial(&basis[i], &basis[j], order);
            let r = reduce_full(&s, &basis, &lms, order);
            if !r.is_zero() {
                let r = r.monic(order);
                let lm = r.leading_monomial(order).unwrap().clone();
                let k = basis.len();
                basis.push(r);
                lms.push(lm);
                for (i2, b) in basis.iter().enumerate().take(k) {
                    if !b.is_zero() {
                        pairs.insert((i2, k));
                    }
                }
            }
        }
    }

    // Minimalize: drop generators whose leading monomial is divisible by another's.
    let mut keep: Vec<usize> = Vec::new();
    for i in 0..basis.len() {
        let redundant = (0..basis.len()).any(|j| {
            j != i && lms[j].divides(&lms[i]) && (lms[j] != lms[i] || j < i)
        });
        if !redundant {
            keep.push(i);
        }
    }
    let mut minimal: Vec<Polynomial> = keep.iter().map(|&i| basis[i].clone()).collect();
    let min_lms: Vec<Monomial> = keep.iter().map(|&i| lms[i].clone()).collect();

    // Interreduce the tails.
    for i in 0..minimal.len() {
        let others: Vec<Polynomial> =
            (0..minimal.len()).map(|j| if j == i { Polynomial::zero(nvars) } else { minimal[j].clone() }).collect();
        let lead = Polynomial::monomial(min_lms[i].clone(), Rational::one());
        let tail = &minimal[i] - &lead;
        let reduced_tail = reduce_full(&tail, &others, &min_lms, order);
        minimal[i] = &lead + &reduced_tail;
    }
    minimal.sort_by(|a, b| order.compare(a.leading_monomial(order).unwrap(), b.leading_monomial(order).unwrap()));
    GroebnerBasis { generators: minimal, order: order.clone(), nvars }
}

pub fn s_polynomial(f: &Polynomial, g: &Polynomial, order: &TermOrder) -> Polynomial {
    let (lf, cf) = f.leading_term(order).unwrap();
    let (lg, cg) = g.leading_term(order).unwrap();
    let lcm = lf.lcm(lg);
    let a = f.mul_term(&lf.quotient_of(&lcm), &cf.recip());
    let b = g.mul_term(&lg.quotient_of(&lcm), &cg.recip());
    &a - &b
}

/// Full reduction of `p` by `divisors` (zero entries skipped).
fn reduce_full(p: &Polynomial, divisors: &[Polynomial], lms: &[Monomial], order: &TermOrder) -> Polynomial {
    let nvars = p.nvars();
    let mut rem = Polynomial::zero(nvars);
    let mut work = p.clone();
    let lcs: Vec<Option<Rational>> =
        divisors.iter().map(|d| d.leading_term(order).map(|(_, c)| c.clone())).collect();
    while let Some((m, c)) = work.leading_term(order).map(|(m, c)| (m.clone(), c.clone())) {
        let hit = (0..divisors.len()).find(|&k| !divisors[k].is_zero() && lms[k].divides(&m));
        match hit {
            Some(k) => {
                let q = lms[k].quotient_of(&m);
                let coef = &c / lcs[k].as_ref().unwrap();
                work = &work - &divisors[k].mul_term(&q, &coef);
            }
            None => {
                rem.add_term(m.clone(), c.clone());
                work.add_term(m, -c);
            }
        }
    }
    rem
}

/// The unique remainder of `p` modulo the ideal of `gb`.
pub fn normal_form(p: &Polynomial, gb: &GroebnerBasis) -> Polynomial {
    assert_eq!(p.nvars(), gb.nvars, "normal form ring mismatch");
    if gb.generators.is_empty() {
        return p.clone();
    }
    reduce_full(p, &gb.generators, &gb.leading_monomials(), &gb.order)
}

/// All standard monomials of total degree at most `d`, ascending in the term order.
pub fn standard_monomials(gb: &GroebnerBasis, d: u32) -> Vec<Monomial> {
    let lms = gb.leading_monomials();
    let mut out = Vec::new();
    let mut current = vec![0u32; gb.nvars];
    enumerate_degree_le(gb.nvars, d, 0, &mut current, &mut |m| {
        let mono = Monomial::new(m.to_vec());
        if !lms.iter().any(|l| l.divides(&mono)) {
            out.push(mono);
        }
    });
    out.sort_by(|a, b| gb.order.compare(a, b));
    out
}

fn enumerate_degree_le(nvars: usize, budget: u32, idx: usize, cur: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
    if idx == nvars {
        f(cur);
        return;
    }
    for e in 0..=budget {
        cur[idx] = e;
        enumerate_degree_le(nvars, budget - e, idx + 1, cur, f);
    }
    cur[idx] = 0;
}

/// Memoized normal forms of monomials; products of standard monomials are
/// reduced term by term through this cache.
#[derive(Debug)]
pub struct NormalFormCache<'a> {
    gb: &'a GroebnerBasis,
    cache: HashMap<Monomial, Polynomial>,
}

impl<'a> NormalFormCache<'a> {
    pub fn new(gb: &'a GroebnerBasis) -> Self {
        NormalFormCache { gb, cache: HashMap::new() }
    }

    pub fn monomial(&mut self, m: &Monomial) -> &Polynomial {
        if !self.cache.contains_key(m) {
            let nf = normal_form(&Polynomial::monomial(m.clone(), Rational::one()), self.gb);
            self.cache.insert(m.clone(), nf);
        }
        &self.cache[m]
    }

    pub fn reduce(&mut self, p: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(p.nvars());
        for (m, c) in p.terms() {
            if c.is_zero() {
                continue;
            }
            let nf = self.monomial(m).clone();
            for (m2, c2) in nf.terms() {
                out.add_term(m2.clone(), c * c2);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn p(s: &str, n: &[String]) -> Polynomial {
        Polynomial::parse(s, n).unwrap()
    }

    #[test]
    fn single_idempotent_generator() {
        let n = names(&["f"]);
        let gb = buchberger(&[p("f^2 - f", &n)], &TermOrder::tower(1));
        assert_eq!(gb.generators(), &[p("f^2 - f", &n)]);
    }

    #[test]
    fn binary_pair_with_product_relation() {
        let n = names(&["x", "y", "z"]);
        let gens = vec![p("y^2-y", &n), p("z^2-z", &n), p("x*y*z", &n)];
        let gb = buchberger(&gens, &TermOrder::tower(3));
        let mut got: Vec<_> = gb.generators().to_vec();
        let mut want = gens.clone();
        got.sort_by_key(|q| q.display(&n).to_string());
        want.sort_by_key(|q| q.display(&n).to_string());
        assert_eq!(got, want);
        assert!(normal_form(&p("x*y*z", &n), &gb).is_zero());
    }

    #[test]
    fn principal_circle() {
        let n = names(&["x", "y"]);
        let gb = buchberger(&[p("x^2+y^2-1", &n)], &TermOrder::tower(2));
        assert_eq!(gb.generators(), &[p("x^2+y^2-1", &n)]);
        assert_eq!(normal_form(&p("x^2 + (y+1)^2", &n), &gb), p("2*y+2", &n));
    }

    #[test]
    fn idempotent_variable_power() {
        let n = names(&["y"]);
        let gb = buchberger(&[p("y^2-y", &n)], &TermOrder::tower(1));
        assert_eq!(normal_form(&p("y^3", &n), &gb), p("y", &n));
    }

    #[test]
    fn standard_monomial_examples() {
        let n = names(&["t", "f"]);
        let gb = buchberger(&[p("f^2-f", &n)], &TermOrder::tower(2));
        let sm = standard_monomials(&gb, 2);
        let shown: Vec<String> = sm.iter().map(|m| m.display(&n).to_string()).collect();
        assert_eq!(shown, ["1", "t", "f", "t^2", "t*f"]);

        let n2 = names(&["x", "y"]);
        let circle = buchberger(&[p("x^2+y^2-1", &n2)], &TermOrder::tower(2));
        let shown: Vec<String> = standard_monomials(&circle, 1).iter().map(|m| m.display(&n2).to_string()).collect();
        assert_eq!(shown, ["1", "x", "y"]);

        let free = GroebnerBasis::zero_ideal(TermOrder::tower(2));
        assert_eq!(standard_monomials(&free, 1).len(), 3);
    }

    #[test]
    fn unit_ideal_detected() {
        let n = names(&["x"]);
        let gb = buchberger(&[p("x", &n), p("x - 1", &n)], &TermOrder::tower(1));
        assert!(gb.is_unit_ideal());
        assert_eq!(gb.generators(), &[Polynomial::constant(1, int(1))]);
    }

    #[test]
    fn reciprocal_relation_cyclotomic() {
        // (t^2+1) f - 1 together with f^2 + ... stays consistent
        let n = names(&["t", "f"]);
        let gb = buchberger(&[p("(1+t^2)*f - 1", &n)], &TermOrder::tower(2));
        assert!(!gb.is_unit_ideal());
        assert!(normal_form(&p("(1+t^2)*f*t", &n), &gb) == p("t", &n));
    }
}
