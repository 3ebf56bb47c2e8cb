//! Exact univariate sign analysis: square-free decomposition, Sturm sequences
//! and root isolation over rational intervals.

use num_traits::{One, Signed, Zero};

use super::polynomial::Polynomial;
use super::rational::{self, Rational};
use crate::error::{Error, Result};

/// Dense coefficients, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly(Vec<Rational>);

impl UniPoly {
    pub fn new(mut c: Vec<Rational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        UniPoly(c)
    }

    pub fn from_polynomial(p: &Polynomial, var: usize) -> Option<Self> {
        p.to_univariate(var).map(UniPoly::new)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        (!self.0.is_empty()).then(|| self.0.len() - 1)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn sign_at(&self, x: &Rational) -> i8 {
        let v = self.eval(x);
        if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        }
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rational::from_integer((i as i64).into()))
                .collect(),
        )
    }

    fn lead(&self) -> &Rational {
        self.0.last().expect("nonzero")
    }

    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead().clone();
        UniPoly(self.0.iter().map(|c| c / &l).collect())
    }

    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero());
        let mut r = self.0.clone();
        let dd = d.0.len() - 1;
        if r.len() < d.0.len() {
            return (UniPoly(Vec::new()), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        let lc = d.lead().clone();
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lc;
            if !c.is_zero() {
                for (i, dc) in d.0.iter().enumerate() {
                    r[k + i] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (UniPoly::new(q), UniPoly::new(r))
    }

    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = std::mem::replace(&mut b, r);
        }
        a.monic()
    }

    /// Yun's square-free factorization: `(factor, multiplicity)` pairs.
    pub fn square_free_factors(&self) -> Vec<(UniPoly, u32)> {
        let mut out = Vec::new();
        if self.degree().unwrap_or(0) == 0 {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a = f.gcd(&df);
        let mut b = f.div_rem(&a).0;
        let mut c = df.div_rem(&a).0;
        let mut d = sub(&c, &b.derivative());
        let mut i = 1;
        loop {
            let ai = b.gcd(&d);
            if ai.degree().unwrap_or(0) > 0 {
                out.push((ai.clone(), i));
            }
            b = b.div_rem(&ai).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&ai).0;
            d = sub(&c, &b.derivative());
            i += 1;
        }
        out
    }

    pub fn sturm_sequence(&self) -> Vec<UniPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        loop {
            let n = seq.len();
            if seq[n - 1].is_zero() {
                seq.pop();
                break;
            }
            let (_, r) = seq[n - 2].div_rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            seq.push(UniPoly(r.0.iter().map(|c| -c.clone()).collect()));
        }
        seq
    }

    /// Cauchy bound: every real root lies in `(-B, B)`.
    pub fn root_bound(&self) -> Rational {
        let lc = self.lead().abs();
        let m = self.0[..self.0.len() - 1].iter().map(|c| c.abs() / &lc).max().unwrap_or_else(Rational::zero);
        m + Rational::one()
    }
}

fn sub(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let n = a.0.len().max(b.0.len());
    UniPoly::new(
        (0..n)
            .map(|i| {
                a.0.get(i).cloned().unwrap_or_else(Rational::zero) - b.0.get(i).cloned().unwrap_or_else(Rational::zero)
            })
            .collect(),
    )
}

fn sign_changes(seq: &[UniPoly], x: &Rational) -> usize {
    let signs: Vec<i8> = seq.iter().map(|p| p.sign_at(x)).filter(|&s| s != 0).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct roots of a square-free polynomial in the half-open interval `(a, b]`.
fn count_roots(seq: &[UniPoly], a: &Rational, b: &Rational) -> usize {
    sign_changes(seq, a) - sign_changes(seq, b)
}

/// An isolated real root: exact when `lo == hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsolatedRoot {
    pub lo: Rational,
    pub hi: Rational,
    pub multiplicity: u32,
}

impl IsolatedRoot {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn approx(&self) -> f64 {
        rational::to_f64(&self.midpoint())
    }
}

/// Exact roots of a univariate polynomial on `[lo, hi]` and its signs between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignProfile {
    pub lo: Rational,
    pub hi: Rational,
    /// Sorted, pairwise disjoint isolating intervals.
    pub roots: Vec<IsolatedRoot>,
    /// Sign on each open piece between consecutive breakpoints
    /// (`lo`, the roots, `hi`); empty pieces are skipped.
    pub pieces: Vec<SignPiece>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignPiece {
    /// A rational point strictly inside the piece.
    pub sample: Rational,
    pub sign: i8,
    /// Index of the root bounding this piece on the left, if any.
    pub left_root: Option<usize>,
    pub right_root: Option<usize>,
}

impl SignProfile {
    pub fn signs(&self) -> Vec<i8> {
        self.pieces.iter().map(|p| p.sign).collect()
    }

    pub fn distinct_root_count(&self) -> usize {
        self.roots.len()
    }
}

/// Isolates the roots of `q` in `[lo, hi]` and records its signs on the open pieces.
pub fn sturm_profile(q: &UniPoly, lo: &Rational, hi: &Rational) -> Result<SignProfile> {
    if q.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    assert!(lo <= hi, "empty interval");
    let factors = q.square_free_factors();
    let seqs: Vec<Vec<UniPoly>> = factors.iter().map(|(f, _)| f.sturm_sequence()).collect();
    let mut roots: Vec<(usize, IsolatedRoot)> = Vec::new();
    for (k, (factor, mult)) in factors.iter().enumerate() {
        for (a, b) in isolate_square_free(factor, &seqs[k], lo, hi) {
            roots.push((k, IsolatedRoot { lo: a, hi: b, multiplicity: *mult }));
        }
    }
    // Refine open intervals until they are disjoint from each other and from the endpoints.
    for _ in 0..400 {
        roots.sort_by(|a, b| a.1.lo.cmp(&b.1.lo));
        let mut dirty: Vec<usize> = Vec::new();
        for i in 0..roots.len() {
            let r = &roots[i].1;
            if r.is_exact() {
                continue;
            }
            let touches_prev = i > 0 && roots[i - 1].1.hi >= r.lo;
            let touches_next = i + 1 < roots.len() && r.hi >= roots[i + 1].1.lo;
            if touches_prev || touches_next || r.lo <= *lo || r.hi >= *hi {
                dirty.push(i);
            }
        }
        if dirty.is_empty() {
            break;
        }
        for i in dirty {
            let k = roots[i].0;
            bisect_once(&factors[k].0, &seqs[k], &mut roots[i].1);
        }
    }
    roots.sort_by(|a, b| a.1.lo.cmp(&b.1.lo));
    let roots: Vec<IsolatedRoot> = roots.into_iter().map(|(_, r)| r).collect();

    let mut pieces = Vec::new();
    let mut left = lo.clone();
    let mut left_root: Option<usize> = None;
    for (k, r) in roots.iter().enumerate() {
        push_piece(&mut pieces, q, &left, &r.lo, left_root, Some(k));
        left = r.hi.clone();
        left_root = Some(k);
    }
    push_piece(&mut pieces, q, &left, hi, left_root, None);
    Ok(SignProfile { lo: lo.clone(), hi: hi.clone(), roots, pieces })
}

fn push_piece(
    pieces: &mut Vec<SignPiece>,
    q: &UniPoly,
    a: &Rational,
    b: &Rational,
    left_root: Option<usize>,
    right_root: Option<usize>,
) {
    if a >= b {
        return;
    }
    let sample = rational::simplest_between(a, b);
    let sample = if &sample == a || &sample == b { (a + b) / Rational::from_integer(2.into()) } else { sample };
    let sign = q.sign_at(&sample);
    debug_assert!(sign != 0, "sample point hit a root");
    pieces.push(SignPiece { sample, sign, left_root, right_root });
}

/// Isolating intervals of the distinct roots of a square-free `p` in `[lo, hi]`.
/// Each entry is either an exact root `(r, r)` or an open interval `(a, b)` with
/// `p(a) != 0`, `p(b) != 0` and exactly one root inside.
fn isolate_square_free(p: &UniPoly, seq: &[UniPoly], lo: &Rational, hi: &Rational) -> Vec<(Rational, Rational)> {
    let two = Rational::from_integer(2.into());
    let mut out = Vec::new();
    if p.sign_at(lo) == 0 {
        out.push((lo.clone(), lo.clone()));
    }
    // invariant: stack entries are half-open (a, b]
    let mut stack = vec![(lo.clone(), hi.clone())];
    while let Some((a, b)) = stack.pop() {
        let n = count_roots(seq, &a, &b);
        if n == 0 {
            continue;
        }
        let b_root = p.sign_at(&b) == 0;
        if b_root {
            out.push((b.clone(), b.clone()));
        }
        if n == 1 && !b_root {
            out.push(tighten(p, seq, a, b));
            continue;
        }
        if n == 1 {
            continue;
        }
        let mid = (&a + &b) / &two;
        stack.push((a, mid.clone()));
        stack.push((mid, b));
    }
    out.sort();
    out.dedup();
    out
}

/// `(a, b]` holds exactly one root and `p(b) != 0`; returns an isolating pair
/// whose open ends are not roots, trying small-denominator rationals for an exact hit.
fn tighten(p: &UniPoly, seq: &[UniPoly], mut a: Rational, mut b: Rational) -> (Rational, Rational) {
    let two = Rational::from_integer(2.into());
    for _ in 0..60 {
        let s = rational::simplest_between(&a, &b);
        if s != a && s != b && p.sign_at(&s) == 0 {
            return (s.clone(), s);
        }
        if p.sign_at(&a) != 0 && rational::to_f64(&(&b - &a)) < 1e-6 {
            break;
        }
        let mid = (&a + &b) / &two;
        if p.sign_at(&mid) == 0 {
            return (mid.clone(), mid);
        }
        if count_roots(seq, &a, &mid) == 1 {
            b = mid;
        } else {
            a = mid;
        }
    }
    (a, b)
}

fn bisect_once(p: &UniPoly, seq: &[UniPoly], r: &mut IsolatedRoot) {
    let mid = (&r.lo + &r.hi) / Rational::from_integer(2.into());
    if p.sign_at(&mid) == 0 {
        r.lo = mid.clone();
        r.hi = mid;
    } else if count_roots(seq, &r.lo, &mid) == 1 {
        r.hi = mid;
    } else {
        r.lo = mid;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, ratio};

    fn up(c: &[i64]) -> UniPoly {
        UniPoly::new(c.iter().map(|&x| int(x)).collect())
    }

    #[test]
    fn quartic_profile() {
        // -t^2 (t+1)(t-1) = t^2 - t^4
        let q = up(&[0, 0, 1, 0, -1]);
        let prof = sturm_profile(&q, &int(-2), &int(2)).unwrap();
        let locs: Vec<(Rational, u32)> = prof.roots.iter().map(|r| (r.midpoint(), r.multiplicity)).collect();
        assert_eq!(locs, vec![(int(-1), 1), (int(0), 2), (int(1), 1)]);
        assert!(prof.roots.iter().all(IsolatedRoot::is_exact));
        assert_eq!(prof.signs(), vec![-1, 1, 1, -1]);
    }

    #[test]
    fn parabola_and_no_roots() {
        let q = up(&[1, 0, -1]);
        let prof = sturm_profile(&q, &int(-2), &int(2)).unwrap();
        assert_eq!(prof.roots.len(), 2);
        assert_eq!(prof.signs(), vec![-1, 1, -1]);

        let t = up(&[0, 1]);
        let prof = sturm_profile(&t, &int(1), &int(2)).unwrap();
        assert!(prof.roots.is_empty());
        assert_eq!(prof.signs(), vec![1]);
    }

    #[test]
    fn irrational_roots_isolated() {
        // t^2 - 2 on [-2, 2]
        let q = up(&[-2, 0, 1]);
        let prof = sturm_profile(&q, &int(-2), &int(2)).unwrap();
        assert_eq!(prof.roots.len(), 2);
        for r in &prof.roots {
            assert!(!r.is_exact());
            assert!((r.approx().abs() - 2f64.sqrt()).abs() < 1.0);
        }
        assert_eq!(prof.signs(), vec![1, -1, 1]);
    }

    #[test]
    fn endpoint_roots() {
        let q = up(&[-1, 0, 1]);
        let prof = sturm_profile(&q, &int(-1), &int(1)).unwrap();
        assert_eq!(prof.roots.len(), 2);
        assert_eq!(prof.signs(), vec![-1]);
        let t = up(&[0, 1]);
        let prof = sturm_profile(&t, &int(-1), &int(1)).unwrap();
        assert_eq!(prof.signs(), vec![-1, 1]);
        assert_eq!(prof.pieces[0].sample, ratio(-1, 2));
    }

    #[test]
    fn zero_polynomial_rejected() {
        assert!(matches!(sturm_profile(&UniPoly::new(vec![]), &int(0), &int(1)), Err(Error::ZeroPolynomial)));
    }

    #[test]
    fn yun_multiplicities() {
        // (t-1)^3 (t+2)
        let a = up(&[-1, 1]);
        let b = up(&[2, 1]);
        let mut p = up(&[1]);
        for f in [&a, &a, &a, &b] {
            let mut c = vec![Rational::zero(); p.0.len() + f.0.len() - 1];
            for (i, x) in p.0.iter().enumerate() {
                for (j, y) in f.0.iter().enumerate() {
                    c[i + j] += x * y;
                }
            }
            p = UniPoly::new(c);
        }
        let f = p.square_free_factors();
        assert_eq!(f, vec![(b.clone(), 1), (a.clone(), 3)]);
    }
}
