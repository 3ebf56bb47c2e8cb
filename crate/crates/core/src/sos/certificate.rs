use std::fmt;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::relaxation::RelaxationProblem;
use super::sdp::{project_affine, SdpSolution, SdpStatus};
use crate::algebra::rational::{self, Rational};
use crate::algebra::{normal_form, Monomial, NormalFormCache, Polynomial};
use crate::error::{Error, Result};
use crate::tower::TowerState;

/// One term `g * (b' G b)` of a certificate.
#[derive(Clone, Debug, PartialEq)]
pub struct GramBlock {
    /// The multiplier; the constant 1 marks the SOS part.
    pub generator: Polynomial,
    pub basis: Vec<Monomial>,
    pub gram: Vec<Vec<Rational>>,
}

impl GramBlock {
    pub fn to_f64(&self) -> DMatrix<f64> {
        let n = self.basis.len();
        DMatrix::from_fn(n, n, |i, j| rational::to_f64(&self.gram[i][j]))
    }

    /// `b' G b` as a polynomial (not reduced).
    pub fn sos(&self, nvars: usize) -> Polynomial {
        let mut out = Polynomial::zero(nvars);
        for (i, bi) in self.basis.iter().enumerate() {
            for (j, bj) in self.basis.iter().enumerate() {
                let c = &self.gram[i][j];
                if !c.is_zero() {
                    out.add_term(bi.mul(bj), c.clone());
                }
            }
        }
        out
    }
}

/// `f + eps = sum_k g_k * (b_k' G_k b_k)` modulo the ideal, `G_k` psd.
#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub names: Vec<String>,
    pub eps: Rational,
    pub degree: u32,
    pub blocks: Vec<GramBlock>,
    pub rationalized: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum VerificationLevel {
    ExactVerified,
    NumericVerified(f64),
    Refuted(String),
}

/// P1 is the strict claim (`eps = 0`), P2 the shifted one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClaimedProperty {
    P1,
    P2,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub level: VerificationLevel,
    pub property: ClaimedProperty,
    /// Euclidean norm of the coefficients of `NF(f + eps - sum g_k s_k)`.
    pub residual: f64,
    pub eps: Rational,
    pub degree: u32,
}

impl VerificationReport {
    pub fn is_exact(&self) -> bool {
        self.level == VerificationLevel::ExactVerified
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self.level, VerificationLevel::Refuted(_))
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match &self.level {
            VerificationLevel::ExactVerified => "exact-verified".to_string(),
            VerificationLevel::NumericVerified(r) => format!("numeric-verified {r:.3e}"),
            VerificationLevel::Refuted(w) => format!("refuted ({w})"),
        };
        let prop = match self.property {
            ClaimedProperty::P1 => "p1",
            ClaimedProperty::P2 => "p2",
        };
        write!(
            f,
            "level {level}; property {prop}; eps {}; degree {}; residual {:.3e}",
            rational::format(&self.eps),
            self.degree,
            self.residual
        )
    }
}

/// Exact positive semidefiniteness by symmetric elimination with the
/// largest remaining diagonal entry as pivot.
pub fn exact_psd(g: &[Vec<Rational>]) -> bool {
    let n = g.len();
    if g.iter().any(|r| r.len() != n) {
        return false;
    }
    if (0..n).any(|i| (0..i).any(|j| g[i][j] != g[j][i])) {
        return false;
    }
    let mut a: Vec<Vec<Rational>> = g.to_vec();
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let (pos, &k) = active.iter().enumerate().max_by(|x, y| a[*x.1][*x.1].cmp(&a[*y.1][*y.1])).expect("nonempty");
        let pivot = a[k][k].clone();
        if pivot.is_negative() {
            return false;
        }
        if pivot.is_zero() {
            // every remaining diagonal entry is zero, so the rest must vanish
            return active.iter().all(|&i| active.iter().all(|&j| a[i][j].is_zero()));
        }
        active.remove(pos);
        for &i in &active {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &pivot;
            for &j in &active {
                let t = &f * &a[k][j];
                a[i][j] -= t;
            }
        }
    }
    true
}

fn numeric_min_eigen(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone().symmetric_eigenvalues().min()
}

/// Reads Gram matrices off the primal blocks. The constant `lambda + eps`
/// (with `lambda = f_1 - <A_1, X>`) is added to the SOS part's constant entry.
pub fn extract_certificate(
    tw: &TowerState,
    relax: &RelaxationProblem,
    sol: &SdpSolution,
    eps: &Rational,
) -> Result<Certificate> {
    if !matches!(sol.status, SdpStatus::Optimal | SdpStatus::Inaccurate) {
        return Err(Error::Solver(format!("no certificate from a {:?} solution", sol.status)));
    }
    certificate_from_grams(tw, relax, &sol.x, eps)
}

/// Certificate from primal blocks: they are first projected onto the
/// non-constant moment constraints, then the constant gap
/// `f_1 - <A_1, X> + eps` goes to the SOS part's constant entry.
pub fn certificate_from_grams(tw: &TowerState, relax: &RelaxationProblem, x: &[DMatrix<f64>], eps: &Rational) -> Result<Certificate> {
    let sdp = relax.to_sdp();
    let mut x = x.to_vec();
    project_affine(&sdp, &mut x, 2);
    let lambda = rational::to_f64(relax.constant_term()) - sdp.c.inner(&x);
    let shift = &rational::from_f64(lambda) + eps;
    let one_pos = relax.blocks[0].basis.iter().position(|m| m.is_one()).ok_or_else(|| Error::Solver("basis lacks 1".into()))?;
    let mut blocks = Vec::with_capacity(relax.blocks.len());
    for (bk, rb) in relax.blocks.iter().enumerate() {
        let x = &x[bk];
        let n = rb.basis.len();
        let mut gram: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| rational::from_f64(0.5 * (x[(i, j)] + x[(j, i)]))).collect())
            .collect();
        if bk == 0 {
            gram[one_pos][one_pos] = &gram[one_pos][one_pos] + &shift;
        }
        blocks.push(GramBlock { generator: rb.poly.clone(), basis: rb.basis.clone(), gram });
    }
    for b in &blocks {
        let m = b.to_f64();
        let scale = 1.0 + m.amax();
        if numeric_min_eigen(&m) < -1e-6 * scale {
            return Err(Error::Solver("extracted Gram matrix is indefinite beyond tolerance".into()));
        }
    }
    Ok(Certificate { names: tw.names(), eps: eps.clone(), degree: relax.degree, blocks, rationalized: false })
}

/// `NF(f + eps - sum g_k * s_k)`.
pub fn certificate_residual(tw: &TowerState, f: &Polynomial, cert: &Certificate) -> Result<Polynomial> {
    check_shape(tw, cert)?;
    let n = tw.nvars();
    let gb = tw.ideal();
    let mut cache = NormalFormCache::new(gb);
    let mut acc = &f.extended(n) + &Polynomial::constant(n, cert.eps.clone());
    for b in &cert.blocks {
        let term = &b.generator * &b.sos(n);
        acc = &acc - &term;
    }
    Ok(cache.reduce(&acc))
}

fn check_shape(tw: &TowerState, cert: &Certificate) -> Result<()> {
    let n = tw.nvars();
    if cert.names.len() != n {
        return Err(Error::DimensionMismatch(format!("certificate has {} variables, tower has {n}", cert.names.len())));
    }
    let gens: Vec<Polynomial> = tw.generators().iter().map(|g| normal_form(g, tw.ideal())).collect();
    for (k, b) in cert.blocks.iter().enumerate() {
        if b.generator.nvars() != n || b.basis.iter().any(|m| m.nvars() != n) {
            return Err(Error::DimensionMismatch(format!("block {k} lives in a different ring")));
        }
        if b.gram.len() != b.basis.len() || b.gram.iter().any(|r| r.len() != b.basis.len()) {
            return Err(Error::DimensionMismatch(format!("block {k}: Gram size does not match its basis")));
        }
        let is_one = b.generator.as_constant().is_some_and(|c| c == Rational::from_integer(1.into()));
        if !is_one && !gens.contains(&normal_form(&b.generator, tw.ideal())) {
            return Err(Error::DimensionMismatch(format!("block {k}: multiplier is not a generator of the tower")));
        }
    }
    Ok(())
}

fn coefficient_norm(p: &Polynomial) -> f64 {
    p.terms().map(|(_, c)| rational::to_f64(c).powi(2)).fold(0.0, |a, b| a + b).sqrt()
}

pub fn verify_certificate(tw: &TowerState, f: &Polynomial, cert: &Certificate) -> Result<VerificationReport> {
    let r = certificate_residual(tw, f, cert)?;
    let property = if cert.eps.is_zero() { ClaimedProperty::P1 } else { ClaimedProperty::P2 };
    let residual = coefficient_norm(&r);
    let report = |level| VerificationReport { level, property, residual, eps: cert.eps.clone(), degree: cert.degree };
    if r.is_zero() && cert.blocks.iter().all(|b| exact_psd(&b.gram)) {
        return Ok(report(VerificationLevel::ExactVerified));
    }
    for (k, b) in cert.blocks.iter().enumerate() {
        let m = b.to_f64();
        if numeric_min_eigen(&m) < -1e-6 * (1.0 + m.amax()) {
            return Ok(report(VerificationLevel::Refuted(format!("Gram block {k} is indefinite"))));
        }
    }
    if residual > 1e-3 {
        let names = tw.names();
        let (m, c) = r
            .terms()
            .max_by(|a, b| rational::to_f64(a.1).abs().total_cmp(&rational::to_f64(b.1).abs()))
            .expect("nonzero residual");
        let witness = format!("residual term {} * {}", rational::format(c), m.display(&names));
        return Ok(report(VerificationLevel::Refuted(witness)));
    }
    Ok(report(VerificationLevel::NumericVerified(residual)))
}

/// Absorbs a constant residual into the SOS part's constant Gram entry.
/// Anything else is left alone and reported as `false`.
pub fn absorb_residual(cert: &mut Certificate, r: &Polynomial) -> bool {
    if r.is_zero() {
        return true;
    }
    let Some(c) = r.as_constant() else { return false };
    let one = Rational::from_integer(1.into());
    let Some(b) = cert.blocks.iter_mut().find(|b| b.generator.as_constant().is_some_and(|g| g == one)) else {
        return false;
    };
    let Some(k) = b.basis.iter().position(Monomial::is_one) else { return false };
    b.gram[k][k] += c;
    true
}

/// Rounds Gram entries to simple rationals, sweeping the rounding tolerance
/// from coarse to fine, absorbs a constant residual into the SOS part and
/// returns the first rounding whose Gram matrices are exactly psd.
pub fn rationalize_certificate(tw: &TowerState, f: &Polynomial, cert: &Certificate, max_den: &BigInt) -> Result<Certificate> {
    check_shape(tw, cert)?;
    let mut lost_psd = false;
    let mut finest: Option<Certificate> = None;
    for e in (3..=12).rev() {
        let tol = 10f64.powi(-(15 - e));
        let mut c = cert.clone();
        c.rationalized = true;
        for b in &mut c.blocks {
            let n = b.basis.len();
            for i in 0..n {
                for j in i..n {
                    let v = rational::to_f64(&b.gram[i][j]);
                    let r = rational::round_simple(v, tol, max_den);
                    b.gram[i][j] = r.clone();
                    b.gram[j][i] = r;
                }
            }
        }
        let r = certificate_residual(tw, f, &c)?;
        if !absorb_residual(&mut c, &r) {
            finest = Some(c);
            continue;
        }
        if c.blocks.iter().all(|b| exact_psd(&b.gram)) {
            return Ok(c);
        }
        lost_psd = true;
        finest = Some(c);
    }
    if lost_psd {
        return Err(Error::PsdLost("no rounding kept every Gram matrix positive semidefinite".into()));
    }
    Ok(finest.expect("at least one tolerance tried"))
}

impl Certificate {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "certificate 1");
        let _ = writeln!(out, "vars {}", self.names.join(" "));
        let _ = writeln!(out, "eps {}", rational::format(&self.eps));
        let _ = writeln!(out, "degree {}", self.degree);
        let _ = writeln!(out, "rationalized {}", self.rationalized);
        for b in &self.blocks {
            let _ = writeln!(out, "block {}", b.generator.display(&self.names));
            let basis: Vec<String> = b.basis.iter().map(|m| m.display(&self.names).to_string()).collect();
            let _ = writeln!(out, "basis {}", basis.join(" "));
            for row in &b.gram {
                let r: Vec<String> = row.iter().map(rational::format).collect();
                let _ = writeln!(out, "row {}", r.join(" "));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Certificate> {
        let err = |no: usize, m: &str| Error::Parse(format!("certificate line {no}: {m}"));
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, "certificate 1")) => {}
            _ => return Err(err(1, "missing header")),
        }
        let mut names: Option<Vec<String>> = None;
        let mut eps = Rational::zero();
        let mut degree = 0;
        let mut rationalized = false;
        let mut blocks: Vec<GramBlock> = Vec::new();
        for (no, line) in lines {
            let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
            match key {
                "vars" => names = Some(rest.split_whitespace().map(String::from).collect()),
                "eps" => eps = rational::parse(rest)?,
                "degree" => degree = rest.parse().map_err(|_| err(no, "bad degree"))?,
                "rationalized" => rationalized = rest == "true",
                "block" | "basis" | "row" => {
                    let nm = names.as_ref().ok_or_else(|| err(no, "vars must come first"))?;
                    match key {
                        "block" => blocks.push(GramBlock {
                            generator: Polynomial::parse(rest, nm)?,
                            basis: vec![],
                            gram: vec![],
                        }),
                        "basis" => {
                            let b = blocks.last_mut().ok_or_else(|| err(no, "basis outside a block"))?;
                            for t in rest.split_whitespace() {
                                let p = Polynomial::parse(t, nm)?;
                                let m = p.terms().next().map(|(m, _)| m.clone()).ok_or_else(|| err(no, "bad monomial"))?;
                                b.basis.push(m);
                            }
                        }
                        _ => {
                            let b = blocks.last_mut().ok_or_else(|| err(no, "row outside a block"))?;
                            b.gram.push(rest.split_whitespace().map(rational::parse).collect::<Result<Vec<_>>>()?);
                        }
                    }
                }
                _ => return Err(err(no, &format!("unknown key `{key}`"))),
            }
        }
        let names = names.ok_or_else(|| err(1, "no vars line"))?;
        Ok(Certificate { names, eps, degree, blocks, rationalized })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, ratio};

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn exact_psd_cases() {
        assert!(exact_psd(&mat(&[&[1, 0, 1], &[0, 1, 0], &[1, 0, 1]])));
        assert!(!exact_psd(&mat(&[&[1, 2], &[2, 1]])));
        assert!(!exact_psd(&mat(&[&[0, 1], &[1, 0]])));
        assert!(exact_psd(&mat(&[&[0, 0], &[0, 0]])));
        assert!(!exact_psd(&mat(&[&[1, 0], &[1, 1]])));
        assert!(exact_psd(&[vec![ratio(1, 3)]]));
    }
}
