use std::sync::Arc;

use num_traits::{Signed, Zero};

use super::qmodule::{Provenance, QuadraticModuleDesc};
use super::regularity::{self, RegularityCase, RegularityData, Verdict};
use super::symbol::{BaseCoord, FunctionSymbol, Mode, Symbol};
use super::witness::{compute_witness, ArchimedeanWitness};
use crate::algebra::rational::{self, Rational};
use crate::algebra::{buchberger, normal_form, sturm_profile, GroebnerBasis, Polynomial, TermOrder, UniPoly};
use crate::error::{Error, Result};
use crate::explore::domain::{sample_domain, DomainDescription};
use crate::explore::image::image_cloud;

/// Sampling sizes, thresholds and the seed shared by all checks on a tower.
#[derive(Clone, Debug, PartialEq)]
pub struct SamplingConfig {
    pub samples: usize,
    pub zero_tol: f64,
    pub sign_tol: f64,
    pub delta: f64,
    pub tau_rel: f64,
    pub tau_pos: f64,
    pub seed: u64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig { samples: 10_000, zero_tol: 1e-5, sign_tol: 1e-5, delta: 0.05, tau_rel: 1e-7, tau_pos: 1e-7, seed: 1 }
    }
}

/// Variant of a characteristic-function adjunction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharVariant {
    /// Regularity on `K_{Q,Y_B}`; `X` arbitrary.
    GeneralClosure,
    /// Regularity on `X`; needs a compact `X` and continuous earlier symbols.
    CompactContinuous,
}

/// Everything that defines the base stage `(A_0, Q_0)`.
#[derive(Clone, Debug)]
pub struct BaseSpec {
    pub domain: DomainDescription,
    /// Base coordinates; empty means the identity coordinates of the domain.
    pub coords: Vec<(String, BaseCoord)>,
    /// Relations among the base coordinates that hold on `X`.
    pub relations: Vec<Polynomial>,
    /// Generators and whether each is claimed nonnegative on `X`.
    pub gens: Vec<(Polynomial, bool)>,
    pub ball_bound: Option<Rational>,
    pub assumed_mode: Option<Mode>,
}

impl BaseSpec {
    pub fn new(domain: DomainDescription) -> Self {
        BaseSpec { domain, coords: Vec::new(), relations: Vec::new(), gens: Vec::new(), ball_bound: None, assumed_mode: None }
    }
}

/// A presentation `A_i = R[v_1..v_t]/I` with its quadratic module, witness
/// and image-equality mode. Adjunctions return new states.
#[derive(Clone, Debug)]
pub struct TowerState {
    pub(crate) domain: DomainDescription,
    pub(crate) symbols: Vec<Symbol>,
    pub(crate) extra_relations: Vec<Polynomial>,
    pub(crate) ideal: GroebnerBasis,
    pub(crate) qmodule: QuadraticModuleDesc,
    pub(crate) witness: ArchimedeanWitness,
    pub(crate) mode: Mode,
    pub(crate) notes: Vec<String>,
    pub(crate) config: SamplingConfig,
    pub(crate) parent: Option<Arc<TowerState>>,
}

/// Identity coordinates and claimed generators, default sampling settings.
pub fn init_tower(domain: DomainDescription, base_gens: Vec<Polynomial>, ball_bound: Option<Rational>) -> Result<TowerState> {
    let mut spec = BaseSpec::new(domain);
    spec.gens = base_gens.into_iter().map(|g| (g, true)).collect();
    spec.ball_bound = ball_bound;
    TowerState::init(spec, SamplingConfig::default())
}

impl TowerState {
    pub fn init(spec: BaseSpec, config: SamplingConfig) -> Result<TowerState> {
        let BaseSpec { domain, coords, relations, gens, ball_bound, assumed_mode } = spec;
        let identity = coords.is_empty();
        let coords: Vec<(String, BaseCoord)> = if identity {
            (0..domain.dim())
                .map(|i| (domain.names[i].clone(), BaseCoord::Poly(Polynomial::var(domain.dim(), i))))
                .collect()
        } else {
            coords
        };
        if coords.is_empty() {
            return Err(Error::InvalidArgument("a tower needs at least one base coordinate".into()));
        }
        for (i, (name, _)) in coords.iter().enumerate() {
            if coords[..i].iter().any(|(n, _)| n == name) {
                return Err(Error::InvalidArgument(format!("duplicate coordinate `{name}`")));
            }
        }
        let n = coords.len();
        let symbols: Vec<Symbol> = coords
            .into_iter()
            .map(|(name, c)| {
                let continuous = match &c {
                    BaseCoord::Poly(_) => true,
                    BaseCoord::Map(e) => e.is_continuous(),
                };
                Symbol { name, kind: FunctionSymbol::Base(c), continuous }
            })
            .collect();
        let relations: Vec<Polynomial> = relations.into_iter().map(|r| r.extended(n)).collect();
        let order = TermOrder::tower(n);
        let ideal = if relations.is_empty() { GroebnerBasis::zero_ideal(order) } else { buchberger(&relations, &order) };
        let mut tw = TowerState {
            domain,
            symbols,
            extra_relations: relations,
            ideal,
            qmodule: QuadraticModuleDesc::default(),
            witness: ArchimedeanWitness { statuses: vec![], archimedean: false },
            mode: Mode::Unverified,
            notes: Vec::new(),
            config,
            parent: None,
        };
        tw.check_relations_on_image(&tw.extra_relations.clone())?;
        for (g, claimed) in &gens {
            let g = g.extended(n);
            if *claimed {
                tw.check_nonneg_on_domain(&g, "base generator")?;
            }
            let prov = if *claimed { Provenance::Base } else { Provenance::User { claimed: false } };
            tw.qmodule.push(&g, prov, &tw.ideal);
        }
        if let Some(nb) = &ball_bound {
            let mut ball = Polynomial::constant(n, nb.clone());
            for i in 0..n {
                ball = &ball - &Polynomial::var(n, i).pow(2);
            }
            tw.check_nonneg_on_domain(&ball, "ball bound")?;
            tw.qmodule.push(&ball, Provenance::Ball, &tw.ideal);
        }
        tw.mode = match assumed_mode {
            Some(m) => {
                tw.notes.push(format!("mode {m} assumed by the caller"));
                m
            }
            None if identity && gens.iter().all(|(_, c)| *c) && covers_domain(&tw.domain, gens.iter().map(|(g, _)| g)) => {
                Mode::Exact
            }
            None => {
                tw.notes.push("base stage: image equality not established; mode unverified".into());
                Mode::Unverified
            }
        };
        tw.refresh_witness();
        Ok(tw)
    }

    pub fn domain(&self) -> &DomainDescription {
        &self.domain
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn ideal(&self) -> &GroebnerBasis {
        &self.ideal
    }

    pub fn qmodule(&self) -> &QuadraticModuleDesc {
        &self.qmodule
    }

    pub fn generators(&self) -> Vec<Polynomial> {
        self.qmodule.polys().cloned().collect()
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    pub fn config(&self) -> &SamplingConfig {
        &self.config
    }

    pub fn with_config(mut self, config: SamplingConfig) -> Self {
        self.config = config;
        self
    }

    pub fn extra_relations(&self) -> &[Polynomial] {
        &self.extra_relations
    }

    /// The stage this one was built from, if it was produced by an adjunction.
    pub fn parent(&self) -> Option<&TowerState> {
        self.parent.as_deref()
    }

    pub fn nvars(&self) -> usize {
        self.symbols.len()
    }

    pub fn names(&self) -> Vec<String> {
        self.symbols.iter().map(|s| s.name.clone()).collect()
    }

    pub fn archimedean_status(&self) -> &ArchimedeanWitness {
        &self.witness
    }

    pub fn is_archimedean(&self) -> bool {
        self.witness.archimedean
    }

    pub fn parse_poly(&self, text: &str) -> Result<Polynomial> {
        Polynomial::parse(text, &self.names())
    }

    pub fn display(&self, p: &Polynomial) -> String {
        let names = self.names();
        p.extended(self.nvars()).display(&names).to_string()
    }

    /// All defining relations: one per adjoined symbol plus the declared ones.
    pub fn relations(&self) -> Vec<Polynomial> {
        let n = self.nvars();
        let mut out: Vec<Polynomial> =
            (0..n).filter_map(|i| self.symbol_relation(i)).map(|r| r.extended(n)).collect();
        out.extend(self.extra_relations.iter().map(|r| r.extended(n)));
        out
    }

    /// The relation `f^r - g`, `f^s - g`, `g*f - 1`, `(f-g)(f-h)` or `f^2 - f`
    /// of symbol `i`, in the ring of the first `i + 1` variables.
    pub fn symbol_relation(&self, i: usize) -> Option<Polynomial> {
        let k = i + 1;
        let f = Polynomial::var(k, i);
        Some(match &self.symbols[i].kind {
            FunctionSymbol::Base(_) => return None,
            FunctionSymbol::OddRoot { g, r } => &f.pow(*r) - &g.extended(k),
            FunctionSymbol::EvenRoot { g, s } => &f.pow(*s) - &g.extended(k),
            FunctionSymbol::Reciprocal { g } => &(&g.extended(k) * &f) - &Polynomial::one(k),
            FunctionSymbol::Piecewise { g, h, q: _ } => &(&f - &g.extended(k)) * &(&f - &h.extended(k)),
            FunctionSymbol::Characteristic { .. } => &f.pow(2) - &f,
        })
    }

    /// `m(x)`: the values of all presentation variables at a domain point.
    pub fn eval_at(&self, x: &[f64]) -> Option<Vec<f64>> {
        let mut vals = Vec::with_capacity(self.nvars());
        for s in &self.symbols {
            let v = s.kind.eval(x, &vals)?;
            vals.push(v);
        }
        Some(vals)
    }

    /// Rewrites `p` in the domain variables when every variable it uses is a
    /// polynomial base coordinate.
    pub fn compose_to_domain(&self, p: &Polynomial) -> Option<Polynomial> {
        let dn = self.domain.dim();
        let mut out = Polynomial::zero(dn);
        for (m, c) in p.terms() {
            let mut t = Polynomial::constant(dn, c.clone());
            for (v, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match &self.symbols.get(v)?.kind {
                    FunctionSymbol::Base(BaseCoord::Poly(b)) => t = &t * &b.pow(e),
                    _ => return None,
                }
            }
            out = &out + &t;
        }
        Some(out)
    }

    /// `p` as a univariate polynomial on the interval `X = [a, b]`, when the
    /// question can be settled by exact sign analysis.
    pub fn univariate_on_interval(&self, p: &Polynomial) -> Option<(UniPoly, Rational, Rational)> {
        let (a, b) = self.domain.exact_interval()?;
        let q = self.compose_to_domain(p)?;
        Some((UniPoly::from_polynomial(&q, 0)?, a, b))
    }

    fn refresh_witness(&mut self) {
        let names = self.names();
        self.witness = compute_witness(&self.symbols, &self.extra_relations, &self.qmodule, &names);
    }

    /// Domain samples used for spot checks: random points plus box endpoints.
    pub(crate) fn domain_samples(&self, salt: u64) -> Result<Vec<Vec<f64>>> {
        let mut xs = sample_domain(&self.domain, self.config.samples, self.config.seed ^ salt)?;
        xs.extend(self.domain.boundary_points());
        Ok(xs)
    }

    fn check_relations_on_image(&self, rels: &[Polynomial]) -> Result<()> {
        if rels.is_empty() || self.domain.sampling_box().is_none() {
            return Ok(());
        }
        for x in self.domain_samples(0x5e1)? {
            let Some(y) = self.eval_at(&x) else { continue };
            for r in rels {
                let v = r.eval_f64(&y);
                if v.abs() > self.config.tau_rel * (1.0 + y.iter().map(|a| a.abs()).fold(0.0, f64::max)) {
                    return Err(Error::Precondition {
                        reason: format!("relation {} does not vanish on the image", self.display(r)),
                        witness: x,
                    });
                }
            }
        }
        Ok(())
    }

    /// Checks `p(m(x)) >= 0` on `X`: exactly on an interval domain when `p`
    /// is univariate there, otherwise on samples.
    pub(crate) fn check_nonneg_on_domain(&self, p: &Polynomial, what: &str) -> Result<()> {
        if let Some((u, a, b)) = self.univariate_on_interval(p) {
            if u.is_zero() {
                return Ok(());
            }
            let prof = sturm_profile(&u, &a, &b)?;
            if let Some(piece) = prof.pieces.iter().find(|pc| pc.sign < 0) {
                return Err(Error::Precondition {
                    reason: format!("{what} {} is negative on X", self.display(p)),
                    witness: vec![rational::to_f64(&piece.sample)],
                });
            }
            return Ok(());
        }
        if self.domain.sampling_box().is_none() {
            log::warn!("cannot spot-check {what} without a sampling box");
            return Ok(());
        }
        for x in self.domain_samples(0x9a7)? {
            let Some(y) = self.eval_at(&x) else { continue };
            if p.eval_f64(&y) < -self.config.tau_pos {
                return Err(Error::Precondition { reason: format!("{what} {} is negative on X", self.display(p)), witness: x });
            }
        }
        Ok(())
    }

    /// Checks that `g(m(x)) != 0` on `X`.
    fn check_no_zero_on_domain(&self, g: &Polynomial) -> Result<()> {
        let fail = |w: Vec<f64>| Error::Precondition { reason: format!("{} vanishes on X", self.display(g)), witness: w };
        if let Some((u, a, b)) = self.univariate_on_interval(g) {
            if u.is_zero() {
                return Err(fail(vec![rational::to_f64(&a)]));
            }
            let prof = sturm_profile(&u, &a, &b)?;
            if let Some(r) = prof.roots.first() {
                return Err(fail(vec![r.approx()]));
            }
            return Ok(());
        }
        if self.domain.sampling_box().is_none() {
            return Err(Error::RegularityUndecided {
                case: "reciprocal".into(),
                reason: "no sampling box to search for zeros".into(),
            });
        }
        let zeros = regularity::domain_zeros(self, g, 0x2e0)?;
        match zeros.into_iter().next() {
            Some(z) => Err(fail(z)),
            None => Ok(()),
        }
    }

    fn check_name(&self, name: &str) -> Result<()> {
        if self.symbols.iter().any(|s| s.name == name) {
            return Err(Error::InvalidArgument(format!("duplicate symbol `{name}`")));
        }
        Ok(())
    }

    fn refs_continuous(&self, refs: &[&Polynomial]) -> bool {
        refs.iter().all(|p| p.support_vars().iter().all(|&v| self.symbols[v].continuous))
    }

    /// Appends a symbol, recomputes the ideal, re-reduces the quadratic module
    /// and adds the prescribed generators.
    fn extend(&self, name: &str, kind: FunctionSymbol, continuous: bool, gens: Vec<(Polynomial, Provenance)>) -> TowerState {
        let mut next = self.clone();
        next.parent = Some(Arc::new(self.clone()));
        next.symbols.push(Symbol { name: name.to_string(), kind, continuous });
        let n = next.nvars();
        next.extra_relations = next.extra_relations.iter().map(|r| r.extended(n)).collect();
        let order = TermOrder::tower(n);
        next.ideal = buchberger(&next.relations(), &order);
        next.qmodule = next.qmodule.renormalized(&next.ideal);
        for (g, prov) in gens {
            next.qmodule.push(&g.extended(n), prov, &next.ideal);
        }
        next.refresh_witness();
        next
    }

    fn check_refs(&self, refs: &[&Polynomial]) -> Result<()> {
        for p in refs {
            if p.nvars() > self.nvars() && !p.only_uses_first(self.nvars()) {
                return Err(Error::InvalidArgument("symbol refers to an undefined variable".into()));
            }
        }
        Ok(())
    }

    fn fit(&self, p: &Polynomial) -> Polynomial {
        let n = self.nvars();
        if p.nvars() == n {
            p.clone()
        } else if p.nvars() < n {
            p.extended(n)
        } else {
            Polynomial::from_terms(n, p.terms().map(|(m, c)| (crate::algebra::Monomial::new(m.exponents()[..n].to_vec()), c.clone())))
        }
    }

    pub fn adjoin_odd_root(&self, name: &str, g: &Polynomial, r: u32) -> Result<TowerState> {
        self.check_name(name)?;
        self.check_refs(&[g])?;
        if r < 3 || r.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("odd root index must be odd and at least 3, got {r}")));
        }
        let g = self.fit(g);
        let cont = self.refs_continuous(&[&g]);
        let mut next = self.extend(name, FunctionSymbol::OddRoot { g, r }, cont, vec![]);
        next.notes.push(format!("{name}: odd root, mode preserved"));
        Ok(next)
    }

    pub fn adjoin_even_root(&self, name: &str, g: &Polynomial, s: u32) -> Result<TowerState> {
        self.check_name(name)?;
        self.check_refs(&[g])?;
        if s < 2 || s % 2 == 1 {
            return Err(Error::InvalidArgument(format!("even root index must be even and at least 2, got {s}")));
        }
        let g = self.fit(g);
        self.check_nonneg_on_domain(&g, "radicand")?;
        let cont = self.refs_continuous(&[&g]);
        let n1 = self.nvars() + 1;
        let f = Polynomial::var(n1, n1 - 1);
        let mut next = self.extend(name, FunctionSymbol::EvenRoot { g, s }, cont, vec![(f, Provenance::Adjunction(name.into()))]);
        next.notes.push(format!("{name}: even root, generator {name} added, mode preserved"));
        Ok(next)
    }

    pub fn adjoin_reciprocal(&self, name: &str, g: &Polynomial, bound: Option<Rational>) -> Result<TowerState> {
        self.check_name(name)?;
        self.check_refs(&[g])?;
        let g = self.fit(g);
        self.check_no_zero_on_domain(&g)?;
        let n1 = self.nvars() + 1;
        let mut gens = Vec::new();
        if let Some(nb) = &bound {
            if !nb.is_positive() {
                return Err(Error::InvalidArgument("reciprocal bound must be positive".into()));
            }
            // N*g^2 - 1 >= 0 on X is the same as (1/g)^2 <= N
            let test = &g.pow(2).scale(nb) - &Polynomial::one(self.nvars());
            self.check_nonneg_on_domain(&test, "reciprocal bound")?;
            let f = Polynomial::var(n1, n1 - 1);
            gens.push((&Polynomial::constant(n1, nb.clone()) - &f.pow(2), Provenance::Bound(name.into())));
        }
        let cont = self.refs_continuous(&[&g]);
        let mut next = self.extend(name, FunctionSymbol::Reciprocal { g }, cont, gens);
        next.notes.push(match bound {
            Some(nb) => format!("{name}: reciprocal with bound {}", rational::format(&nb)),
            None => format!("{name}: reciprocal without bound, not bounded"),
        });
        Ok(next)
    }

    fn resolve(&self, case: RegularityCase, res: &regularity::RegularityResult, force: bool, notes: &mut Vec<String>) -> Result<bool> {
        match &res.verdict {
            Verdict::Pass => {
                notes.push(format!("{case} passed ({})", res.method));
                Ok(true)
            }
            Verdict::Fail(w) if force => {
                notes.push(format!("{case} FAILED at {w:?} ({}); adjunction forced, mode unverified", res.method));
                Ok(false)
            }
            Verdict::Undecided(why) if force => {
                notes.push(format!("{case} undecided: {why}; adjunction forced, mode unverified"));
                Ok(false)
            }
            Verdict::Fail(w) => Err(Error::RegularityFailed { case: case.to_string(), witness: w.clone() }),
            Verdict::Undecided(why) => Err(Error::RegularityUndecided { case: case.to_string(), reason: why.clone() }),
        }
    }

    /// `f = g` where `q >= 0`, `h` where `q < 0`, with generators
    /// `-q(f-g)^2` and `q(f-h)^2`.
    pub fn adjoin_piecewise(
        &self,
        name: &str,
        g: &Polynomial,
        h: &Polynomial,
        q: &Polynomial,
        mode_req: Mode,
        force: bool,
    ) -> Result<TowerState> {
        self.check_name(name)?;
        self.check_refs(&[g, h, q])?;
        let (g, h, q) = (self.fit(g), self.fit(h), self.fit(q));
        let data = RegularityData { g: Some(g.clone()), h: Some(h.clone()), q: q.clone() };
        let mut notes = Vec::new();
        let on_x = regularity::check_regularity(self, &data, RegularityCase::InjCase4);
        let (ok, target) = match mode_req {
            Mode::Exact => (self.resolve(RegularityCase::InjCase4, &on_x, force, &mut notes)?, Mode::Exact),
            Mode::Closure => {
                let on_k = regularity::check_regularity(self, &data, RegularityCase::AlinjCase4);
                (self.resolve(RegularityCase::AlinjCase4, &on_k, force, &mut notes)?, Mode::Closure)
            }
            Mode::Unverified => return Err(Error::InvalidArgument("piecewise mode must be exact or closure".into())),
        };
        let cont = self.refs_continuous(&[&g, &h, &q]) && on_x.verdict == Verdict::Pass;
        let n1 = self.nvars() + 1;
        let f = Polynomial::var(n1, n1 - 1);
        let (ge, he, qe) = (g.extended(n1), h.extended(n1), q.extended(n1));
        let g1 = -&(&qe * &(&f - &ge).pow(2));
        let g2 = &qe * &(&f - &he).pow(2);
        let prov = Provenance::Adjunction(name.into());
        let mut next =
            self.extend(name, FunctionSymbol::Piecewise { g, h, q }, cont, vec![(g1, prov.clone()), (g2, prov)]);
        next.mode = if ok { self.mode.min(target) } else { Mode::Unverified };
        next.notes.extend(notes.into_iter().map(|s| format!("{name}: {s}")));
        Ok(next)
    }

    /// `f = chi(q >= 0)` with generators `q*f` and `q*(f - 1)`.
    pub fn adjoin_characteristic(&self, name: &str, q: &Polynomial, variant: CharVariant, force: bool) -> Result<TowerState> {
        self.check_name(name)?;
        self.check_refs(&[q])?;
        let q = self.fit(q);
        let data = RegularityData { g: None, h: None, q: q.clone() };
        let mut notes = Vec::new();
        let ok = match variant {
            CharVariant::CompactContinuous => {
                if !self.domain.is_compact() {
                    return Err(Error::Precondition { reason: "compact variant needs a compact domain".into(), witness: vec![] });
                }
                if let Some(s) = self.symbols.iter().find(|s| !s.continuous) {
                    return Err(Error::Precondition {
                        reason: format!("compact variant needs continuous symbols; `{}` is not", s.name),
                        witness: vec![],
                    });
                }
                let res = regularity::check_regularity(self, &data, RegularityCase::Comp);
                self.resolve(RegularityCase::Comp, &res, force, &mut notes)?
            }
            CharVariant::GeneralClosure => {
                let res = regularity::check_regularity(self, &data, RegularityCase::AlinjCase5);
                self.resolve(RegularityCase::AlinjCase5, &res, force, &mut notes)?
            }
        };
        let n1 = self.nvars() + 1;
        let f = Polynomial::var(n1, n1 - 1);
        let qe = q.extended(n1);
        let prov = Provenance::Adjunction(name.into());
        let gens = vec![(&qe * &f, prov.clone()), (&qe * &(&f - &Polynomial::one(n1)), prov)];
        let mut next = self.extend(name, FunctionSymbol::Characteristic { q }, false, gens);
        next.mode = if ok { self.mode.min(Mode::Closure) } else { Mode::Unverified };
        next.notes.extend(notes.into_iter().map(|s| format!("{name}: {s}")));
        Ok(next)
    }

    /// `sum_j (v_j - y_j)^2 - eps` in normal form.
    pub fn separator_generator(&self, y: &[Rational], eps: &Rational) -> Result<Polynomial> {
        let n = self.nvars();
        if y.len() != n {
            return Err(Error::DimensionMismatch(format!("point has {} coordinates, tower has {n}", y.len())));
        }
        if !eps.is_positive() {
            return Err(Error::InvalidArgument("separator eps must be positive".into()));
        }
        let mut p = Polynomial::constant(n, -eps.clone());
        for (j, yj) in y.iter().enumerate() {
            let d = &Polynomial::var(n, j) - &Polynomial::constant(n, yj.clone());
            p = &p + &d.pow(2);
        }
        Ok(normal_form(&p, &self.ideal))
    }

    /// Appends a generator. With `claim`, nonnegativity on the sampled image
    /// `m(K_{Q,X})` is checked. The mode drops to the asserted mode (capped by
    /// the current one), or to unverified when nothing is asserted.
    pub fn add_generator(&self, p: &Polynomial, claim: bool, assert_mode: Option<Mode>) -> Result<TowerState> {
        self.add_generator_with(p, Provenance::User { claimed: claim }, claim, assert_mode)
    }

    pub(crate) fn add_generator_with(
        &self,
        p: &Polynomial,
        prov: Provenance,
        check: bool,
        assert_mode: Option<Mode>,
    ) -> Result<TowerState> {
        let p = self.fit(p);
        let nf = normal_form(&p, &self.ideal);
        if nf.is_zero() {
            return Err(Error::InvalidArgument("trivial generator: reduces to 0".into()));
        }
        if check {
            let cloud = image_cloud(self, self.config.samples, self.config.seed ^ 0x1a6)?;
            for y in &cloud.points {
                if nf.eval_f64(y) < -self.config.tau_pos {
                    return Err(Error::Precondition {
                        reason: format!("generator {} is negative on the image", self.display(&nf)),
                        witness: y.clone(),
                    });
                }
            }
        }
        let mut next = self.clone();
        let text = self.display(&nf);
        if !next.qmodule.push(&nf, prov.clone(), &self.ideal) {
            next.notes.push(format!("generator {text} already present"));
            return Ok(next);
        }
        next.mode = match assert_mode {
            Some(m) => {
                let m = m.min(self.mode);
                next.notes.push(format!("generator {text} ({prov}) added; mode {m} asserted by the caller"));
                m
            }
            None => {
                next.notes.push(format!("generator {text} ({prov}) added; mode unverified"));
                Mode::Unverified
            }
        };
        next.refresh_witness();
        Ok(next)
    }

    /// Adds a relation that holds on `X` (checked on samples). Shrinking the
    /// presentation towards the true relation ideal keeps the mode.
    pub fn add_relation(&self, r: &Polynomial) -> Result<TowerState> {
        let r = self.fit(r);
        if normal_form(&r, &self.ideal).is_zero() {
            return Ok(self.clone());
        }
        self.check_relations_on_image(std::slice::from_ref(&r))?;
        let mut next = self.clone();
        next.notes.push(format!("relation {} added", self.display(&r)));
        next.extra_relations.push(r);
        next.ideal = buchberger(&next.relations(), &TermOrder::tower(next.nvars()));
        next.qmodule = next.qmodule.renormalized(&next.ideal);
        next.refresh_witness();
        Ok(next)
    }

    /// Records a mode for the base stage, before any adjunction.
    pub fn assume_mode(&self, mode: Mode) -> Result<TowerState> {
        if self.symbols.iter().any(|s| !s.kind.is_base()) {
            return Err(Error::InvalidArgument("a mode can only be assumed for the base stage".into()));
        }
        let mut next = self.clone();
        next.mode = mode;
        next.notes.push(format!("mode {mode} assumed by the caller"));
        Ok(next)
    }
}

/// Whether the generators describe the domain: every constraint appears up to a
/// positive factor and every box side is cut out by `b - x`, `x - a` or `c^2 - x^2`.
fn covers_domain<'a>(dom: &DomainDescription, gens: impl Iterator<Item = &'a Polynomial> + Clone) -> bool {
    if !dom.exclusions.is_empty() {
        return false;
    }
    let n = dom.dim();
    let has = |p: &Polynomial| gens.clone().any(|g| positive_multiple(&g.extended(n.max(g.nvars())), p));
    if !dom.constraints.iter().all(&has) {
        return false;
    }
    if let Some(b) = &dom.bbox {
        for (i, (lo, hi)) in b.iter().enumerate() {
            let x = Polynomial::var(n, i);
            let upper = &Polynomial::constant(n, hi.clone()) - &x;
            let lower = &x - &Polynomial::constant(n, lo.clone());
            let sym = *lo == -hi.clone() && has(&(&Polynomial::constant(n, hi * hi) - &x.pow(2)));
            if !(sym || has(&upper) && has(&lower)) {
                return false;
            }
        }
    }
    true
}

fn positive_multiple(a: &Polynomial, b: &Polynomial) -> bool {
    if a.nvars() != b.nvars() || a.len() != b.len() || a.is_zero() {
        return false;
    }
    let Some((m, ca)) = a.terms().next() else { return false };
    let cb = b.coeff(m);
    if cb.is_zero() {
        return false;
    }
    let k = ca / &cb;
    k.is_positive() && a == &b.scale(&k)
}
