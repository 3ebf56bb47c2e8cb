use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::state::TowerState;
use crate::algebra::rational;
use crate::algebra::{sturm_profile, Polynomial};
use crate::error::Result;
use crate::explore::compiled::{distance, CompiledPoly, ConstraintSystem};
use crate::explore::domain::sample_domain;
use crate::explore::variety::{sample_variety, VarietyOptions};

/// The four regularity hypotheses that gate piecewise and indicator adjunctions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegularityCase {
    /// Zeros of `q` on `X` lie in the closure of `{q < 0}`.
    Comp,
    /// `q(x) = 0` implies `g(x) = h(x)` on `X`.
    InjCase4,
    /// `q(y) = 0` implies `g(y) = h(y)` on `K_{Q,Y_B}`.
    AlinjCase4,
    /// Zeros of `q` on `K_{Q,Y_B}` lie in the closures of `{q > 0}` and `{q < 0}`.
    AlinjCase5,
}

impl RegularityCase {
    pub fn name(self) -> &'static str {
        match self {
            RegularityCase::Comp => "comp",
            RegularityCase::InjCase4 => "inj4",
            RegularityCase::AlinjCase4 => "alinj4",
            RegularityCase::AlinjCase5 => "alinj5",
        }
    }

    /// Whether the condition is stated on `X` (witnesses are domain points)
    /// rather than on the variety (witnesses are tower coordinates).
    pub fn on_domain(self) -> bool {
        matches!(self, RegularityCase::Comp | RegularityCase::InjCase4)
    }
}

impl fmt::Display for RegularityCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Polynomials in the tower variables; `g` and `h` only matter for the
/// piecewise cases.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularityData {
    pub g: Option<Polynomial>,
    pub h: Option<Polynomial>,
    pub q: Polynomial,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Pass,
    Fail(Vec<f64>),
    Undecided(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Method {
    SturmExact,
    Sampling { n: usize, zero_tol: f64, sign_tol: f64, delta: f64 },
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::SturmExact => f.write_str("sturm-exact"),
            Method::Sampling { n, zero_tol, sign_tol, delta } => {
                write!(f, "sampling n={n} zero_tol={zero_tol:e} sign_tol={sign_tol:e} delta={delta}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularityResult {
    pub verdict: Verdict,
    pub method: Method,
}

const MAX_ZEROS: usize = 256;

/// Decides the condition exactly when it reduces to univariate sign analysis
/// on an interval, and by sampling otherwise.
pub fn check_regularity(tw: &TowerState, data: &RegularityData, case: RegularityCase) -> RegularityResult {
    if case.on_domain() {
        if let Some(verdict) = exact_on_interval(tw, data, case) {
            return RegularityResult { verdict, method: Method::SturmExact };
        }
    }
    check_regularity_sampling(tw, data, case)
}

/// Always uses the sampling path.
pub fn check_regularity_sampling(tw: &TowerState, data: &RegularityData, case: RegularityCase) -> RegularityResult {
    let c = tw.config();
    let method = Method::Sampling { n: c.samples, zero_tol: c.zero_tol, sign_tol: c.sign_tol, delta: c.delta };
    let verdict = match case {
        RegularityCase::Comp | RegularityCase::InjCase4 => sampled_on_domain(tw, data, case),
        RegularityCase::AlinjCase4 | RegularityCase::AlinjCase5 => sampled_on_variety(tw, data, case),
    };
    RegularityResult { verdict: verdict.unwrap_or_else(|e| Verdict::Undecided(e.to_string())), method }
}

fn exact_on_interval(tw: &TowerState, data: &RegularityData, case: RegularityCase) -> Option<Verdict> {
    let (q, lo, hi) = tw.univariate_on_interval(&data.q)?;
    let lo_f = rational::to_f64(&lo);
    match case {
        RegularityCase::Comp => {
            if q.is_zero() {
                return Some(Verdict::Fail(vec![lo_f]));
            }
            let prof = sturm_profile(&q, &lo, &hi).ok()?;
            for (i, r) in prof.roots.iter().enumerate() {
                let approachable = prof
                    .pieces
                    .iter()
                    .any(|p| p.sign < 0 && (p.left_root == Some(i) || p.right_root == Some(i)));
                if !approachable {
                    return Some(Verdict::Fail(vec![r.approx()]));
                }
            }
            Some(Verdict::Pass)
        }
        RegularityCase::InjCase4 => {
            let diff = &data.g.clone()? - &data.h.clone()?;
            let (d, _, _) = tw.univariate_on_interval(&diff)?;
            if d.is_zero() {
                return Some(Verdict::Pass);
            }
            if q.is_zero() {
                // every point is a zero of q; g - h must vanish identically
                let prof = sturm_profile(&d, &lo, &hi).ok()?;
                let w = prof.pieces.iter().find(|p| p.sign != 0).map(|p| rational::to_f64(&p.sample));
                return Some(Verdict::Fail(vec![w.unwrap_or(lo_f)]));
            }
            let common = q.gcd(&d);
            let prof = sturm_profile(&q, &lo, &hi).ok()?;
            for r in &prof.roots {
                let shared = if r.is_exact() {
                    d.sign_at(&r.lo) == 0
                } else {
                    common.degree().unwrap_or(0) > 0
                        && sturm_profile(&common, &r.lo, &r.hi).map(|p| !p.roots.is_empty()).unwrap_or(false)
                };
                if !shared {
                    return Some(Verdict::Fail(vec![r.approx()]));
                }
            }
            Some(Verdict::Pass)
        }
        _ => None,
    }
}

fn composite(tw: &TowerState, p: &CompiledPoly, x: &[f64]) -> Option<f64> {
    tw.eval_at(x).map(|y| p.eval(&y)).filter(|v| v.is_finite())
}

/// Approximate zeros of `p(m(x))` on `X`: sign changes along one-dimensional
/// domains plus Newton refinement of the samples where `|p|` is smallest.
pub(crate) fn domain_zeros(tw: &TowerState, p: &Polynomial, salt: u64) -> Result<Vec<Vec<f64>>> {
    let dom = tw.domain();
    let cp = CompiledPoly::new(p);
    let mut xs = sample_domain(dom, tw.config().samples, tw.config().seed ^ salt)?;
    xs.extend(dom.boundary_points());
    let vals: Vec<(Vec<f64>, f64)> = xs.into_iter().filter_map(|x| composite(tw, &cp, &x).map(|v| (x, v))).collect();
    let f = |x: &[f64]| composite(tw, &cp, x);
    let mut zeros: Vec<Vec<f64>> = Vec::new();
    let mut starts: Vec<Vec<f64>> = Vec::new();
    if dom.dim() == 1 {
        let mut sorted: Vec<&(Vec<f64>, f64)> = vals.iter().collect();
        sorted.sort_by(|a, b| a.0[0].total_cmp(&b.0[0]));
        for w in sorted.windows(2) {
            let (a, fa) = (w[0].0[0], w[0].1);
            let (b, fb) = (w[1].0[0], w[1].1);
            if fa == 0.0 {
                zeros.push(vec![a]);
            } else if fa * fb < 0.0 {
                if let Some(z) = bisect(&f, a, b, fa) {
                    zeros.push(vec![z]);
                }
            }
        }
        if let Some(last) = sorted.last() {
            if last.1 == 0.0 {
                zeros.push(last.0.clone());
            }
        }
        for w in sorted.windows(3) {
            if w[1].1.abs() <= w[0].1.abs() && w[1].1.abs() <= w[2].1.abs() {
                starts.push(w[1].0.clone());
            }
        }
    }
    let mut by_size: Vec<&(Vec<f64>, f64)> = vals.iter().collect();
    by_size.sort_by(|a, b| a.1.abs().total_cmp(&b.1.abs()));
    starts.extend(by_size.iter().take(200).map(|(x, _)| x.clone()));
    for s in starts {
        if let Some(z) = newton_min_norm(&f, &s) {
            if dom.contains(&z) && within_box(tw, &z) {
                zeros.push(z);
            }
        }
    }
    Ok(dedupe(zeros, 1e-6, MAX_ZEROS))
}

fn within_box(tw: &TowerState, x: &[f64]) -> bool {
    match tw.domain().sampling_box() {
        Some(b) => x.iter().zip(&b).all(|(v, (lo, hi))| *v >= *lo - 1e-12 && *v <= *hi + 1e-12),
        None => true,
    }
}

fn bisect(f: &impl Fn(&[f64]) -> Option<f64>, mut a: f64, mut b: f64, mut fa: f64) -> Option<f64> {
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        let fm = f(&[m])?;
        if fm == 0.0 {
            return Some(m);
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    Some(0.5 * (a + b))
}

/// Minimum-norm Newton steps `x - f grad / |grad|^2` with a finite-difference gradient.
fn newton_min_norm(f: &impl Fn(&[f64]) -> Option<f64>, x0: &[f64]) -> Option<Vec<f64>> {
    let mut x = x0.to_vec();
    let mut fx = f(&x)?;
    for _ in 0..100 {
        if fx.abs() <= 1e-14 {
            break;
        }
        let mut grad = vec![0.0; x.len()];
        for k in 0..x.len() {
            let h = 1e-7 * (1.0 + x[k].abs());
            let mut xp = x.clone();
            xp[k] += h;
            let mut xm = x.clone();
            xm[k] -= h;
            grad[k] = (f(&xp)? - f(&xm)?) / (2.0 * h);
        }
        let g2: f64 = grad.iter().map(|g| g * g).sum();
        if g2 == 0.0 || !g2.is_finite() {
            break;
        }
        let next: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| a - fx * g / g2).collect();
        let fn_ = f(&next)?;
        if fn_.abs() >= fx.abs() {
            break;
        }
        x = next;
        fx = fn_;
    }
    (fx.abs() <= 1e-9).then_some(x)
}

fn dedupe(points: Vec<Vec<f64>>, tol: f64, cap: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in points {
        if out.len() >= cap {
            break;
        }
        if !out.iter().any(|q| distance(q, &p) <= tol) {
            out.push(p);
        }
    }
    out
}

fn sampled_on_domain(tw: &TowerState, data: &RegularityData, case: RegularityCase) -> Result<Verdict> {
    let dom = tw.domain();
    if dom.sampling_box().is_none() {
        return Ok(Verdict::Undecided("domain has neither a box nor a sampling window".into()));
    }
    let cfg = tw.config().clone();
    let zeros = domain_zeros(tw, &data.q, 0x7e9)?;
    match case {
        RegularityCase::InjCase4 => {
            let (Some(g), Some(h)) = (&data.g, &data.h) else {
                return Ok(Verdict::Undecided("piecewise data missing g or h".into()));
            };
            let diff = CompiledPoly::new(&(g - h));
            for z in zeros {
                if composite(tw, &diff, &z).is_some_and(|d| d.abs() > cfg.zero_tol) {
                    return Ok(Verdict::Fail(z));
                }
            }
            Ok(Verdict::Pass)
        }
        _ => {
            let cq = CompiledPoly::new(&data.q);
            let mut xs = sample_domain(dom, cfg.samples, cfg.seed ^ 0x3c1)?;
            xs.extend(dom.boundary_points());
            let negatives: Vec<Vec<f64>> =
                xs.into_iter().filter(|x| composite(tw, &cq, x).is_some_and(|v| v < -cfg.sign_tol)).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x41d);
            for z in zeros {
                if negatives.iter().any(|x| distance(x, &z) <= cfg.delta) {
                    continue;
                }
                let found = local_points(&z, cfg.delta, &mut rng)
                    .into_iter()
                    .filter(|x| dom.contains(x) && within_box(tw, x))
                    .any(|x| composite(tw, &cq, &x).is_some_and(|v| v < -cfg.sign_tol));
                if !found {
                    return Ok(Verdict::Fail(z));
                }
            }
            Ok(Verdict::Pass)
        }
    }
}

/// Random points in the `delta`-ball around `z` plus points along each axis.
fn local_points(z: &[f64], delta: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = z.len();
    let mut out = Vec::with_capacity(256 + 16 * n);
    for _ in 0..256 {
        let dir: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt().max(1e-300);
        let r = delta * rng.random::<f64>();
        out.push(z.iter().zip(&dir).map(|(a, d)| a + r * d / norm).collect());
    }
    for k in 0..n {
        for j in 1..=8 {
            for s in [-1.0, 1.0] {
                let mut x = z.to_vec();
                x[k] += s * delta * j as f64 / 8.0;
                out.push(x);
            }
        }
    }
    out
}

fn sampled_on_variety(tw: &TowerState, data: &RegularityData, case: RegularityCase) -> Result<Verdict> {
    let cfg = tw.config().clone();
    let opts = VarietyOptions { n: cfg.samples, tau_rel: cfg.tau_rel, tau_pos: cfg.tau_pos, seed: cfg.seed ^ 0x5a7, bbox: None };
    let cloud = match sample_variety(tw, &opts) {
        Ok(c) => c,
        Err(e) => return Ok(Verdict::Undecided(format!("variety sampling failed: {e}"))),
    };
    if cloud.points.is_empty() {
        return Ok(Verdict::Undecided("variety sample is empty".into()));
    }
    let cq = CompiledPoly::new(&data.q);
    let rels: Vec<CompiledPoly> = tw.relations().iter().map(CompiledPoly::new).collect();
    let gens: Vec<CompiledPoly> = tw.generators().iter().map(CompiledPoly::new).collect();
    let k_system = ConstraintSystem::new(rels.clone(), gens.clone());
    let mut zero_system_eqs = rels;
    zero_system_eqs.push(cq.clone());
    let zero_system = ConstraintSystem::new(zero_system_eqs, gens);

    let mut by_size: Vec<&Vec<f64>> = cloud.points.iter().collect();
    by_size.sort_by(|a, b| cq.eval(a).abs().total_cmp(&cq.eval(b).abs()));
    let mut zeros = Vec::new();
    for y in by_size.into_iter().take(MAX_ZEROS) {
        let (z, r) = zero_system.project(y, 50, 1e-12);
        if r <= 1e-9 {
            zeros.push(z);
        }
    }
    let zeros = dedupe(zeros, 1e-6, MAX_ZEROS);

    match case {
        RegularityCase::AlinjCase4 => {
            let (Some(g), Some(h)) = (&data.g, &data.h) else {
                return Ok(Verdict::Undecided("piecewise data missing g or h".into()));
            };
            let diff = CompiledPoly::new(&(g - h));
            Ok(zeros.into_iter().find(|z| diff.eval(z).abs() > cfg.zero_tol).map_or(Verdict::Pass, Verdict::Fail))
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x6b3);
            for z in zeros {
                let near: Vec<&Vec<f64>> = cloud.points.iter().filter(|y| distance(y, &z) <= cfg.delta).collect();
                let mut pos = near.iter().any(|y| cq.eval(y) > cfg.sign_tol);
                let mut neg = near.iter().any(|y| cq.eval(y) < -cfg.sign_tol);
                for _ in 0..128 {
                    if pos && neg {
                        break;
                    }
                    let trial: Vec<f64> = z.iter().map(|a| a + 0.5 * cfg.delta * rng.random_range(-1.0..1.0)).collect();
                    let (y, _) = k_system.project(&trial, 50, 1e-12);
                    if !k_system.accepts(&y, cfg.tau_rel, cfg.tau_pos) || distance(&y, &z) > cfg.delta {
                        continue;
                    }
                    let v = cq.eval(&y);
                    pos |= v > cfg.sign_tol;
                    neg |= v < -cfg.sign_tol;
                }
                if !(pos && neg) {
                    return Ok(Verdict::Fail(z));
                }
            }
            Ok(Verdict::Pass)
        }
    }
}
