use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::rational;
use crate::error::{Error, Result};
use crate::explore::compiled::{CompiledPoly, ConstraintSystem};
use crate::explore::image::PointCloud;
use crate::tower::witness::integral_radius;
use crate::tower::{FunctionSymbol, TowerState, VarStatus};

#[derive(Clone, Debug, PartialEq)]
pub struct VarietyOptions {
    pub n: usize,
    pub tau_rel: f64,
    pub tau_pos: f64,
    pub seed: u64,
    /// Sampling box for the base variables; derived from the archimedean
    /// witness when absent.
    pub bbox: Option<Vec<(f64, f64)>>,
}

impl VarietyOptions {
    pub fn from_tower(tw: &TowerState) -> Self {
        let c = tw.config();
        VarietyOptions { n: c.samples, tau_rel: c.tau_rel, tau_pos: c.tau_pos, seed: c.seed, bbox: None }
    }
}

fn base_count(tw: &TowerState) -> usize {
    tw.symbols().iter().take_while(|s| s.kind.is_base()).count()
}

/// Box for the base variables read off the witness.
pub fn base_box(tw: &TowerState) -> Result<Vec<(f64, f64)>> {
    let nb = base_count(tw);
    let relations = tw.relations();
    let mut radii: Vec<f64> = Vec::with_capacity(nb);
    let mut out = Vec::with_capacity(nb);
    for (i, (name, st)) in tw.archimedean_status().statuses.iter().take(nb).enumerate() {
        let iv = match st {
            VarStatus::Bounded { interval, .. } => (rational::to_f64(&interval.0), rational::to_f64(&interval.1)),
            VarStatus::Integral { .. } => {
                let rel = relations
                    .iter()
                    .find(|r| {
                        r.terms().any(|(m, _)| m.exponents()[i] > 0)
                            && r.terms().all(|(m, _)| m.exponents().iter().skip(i + 1).all(|&e| e == 0))
                    })
                    .ok_or_else(|| Error::Sampling(format!("no integral relation found for `{name}`")))?;
                let r = integral_radius(i, rel, &radii);
                if !r.is_finite() {
                    return Err(Error::Sampling(format!("no finite bound for `{name}`")));
                }
                (-r, r)
            }
            VarStatus::Unbounded => {
                return Err(Error::Sampling(format!("base variable `{name}` is unbounded; no sampling box")));
            }
        };
        radii.push(iv.0.abs().max(iv.1.abs()));
        out.push(iv);
    }
    Ok(out)
}

/// All real fiber values over a base point, one vector per branch.
fn fibers(tw: &TowerState, base: Vec<f64>) -> Vec<Vec<f64>> {
    let mut partial = vec![base];
    for s in &tw.symbols()[partial[0].len()..] {
        let mut next = Vec::with_capacity(partial.len() * 2);
        for p in partial {
            let vals: Vec<f64> = match &s.kind {
                FunctionSymbol::Base(_) => unreachable!("base symbols precede adjoined ones"),
                FunctionSymbol::OddRoot { g, r } => {
                    let x = g.eval_f64(&p);
                    vec![x.signum() * x.abs().powf(1.0 / *r as f64)]
                }
                FunctionSymbol::EvenRoot { g, s } => {
                    let x = g.eval_f64(&p);
                    if x < -1e-12 {
                        vec![]
                    } else {
                        let r = x.max(0.0).powf(1.0 / *s as f64);
                        if r == 0.0 {
                            vec![0.0]
                        } else {
                            vec![r, -r]
                        }
                    }
                }
                FunctionSymbol::Reciprocal { g } => {
                    let x = g.eval_f64(&p);
                    if x == 0.0 {
                        vec![]
                    } else {
                        vec![1.0 / x]
                    }
                }
                FunctionSymbol::Piecewise { g, h, .. } => {
                    let (a, b) = (g.eval_f64(&p), h.eval_f64(&p));
                    if (a - b).abs() <= 1e-15 * (1.0 + a.abs()) {
                        vec![a]
                    } else {
                        vec![a, b]
                    }
                }
                FunctionSymbol::Characteristic { .. } => vec![0.0, 1.0],
            };
            for v in vals.into_iter().filter(|v| v.is_finite()) {
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        partial = next;
    }
    partial
}

/// Sample of `K_{Q,Y}`: uniform base points projected onto the base relations,
/// every real branch of the adjoined variables, then filtering by relations and
/// generators. Candidates that fail are projected once onto the feasible set.
pub fn sample_variety(tw: &TowerState, opts: &VarietyOptions) -> Result<PointCloud> {
    let nb = base_count(tw);
    let bbox = match &opts.bbox {
        Some(b) if b.len() == nb => b.clone(),
        Some(b) => {
            return Err(Error::DimensionMismatch(format!("box has {} intervals for {nb} base variables", b.len())));
        }
        None => base_box(tw)?,
    };
    let relations = tw.relations();
    let base_rels: Vec<CompiledPoly> =
        relations.iter().filter(|r| r.only_uses_first(nb)).map(CompiledPoly::new).collect();
    let base_system = ConstraintSystem::new(base_rels, vec![]);
    let full = ConstraintSystem::new(
        relations.iter().map(CompiledPoly::new).collect(),
        tw.generators().iter().map(CompiledPoly::new).collect(),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let draws: Vec<Vec<f64>> = (0..opts.n)
        .map(|_| bbox.iter().map(|&(lo, hi)| if hi > lo { rng.random_range(lo..=hi) } else { lo }).collect())
        .collect();
    let per_draw: Vec<Vec<Vec<f64>>> = draws
        .into_par_iter()
        .map(|x| {
            let base = if base_system.equalities.is_empty() { x } else { base_system.project(&x, 50, 1e-12).0 };
            let mut kept = Vec::new();
            for y in fibers(tw, base) {
                if full.accepts(&y, opts.tau_rel, opts.tau_pos) {
                    kept.push(y);
                    continue;
                }
                let (z, _) = full.project(&y, 50, 1e-10);
                if full.accepts(&z, opts.tau_rel, opts.tau_pos) {
                    kept.push(z);
                }
            }
            kept
        })
        .collect();
    let points: Vec<Vec<f64>> = per_draw.into_iter().flatten().collect();
    Ok(PointCloud { names: tw.names(), points, seed: opts.seed, drawn: opts.n })
}
