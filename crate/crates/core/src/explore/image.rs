use crate::algebra::rational;
use crate::algebra::{sturm_profile, UniPoly};
use crate::error::{Error, Result};
use crate::explore::compiled::CompiledPoly;
use crate::explore::domain::sample_domain;
use crate::tower::{FunctionSymbol, TowerState};

/// Points in tower coordinates together with their origin.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    pub names: Vec<String>,
    pub points: Vec<Vec<f64>>,
    pub seed: u64,
    /// Number of candidate points drawn before filtering.
    pub drawn: usize,
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// CSV with a header row and 17 significant digits per value.
    pub fn to_csv(&self) -> String {
        let mut out = self.names.join(",");
        out.push('\n');
        for p in &self.points {
            let row: Vec<String> = p.iter().map(|v| format!("{v:.16e}")).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// `m(x)` for each domain point; a pole is an error.
pub fn image_points(tw: &TowerState, xs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    xs.iter().map(|x| tw.eval_at(x).ok_or_else(|| Error::Pole(x.clone()))).collect()
}

/// Domain points where an indicator or piecewise symbol switches branch, for
/// one-dimensional domains whose switching polynomial is univariate.
fn switching_points(tw: &TowerState) -> Vec<Vec<f64>> {
    let dom = tw.domain();
    let Some(b) = dom.bbox.as_ref().or(dom.window.as_ref()) else { return vec![] };
    if dom.dim() != 1 {
        return vec![];
    }
    let (lo, hi) = &b[0];
    let mut out = Vec::new();
    for s in tw.symbols() {
        let q = match &s.kind {
            FunctionSymbol::Piecewise { q, .. } | FunctionSymbol::Characteristic { q } => q,
            _ => continue,
        };
        let Some(u) = tw.compose_to_domain(&q.extended(tw.nvars())).and_then(|p| UniPoly::from_polynomial(&p, 0)) else {
            continue;
        };
        if u.is_zero() {
            continue;
        }
        if let Ok(prof) = sturm_profile(&u, lo, hi) {
            for r in prof.roots {
                let x = if r.is_exact() { rational::to_f64(&r.lo) } else { r.approx() };
                if dom.contains(&[x]) {
                    out.push(vec![x]);
                }
            }
        }
    }
    out
}

/// Sample of `m(K_{Q,X})`: domain samples, box endpoints and branch switching
/// points, mapped into the tower and kept where every generator is `>= -tau_pos`.
pub fn image_cloud(tw: &TowerState, n: usize, seed: u64) -> Result<PointCloud> {
    let dom = tw.domain();
    let mut xs = sample_domain(dom, n, seed)?;
    xs.extend(dom.boundary_points());
    xs.extend(switching_points(tw));
    let drawn = xs.len();
    let gens: Vec<CompiledPoly> = tw.generators().iter().map(CompiledPoly::new).collect();
    let tau = tw.config().tau_pos;
    let points = xs
        .iter()
        .filter_map(|x| tw.eval_at(x))
        .filter(|y| gens.iter().all(|g| g.eval(y) >= -tau))
        .collect();
    Ok(PointCloud { names: tw.names(), points, seed, drawn })
}
