use std::fmt;

use crate::algebra::rational::{self, Rational};
use crate::error::{Error, Result};
use crate::explore::compiled::distance;
use crate::explore::image::{image_cloud, PointCloud};
use crate::explore::variety::{sample_variety, VarietyOptions};
use crate::tower::{Provenance, TowerState};

#[derive(Clone, Debug, PartialEq)]
pub struct GapOptions {
    pub n: usize,
    pub delta: f64,
    pub seed: u64,
    pub tau_rel: f64,
    pub tau_pos: f64,
}

impl GapOptions {
    pub fn from_tower(tw: &TowerState) -> Self {
        let c = tw.config();
        GapOptions { n: c.samples, delta: c.delta, seed: c.seed, tau_rel: c.tau_rel, tau_pos: c.tau_pos }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapVerdict {
    GapDetected,
    ImageEqualsVariety,
}

impl fmt::Display for GapVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GapVerdict::GapDetected => "gap-detected",
            GapVerdict::ImageEqualsVariety => "image-equals-variety",
        })
    }
}

/// A sampled variety point and its distance to the image cloud.
#[derive(Clone, Debug, PartialEq)]
pub struct SpuriousPoint {
    pub point: Vec<f64>,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapReport {
    pub verdict: GapVerdict,
    /// Variety points farther than `delta` from the image, farthest first.
    pub spurious: Vec<SpuriousPoint>,
    pub names: Vec<String>,
    pub image_count: usize,
    pub variety_count: usize,
    pub max_distance: f64,
    pub delta: f64,
    pub n: usize,
    pub image_seed: u64,
    pub variety_seed: u64,
    pub tau_rel: f64,
    pub tau_pos: f64,
}

impl fmt::Display for GapReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict {}", self.verdict)?;
        writeln!(f, "samples {} image {} variety {}", self.n, self.image_count, self.variety_count)?;
        writeln!(f, "delta {} tau_rel {:e} tau_pos {:e}", self.delta, self.tau_rel, self.tau_pos)?;
        writeln!(f, "seeds image {} variety {}", self.image_seed, self.variety_seed)?;
        writeln!(f, "max_distance {:.6}", self.max_distance)?;
        writeln!(f, "spurious {}", self.spurious.len())?;
        for s in self.spurious.iter().take(10) {
            let coords: Vec<String> =
                self.names.iter().zip(&s.point).map(|(n, v)| format!("{n}={:.6}", clean(*v))).collect();
            writeln!(f, "  {} distance {:.6}", coords.join(" "), s.distance)?;
        }
        Ok(())
    }
}

fn clean(v: f64) -> f64 {
    if v.abs() < 5e-7 {
        0.0
    } else {
        v
    }
}

/// Nearest-neighbour queries over a fixed point set, sorted on the first
/// coordinate so that a query only scans a slab around its own first coordinate.
pub struct NearestIndex {
    points: Vec<Vec<f64>>,
}

impl NearestIndex {
    pub fn new(points: &[Vec<f64>]) -> Self {
        let mut points = points.to_vec();
        points.sort_by(|a, b| a[0].total_cmp(&b[0]));
        NearestIndex { points }
    }

    /// Distance from `q` to the nearest indexed point; infinite when empty.
    pub fn nearest(&self, q: &[f64]) -> f64 {
        let pts = &self.points;
        let start = pts.partition_point(|p| p[0] < q[0]);
        let mut best = f64::INFINITY;
        let mut i = start;
        while i < pts.len() && pts[i][0] - q[0] < best {
            best = best.min(distance(&pts[i], q));
            i += 1;
        }
        let mut i = start;
        while i > 0 && q[0] - pts[i - 1][0] < best {
            best = best.min(distance(&pts[i - 1], q));
            i -= 1;
        }
        best
    }
}

/// Compares a variety cloud against an image cloud at resolution `delta`.
pub fn compare_clouds(image: &PointCloud, variety: &PointCloud, delta: f64) -> (GapVerdict, Vec<SpuriousPoint>, f64) {
    let index = NearestIndex::new(&image.points);
    let mut max_distance: f64 = 0.0;
    let mut spurious = Vec::new();
    for v in &variety.points {
        let d = index.nearest(v);
        max_distance = max_distance.max(d);
        if d > delta {
            spurious.push(SpuriousPoint { point: v.clone(), distance: d });
        }
    }
    spurious.sort_by(|a, b| b.distance.total_cmp(&a.distance));
    let verdict = if spurious.is_empty() { GapVerdict::ImageEqualsVariety } else { GapVerdict::GapDetected };
    (verdict, spurious, max_distance)
}

/// Samples `m(K_{Q,X})` and `K_{Q,Y}` and reports variety points not
/// approximated by the image.
pub fn gap_report(tw: &TowerState, opts: &GapOptions) -> Result<GapReport> {
    gap_analysis(tw, opts).map(|(rep, _, _)| rep)
}

/// [`gap_report`] together with the image and variety clouds it compared.
pub fn gap_analysis(tw: &TowerState, opts: &GapOptions) -> Result<(GapReport, PointCloud, PointCloud)> {
    let image_seed = opts.seed;
    let variety_seed = opts.seed.wrapping_add(0x9e37_79b9);
    let image = image_cloud(tw, opts.n, image_seed)?;
    let vopts = VarietyOptions { n: opts.n, tau_rel: opts.tau_rel, tau_pos: opts.tau_pos, seed: variety_seed, bbox: None };
    let variety = sample_variety(tw, &vopts)?;
    let (verdict, spurious, max_distance) = compare_clouds(&image, &variety, opts.delta);
    let rep = GapReport {
        verdict,
        spurious,
        names: tw.names(),
        image_count: image.len(),
        variety_count: variety.len(),
        max_distance,
        delta: opts.delta,
        n: opts.n,
        image_seed,
        variety_seed,
        tau_rel: opts.tau_rel,
        tau_pos: opts.tau_pos,
    };
    Ok((rep, image, variety))
}

/// Sample-level check that the projection from one stage's variety onto the
/// previous stage's variety is onto.
#[derive(Clone, Debug, PartialEq)]
pub struct SurjectivityReport {
    /// Number of variables of the previous stage.
    pub prefix: usize,
    pub checked: usize,
    pub max_distance: f64,
    pub worst: Option<Vec<f64>>,
    pub delta: f64,
}

impl SurjectivityReport {
    pub fn holds(&self) -> bool {
        self.max_distance <= self.delta
    }
}

pub fn surjectivity_check(tw: &TowerState, opts: &GapOptions) -> Result<SurjectivityReport> {
    let prev = tw.parent().ok_or_else(|| Error::InvalidArgument("tower has no previous stage".into()))?;
    let k = prev.nvars();
    let vopts = |seed| VarietyOptions { n: opts.n, tau_rel: opts.tau_rel, tau_pos: opts.tau_pos, seed, bbox: None };
    let below = sample_variety(prev, &vopts(opts.seed))?;
    let above = sample_variety(tw, &vopts(opts.seed.wrapping_add(1)))?;
    let projected: Vec<Vec<f64>> = above.points.iter().map(|p| p[..k].to_vec()).collect();
    let index = NearestIndex::new(&projected);
    let mut max_distance: f64 = 0.0;
    let mut worst = None;
    for p in &below.points {
        let d = index.nearest(p);
        if d > max_distance {
            max_distance = d;
            worst = Some(p.clone());
        }
    }
    Ok(SurjectivityReport { prefix: k, checked: below.len(), max_distance, worst, delta: opts.delta })
}

/// Adds the separator `sum (v_j - y_j)^2 - eps` after checking that it is
/// nonnegative on the sampled image.
pub fn exclude_point(tw: &TowerState, y: &[Rational], eps: &Rational) -> Result<TowerState> {
    let sep = tw.separator_generator(y, eps)?;
    let cfg = tw.config();
    let image = image_cloud(tw, cfg.samples, cfg.seed ^ 0x5e9)?;
    let cp = crate::explore::compiled::CompiledPoly::new(&sep);
    if let Some(p) = image.points.iter().find(|p| cp.eval(p) < -cfg.tau_pos) {
        let target: Vec<String> = y.iter().map(rational::format).collect();
        return Err(Error::Precondition {
            reason: format!(
                "separator around ({}) with eps {} is negative on the image",
                target.join(", "),
                rational::format(eps)
            ),
            witness: p.clone(),
        });
    }
    tw.add_generator_with(&sep, Provenance::Separator, false, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_matches_brute_force() {
        let pts: Vec<Vec<f64>> = (0..200).map(|i| vec![((i * 37) % 101) as f64 / 10.0, ((i * 13) % 7) as f64]).collect();
        let idx = NearestIndex::new(&pts);
        for q in [[0.3, 2.0], [5.05, -1.0], [11.0, 3.5]] {
            let brute = pts.iter().map(|p| distance(p, &q)).fold(f64::INFINITY, f64::min);
            assert_eq!(idx.nearest(&q), brute);
        }
        assert_eq!(NearestIndex::new(&[]).nearest(&[0.0]), f64::INFINITY);
    }
}
