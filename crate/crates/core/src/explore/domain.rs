use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::rational::{self, Rational};
use crate::algebra::Polynomial;
use crate::error::{Error, Result};

/// A basic closed (or punctured) subset `X` of `R^n`.
///
/// `X = { x in box | g_i(x) >= 0, e_j(x) != 0 }`. Without a box the set is
/// unbounded; `window` then gives the region used for sampling.
#[derive(Clone, Debug, PartialEq)]
pub struct DomainDescription {
    pub names: Vec<String>,
    pub constraints: Vec<Polynomial>,
    pub exclusions: Vec<Polynomial>,
    pub bbox: Option<Vec<(Rational, Rational)>>,
    pub window: Option<Vec<(Rational, Rational)>>,
}

impl DomainDescription {
    pub fn new(names: Vec<String>) -> Self {
        DomainDescription { names, constraints: Vec::new(), exclusions: Vec::new(), bbox: None, window: None }
    }

    pub fn interval(name: &str, lo: Rational, hi: Rational) -> Self {
        DomainDescription::new(vec![name.to_string()]).with_box(vec![(lo, hi)])
    }

    pub fn with_box(mut self, b: Vec<(Rational, Rational)>) -> Self {
        assert_eq!(b.len(), self.names.len());
        self.bbox = Some(b);
        self
    }

    pub fn with_window(mut self, w: Vec<(Rational, Rational)>) -> Self {
        assert_eq!(w.len(), self.names.len());
        self.window = Some(w);
        self
    }

    pub fn with_constraint(mut self, g: Polynomial) -> Self {
        self.constraints.push(g);
        self
    }

    pub fn with_exclusion(mut self, e: Polynomial) -> Self {
        self.exclusions.push(e);
        self
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// Closed and bounded: a box is present and no points are punctured out.
    pub fn is_compact(&self) -> bool {
        self.bbox.is_some() && self.exclusions.is_empty()
    }

    /// The region that sampling draws from: the box, else the window.
    pub fn sampling_box(&self) -> Option<Vec<(f64, f64)>> {
        self.bbox
            .as_ref()
            .or(self.window.as_ref())
            .map(|b| b.iter().map(|(a, c)| (rational::to_f64(a), rational::to_f64(c))).collect())
    }

    /// A one-dimensional interval domain without extra constraints, where
    /// univariate questions can be settled exactly.
    pub fn exact_interval(&self) -> Option<(Rational, Rational)> {
        match &self.bbox {
            Some(b) if self.dim() == 1 && self.constraints.is_empty() && self.exclusions.is_empty() => {
                Some(b[0].clone())
            }
            _ => None,
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if let Some(b) = &self.bbox {
            for (xi, (lo, hi)) in x.iter().zip(b) {
                if *xi < rational::to_f64(lo) || *xi > rational::to_f64(hi) {
                    return false;
                }
            }
        }
        self.constraints.iter().all(|g| g.eval_f64(x) >= -1e-12) && self.exclusions.iter().all(|e| e.eval_f64(x) != 0.0)
    }

    /// Box endpoints (one-dimensional domains only) that belong to `X`.
    pub fn boundary_points(&self) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        if self.dim() == 1 {
            if let Some(b) = self.sampling_box() {
                for x in [b[0].0, b[0].1] {
                    if self.contains(&[x]) {
                        out.push(vec![x]);
                    }
                }
            }
        }
        out
    }
}

/// Draws `n` points of `X` uniformly from its sampling box by rejection.
pub fn sample_domain(dom: &DomainDescription, n: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let b = dom
        .sampling_box()
        .ok_or_else(|| Error::Sampling("domain has neither a box nor a sampling window".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_draws = n.max(1).saturating_mul(10_000);
    let mut out = Vec::with_capacity(n);
    let mut draws = 0usize;
    while out.len() < n {
        if draws >= max_draws {
            return Err(Error::Sampling(format!(
                "acceptance rate below 1e-4 ({} of {draws} draws accepted)",
                out.len()
            )));
        }
        draws += 1;
        let x: Vec<f64> = b.iter().map(|&(lo, hi)| if hi > lo { rng.random_range(lo..=hi) } else { lo }).collect();
        if dom.contains(&x) {
            out.push(x);
        }
    }
    Ok(out)
}
