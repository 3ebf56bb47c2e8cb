use nalgebra::{DMatrix, DVector};

use crate::algebra::rational;
use crate::algebra::Polynomial;

/// A polynomial flattened for fast floating-point evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPoly {
    nvars: usize,
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    pub fn new(p: &Polynomial) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| {
                let factors =
                    m.exponents().iter().enumerate().filter(|(_, &e)| e > 0).map(|(v, &e)| (v, e as i32)).collect();
                (rational::to_f64(c), factors)
            })
            .collect();
        CompiledPoly { nvars: p.nvars(), terms }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(c, f)| c * f.iter().map(|&(v, e)| x[v].powi(e)).product::<f64>()).sum()
    }

    /// Gradient with respect to the first `n` coordinates.
    pub fn grad(&self, x: &[f64], n: usize) -> Vec<f64> {
        let mut g = vec![0.0; n];
        for (c, f) in &self.terms {
            for (k, &(v, e)) in f.iter().enumerate() {
                if v >= n {
                    continue;
                }
                let mut t = c * e as f64 * x[v].powi(e - 1);
                for (j, &(w, ew)) in f.iter().enumerate() {
                    if j != k {
                        t *= x[w].powi(ew);
                    }
                }
                g[v] += t;
            }
        }
        g
    }
}

/// Equalities `e_i = 0` and inequalities `g_j >= 0` over a common point space.
#[derive(Clone, Debug, Default)]
pub struct ConstraintSystem {
    pub equalities: Vec<CompiledPoly>,
    pub inequalities: Vec<CompiledPoly>,
}

impl ConstraintSystem {
    pub fn new(equalities: Vec<CompiledPoly>, inequalities: Vec<CompiledPoly>) -> Self {
        ConstraintSystem { equalities, inequalities }
    }

    pub fn max_residual(&self, x: &[f64]) -> f64 {
        self.equalities.iter().map(|e| e.eval(x).abs()).fold(0.0, f64::max)
    }

    pub fn min_inequality(&self, x: &[f64]) -> f64 {
        self.inequalities.iter().map(|g| g.eval(x)).fold(f64::INFINITY, f64::min)
    }

    pub fn accepts(&self, x: &[f64], tau_rel: f64, tau_pos: f64) -> bool {
        x.iter().all(|v| v.is_finite()) && self.max_residual(x) <= tau_rel && self.min_inequality(x) >= -tau_pos
    }

    /// Violation vector: equality values, then `min(g_j, 0)`.
    fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut r: Vec<f64> = self.equalities.iter().map(|e| e.eval(x)).collect();
        r.extend(self.inequalities.iter().map(|g| g.eval(x).min(0.0)));
        r
    }

    /// Gauss–Newton projection onto the feasible set, treating violated
    /// inequalities as equalities. Minimum-norm steps with backtracking;
    /// returns the final point and its violation norm.
    pub fn project(&self, x0: &[f64], max_iter: usize, target: f64) -> (Vec<f64>, f64) {
        let n = x0.len();
        let mut x = x0.to_vec();
        let mut r = self.residual(&x);
        let mut norm = l2(&r);
        for _ in 0..max_iter {
            if norm <= target || !norm.is_finite() {
                break;
            }
            let rows: Vec<(f64, Vec<f64>)> = self
                .equalities
                .iter()
                .zip(&r)
                .map(|(e, &ri)| (ri, e.grad(&x, n)))
                .chain(
                    self.inequalities
                        .iter()
                        .zip(&r[self.equalities.len()..])
                        .filter(|(_, &ri)| ri < 0.0)
                        .map(|(g, &ri)| (ri, g.grad(&x, n))),
                )
                .collect();
            let m = rows.len();
            let jac = DMatrix::from_fn(m, n, |i, j| rows[i].1[j]);
            let rhs = DVector::from_fn(m, |i, _| -rows[i].0);
            let step = match jac.svd(true, true).solve(&rhs, 1e-12) {
                Ok(s) => s,
                Err(_) => break,
            };
            let mut t = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, s)| a + t * s).collect();
                let tr = self.residual(&trial);
                let tn = l2(&tr);
                if tn < norm {
                    x = trial;
                    r = tr;
                    norm = tn;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (x, norm)
    }
}

pub fn l2(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let n = names(&["x", "y"]);
        let p = CompiledPoly::new(&Polynomial::parse("x^3*y - 2*y^2 + x", &n).unwrap());
        let x = [0.7, -1.3];
        let g = p.grad(&x, 2);
        for k in 0..2 {
            let mut xp = x;
            xp[k] += 1e-6;
            let mut xm = x;
            xm[k] -= 1e-6;
            let fd = (p.eval(&xp) - p.eval(&xm)) / 2e-6;
            assert!((fd - g[k]).abs() < 1e-6);
        }
    }

    #[test]
    fn projects_onto_circle() {
        let n = names(&["x", "y"]);
        let sys = ConstraintSystem::new(vec![CompiledPoly::new(&Polynomial::parse("x^2 + y^2 - 1", &n).unwrap())], vec![]);
        let (x, r) = sys.project(&[0.3, 0.2], 50, 1e-12);
        assert!(r <= 1e-12);
        assert!((x[0].hypot(x[1]) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn violated_inequality_becomes_active() {
        let n = names(&["t"]);
        let sys = ConstraintSystem::new(vec![], vec![CompiledPoly::new(&Polynomial::parse("t - 1", &n).unwrap())]);
        let (x, r) = sys.project(&[0.25], 50, 1e-12);
        assert!(r <= 1e-12 && (x[0] - 1.0).abs() < 1e-10);
        let (y, _) = sys.project(&[3.0], 50, 1e-12);
        assert_eq!(y, vec![3.0]);
    }
}
