//! Dense primal-dual interior point solver for block-diagonal semidefinite programs
//!
//! `min <C, X>  s.t.  <A_i, X> = b_i,  X psd`
//! `max b'y     s.t.  S = C - sum y_i A_i psd`
//!
//! Infeasible path-following with Nesterov–Todd scaling and a Mehrotra
//! predictor-corrector.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

/// A symmetric block-diagonal matrix given by its upper-triangle entries
/// `(block, i, j, value)` with `i <= j`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseSym {
    pub entries: Vec<(usize, usize, usize, f64)>,
}

impl SparseSym {
    pub fn new() -> Self {
        SparseSym::default()
    }

    /// Adds `v` at `(i, j)` and `(j, i)` of block `k`.
    pub fn push(&mut self, k: usize, i: usize, j: usize, v: f64) {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        self.entries.push((k, i, j, v));
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.3 == 0.0)
    }

    pub fn inner(&self, x: &[DMatrix<f64>]) -> f64 {
        self.entries
            .iter()
            .map(|&(k, i, j, v)| if i == j { v * x[k][(i, i)] } else { 2.0 * v * x[k][(i, j)] })
            .sum()
    }

    /// Entries sorted by position with duplicates merged.
    pub fn canonical(&self) -> SparseSym {
        let mut e = self.entries.clone();
        e.sort_by_key(|a| (a.0, a.1, a.2));
        let mut out: Vec<(usize, usize, usize, f64)> = Vec::with_capacity(e.len());
        for x in e {
            match out.last_mut() {
                Some(l) if (l.0, l.1, l.2) == (x.0, x.1, x.2) => l.3 += x.3,
                _ => out.push(x),
            }
        }
        out.retain(|x| x.3 != 0.0);
        SparseSym { entries: out }
    }

    /// Trace inner product; both operands must be canonical.
    pub fn inner_sparse(&self, other: &SparseSym) -> f64 {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut k, mut s) = (0, 0, 0.0);
        while i < a.len() && k < b.len() {
            let (ka, kb) = ((a[i].0, a[i].1, a[i].2), (b[k].0, b[k].1, b[k].2));
            match ka.cmp(&kb) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => k += 1,
                std::cmp::Ordering::Equal => {
                    s += if a[i].1 == a[i].2 { a[i].3 * b[k].3 } else { 2.0 * a[i].3 * b[k].3 };
                    i += 1;
                    k += 1;
                }
            }
        }
        s
    }

    /// Adds `alpha * self` to the dense blocks.
    pub fn add_to(&self, alpha: f64, out: &mut [DMatrix<f64>]) {
        for &(k, i, j, v) in &self.entries {
            out[k][(i, j)] += alpha * v;
            if i != j {
                out[k][(j, i)] += alpha * v;
            }
        }
    }

    pub fn to_dense(&self, sizes: &[usize]) -> Vec<DMatrix<f64>> {
        let mut out = zeros(sizes);
        self.add_to(1.0, &mut out);
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpProblem {
    pub block_sizes: Vec<usize>,
    pub c: SparseSym,
    pub constraints: Vec<SparseSym>,
    pub b: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Inaccurate,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpOptions {
    pub tol: f64,
    /// Tolerance the iteration aims for before accepting `tol`.
    pub inner_tol: f64,
    pub max_iter: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions { tol: 1e-7, inner_tol: 1e-9, max_iter: 100 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub x: Vec<DMatrix<f64>>,
    pub y: Vec<f64>,
    pub s: Vec<DMatrix<f64>>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// `|b - A(X)| / (1 + |b|)`.
    pub primal_residual: f64,
    /// `|C - A'y - S| / (1 + |C|)`.
    pub dual_residual: f64,
    /// `|<C,X> - b'y| / (1 + |<C,X>| + |b'y|)`.
    pub gap: f64,
    pub iterations: usize,
}

fn zeros(sizes: &[usize]) -> Vec<DMatrix<f64>> {
    sizes.iter().map(|&n| DMatrix::zeros(n, n)).collect()
}

fn identity(sizes: &[usize], s: f64) -> Vec<DMatrix<f64>> {
    sizes.iter().map(|&n| DMatrix::identity(n, n) * s).collect()
}

fn dot(a: &[DMatrix<f64>], b: &[DMatrix<f64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.dot(y)).sum()
}

fn fro(a: &[DMatrix<f64>]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(a: &[DMatrix<f64>], alpha: f64, b: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
    a.iter().zip(b).map(|(x, y)| x + y * alpha).collect()
}

fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Measures of how well `(X, y, S)` solves the problem, from the iterates alone.
pub fn residuals(p: &SdpProblem, x: &[DMatrix<f64>], y: &[f64], s: &[DMatrix<f64>]) -> (f64, f64, f64, f64, f64) {
    let bnorm = p.b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let rp = p
        .constraints
        .iter()
        .zip(&p.b)
        .map(|(a, bi)| {
            let r = bi - a.inner(x);
            r * r
        })
        .sum::<f64>()
        .sqrt();
    let cd = p.c.to_dense(&p.block_sizes);
    let mut rd = cd.clone();
    for (a, yi) in p.constraints.iter().zip(y) {
        a.add_to(-yi, &mut rd);
    }
    let rd = axpy(&rd, -1.0, s);
    let pobj = p.c.inner(x);
    let dobj: f64 = p.b.iter().zip(y).map(|(b, y)| b * y).sum();
    (
        rp / (1.0 + bnorm),
        fro(&rd) / (1.0 + fro(&cd)),
        (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs()),
        pobj,
        dobj,
    )
}

/// Largest step `alpha <= 1` keeping `M + alpha * D` positive definite, given
/// the Cholesky factor `L` of `M`.
fn max_step(l: &[DMatrix<f64>], d: &[DMatrix<f64>]) -> f64 {
    let mut alpha: f64 = 1.0;
    for (lk, dk) in l.iter().zip(d) {
        if lk.nrows() == 0 {
            continue;
        }
        let li = lk.clone().try_inverse().unwrap_or_else(|| DMatrix::identity(lk.nrows(), lk.nrows()));
        let m = sym(&(&li * dk * li.transpose()));
        let min = m.symmetric_eigenvalues().min();
        if min < 0.0 {
            alpha = alpha.min(-1.0 / min);
        }
    }
    alpha
}

fn chol_factors(m: &[DMatrix<f64>]) -> Option<Vec<DMatrix<f64>>> {
    m.iter().map(|b| Cholesky::new(sym(b)).map(|c| c.l())).collect()
}

struct Scaling {
    g: Vec<DMatrix<f64>>,
    g_inv: Vec<DMatrix<f64>>,
    w: Vec<DMatrix<f64>>,
    v: Vec<DVector<f64>>,
}

fn nt_scaling(lx: &[DMatrix<f64>], s: &[DMatrix<f64>]) -> Option<Scaling> {
    let mut sc = Scaling { g: vec![], g_inv: vec![], w: vec![], v: vec![] };
    for (l, sk) in lx.iter().zip(s) {
        let m = sym(&(l.transpose() * sk * l));
        let eig = SymmetricEigen::new(m);
        if eig.eigenvalues.iter().any(|&e| e <= 0.0 || !e.is_finite()) {
            return None;
        }
        let lam = eig.eigenvalues.map(f64::sqrt);
        let q = eig.eigenvectors;
        let scale_r = DMatrix::from_diagonal(&lam.map(|x| 1.0 / x.sqrt()));
        let scale_l = DMatrix::from_diagonal(&lam.map(f64::sqrt));
        let g = l * &q * &scale_r;
        let g_inv = &scale_l * q.transpose() * l.clone().try_inverse()?;
        sc.w.push(sym(&(&g * g.transpose())));
        sc.g.push(g);
        sc.g_inv.push(g_inv);
        sc.v.push(lam);
    }
    Some(sc)
}

/// Objective value and `(X, y, S)` of the best iterate seen so far.
type Iterate = (f64, Vec<DMatrix<f64>>, Vec<f64>, Vec<DMatrix<f64>>);

pub fn solve_sdp(p: &SdpProblem, opts: &SdpOptions) -> SdpSolution {
    let sizes = &p.block_sizes;
    let m_all = p.constraints.len();
    // drop zero rows; a zero row with nonzero right-hand side is infeasible
    let canon: Vec<SparseSym> = p.constraints.iter().map(SparseSym::canonical).collect();
    let mut rows: Vec<usize> = Vec::new();
    for (i, a) in canon.iter().enumerate() {
        if a.is_zero() {
            if p.b[i].abs() > opts.tol {
                return trivial(p, SdpStatus::Infeasible);
            }
        } else {
            rows.push(i);
        }
    }
    let rows = independent_rows(&canon, rows);
    let ntot: usize = sizes.iter().sum();
    if ntot == 0 {
        return trivial(p, if rows.is_empty() { SdpStatus::Optimal } else { SdpStatus::Infeasible });
    }
    let a: Vec<&SparseSym> = rows.iter().map(|&i| &canon[i]).collect();
    let b: Vec<f64> = rows.iter().map(|&i| p.b[i]).collect();
    let m = a.len();
    let cdense = p.c.to_dense(sizes);
    let anorm = a.iter().map(|ai| ai.inner_sparse(ai).sqrt()).fold(0.0, f64::max);
    let bmax = b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let start = 10f64.max((ntot as f64).sqrt()).max(bmax).max(fro(&cdense)).max(anorm);
    let mut x = identity(sizes, start);
    let mut s = identity(sizes, start);
    let mut y = vec![0.0; m];
    let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let cnorm = fro(&cdense);
    let mut status = SdpStatus::Inaccurate;
    let mut iterations = 0;
    let mut best: Option<Iterate> = None;

    for it in 0..opts.max_iter {
        iterations = it;
        let ax: Vec<f64> = a.iter().map(|ai| ai.inner(&x)).collect();
        let rp: Vec<f64> = b.iter().zip(&ax).map(|(bi, v)| bi - v).collect();
        let mut rd = cdense.clone();
        for (ai, yi) in a.iter().zip(&y) {
            ai.add_to(-yi, &mut rd);
        }
        let rd = axpy(&rd, -1.0, &s);
        let mu = dot(&x, &s) / ntot as f64;
        let pobj = p.c.inner(&x);
        let dobj: f64 = b.iter().zip(&y).map(|(b, y)| b * y).sum();
        let pres = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + bnorm);
        let dres = fro(&rd) / (1.0 + cnorm);
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let merit = pres.max(dres).max(gap);
        if best.as_ref().is_none_or(|bst| merit < bst.0) {
            best = Some((merit, x.clone(), y.clone(), s.clone()));
        }
        if merit <= opts.inner_tol {
            status = SdpStatus::Optimal;
            break;
        }
        // certificates of infeasibility
        let aty_s = axpy(&cdense, -1.0, &rd);
        if dobj > 0.0 && fro(&aty_s) / dobj < opts.tol && pres > opts.tol && dobj > 1e8 * (1.0 + cnorm) {
            status = SdpStatus::Infeasible;
            break;
        }
        let ax_norm = ax.iter().map(|v| v * v).sum::<f64>().sqrt();
        if pobj < 0.0 && ax_norm / -pobj < opts.tol && dres > opts.tol && -pobj > 1e8 * (1.0 + bnorm) {
            status = SdpStatus::Unbounded;
            break;
        }
        let Some(lx) = chol_factors(&x) else { break };
        let Some(ls) = chol_factors(&s) else { break };
        let Some(sc) = nt_scaling(&lx, &s) else { break };

        // Schur complement M_ik = <A_i, W A_k W>
        let wak: Vec<Vec<DMatrix<f64>>> = a
            .iter()
            .map(|ak| {
                let dense = ak.to_dense(sizes);
                dense.iter().zip(&sc.w).map(|(d, w)| w * d * w).collect()
            })
            .collect();
        let mut mm = DMatrix::zeros(m, m);
        for i in 0..m {
            for k in i..m {
                let v = a[i].inner(&wak[k]);
                mm[(i, k)] = v;
                mm[(k, i)] = v;
            }
        }
        let scale = (0..m).map(|i| mm[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
        let chol = match Cholesky::new(mm.clone()) {
            Some(c) => c,
            None => {
                let mut reg = mm.clone();
                for i in 0..m {
                    reg[(i, i)] += 1e-13 * scale;
                }
                match Cholesky::new(reg) {
                    Some(c) => c,
                    None => break,
                }
            }
        };
        let wrdw: Vec<DMatrix<f64>> = rd.iter().zip(&sc.w).map(|(r, w)| w * r * w).collect();
        let a_wrdw: Vec<f64> = a.iter().map(|ai| ai.inner(&wrdw)).collect();

        let solve_dir = |k: &[DMatrix<f64>]| {
            // P_ij = K_ij / (v_i + v_j), R = G P G'
            let r: Vec<DMatrix<f64>> = k
                .iter()
                .zip(sc.v.iter().zip(&sc.g))
                .map(|(kk, (v, g))| {
                    let pm = DMatrix::from_fn(kk.nrows(), kk.ncols(), |i, j| kk[(i, j)] / (v[i] + v[j]));
                    sym(&(g * pm * g.transpose()))
                })
                .collect();
            let rhs = DVector::from_fn(m, |i, _| rp[i] - a[i].inner(&r) + a_wrdw[i]);
            let dy = chol.solve(&rhs);
            let mut ds = rd.clone();
            for (ai, di) in a.iter().zip(dy.iter()) {
                ai.add_to(-di, &mut ds);
            }
            let dx: Vec<DMatrix<f64>> =
                r.iter().zip(ds.iter().zip(&sc.w)).map(|(rr, (d, w))| sym(&(rr - w * d * w))).collect();
            (dx, dy, ds)
        };

        // predictor
        let k_aff: Vec<DMatrix<f64>> = sc.v.iter().map(|v| DMatrix::from_diagonal(&v.map(|x| -2.0 * x * x))).collect();
        let (dx_a, _dy_a, ds_a) = solve_dir(&k_aff);
        let ap = max_step(&lx, &dx_a);
        let ad = max_step(&ls, &ds_a);
        let mu_aff = dot(&axpy(&x, ap, &dx_a), &axpy(&s, ad, &ds_a)) / ntot as f64;
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

        // corrector
        let k_cor: Vec<DMatrix<f64>> = (0..sizes.len())
            .map(|bk| {
                let n = sizes[bk];
                let dxt = &sc.g_inv[bk] * &dx_a[bk] * sc.g_inv[bk].transpose();
                let dst = sc.g[bk].transpose() * &ds_a[bk] * &sc.g[bk];
                let cross = &dxt * &dst + &dst * &dxt;
                let v = &sc.v[bk];
                DMatrix::identity(n, n) * (2.0 * sigma * mu) - DMatrix::from_diagonal(&v.map(|x| 2.0 * x * x)) - cross
            })
            .collect();
        let (dx, dy, ds) = solve_dir(&k_cor);
        let frac = if merit < 1e-6 { 0.98 } else { 0.95 };
        let ap = (frac * max_step(&lx, &dx)).min(1.0);
        let ad = (frac * max_step(&ls, &ds)).min(1.0);
        x = axpy(&x, ap, &dx).iter().map(sym).collect();
        s = axpy(&s, ad, &ds).iter().map(sym).collect();
        for (yi, di) in y.iter_mut().zip(dy.iter()) {
            *yi += ad * di;
        }
        if ap < 1e-12 && ad < 1e-12 {
            break;
        }
    }
    if status == SdpStatus::Inaccurate {
        if let Some((_, bx, by, bs)) = best {
            x = bx;
            y = by;
            s = bs;
        }
    }
    let mut y_full = vec![0.0; m_all];
    for (k, &i) in rows.iter().enumerate() {
        y_full[i] = y[k];
    }
    let (pres, dres, gap, pobj, dobj) = residuals(p, &x, &y_full, &s);
    if status == SdpStatus::Inaccurate && pres <= opts.tol && dres <= opts.tol && gap <= opts.tol {
        status = SdpStatus::Optimal;
    }
    if status == SdpStatus::Optimal && (pres > opts.tol || dres > opts.tol || gap > opts.tol) {
        status = SdpStatus::Inaccurate;
    }
    SdpSolution {
        status,
        x,
        y: y_full,
        s,
        primal_objective: pobj,
        dual_objective: dobj,
        primal_residual: pres,
        dual_residual: dres,
        gap,
        iterations,
    }
}

fn trivial(p: &SdpProblem, status: SdpStatus) -> SdpSolution {
    let x = zeros(&p.block_sizes);
    let s = p.c.to_dense(&p.block_sizes);
    let y = vec![0.0; p.constraints.len()];
    let (pres, dres, gap, pobj, dobj) = residuals(p, &x, &y, &s);
    SdpSolution {
        status,
        x,
        y,
        s,
        primal_objective: pobj,
        dual_objective: dobj,
        primal_residual: pres,
        dual_residual: dres,
        gap,
        iterations: 0,
    }
}

/// Removes rows that are linear combinations of earlier ones (pivoted
/// Cholesky on the Gram matrix of the constraint matrices).
/// Moves `x` onto the affine set `A(X) = b` along the range of the
/// adjoint (the least-norm correction), repeated `sweeps` times. Dependent
/// rows are dropped first.
pub fn project_affine(p: &SdpProblem, x: &mut [DMatrix<f64>], sweeps: usize) {
    let canon: Vec<SparseSym> = p.constraints.iter().map(SparseSym::canonical).collect();
    let rows: Vec<usize> = (0..canon.len()).filter(|&i| !canon[i].is_zero()).collect();
    let rows = independent_rows(&canon, rows);
    let m = rows.len();
    if m == 0 {
        return;
    }
    let g = DMatrix::from_fn(m, m, |i, k| canon[rows[i]].inner_sparse(&canon[rows[k]]));
    let Some(chol) = g.cholesky() else { return };
    for _ in 0..sweeps {
        let r = DVector::from_fn(m, |i, _| p.b[rows[i]] - canon[rows[i]].inner(x));
        let z = chol.solve(&r);
        for (i, &row) in rows.iter().enumerate() {
            canon[row].add_to(z[i], x);
        }
    }
}

fn independent_rows(canon: &[SparseSym], rows: Vec<usize>) -> Vec<usize> {
    let m = rows.len();
    if m == 0 {
        return rows;
    }
    let mut g = DMatrix::zeros(m, m);
    for i in 0..m {
        for k in i..m {
            let v = canon[rows[i]].inner_sparse(&canon[rows[k]]);
            g[(i, k)] = v;
            g[(k, i)] = v;
        }
    }
    let maxd = (0..m).map(|i| g[(i, i)]).fold(0.0, f64::max);
    let mut keep = Vec::new();
    let mut l: Vec<DVector<f64>> = Vec::new();
    for i in 0..m {
        // residual of row i against the kept rows
        let mut col = DVector::from_fn(keep.len(), |k, _| g[(keep[k], i)]);
        for k in 0..keep.len() {
            let mut v = col[k];
            for j in 0..k {
                v -= l[k][j] * col[j];
            }
            col[k] = v / l[k][k];
        }
        let d = g[(i, i)] - col.iter().map(|c| c * c).sum::<f64>();
        if d > 1e-12 * maxd {
            let mut row = col.clone().resize_vertically(keep.len() + 1, 0.0);
            row[keep.len()] = d.sqrt();
            l.push(row);
            keep.push(i);
        }
    }
    keep.into_iter().map(|i| rows[i]).collect()
}
