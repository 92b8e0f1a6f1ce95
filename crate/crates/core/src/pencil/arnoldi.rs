//! Implicitly restarted Arnoldi iteration for the eigenvalues of largest
//! magnitude of a real linear operator, with exact shifts.

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{dot, norm};
use crate::{Error, Result};

/// Approximate eigenpair of the operator. Complex pairs are reported once,
/// with `vector` the real part and `vector_im` the imaginary part of the
/// Ritz vector.
#[derive(Clone, Debug)]
pub(crate) struct Ritz {
    pub re: f64,
    pub im: f64,
    pub vector: Vec<f64>,
    pub vector_im: Option<Vec<f64>>,
}

pub(crate) struct ArnoldiConfig {
    pub nev: usize,
    pub ncv: usize,
    pub tol: f64,
    pub max_restarts: usize,
    pub seed: u64,
}

struct Factorization {
    n: usize,
    v: Vec<Vec<f64>>,
    /// Row-major `(m+1) × m` upper Hessenberg matrix.
    h: Vec<Vec<f64>>,
    rng: ChaCha8Rng,
}

impl Factorization {
    /// Random unit vector orthogonal to `v[..k]`, or zero if they span the
    /// whole space.
    fn random_orthogonal(&mut self, k: usize) -> Vec<f64> {
        if k >= self.n {
            return vec![0.0; self.n];
        }
        for _ in 0..5 {
            let mut w: Vec<f64> = (0..self.n).map(|_| self.rng.gen_range(-1.0..1.0)).collect();
            for _ in 0..2 {
                for j in 0..k {
                    let c = dot(&self.v[j], &w);
                    axpy(-c, &self.v[j], &mut w);
                }
            }
            let nw = norm(&w);
            if nw > 1e-8 {
                w.iter_mut().for_each(|x| *x /= nw);
                return w;
            }
        }
        vec![0.0; self.n]
    }

    /// Extends the factorization from `k` to `m` columns.
    fn extend<F>(&mut self, op: &mut F, k: usize, m: usize) -> Result<()>
    where
        F: FnMut(&[f64]) -> Result<Vec<f64>>,
    {
        for j in k..m {
            let mut w = op(&self.v[j])?;
            let wnorm = norm(&w);
            let mut coef = vec![0.0; j + 1];
            // classical Gram-Schmidt with one reorthogonalization
            for _ in 0..2 {
                let c: Vec<f64> = (0..=j).map(|i| dot(&self.v[i], &w)).collect();
                for i in 0..=j {
                    axpy(-c[i], &self.v[i], &mut w);
                    coef[i] += c[i];
                }
            }
            for i in 0..=j {
                self.h[i][j] = coef[i];
            }
            let beta = norm(&w);
            if beta <= 1e-12 * wnorm.max(f64::MIN_POSITIVE) || beta == 0.0 {
                self.h[j + 1][j] = 0.0;
                self.v[j + 1] = self.random_orthogonal(j + 1);
            } else {
                self.h[j + 1][j] = beta;
                w.iter_mut().for_each(|x| *x /= beta);
                self.v[j + 1] = w;
            }
        }
        Ok(())
    }
}

/// Computes the `nev` eigenvalues of largest magnitude of `op`.
pub(crate) fn largest_magnitude<F>(n: usize, op: &mut F, cfg: &ArnoldiConfig) -> Result<Vec<Ritz>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    if n == 0 {
        return Ok(Vec::new());
    }
    let m = cfg.ncv.min(n).max(1);
    let nev = cfg.nev.min(if m == n { n } else { m - 1 }).max(1);
    let mut fac = Factorization { n, v: vec![vec![0.0; n]; m + 1], h: vec![vec![0.0; m]; m + 1], rng: ChaCha8Rng::seed_from_u64(cfg.seed) };

    let mut start = Vec::new();
    for _ in 0..5 {
        let r: Vec<f64> = (0..n).map(|_| fac.rng.gen_range(-1.0..1.0)).collect();
        start = op(&r)?;
        if norm(&start) > 0.0 {
            break;
        }
    }
    let s = norm(&start);
    if s == 0.0 {
        // The operator vanishes identically.
        return Ok((0..nev)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                Ritz { re: 0.0, im: 0.0, vector: e, vector_im: None }
            })
            .collect());
    }
    fac.v[0] = start.iter().map(|x| x / s).collect();
    fac.extend(op, 0, m)?;

    let mut restarts = 0;
    loop {
        let (vals, vecs) = hessenberg_eigen(&fac.h, m)?;
        let order = sort_by_magnitude(&vals);
        let beta = fac.h[m][m - 1];
        let estimate = |i: usize| -> f64 {
            let y = &vecs[i];
            let last = (y[m - 1].0.powi(2) + y[m - 1].1.powi(2)).sqrt();
            beta.abs() * last
        };
        let scale = vals.iter().map(|v| (v.0 * v.0 + v.1 * v.1).sqrt()).fold(0.0, f64::max);
        let converged = |i: usize| {
            let mag = (vals[i].0.powi(2) + vals[i].1.powi(2)).sqrt();
            estimate(i) <= cfg.tol * mag.max(1e-3 * scale).max(f64::MIN_POSITIVE)
        };
        let nconv = order.iter().take(nev).filter(|&&i| converged(i)).count();
        if nconv >= nev || m == n || restarts >= cfg.max_restarts {
            if nconv < nev && m < n {
                let residuals: Vec<f64> = order.iter().take(nev).map(|&i| estimate(i)).collect();
                return Err(Error::NotConverged {
                    message: format!("{nconv} of {nev} Ritz values converged after {restarts} restarts"),
                    residuals,
                });
            }
            let mut out = Vec::new();
            let mut i = 0;
            while out.len() < nev && i < order.len() {
                let idx = order[i];
                i += 1;
                let (re, im) = vals[idx];
                if im < 0.0 {
                    continue;
                }
                let y = &vecs[idx];
                let x_re = combine(&fac.v, m, |j| y[j].0);
                let x_im = (im != 0.0).then(|| combine(&fac.v, m, |j| y[j].1));
                out.push(Ritz { re, im, vector: x_re, vector_im: x_im });
            }
            return Ok(out);
        }
        restarts += 1;

        // Keep nev plus some converged values, without splitting a
        // conjugate pair.
        let mut k = (nev + nconv.min((m - nev) / 2)).min(m - 1);
        if k > 0 && k < m && vals[order[k - 1]].1 > 0.0 && vals[order[k]].1 < 0.0 {
            k += 1;
        }
        if k >= m {
            k = m - 1;
            if vals[order[k - 1]].1 > 0.0 {
                k -= 1;
            }
        }
        let k = k.max(1);
        let mut hm: Vec<Vec<f64>> = fac.h[..m].iter().map(|r| r.clone()).collect();
        let mut q = identity(m);
        for &idx in &order[k..] {
            let (re, im) = vals[idx];
            if im == 0.0 {
                single_shift(&mut hm, &mut q, re);
            } else if im > 0.0 {
                double_shift(&mut hm, &mut q, re, im)?;
            }
        }
        // f_k = V_m q_k h+_{k,k-1} + β v_m Q_{m-1,k-1}
        let mut f = combine(&fac.v, m, |j| q[j][k] * hm[k][k - 1]);
        axpy(beta * q[m - 1][k - 1], &fac.v[m].clone(), &mut f);
        let newv: Vec<Vec<f64>> = (0..k).map(|c| combine(&fac.v, m, |j| q[j][c])).collect();
        for (c, v) in newv.into_iter().enumerate() {
            fac.v[c] = v;
        }
        for r in 0..=m {
            for c in 0..m {
                fac.h[r][c] = if r < k && c < k { hm[r][c] } else { 0.0 };
            }
        }
        // Reorthogonalize the new residual against the kept basis.
        for _ in 0..2 {
            for j in 0..k {
                let c = dot(&fac.v[j], &f);
                axpy(-c, &fac.v[j], &mut f);
            }
        }
        let bk = norm(&f);
        let scale_h = hm[k - 1][k - 1].abs().max(1e-300);
        if bk <= 1e-14 * scale_h {
            fac.h[k][k - 1] = 0.0;
            fac.v[k] = fac.random_orthogonal(k);
        } else {
            fac.h[k][k - 1] = bk;
            fac.v[k] = f.iter().map(|x| x / bk).collect();
        }
        fac.extend(op, k, m)?;
    }
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn combine(v: &[Vec<f64>], m: usize, coef: impl Fn(usize) -> f64) -> Vec<f64> {
    let mut out = vec![0.0; v[0].len()];
    for j in 0..m {
        let c = coef(j);
        if c != 0.0 {
            axpy(c, &v[j], &mut out);
        }
    }
    out
}

fn identity(m: usize) -> Vec<Vec<f64>> {
    (0..m).map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

/// Eigenvalues and unit eigenvectors of the leading `m × m` block.
#[allow(clippy::type_complexity)]
fn hessenberg_eigen(h: &[Vec<f64>], m: usize) -> Result<(Vec<(f64, f64)>, Vec<Vec<(f64, f64)>>)> {
    let a = Mat::<f64>::from_fn(m, m, |i, j| h[i][j]);
    let e = a.eigen().map_err(|_| Error::NotConverged { message: "Hessenberg eigensolver failed".into(), residuals: vec![] })?;
    let s = e.S().column_vector();
    let u = e.U();
    let vals: Vec<(f64, f64)> = (0..m).map(|i| (s[i].re, s[i].im)).collect();
    let vecs = (0..m)
        .map(|c| {
            let col: Vec<(f64, f64)> = (0..m).map(|r| (u[(r, c)].re, u[(r, c)].im)).collect();
            let nrm = col.iter().map(|z| z.0 * z.0 + z.1 * z.1).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            col.into_iter().map(|z| (z.0 / nrm, z.1 / nrm)).collect()
        })
        .collect();
    Ok((vals, vecs))
}

/// Indices sorted by decreasing magnitude; conjugate pairs are adjacent
/// with the positive imaginary part first.
pub(crate) fn sort_by_magnitude(vals: &[(f64, f64)]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    let mag = |i: usize| (vals[i].0 * vals[i].0 + vals[i].1 * vals[i].1).sqrt();
    idx.sort_by(|&a, &b| {
        mag(b)
            .partial_cmp(&mag(a))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(vals[b].0.partial_cmp(&vals[a].0).unwrap_or(std::cmp::Ordering::Equal))
            .then(vals[b].1.partial_cmp(&vals[a].1).unwrap_or(std::cmp::Ordering::Equal))
    });
    idx
}

fn givens(a: f64, b: f64) -> (f64, f64) {
    let r = a.hypot(b);
    if r == 0.0 {
        (1.0, 0.0)
    } else {
        (a / r, b / r)
    }
}

/// One explicit QR step `H − μI = QR`, `H ← RQ + μI`, accumulating `Q`.
fn single_shift(h: &mut [Vec<f64>], q: &mut [Vec<f64>], mu: f64) {
    let m = h.len();
    for i in 0..m {
        h[i][i] -= mu;
    }
    let mut rots = Vec::with_capacity(m.saturating_sub(1));
    for i in 0..m.saturating_sub(1) {
        let (c, s) = givens(h[i][i], h[i + 1][i]);
        for j in i..m {
            let (x, y) = (h[i][j], h[i + 1][j]);
            h[i][j] = c * x + s * y;
            h[i + 1][j] = -s * x + c * y;
        }
        h[i + 1][i] = 0.0;
        rots.push((c, s));
    }
    for (i, &(c, s)) in rots.iter().enumerate() {
        for r in 0..(i + 2).min(m) {
            let (x, y) = (h[r][i], h[r][i + 1]);
            h[r][i] = c * x + s * y;
            h[r][i + 1] = -s * x + c * y;
        }
        for row in q.iter_mut() {
            let (x, y) = (row[i], row[i + 1]);
            row[i] = c * x + s * y;
            row[i + 1] = -s * x + c * y;
        }
    }
    for i in 0..m {
        h[i][i] += mu;
    }
}

/// Double shift with the pair `re ± i·im`: `Q` from the QR factorization
/// of `H² − 2re·H + (re² + im²) I`, then `H ← Qᵀ H Q`.
fn double_shift(h: &mut [Vec<f64>], q: &mut [Vec<f64>], re: f64, im: f64) -> Result<()> {
    let m = h.len();
    let hm = Mat::<f64>::from_fn(m, m, |i, j| h[i][j]);
    let mut p = &hm * &hm;
    for i in 0..m {
        for j in 0..m {
            p[(i, j)] -= 2.0 * re * hm[(i, j)];
        }
        p[(i, i)] += re * re + im * im;
    }
    let qq = p.qr().compute_Q();
    let hn = qq.transpose() * &hm * &qq;
    for i in 0..m {
        for j in 0..m {
            h[i][j] = if i > j + 1 { 0.0 } else { hn[(i, j)] };
        }
    }
    let qm = Mat::<f64>::from_fn(m, m, |i, j| q[i][j]);
    let qn = qm * qq;
    for i in 0..m {
        for j in 0..m {
            q[i][j] = qn[(i, j)];
        }
    }
    Ok(())
}
