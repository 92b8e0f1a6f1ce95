//! Dense real QZ algorithm for the generalized eigenvalues of `(K, M)`.
//!
//! Only eigenvalues are computed, so the transformations are restricted to
//! the active diagonal window. Zeros on the diagonal of the triangular
//! factor are chased to the bottom of the window and deflated as infinite
//! eigenvalues.

use crate::assembly::SparseMatrix;
use crate::{Error, Result};

pub const QZ_MAX_DIM: usize = 2000;

#[derive(Clone, Debug, Default)]
pub struct QzSpectrum {
    /// Real finite eigenvalues, ascending. Complex values whose imaginary
    /// part is below `1e-6 max(1, |re|)` are counted as real.
    pub finite: Vec<f64>,
    /// Remaining finite eigenvalues as `(re, im)`, both members of each pair.
    pub complex: Vec<(f64, f64)>,
    /// `|β| ≤ 1e-12 ‖M‖` with `α` not small.
    pub infinite: usize,
    /// Both `α` and `β` negligible: the pencil is (numerically) singular.
    pub indeterminate: usize,
}

struct Dense {
    n: usize,
    v: Vec<f64>,
}

impl Dense {
    fn from_sparse(s: &SparseMatrix) -> Self {
        let n = s.nrows();
        let mut v = vec![0.0; n * n];
        for (r, c, x) in s.triplets() {
            v[r * n + c] = x;
        }
        Dense { n, v }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.v[i * self.n + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, x: f64) {
        self.v[i * self.n + j] = x;
    }

    fn frobenius(&self) -> f64 {
        self.v.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// rows i, j ← (c·ri + s·rj, −s·ri + c·rj) on columns `cols`.
    fn rot_rows(&mut self, i: usize, j: usize, c: f64, s: f64, cols: std::ops::RangeInclusive<usize>) {
        for k in cols {
            let (x, y) = (self.at(i, k), self.at(j, k));
            self.set(i, k, c * x + s * y);
            self.set(j, k, -s * x + c * y);
        }
    }

    /// cols i, j ← (c·ci + s·cj, −s·ci + c·cj) on rows `rows`.
    fn rot_cols(&mut self, i: usize, j: usize, c: f64, s: f64, rows: std::ops::RangeInclusive<usize>) {
        for k in rows {
            let (x, y) = (self.at(k, i), self.at(k, j));
            self.set(k, i, c * x + s * y);
            self.set(k, j, -s * x + c * y);
        }
    }
}

/// `(c, s)` with `−s·a + c·b = 0`.
fn givens(a: f64, b: f64) -> (f64, f64) {
    let r = a.hypot(b);
    if r == 0.0 {
        (1.0, 0.0)
    } else {
        (a / r, b / r)
    }
}

/// Column rotation `(c, s)` that zeroes `x` in a row `(…, x, y, …)` where
/// `x` sits in the first rotated column.
fn col_givens(x: f64, y: f64) -> (f64, f64) {
    let r = x.hypot(y);
    if r == 0.0 {
        (1.0, 0.0)
    } else {
        (y / r, -x / r)
    }
}

/// All generalized eigenvalues of the pencil `(K, M)`.
pub fn dense_qz(k: &SparseMatrix, m: &SparseMatrix) -> Result<QzSpectrum> {
    let n = k.nrows();
    if k.ncols() != n || m.nrows() != n || m.ncols() != n {
        return Err(Error::invalid("QZ needs square matrices of equal size"));
    }
    if n > QZ_MAX_DIM {
        return Err(Error::invalid(format!("dense QZ is limited to dimension {QZ_MAX_DIM}, got {n}")));
    }
    let mut a = Dense::from_sparse(k);
    let mut b = Dense::from_sparse(m);
    let norm_a = a.frobenius();
    let norm_b = b.frobenius();
    if n == 0 {
        return Ok(QzSpectrum::default());
    }

    triangularize(&mut a, &mut b);
    hessenberg_triangular(&mut a, &mut b);
    let pairs = qz_iterate(&mut a, &mut b, norm_a, norm_b)?;

    let mut out = QzSpectrum::default();
    for (re, im, beta) in pairs {
        let alpha = re.hypot(im);
        if beta.abs() <= 1e-12 * norm_b {
            if alpha <= 1e-12 * norm_a {
                out.indeterminate += 1;
            } else {
                out.infinite += 1;
            }
            continue;
        }
        let (lr, li) = (re / beta, im / beta);
        if li.abs() <= 1e-6 * lr.abs().max(1.0) {
            out.finite.push(lr);
        } else {
            out.complex.push((lr, li));
        }
    }
    out.finite.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}

/// Householder QR of `b`, applying the reflections to `a` as well.
fn triangularize(a: &mut Dense, b: &mut Dense) {
    let n = a.n;
    for j in 0..n.saturating_sub(1) {
        let norm: f64 = (j..n).map(|i| b.at(i, j).powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if b.at(j, j) > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..n).map(|i| b.at(i, j)).collect();
        v[0] -= alpha;
        let vn2: f64 = v.iter().map(|x| x * x).sum();
        if vn2 == 0.0 {
            continue;
        }
        for mat in [&mut *b, &mut *a] {
            for c in 0..n {
                let d: f64 = v.iter().enumerate().map(|(t, vt)| vt * mat.at(j + t, c)).sum();
                let f = 2.0 * d / vn2;
                if f != 0.0 {
                    for (t, vt) in v.iter().enumerate() {
                        let x = mat.at(j + t, c) - f * vt;
                        mat.set(j + t, c, x);
                    }
                }
            }
        }
        b.set(j, j, alpha);
        for i in j + 1..n {
            b.set(i, j, 0.0);
        }
    }
}

fn hessenberg_triangular(a: &mut Dense, b: &mut Dense) {
    let n = a.n;
    if n < 3 {
        return;
    }
    for j in 0..n - 2 {
        for i in (j + 2..n).rev() {
            let (c, s) = givens(a.at(i - 1, j), a.at(i, j));
            a.rot_rows(i - 1, i, c, s, j..=n - 1);
            b.rot_rows(i - 1, i, c, s, i - 1..=n - 1);
            a.set(i, j, 0.0);
            let (c, s) = col_givens(b.at(i, i - 1), b.at(i, i));
            a.rot_cols(i - 1, i, c, s, 0..=n - 1);
            b.rot_cols(i - 1, i, c, s, 0..=i);
            b.set(i, i - 1, 0.0);
        }
    }
}

/// Returns `(Re α, Im α, β)` for every eigenvalue.
fn qz_iterate(a: &mut Dense, b: &mut Dense, norm_a: f64, norm_b: f64) -> Result<Vec<(f64, f64, f64)>> {
    let n = a.n;
    let eps = f64::EPSILON;
    let small_a = eps * norm_a;
    let small_b = eps * norm_b;
    let mut out = Vec::with_capacity(n);
    let mut hi = n as isize - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let max_total = 40 * n + 100;
    while hi >= 0 {
        let h = hi as usize;
        if h == 0 {
            out.push((a.at(0, 0), 0.0, b.at(0, 0)));
            break;
        }
        let mut l = h;
        while l > 0 {
            let sub = a.at(l, l - 1).abs();
            let diag = a.at(l - 1, l - 1).abs() + a.at(l, l).abs();
            if sub <= small_a || sub <= eps * diag {
                a.set(l, l - 1, 0.0);
                break;
            }
            l -= 1;
        }
        if l == h {
            out.push((a.at(h, h), 0.0, b.at(h, h)));
            hi -= 1;
            iter = 0;
            continue;
        }
        if let Some(z) = (l..=h).find(|&k| b.at(k, k).abs() <= small_b) {
            b.set(z, z, 0.0);
            chase_infinite(a, b, z, l, h);
            out.push((a.at(h, h), 0.0, 0.0));
            hi -= 1;
            iter = 0;
            continue;
        }
        if h == l + 1 {
            out.extend(two_by_two(a, b, l));
            hi = l as isize - 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_total {
            return Err(Error::NotConverged {
                message: format!("QZ iteration stalled with {} eigenvalues left", h + 1),
                residuals: vec![a.at(h, h - 1).abs()],
            });
        }
        francis_step(a, b, l, h, iter % 10 == 0);
    }
    Ok(out)
}

/// Moves a zero at `b[z][z]` to `b[h][h]` and zeroes `a[h][h−1]`.
fn chase_infinite(a: &mut Dense, b: &mut Dense, z: usize, l: usize, h: usize) {
    for j in z..h {
        let (c, s) = givens(b.at(j, j + 1), b.at(j + 1, j + 1));
        let first = if j > l { j - 1 } else { l };
        a.rot_rows(j, j + 1, c, s, first..=h);
        b.rot_rows(j, j + 1, c, s, j..=h);
        b.set(j + 1, j + 1, 0.0);
        if j > l {
            let (c, s) = col_givens(a.at(j + 1, j - 1), a.at(j + 1, j));
            a.rot_cols(j - 1, j, c, s, l..=(j + 1).min(h));
            b.rot_cols(j - 1, j, c, s, l..=j);
            a.set(j + 1, j - 1, 0.0);
        }
    }
    let (c, s) = col_givens(a.at(h, h - 1), a.at(h, h));
    a.rot_cols(h - 1, h, c, s, l..=h);
    b.rot_cols(h - 1, h, c, s, l..=h);
    a.set(h, h - 1, 0.0);
}

/// Eigenvalues of the 2×2 block at `(l, l+1)` with nonsingular `b` block.
fn two_by_two(a: &mut Dense, b: &mut Dense, l: usize) -> Vec<(f64, f64, f64)> {
    let h = l + 1;
    let (a00, a01, a10, a11) = (a.at(l, l), a.at(l, h), a.at(h, l), a.at(h, h));
    let (b00, b01, b11) = (b.at(l, l), b.at(l, h), b.at(h, h));
    let (i00, i01, i11) = (1.0 / b00, -b01 / (b00 * b11), 1.0 / b11);
    let c00 = i00 * a00 + i01 * a10;
    let c01 = i00 * a01 + i01 * a11;
    let c10 = i11 * a10;
    let c11 = i11 * a11;
    let half = 0.5 * (c00 - c11);
    let disc = half * half + c01 * c10;
    let mean = 0.5 * (c00 + c11);
    if disc < 0.0 {
        let im = (-disc).sqrt();
        return vec![(mean, im, 1.0), (mean, -im, 1.0)];
    }
    let root = disc.sqrt();
    let lam = if mean >= 0.0 { mean + root } else { mean - root };
    // Standardize: rotate so that the eigenvector of `lam` is the first
    // column, then restore triangular `b`.
    let e = [[a00 - lam * b00, a01 - lam * b01], [a10, a11 - lam * b11]];
    let x0 = [e[0][1], -e[0][0]];
    let x1 = [e[1][1], -e[1][0]];
    let x = if x0[0].hypot(x0[1]) >= x1[0].hypot(x1[1]) { x0 } else { x1 };
    let nx = x[0].hypot(x[1]);
    if nx == 0.0 {
        // A − λB vanishes: both eigenvalues equal λ.
        return vec![(lam, 0.0, 1.0), (lam, 0.0, 1.0)];
    }
    let (c, s) = (x[0] / nx, x[1] / nx);
    // columns: col_l' = c·col_l + s·col_h  (first column becomes Z e1 = x)
    a.rot_cols(l, h, c, s, l..=h);
    b.rot_cols(l, h, c, s, l..=h);
    let (c, s) = givens(b.at(l, l), b.at(h, l));
    a.rot_rows(l, h, c, s, l..=h);
    b.rot_rows(l, h, c, s, l..=h);
    vec![(a.at(l, l), 0.0, b.at(l, l)), (a.at(h, h), 0.0, b.at(h, h))]
}

fn francis_step(a: &mut Dense, b: &mut Dense, l: usize, h: usize, exceptional: bool) {
    // Leading entries of A B⁻¹.
    let (i00, i11) = (1.0 / b.at(l, l), 1.0 / b.at(l + 1, l + 1));
    let i01 = -b.at(l, l + 1) * i00 * i11;
    let m00 = a.at(l, l) * i00;
    let m10 = a.at(l + 1, l) * i00;
    let m01 = a.at(l, l) * i01 + a.at(l, l + 1) * i11;
    let m11 = a.at(l + 1, l) * i01 + a.at(l + 1, l + 1) * i11;
    let m21 = a.at(l + 2, l + 1) * i11;

    // Trailing 2×2 of A B⁻¹ from the inverse of the trailing 3×3 of B.
    let (p, q, r) = (h - 2, h - 1, h);
    let (t00, t01, t02, t11, t12, t22) = (b.at(p, p), b.at(p, q), b.at(p, r), b.at(q, q), b.at(q, r), b.at(r, r));
    let j11 = 1.0 / t11;
    let j22 = 1.0 / t22;
    let j01 = -t01 / (t00 * t11);
    let j12 = -t12 / (t11 * t22);
    let j02 = (t01 * t12 - t02 * t11) / (t00 * t11 * t22);
    let a_qp = if p >= l { a.at(q, p) } else { 0.0 };
    let mqq = a_qp * j01 + a.at(q, q) * j11;
    let mqr = a_qp * j02 + a.at(q, q) * j12 + a.at(q, r) * j22;
    let mrq = a.at(r, q) * j11;
    let mrr = a.at(r, q) * j12 + a.at(r, r) * j22;
    let (s, t) = if exceptional {
        let w = mrq.abs() + (a_qp * j11).abs();
        (1.5 * w, w * w)
    } else {
        (mqq + mrr, mqq * mrr - mqr * mrq)
    };
    let mut x = m00 * m00 + m01 * m10 - s * m00 + t;
    let mut y = m10 * (m00 + m11 - s);
    let mut z = m10 * m21;

    for k in l..h {
        if k > l {
            x = a.at(k, k - 1);
            y = a.at(k + 1, k - 1);
            z = if k + 2 <= h { a.at(k + 2, k - 1) } else { 0.0 };
        }
        let first = if k > l { k - 1 } else { l };
        let has3 = k + 2 <= h;
        if has3 {
            let (c, sn) = givens(y, z);
            a.rot_rows(k + 1, k + 2, c, sn, first..=h);
            b.rot_rows(k + 1, k + 2, c, sn, k..=h);
            if k > l {
                a.set(k + 2, k - 1, 0.0);
            }
            y = c * y + sn * z;
        }
        let (c, sn) = givens(x, y);
        a.rot_rows(k, k + 1, c, sn, first..=h);
        b.rot_rows(k, k + 1, c, sn, k..=h);
        if k > l {
            a.set(k + 1, k - 1, 0.0);
        }
        let arow = (k + 3).min(h);
        if has3 {
            let (c, sn) = col_givens(b.at(k + 2, k + 1), b.at(k + 2, k + 2));
            a.rot_cols(k + 1, k + 2, c, sn, l..=arow);
            b.rot_cols(k + 1, k + 2, c, sn, l..=k + 2);
            b.set(k + 2, k + 1, 0.0);
        }
        let (c, sn) = col_givens(b.at(k + 1, k), b.at(k + 1, k + 1));
        a.rot_cols(k, k + 1, c, sn, l..=arow);
        b.rot_cols(k, k + 1, c, sn, l..=(k + 2).min(h));
        b.set(k + 1, k, 0.0);
    }
}
