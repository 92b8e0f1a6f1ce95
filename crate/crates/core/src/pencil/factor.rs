use faer::sparse::linalg::solvers::Lu;
use faer::MatMut;

use crate::assembly::SparseMatrix;
use crate::{Error, Result};

/// Solves reaching this growth factor `‖x‖‖A‖/‖b‖` are treated as a sign
/// of a singular matrix.
const SINGULAR_GROWTH: f64 = 1e12;

/// Rows or columns with more entries than this (and than `10 √n`) are
/// split off and handled by a dense Schur complement, since a single dense
/// row makes the symbolic LU structure of the whole matrix dense.
const DENSE_MIN: usize = 64;
const MAX_BORDER: usize = 8;

/// Sparse LU factorization with partial pivoting.
pub struct LuFactor {
    n: usize,
    inner: Inner,
}

enum Inner {
    Plain(Lu<usize, f64>),
    Bordered(Box<Bordered>),
}

/// `A = [A11, A12; A21, A22]` with the few dense rows and columns last.
/// When `A11` is singular a diagonal entry `α` is added at `pin`, and the
/// resulting rank-one change of `A` is undone by Sherman–Morrison.
struct Bordered {
    inner: Lu<usize, f64>,
    /// Positions of the sparse unknowns, then of the border unknowns.
    sparse: Vec<usize>,
    border: Vec<usize>,
    a21: SparseMatrix,
    /// `A11⁻¹ A12`, one column per border unknown.
    y: Vec<Vec<f64>>,
    /// LU of the border Schur complement `A22 − A21 A11⁻¹ A12`.
    schur: faer::linalg::solvers::PartialPivLu<f64>,
    pin: Option<Pin>,
}

struct Pin {
    index: usize,
    alpha: f64,
    /// `Â⁻¹ e_pin` for the pinned matrix `Â`.
    w: Vec<f64>,
    denom: f64,
}

impl std::fmt::Debug for LuFactor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LuFactor").field("n", &self.n).finish()
    }
}

/// Factorizes a square sparse matrix. Numerical singularity is detected by
/// solving with a fixed probe right-hand side; the reported index is the
/// unknown with the largest response.
pub fn factorize(a: &SparseMatrix) -> Result<LuFactor> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::invalid("cannot factorize a non-square matrix"));
    }
    if n == 0 {
        return Err(Error::invalid("cannot factorize an empty matrix"));
    }
    let border = dense_lines(a);
    let inner = if border.is_empty() || border.len() > MAX_BORDER || border.len() == n {
        Inner::Plain(sparse_lu(a)?)
    } else {
        Inner::Bordered(Box::new(Bordered::new(a, border)?))
    };
    let f = LuFactor { n, inner };
    check_growth(a, |b| f.solve(b))?;
    Ok(f)
}

fn sparse_lu(a: &SparseMatrix) -> Result<Lu<usize, f64>> {
    a.to_faer()?.sp_lu().map_err(|_| Error::Singular { index: structurally_empty(a), growth: f64::INFINITY })
}

fn probe(n: usize) -> Vec<f64> {
    (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.618_033_988_749).fract()).collect()
}

fn check_growth(a: &SparseMatrix, solve: impl Fn(&[f64]) -> Vec<f64>) -> Result<()> {
    let b = probe(a.nrows());
    let x = solve(&b);
    if let Some(bad) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::Singular { index: bad, growth: f64::INFINITY });
    }
    let worst = argmax_abs(&x);
    let bnorm = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let growth = x[worst].abs() * a.norm_inf() / bnorm;
    if growth > SINGULAR_GROWTH {
        return Err(Error::Singular { index: worst, growth });
    }
    Ok(())
}

fn argmax_abs(x: &[f64]) -> usize {
    (0..x.len())
        .max_by(|&i, &j| x[i].abs().partial_cmp(&x[j].abs()).unwrap_or(std::cmp::Ordering::Greater))
        .unwrap_or(0)
}

fn plain_solve(lu: &Lu<usize, f64>, x: &mut [f64]) {
    use faer::linalg::solvers::SolveCore;
    let n = x.len();
    lu.solve_in_place_with_conj(faer::Conj::No, MatMut::from_column_major_slice_mut(x, n, 1));
}

/// Indices whose row or column is dense.
fn dense_lines(a: &SparseMatrix) -> Vec<usize> {
    let n = a.nrows();
    let limit = DENSE_MIN.max((10.0 * (n as f64).sqrt()) as usize);
    let mut count = vec![0usize; n];
    for r in 0..n {
        for &c in a.row(r).0 {
            count[c] += 1;
        }
    }
    (0..n).filter(|&i| a.row(i).0.len() > limit || count[i] > limit).collect()
}

fn structurally_empty(a: &SparseMatrix) -> usize {
    (0..a.nrows()).find(|&r| a.row(r).0.is_empty()).unwrap_or(0)
}

impl Bordered {
    fn new(a: &SparseMatrix, border: Vec<usize>) -> Result<Self> {
        let n = a.nrows();
        let mut is_border = vec![false; n];
        border.iter().for_each(|&i| is_border[i] = true);
        let sparse: Vec<usize> = (0..n).filter(|&i| !is_border[i]).collect();
        let a11 = a.select(&sparse, &sparse);
        let a12 = a.select(&sparse, &border);
        let a21 = a.select(&border, &sparse);
        let a22 = a.select(&border, &border);

        let scale = a11.max_abs().max(f64::MIN_POSITIVE);
        let m = a11.nrows();
        let lu = sparse_lu(&a11).ok();
        let response = lu.as_ref().map(|lu| {
            let mut x = probe(m);
            plain_solve(lu, &mut x);
            x
        });
        let growth = |x: &[f64]| x.iter().fold(0.0f64, |g, v| g.max(v.abs())) * a11.norm_inf() / 1.5;
        let (inner, pin_index) = match (lu, response) {
            (Some(lu), Some(x)) if x.iter().all(|v| v.is_finite()) && growth(&x) <= SINGULAR_GROWTH => (lu, None),
            (_, response) => {
                // A11 is singular. The probe response, or one step of inverse
                // iteration with a small shift, points along its null
                // direction; pin the largest entry.
                let x = match response {
                    Some(x) if x.iter().all(|v| v.is_finite()) => x,
                    _ => {
                        let shifted = a11.add(&SparseMatrix::identity(m), 1e-8 * scale)?;
                        let mut x = probe(m);
                        plain_solve(&sparse_lu(&shifted)?, &mut x);
                        x
                    }
                };
                let j = argmax_abs(&x);
                let pinned = a11.add(&SparseMatrix::from_triplets(m, m, vec![(j, j, scale)])?, 1.0)?;
                (sparse_lu(&pinned)?, Some(j))
            }
        };
        let alpha = scale;

        let nb = border.len();
        let mut y = Vec::with_capacity(nb);
        for k in 0..nb {
            let mut col: Vec<f64> = (0..sparse.len()).map(|i| a12.get(i, k)).collect();
            plain_solve(&inner, &mut col);
            y.push(col);
        }
        let s = faer::Mat::<f64>::from_fn(nb, nb, |i, k| {
            let (cols, vals) = a21.row(i);
            a22.get(i, k) - cols.iter().zip(vals).map(|(&c, &v)| v * y[k][c]).sum::<f64>()
        });
        let schur = s.partial_piv_lu();
        let mut out = Bordered { inner, sparse, border, a21, y, schur, pin: None };
        if let Some(j) = pin_index {
            let index = out.sparse[j];
            let mut w = vec![0.0; n];
            w[index] = 1.0;
            out.solve_pinned(&mut w);
            let denom = 1.0 - alpha * w[index];
            out.pin = Some(Pin { index, alpha, w, denom });
        }
        Ok(out)
    }

    /// Solves with the pinned matrix `Â = A + α e_pin e_pinᵀ`.
    fn solve_pinned(&self, x: &mut [f64]) {
        use faer::linalg::solvers::Solve;
        let mut x1: Vec<f64> = self.sparse.iter().map(|&i| x[i]).collect();
        plain_solve(&self.inner, &mut x1);
        let nb = self.border.len();
        let mut rhs = faer::Mat::<f64>::from_fn(nb, 1, |i, _| {
            let (cols, vals) = self.a21.row(i);
            x[self.border[i]] - cols.iter().zip(vals).map(|(&c, &v)| v * x1[c]).sum::<f64>()
        });
        self.schur.solve_in_place(rhs.as_mut());
        for k in 0..nb {
            let xi = rhs[(k, 0)];
            x1.iter_mut().zip(&self.y[k]).for_each(|(a, b)| *a -= xi * b);
            x[self.border[k]] = xi;
        }
        for (&i, v) in self.sparse.iter().zip(x1) {
            x[i] = v;
        }
    }

    fn solve(&self, x: &mut [f64]) {
        self.solve_pinned(x);
        if let Some(p) = &self.pin {
            let c = p.alpha * x[p.index] / p.denom;
            x.iter_mut().zip(&p.w).for_each(|(a, b)| *a += c * b);
        }
    }
}

impl LuFactor {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        match &self.inner {
            Inner::Plain(lu) => plain_solve(lu, x),
            Inner::Bordered(b) => b.solve(x),
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pivoting_on_zero_diagonal() {
        let a = SparseMatrix::from_dense(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let f = factorize(&a).unwrap();
        assert_eq!(f.solve(&[3.0, 4.0]), vec![4.0, 3.0]);
    }

    #[test]
    fn residual_is_small() {
        let n = 50;
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 4.0 + (i % 3) as f64));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -2.0));
            }
            t.push((i, (i * 7) % n, 0.5));
        }
        let a = SparseMatrix::from_triplets(n, n, t).unwrap();
        let f = factorize(&a).unwrap();
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let x = f.solve(&b);
        let r = a.mul_vec(&x);
        assert!(r.iter().zip(&b).all(|(p, q)| (p - q).abs() < 1e-12));
    }

    #[test]
    fn singular_matrices_detected() {
        let a = SparseMatrix::from_dense(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        assert!(matches!(factorize(&a), Err(Error::Singular { .. })));
        let a = SparseMatrix::from_dense(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(factorize(&a), Err(Error::Singular { index: 1, .. })));
        // Neumann Laplacian on a path graph: kernel spanned by constants.
        let n = 20;
        let mut t = Vec::new();
        for i in 0..n - 1 {
            t.extend([(i, i, 1.0), (i + 1, i + 1, 1.0), (i, i + 1, -1.0), (i + 1, i, -1.0)]);
        }
        let a = SparseMatrix::from_triplets(n, n, t).unwrap();
        assert!(matches!(factorize(&a), Err(Error::Singular { .. })));
    }

    /// Neumann Laplacian on a path bordered by a dense mean-value row, the
    /// shape of the gauged least-squares systems.
    fn bordered_path(n: usize) -> SparseMatrix {
        let mut t = Vec::new();
        for i in 0..n - 1 {
            t.extend([(i, i, 1.0), (i + 1, i + 1, 1.0), (i, i + 1, -1.0), (i + 1, i, -1.0)]);
        }
        for i in 0..n {
            let w = 1.0 + (i % 5) as f64;
            t.push((n, i, w));
            t.push((i, n, w));
        }
        SparseMatrix::from_triplets(n + 1, n + 1, t).unwrap()
    }

    #[test]
    fn dense_border_with_singular_block() {
        let a = bordered_path(300);
        let f = factorize(&a).unwrap();
        assert!(matches!(f.inner, Inner::Bordered(_)));
        let b: Vec<f64> = (0..301).map(|i| (0.1 * i as f64).cos()).collect();
        let x = f.solve(&b);
        let r = a.mul_vec(&x);
        let err = r.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
    }

    #[test]
    fn dense_border_singular_matrix_detected() {
        // a border orthogonal to the constants leaves the constant mode free
        let n = 300;
        let mut t = Vec::new();
        for i in 0..n - 1 {
            t.extend([(i, i, 1.0), (i + 1, i + 1, 1.0), (i, i + 1, -1.0), (i + 1, i, -1.0)]);
        }
        for i in 0..n {
            let w = if i % 2 == 0 { 1.0 } else { -1.0 };
            t.push((n, i, w));
            t.push((i, n, w));
        }
        let a = SparseMatrix::from_triplets(n + 1, n + 1, t).unwrap();
        assert!(matches!(factorize(&a), Err(Error::Singular { .. })));
    }
}
