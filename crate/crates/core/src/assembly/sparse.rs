use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::{Error, Result};

/// Compressed sparse row matrix of `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix { nrows, ncols, row_ptr: vec![0; nrows + 1], col_idx: Vec::new(), values: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)).collect()).expect("in range")
    }

    /// Compresses coordinate entries: duplicates are summed in input order
    /// and entries summing to zero are dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, mut entries: Vec<(usize, usize, f64)>) -> Result<Self> {
        if let Some(&(r, c, _)) = entries.iter().find(|(r, c, _)| *r >= nrows || *c >= ncols) {
            return Err(Error::invalid(format!("entry ({r}, {c}) outside a {nrows}x{ncols} matrix")));
        }
        entries.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; nrows + 1];
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        let mut i = 0;
        while i < entries.len() {
            let (r, c, mut v) = entries[i];
            i += 1;
            while i < entries.len() && entries[i].0 == r && entries[i].1 == c {
                v += entries[i].2;
                i += 1;
            }
            if v != 0.0 {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
            }
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(SparseMatrix { nrows, ncols, row_ptr, col_idx, values })
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::invalid("ragged dense matrix"));
        }
        let t = rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().map(move |(j, &v)| (i, j, v)))
            .collect();
        Self::from_triplets(rows.len(), ncols, t)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        cols.binary_search(&c).map_or(0.0, |k| vals[k])
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols, "dimension mismatch in matrix-vector product");
        for (r, yr) in y.iter_mut().enumerate().take(self.nrows) {
            let (cols, vals) = self.row(r);
            *yr = cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    pub fn transpose(&self) -> Self {
        let t = self.triplets().map(|(r, c, v)| (c, r, v)).collect();
        Self::from_triplets(self.ncols, self.nrows, t).expect("in range")
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let t = self.triplets().map(|(r, c, v)| (r, c, alpha * v)).collect();
        Self::from_triplets(self.nrows, self.ncols, t).expect("in range")
    }

    /// `self + alpha * other`.
    pub fn add(&self, other: &SparseMatrix, alpha: f64) -> Result<Self> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return Err(Error::invalid("matrix dimensions differ"));
        }
        let t = self.triplets().chain(other.triplets().map(|(r, c, v)| (r, c, alpha * v))).collect();
        Self::from_triplets(self.nrows, self.ncols, t)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows).map(|r| self.row(r).1.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// Largest entry of `self − selfᵀ` in absolute value.
    pub fn asymmetry(&self) -> f64 {
        if self.nrows != self.ncols {
            return f64::INFINITY;
        }
        self.triplets().map(|(r, c, v)| (v - self.get(c, r)).abs()).fold(0.0, f64::max)
    }

    /// Submatrix with the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut col_pos = vec![usize::MAX; self.ncols];
        for (k, &c) in cols.iter().enumerate() {
            col_pos[c] = k;
        }
        let mut t = Vec::new();
        for (i, &r) in rows.iter().enumerate() {
            let (cs, vs) = self.row(r);
            for (&c, &v) in cs.iter().zip(vs) {
                if col_pos[c] != usize::MAX {
                    t.push((i, col_pos[c], v));
                }
            }
        }
        Self::from_triplets(rows.len(), cols.len(), t).expect("in range")
    }

    /// Places scaled blocks into an `nrows × ncols` matrix at the given
    /// row and column offsets.
    pub fn from_blocks(nrows: usize, ncols: usize, blocks: &[(usize, usize, &SparseMatrix, f64)]) -> Result<Self> {
        let mut t = Vec::new();
        for &(r0, c0, b, s) in blocks {
            if r0 + b.nrows > nrows || c0 + b.ncols > ncols {
                return Err(Error::invalid("block does not fit"));
            }
            t.extend(b.triplets().map(|(r, c, v)| (r0 + r, c0 + c, s * v)));
        }
        Self::from_triplets(nrows, ncols, t)
    }

    pub fn to_dense(&self) -> Mat<f64> {
        let mut m = Mat::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    pub(crate) fn to_faer(&self) -> Result<SparseColMat<usize, f64>> {
        let t: Vec<Triplet<usize, usize, f64>> = self.triplets().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &t)
            .map_err(|e| Error::invalid(format!("cannot convert matrix: {e:?}")))
    }

    /// Matrix Market coordinate format, 1-based indices.
    pub fn to_matrix_market(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::from("%%MatrixMarket matrix coordinate real general\n");
        let _ = writeln!(s, "{} {} {}", self.nrows, self.ncols, self.nnz());
        for (r, c, v) in self.triplets() {
            let _ = writeln!(s, "{} {} {:?}", r + 1, c + 1, v);
        }
        s
    }

    pub fn from_matrix_market(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.starts_with('%') && !l.trim().is_empty());
        let err = |line: usize, m: &str| Error::Parse { line: line + 1, message: m.to_string() };
        let (ln, head) = lines.next().ok_or_else(|| err(0, "missing size line"))?;
        let head: Vec<usize> =
            head.split_whitespace().map(|t| t.parse().map_err(|_| err(ln, "bad size line"))).collect::<Result<_>>()?;
        if head.len() != 3 {
            return Err(err(ln, "size line must be `rows cols nnz`"));
        }
        let mut t = Vec::with_capacity(head[2]);
        for (ln, l) in lines {
            let tok: Vec<&str> = l.split_whitespace().collect();
            if tok.len() != 3 {
                return Err(err(ln, "entry must be `row col value`"));
            }
            let r: usize = tok[0].parse().map_err(|_| err(ln, "bad row index"))?;
            let c: usize = tok[1].parse().map_err(|_| err(ln, "bad column index"))?;
            let v: f64 = tok[2].parse().map_err(|_| err(ln, "bad value"))?;
            if r == 0 || c == 0 {
                return Err(err(ln, "indices are 1-based"));
            }
            t.push((r - 1, c - 1, v));
        }
        if t.len() != head[2] {
            return Err(err(0, "entry count does not match header"));
        }
        Self::from_triplets(head[0], head[1], t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn duplicates_summed_and_zeros_dropped() {
        let m = SparseMatrix::from_triplets(2, 3, vec![(0, 1, 1.0), (1, 2, 2.0), (0, 1, 2.5), (1, 0, 1.0), (1, 0, -1.0)])
            .unwrap();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 1), 3.5);
        assert_eq!(m.get(1, 0), 0.0);
        assert!(SparseMatrix::from_triplets(2, 2, vec![(2, 0, 1.0)]).is_err());
    }

    #[test]
    fn blocks_and_selection() {
        let a = SparseMatrix::from_dense(&[vec![1.0, 2.0], vec![0.0, 3.0]]).unwrap();
        let k = SparseMatrix::from_blocks(3, 3, &[(0, 0, &a, 1.0), (1, 1, &a, -1.0)]).unwrap();
        assert_eq!(k.get(1, 1), -1.0 + 1.0 + 0.0 + 2.0);
        let s = k.select(&[2, 0], &[0, 2]);
        assert_eq!(s.get(0, 1), -3.0);
        assert_eq!(s.get(1, 0), 1.0);
    }

    fn arb_triplets() -> impl Strategy<Value = (usize, usize, Vec<(usize, usize, f64)>)> {
        (1usize..8, 1usize..8).prop_flat_map(|(r, c)| {
            (Just(r), Just(c), prop::collection::vec((0..r, 0..c, -5.0f64..5.0), 0..40))
        })
    }

    proptest! {
        #[test]
        fn matches_dense_oracle((r, c, t) in arb_triplets(), x in prop::collection::vec(-1.0f64..1.0, 8)) {
            let m = SparseMatrix::from_triplets(r, c, t.clone()).unwrap();
            let mut dense = vec![vec![0.0; c]; r];
            for (i, j, v) in t {
                dense[i][j] += v;
            }
            let y = m.mul_vec(&x[..c]);
            for i in 0..r {
                let yd: f64 = (0..c).map(|j| dense[i][j] * x[j]).sum();
                prop_assert!((y[i] - yd).abs() < 1e-12);
                for j in 0..c {
                    prop_assert!((m.get(i, j) - dense[i][j]).abs() < 1e-12);
                }
            }
            prop_assert!(m.triplets().all(|(_, _, v)| v != 0.0));
            prop_assert_eq!(m.transpose().transpose(), m.clone());
            prop_assert_eq!(SparseMatrix::from_matrix_market(&m.to_matrix_market()).unwrap(), m);
        }
    }
}
