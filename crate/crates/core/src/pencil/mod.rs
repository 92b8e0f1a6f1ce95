//! The generalized eigenvalue problem `K z = λ M z` and its solvers.
//!
//! For the least-squares formulations `z = (u, p, multipliers)` with
//!
//! ```text
//!     K = [ A  Bᵀ  0 ]      M = [ 0  D  0 ]
//!         [ B  C   Gᵀ]          [ 0  0  0 ]
//!         [ 0  G   0 ]          [ 0  0  0 ]
//! ```
//!
//! where `D = −Bᵀ` on the constrained spaces. Symmetric pencils (Galerkin
//! reference problems) use only the `p` block.

mod arnoldi;
mod factor;
mod filter;
mod qz;
mod schur;
mod solve;

use std::ops::Range;

pub use factor::{factorize, LuFactor};
pub use filter::{filter_spectrum, DiscardReason, Discarded, EigenSolution, RawPair};
pub use qz::{dense_qz, QzSpectrum, QZ_MAX_DIM};
pub use schur::{schur_reduce, SchurReduction};
pub use solve::{shift_invert_eigs, solve_smallest, EigenOptions, FALLBACK_SHIFT};

use crate::assembly::{DofMap, SparseMatrix};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PencilKind {
    /// Non-symmetric least-squares pencil.
    LeastSquares,
    /// `K` symmetric positive semidefinite, `M` symmetric positive
    /// semidefinite.
    Symmetric,
}

/// Index ranges of the unknown blocks in `z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockLayout {
    pub u: Range<usize>,
    pub p: Range<usize>,
    pub multiplier: Range<usize>,
}

impl BlockLayout {
    pub fn len(&self) -> usize {
        self.multiplier.end
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Extra rows and columns fixing the null space of the `p` block.
#[derive(Clone, Debug)]
pub enum Gauge {
    None,
    /// One multiplier enforcing a weighted zero mean of a scalar `p`.
    MeanRow(SparseMatrix),
    /// A potential `φ` with `(q, ∇φ)` coupling (`grad`, rows `q`, columns
    /// `φ`) plus one multiplier enforcing zero mean of `φ` (`mean`, one row).
    Potential { grad: SparseMatrix, mean: SparseMatrix },
}

#[derive(Clone, Debug)]
pub struct BlockPencil {
    pub k: SparseMatrix,
    pub m: SparseMatrix,
    pub layout: BlockLayout,
    pub kind: PencilKind,
    /// `K` and `M` share a null space, so the pencil is singular and the
    /// common kernel has to be regularized away before solving.
    pub singular: bool,
    /// The discretization is outside the setting covered by the existing
    /// convergence theory.
    pub untheorized: bool,
    /// Maps from reduced to full dof numbering for `u` and `p`.
    pub u_dofs: DofMap,
    pub p_dofs: DofMap,
    /// For symmetric curl-curl pencils: columns spanning the discrete
    /// gradients in the `p` coordinates.
    pub kernel: Option<SparseMatrix>,
}

impl BlockPencil {
    /// Assembles the least-squares pencil from reduced blocks.
    #[allow(clippy::too_many_arguments)]
    pub fn least_squares(
        a: &SparseMatrix,
        b: &SparseMatrix,
        c: &SparseMatrix,
        d: &SparseMatrix,
        gauge: &Gauge,
        u_dofs: DofMap,
        p_dofs: DofMap,
    ) -> Result<Self> {
        let nu = a.nrows();
        let np = c.nrows();
        if a.ncols() != nu || c.ncols() != np || b.nrows() != np || b.ncols() != nu || d.nrows() != nu || d.ncols() != np
        {
            return Err(Error::invalid("block dimensions do not match"));
        }
        if nu == 0 || np == 0 {
            return Err(Error::invalid("a block of the least-squares system is empty"));
        }
        let bt = b.transpose();
        let (extra, singular) = match gauge {
            Gauge::None => (0, true),
            Gauge::MeanRow(r) => {
                if r.nrows() != 1 || r.ncols() != np {
                    return Err(Error::invalid("mean row has wrong dimensions"));
                }
                (1, false)
            }
            Gauge::Potential { grad, mean } => {
                if grad.nrows() != np || mean.nrows() != 1 || mean.ncols() != grad.ncols() {
                    return Err(Error::invalid("potential gauge blocks have wrong dimensions"));
                }
                (grad.ncols() + 1, false)
            }
        };
        let n = nu + np + extra;
        let mut blocks: Vec<(usize, usize, &SparseMatrix, f64)> =
            vec![(0, 0, a, 1.0), (0, nu, &bt, 1.0), (nu, 0, b, 1.0), (nu, nu, c, 1.0)];
        let (rt, gt, mt);
        match gauge {
            Gauge::None => {}
            Gauge::MeanRow(r) => {
                rt = r.transpose();
                blocks.push((nu + np, nu, r, 1.0));
                blocks.push((nu, nu + np, &rt, 1.0));
            }
            Gauge::Potential { grad, mean } => {
                let nw = grad.ncols();
                gt = grad.transpose();
                mt = mean.transpose();
                blocks.push((nu, nu + np, grad, 1.0));
                blocks.push((nu + np, nu, &gt, 1.0));
                blocks.push((nu + np + nw, nu + np, mean, 1.0));
                blocks.push((nu + np, nu + np + nw, &mt, 1.0));
            }
        }
        let k = SparseMatrix::from_blocks(n, n, &blocks)?;
        let m = SparseMatrix::from_blocks(n, n, &[(0, nu, d, 1.0)])?;
        Ok(BlockPencil {
            k,
            m,
            layout: BlockLayout { u: 0..nu, p: nu..nu + np, multiplier: nu + np..n },
            kind: PencilKind::LeastSquares,
            singular,
            untheorized: false,
            u_dofs,
            p_dofs,
            kernel: None,
        })
    }

    /// Symmetric pencil `stiffness x = λ mass x`.
    pub fn symmetric(stiffness: SparseMatrix, mass: SparseMatrix, dofs: DofMap, kernel: Option<SparseMatrix>) -> Result<Self> {
        let n = stiffness.nrows();
        if stiffness.ncols() != n || mass.nrows() != n || mass.ncols() != n {
            return Err(Error::invalid("stiffness and mass must be square of equal size"));
        }
        if n == 0 {
            return Err(Error::invalid("empty system"));
        }
        Ok(BlockPencil {
            k: stiffness,
            m: mass,
            layout: BlockLayout { u: 0..0, p: 0..n, multiplier: n..n },
            kind: PencilKind::Symmetric,
            singular: false,
            untheorized: false,
            u_dofs: DofMap::all(0),
            p_dofs: dofs,
            kernel,
        })
    }

    pub fn dim(&self) -> usize {
        self.layout.len()
    }

    /// Adds Lagrange multipliers constraining the `p` block to be
    /// `M`-orthogonal to the kernel basis:
    /// `[K, M G; Gᵀ M, 0]`, `[M, 0; 0, 0]`.
    pub fn with_kernel_multipliers(&self) -> Result<BlockPencil> {
        let g = self.kernel.as_ref().ok_or_else(|| Error::invalid("pencil has no kernel basis"))?;
        if self.kind != PencilKind::Symmetric {
            return Err(Error::invalid("kernel multipliers apply to symmetric pencils"));
        }
        let n = self.k.nrows();
        let nk = g.ncols();
        let mg = sparse_product(&self.m, g)?;
        let gtm = mg.transpose();
        let k = SparseMatrix::from_blocks(n + nk, n + nk, &[(0, 0, &self.k, 1.0), (0, n, &mg, 1.0), (n, 0, &gtm, 1.0)])?;
        let m = SparseMatrix::from_blocks(n + nk, n + nk, &[(0, 0, &self.m, 1.0)])?;
        Ok(BlockPencil {
            k,
            m,
            layout: BlockLayout { u: 0..0, p: 0..n, multiplier: n..n + nk },
            kind: PencilKind::Symmetric,
            singular: false,
            untheorized: self.untheorized,
            u_dofs: self.u_dofs.clone(),
            p_dofs: self.p_dofs.clone(),
            kernel: None,
        })
    }

    /// Deviations from the expected block structure; all entries are
    /// relative to the largest entry of the matrices involved.
    pub fn structure_defects(&self) -> StructureDefects {
        let l = &self.layout;
        let scale_k = self.k.max_abs().max(f64::MIN_POSITIVE);
        let scale_m = self.m.max_abs().max(f64::MIN_POSITIVE);
        let k_asymmetry = self.k.asymmetry() / scale_k;

        let block = |r: usize| -> usize {
            if l.u.contains(&r) {
                0
            } else if l.p.contains(&r) {
                1
            } else {
                2
            }
        };
        // Negating the off-diagonal blocks must give a matrix equal to its
        // own transpose.
        let flip = |r: usize, c: usize, v: f64| if block(r) == block(c) { v } else { -v };
        let sign_pattern = self
            .k
            .triplets()
            .map(|(r, c, v)| (flip(r, c, v) - flip(c, r, self.k.get(c, r))).abs())
            .fold(0.0, f64::max)
            / scale_k;

        let mut m_outside = 0.0f64;
        let mut d_plus_bt = 0.0f64;
        for (r, c, v) in self.m.triplets() {
            let inside = match self.kind {
                PencilKind::LeastSquares => l.u.contains(&r) && l.p.contains(&c),
                PencilKind::Symmetric => l.p.contains(&r) && l.p.contains(&c),
            };
            if !inside {
                m_outside = m_outside.max(v.abs() / scale_m);
            }
        }
        if self.kind == PencilKind::LeastSquares {
            // D[u, p] + B[p, u]; B sits in K at rows p, columns u.
            let scale = scale_m.max(f64::MIN_POSITIVE);
            for (r, c, v) in self.m.triplets() {
                if l.u.contains(&r) && l.p.contains(&c) {
                    d_plus_bt = d_plus_bt.max((v + self.k.get(c, r)).abs() / scale);
                }
            }
            for (r, c, v) in self.k.triplets() {
                if l.p.contains(&r) && l.u.contains(&c) && self.m.get(c, r) == 0.0 {
                    d_plus_bt = d_plus_bt.max(v.abs() / scale);
                }
            }
        } else {
            d_plus_bt = self.m.asymmetry() / scale_m;
        }
        StructureDefects { k_asymmetry, sign_pattern, m_outside, d_plus_bt }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StructureDefects {
    /// `max |K − Kᵀ|`.
    pub k_asymmetry: f64,
    /// Asymmetry of `K` after negating its off-diagonal blocks.
    pub sign_pattern: f64,
    /// Entries of `M` outside its designated block.
    pub m_outside: f64,
    /// `max |D + Bᵀ|` (least squares) or `max |M − Mᵀ|` (symmetric).
    pub d_plus_bt: f64,
}

pub(crate) fn sparse_product(a: &SparseMatrix, b: &SparseMatrix) -> Result<SparseMatrix> {
    if a.ncols() != b.nrows() {
        return Err(Error::invalid("inner dimensions differ"));
    }
    let mut t = Vec::new();
    for r in 0..a.nrows() {
        let (ac, av) = a.row(r);
        for (&k, &x) in ac.iter().zip(av) {
            let (bc, bv) = b.row(k);
            t.extend(bc.iter().zip(bv).map(|(&c, &y)| (r, c, x * y)));
        }
    }
    SparseMatrix::from_triplets(a.nrows(), b.ncols(), t)
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub(crate) fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}
