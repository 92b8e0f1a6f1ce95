//! Dense reduction of the least-squares pencil to a symmetric problem.
//!
//! Eliminating `p` and the multipliers from `K z = λ M z` with `D = −Bᵀ`
//! gives `A u = (λ + 1) Bᵀ C⁻¹ B u`, where `C` and `B` are extended by the
//! multiplier rows. With `A = L Lᵀ` the eigenvalues `μ` of
//! `L⁻¹ (Bᵀ C⁻¹ B) L⁻ᵀ` give `λ = 1/μ − 1` for every `μ > 0`.

use faer::linalg::triangular_solve::solve_lower_triangular_in_place;
use faer::prelude::*;
use faer::{Mat, Par, Side};

use super::{BlockPencil, PencilKind};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct SchurReduction {
    /// The `A` block.
    pub a: Mat<f64>,
    /// `Bᵀ C⁻¹ B` with the extended blocks.
    pub s: Mat<f64>,
    /// Finite eigenvalues `λ`, ascending.
    pub eigenvalues: Vec<f64>,
}

pub fn schur_reduce(pencil: &BlockPencil) -> Result<SchurReduction> {
    if pencil.kind != PencilKind::LeastSquares {
        return Err(Error::invalid("Schur reduction needs a least-squares pencil"));
    }
    let l = &pencil.layout;
    let nu = l.u.len();
    let nr = l.len() - nu;
    let k = pencil.k.to_dense();
    let a = Mat::<f64>::from_fn(nu, nu, |i, j| 0.5 * (k[(i, j)] + k[(j, i)]));
    let b = Mat::<f64>::from_fn(nr, nu, |i, j| k[(nu + i, j)]);
    let c = Mat::<f64>::from_fn(nr, nr, |i, j| k[(nu + i, nu + j)]);

    let mut y = b.clone();
    c.partial_piv_lu().solve_in_place(y.as_mut());
    let y_norm = y.norm_max();
    let growth = y_norm * c.norm_max() / b.norm_max().max(f64::MIN_POSITIVE);
    let residual = (&c * &y - &b).norm_max();
    if !y_norm.is_finite() || growth > 1e13 || residual > 1e-8 * c.norm_max() * y_norm.max(1.0) {
        return Err(Error::Singular { index: nu, growth });
    }
    let s0 = b.transpose() * &y;
    let s = Mat::<f64>::from_fn(nu, nu, |i, j| 0.5 * (s0[(i, j)] + s0[(j, i)]));

    let llt = a.llt(Side::Lower).map_err(|_| Error::invalid("the A block is not positive definite"))?;
    let lf = llt.L();
    // T = L⁻¹ S L⁻ᵀ, using the symmetry of S.
    let mut x = s.clone();
    solve_lower_triangular_in_place(lf, x.as_mut(), Par::Seq);
    let mut t = x.transpose().to_owned();
    solve_lower_triangular_in_place(lf, t.as_mut(), Par::Seq);
    let t = Mat::<f64>::from_fn(nu, nu, |i, j| 0.5 * (t[(i, j)] + t[(j, i)]));
    let mu = t
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::NotConverged { message: "symmetric eigensolver failed".into(), residuals: vec![] })?;
    let top = mu.iter().cloned().fold(0.0, f64::max);
    let mut eigenvalues: Vec<f64> = mu.iter().filter(|&&m| m > 1e-12 * top).map(|m| 1.0 / m - 1.0).collect();
    eigenvalues.sort_by(|p, q| p.partial_cmp(q).unwrap());
    Ok(SchurReduction { a, s, eigenvalues })
}
