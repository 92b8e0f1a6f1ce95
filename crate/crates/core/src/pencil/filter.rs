use super::{norm, BlockLayout, BlockPencil};

/// Candidate eigenpair before filtering.
#[derive(Clone, Debug)]
pub struct RawPair {
    pub lambda: f64,
    pub vector: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiscardReason {
    /// `|λ|` above the finite cutoff (or not a number).
    Infinite,
    /// Relative residual above the tolerance.
    Residual,
    /// `p` block numerically zero: such a vector cannot belong to a finite
    /// eigenvalue.
    PZero,
}

#[derive(Clone, Debug)]
pub struct Discarded {
    pub lambda: f64,
    pub residual: f64,
    pub reason: DiscardReason,
}

#[derive(Clone, Debug)]
pub struct EigenSolution {
    /// Kept eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Unit eigenvectors in the reduced numbering of the pencil.
    pub vectors: Vec<Vec<f64>>,
    /// `‖K z − λ M z‖ / ((|λ| + 1) ‖z‖)` for each kept pair.
    pub residuals: Vec<f64>,
    pub discarded: Vec<Discarded>,
    pub layout: BlockLayout,
    pub shift: f64,
    /// Size of the diagonal regularization added to the `p` block, if any.
    pub regularization: Option<f64>,
}

impl EigenSolution {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn u(&self, i: usize) -> &[f64] {
        &self.vectors[i][self.layout.u.clone()]
    }

    pub fn p(&self, i: usize) -> &[f64] {
        &self.vectors[i][self.layout.p.clone()]
    }

    pub fn multiplier(&self, i: usize) -> &[f64] {
        &self.vectors[i][self.layout.multiplier.clone()]
    }
}

/// Relative residual of a candidate pair.
pub fn pair_residual(pencil: &BlockPencil, lambda: f64, z: &[f64]) -> f64 {
    let kz = pencil.k.mul_vec(z);
    let mz = pencil.m.mul_vec(z);
    let r: Vec<f64> = kz.iter().zip(&mz).map(|(a, b)| a - lambda * b).collect();
    norm(&r) / ((lambda.abs() + 1.0) * norm(z).max(f64::MIN_POSITIVE))
}

/// Splits candidates into kept and discarded pairs. A pair is discarded if
/// its `p` block is below `1e-10 ‖z‖`, if `|λ|` exceeds `finite_cutoff`,
/// or if its residual exceeds `residual_tol`, checked in that order.
pub fn filter_spectrum(
    pencil: &BlockPencil,
    raw: Vec<RawPair>,
    finite_cutoff: f64,
    residual_tol: f64,
) -> EigenSolution {
    let layout = pencil.layout.clone();
    let mut kept: Vec<(f64, Vec<f64>, f64)> = Vec::new();
    let mut discarded = Vec::new();
    for RawPair { lambda, mut vector } in raw {
        let nz = norm(&vector);
        if nz > 0.0 {
            vector.iter_mut().for_each(|x| *x /= nz);
        }
        let pn = norm(&vector[layout.p.clone()]);
        let finite = lambda.is_finite() && lambda.abs() <= finite_cutoff;
        let residual = if finite { pair_residual(pencil, lambda, &vector) } else { f64::NAN };
        let reason = if nz == 0.0 || pn <= 1e-10 {
            Some(DiscardReason::PZero)
        } else if !finite {
            Some(DiscardReason::Infinite)
        } else if !(residual <= residual_tol) {
            Some(DiscardReason::Residual)
        } else {
            None
        };
        match reason {
            Some(reason) => discarded.push(Discarded { lambda, residual, reason }),
            None => kept.push((lambda, vector, residual)),
        }
    }
    kept.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    EigenSolution {
        eigenvalues: kept.iter().map(|k| k.0).collect(),
        residuals: kept.iter().map(|k| k.2).collect(),
        vectors: kept.into_iter().map(|k| k.1).collect(),
        discarded,
        layout,
        shift: 0.0,
        regularization: None,
    }
}
