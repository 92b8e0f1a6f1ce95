//! Shift-invert eigensolver for the pencil `K z = λ M z`.
//!
//! The dominant eigenvalues `θ` of `S = (K − σ M)⁻¹ M` are found by
//! restarted Arnoldi, followed by deflated passes on `(I − W Wᵀ) S (I − W Wᵀ)`
//! that pick up further copies of multiple eigenvalues. A final
//! Rayleigh–Ritz step on the collected basis `W` gives the candidates
//! `λ = σ + 1/θ` with vectors `z = S x / θ`.

use faer::Mat;

use super::arnoldi::{largest_magnitude, sort_by_magnitude, ArnoldiConfig};
use super::filter::{filter_spectrum, EigenSolution, RawPair};
use super::{dot, factorize, norm, BlockPencil, PencilKind};
use crate::assembly::SparseMatrix;
use crate::{Error, Result};

/// Shift used when `K − σ M` is singular at `σ = 0`.
pub const FALLBACK_SHIFT: f64 = -0.1;

/// Relative size of the `p`-block regularization used for singular pencils.
pub const DEFAULT_REGULARIZATION: f64 = 1e-10;

const ARNOLDI_TOL: f64 = 1e-11;
const MAX_DEFLATION_PASSES: usize = 12;

#[derive(Clone, Debug)]
pub struct EigenOptions {
    /// Number of wanted eigenvalues closest to the shift.
    pub nev: usize,
    pub shift: f64,
    /// Residual tolerance for kept pairs.
    pub tol: f64,
    pub max_restarts: usize,
    pub seed: u64,
    /// Eigenvalues with `|λ|` above this are treated as infinite.
    pub finite_cutoff: f64,
    /// Adds `τ I` on the `p` block of the shifted matrix with
    /// `τ = regularization · max |diag K|`.
    pub regularization: Option<f64>,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            nev: 10,
            shift: 0.0,
            tol: 1e-8,
            max_restarts: 300,
            seed: 1,
            finite_cutoff: 1e6,
            regularization: None,
        }
    }
}

/// Eigenpairs nearest the shift. At least `nev` candidates are computed;
/// the solution holds those that pass the filters, sorted ascending.
pub fn shift_invert_eigs(pencil: &BlockPencil, opts: &EigenOptions) -> Result<EigenSolution> {
    let n = pencil.dim();
    if opts.nev == 0 {
        return Err(Error::invalid("nev must be positive"));
    }
    if !(opts.tol > 0.0) || !opts.shift.is_finite() {
        return Err(Error::invalid("tolerance must be positive and the shift finite"));
    }
    let mut shifted = pencil.k.add(&pencil.m, -opts.shift)?;
    let tau = match opts.regularization {
        Some(rel) => {
            let diag = (0..n).map(|i| pencil.k.get(i, i).abs()).fold(0.0, f64::max);
            let tau = rel * diag;
            let t = pencil.layout.p.clone().map(|i| (i, i, tau)).collect();
            shifted = shifted.add(&SparseMatrix::from_triplets(n, n, t)?, 1.0)?;
            Some(tau)
        }
        None => None,
    };
    let lu = factorize(&shifted)?;
    let mut op = |x: &[f64]| -> Result<Vec<f64>> {
        let mut y = pencil.m.mul_vec(x);
        lu.solve_in_place(&mut y);
        Ok(y)
    };
    let want = (opts.nev + 2).min(n);
    let pairs = dominant_pairs(n, &mut op, want, opts)?;
    let raw = pairs
        .into_iter()
        .map(|(theta, z)| RawPair { lambda: if theta == 0.0 { f64::INFINITY } else { opts.shift + 1.0 / theta }, vector: z })
        .collect();
    let raw = if tau.is_some() && pencil.kind == PencilKind::LeastSquares {
        two_sided_refine(pencil, raw)
    } else {
        raw
    };
    let mut sol = filter_spectrum(pencil, raw, opts.finite_cutoff, opts.tol);
    sol.shift = opts.shift;
    sol.regularization = tau;
    Ok(sol)
}

/// Removes the O(τ) regularization bias from least-squares eigenvalues.
///
/// For `K z = λ M z` with `M` carrying only the `D = -Bᵀ` block, the left
/// eigenvector is `(u, (1+λ) p, (1+λ) ξ)`, so the two-sided Rayleigh
/// quotient is accurate to O(τ²). A refinement that moves `λ` by more than
/// `1e-6 max(1, |λ|)` is rejected as a sign that the pair is not converged.
fn two_sided_refine(pencil: &BlockPencil, raw: Vec<RawPair>) -> Vec<RawPair> {
    let layout = &pencil.layout;
    raw.into_iter()
        .map(|RawPair { lambda, vector }| {
            if !lambda.is_finite() {
                return RawPair { lambda, vector };
            }
            let mut y = vector.clone();
            y[layout.u.end..].iter_mut().for_each(|x| *x *= 1.0 + lambda);
            let den = dot(&y, &pencil.m.mul_vec(&vector));
            let refined = dot(&y, &pencil.k.mul_vec(&vector)) / den;
            let better = refined.is_finite() && (refined - lambda).abs() <= 1e-6 * lambda.abs().max(1.0);
            RawPair { lambda: if better { refined } else { lambda }, vector }
        })
        .collect()
}

/// Solves for the smallest eigenvalues, handling the special cases:
/// singular pencils are regularized, a singular `K` at the requested shift
/// falls back to [`FALLBACK_SHIFT`], and pencils with a kernel basis are
/// augmented by multipliers first.
pub fn solve_smallest(pencil: &BlockPencil, opts: &EigenOptions) -> Result<EigenSolution> {
    if pencil.kernel.is_some() {
        let augmented = pencil.with_kernel_multipliers()?;
        return solve_smallest(&augmented, opts);
    }
    let mut opts = opts.clone();
    if pencil.singular && opts.regularization.is_none() {
        opts.regularization = Some(DEFAULT_REGULARIZATION);
    }
    match shift_invert_eigs(pencil, &opts) {
        Err(Error::Singular { .. }) if opts.shift != FALLBACK_SHIFT => {
            opts.shift = FALLBACK_SHIFT;
            shift_invert_eigs(pencil, &opts)
        }
        r => r,
    }
}

/// Orthonormal basis `W` with the images `S W`.
struct Basis {
    w: Vec<Vec<f64>>,
    sw: Vec<Vec<f64>>,
}

impl Basis {
    fn project_out(&self, x: &mut [f64]) {
        for _ in 0..2 {
            for w in &self.w {
                let c = dot(w, x);
                x.iter_mut().zip(w).for_each(|(a, b)| *a -= c * b);
            }
        }
    }

    fn add<F>(&mut self, mut x: Vec<f64>, op: &mut F) -> Result<bool>
    where
        F: FnMut(&[f64]) -> Result<Vec<f64>>,
    {
        let before = norm(&x);
        self.project_out(&mut x);
        let after = norm(&x);
        if after <= 1e-8 * before || after == 0.0 {
            return Ok(false);
        }
        x.iter_mut().for_each(|v| *v /= after);
        let sx = op(&x)?;
        self.w.push(x);
        self.sw.push(sx);
        Ok(true)
    }

    /// Ritz values `θ` (real parts) with coefficient vectors, by decreasing
    /// magnitude. A complex pair contributes its real and imaginary parts
    /// as two candidates.
    fn rayleigh_ritz(&self) -> Result<Vec<(f64, Vec<f64>)>> {
        let k = self.w.len();
        if k == 0 {
            return Ok(Vec::new());
        }
        let g = Mat::<f64>::from_fn(k, k, |i, j| dot(&self.w[i], &self.sw[j]));
        let e = g
            .eigen()
            .map_err(|_| Error::NotConverged { message: "Rayleigh-Ritz eigensolver failed".into(), residuals: vec![] })?;
        let s = e.S().column_vector();
        let u = e.U();
        let vals: Vec<(f64, f64)> = (0..k).map(|i| (s[i].re, s[i].im)).collect();
        let mut out = Vec::new();
        for i in sort_by_magnitude(&vals) {
            let (re, im) = vals[i];
            if im < 0.0 {
                continue;
            }
            out.push((re, (0..k).map(|r| u[(r, i)].re).collect()));
            if im > 0.0 {
                out.push((re, (0..k).map(|r| u[(r, i)].im).collect()));
            }
        }
        Ok(out)
    }

    fn combine(vs: &[Vec<f64>], coef: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; vs[0].len()];
        for (v, &c) in vs.iter().zip(coef) {
            out.iter_mut().zip(v).for_each(|(o, x)| *o += c * x);
        }
        out
    }
}

/// Dominant eigenvalues `θ` of `op` with purified unit vectors.
fn dominant_pairs<F>(n: usize, op: &mut F, want: usize, opts: &EigenOptions) -> Result<Vec<(f64, Vec<f64>)>>
where
    F: FnMut(&[f64]) -> Result<Vec<f64>>,
{
    let cfg = ArnoldiConfig {
        nev: want,
        ncv: (2 * want + 10).max(30),
        tol: ARNOLDI_TOL,
        max_restarts: opts.max_restarts,
        seed: opts.seed,
    };
    let mut basis = Basis { w: Vec::new(), sw: Vec::new() };
    for r in largest_magnitude(n, op, &cfg)? {
        basis.add(r.vector, op)?;
        if let Some(im) = r.vector_im {
            basis.add(im, op)?;
        }
    }

    for pass in 1..=MAX_DEFLATION_PASSES {
        if basis.w.len() + 3 > n {
            break;
        }
        let rr = basis.rayleigh_ritz()?;
        let cut = if rr.len() >= want { rr[want - 1].0.abs() } else { 0.0 };
        let mut deflated = |x: &[f64]| -> Result<Vec<f64>> {
            let mut px = x.to_vec();
            basis.project_out(&mut px);
            let mut y = op(&px)?;
            basis.project_out(&mut y);
            Ok(y)
        };
        let cfg = ArnoldiConfig { nev: 3, ncv: 24, tol: ARNOLDI_TOL, max_restarts: opts.max_restarts, seed: opts.seed + pass as u64 };
        let found = match largest_magnitude(n, &mut deflated, &cfg) {
            Ok(f) => f,
            Err(Error::NotConverged { .. }) => break,
            Err(e) => return Err(e),
        };
        let mut added = false;
        for r in found {
            if r.re.hypot(r.im) < cut * (1.0 - 1e-6) || r.re.hypot(r.im) == 0.0 {
                continue;
            }
            added |= basis.add(r.vector, op)?;
            if let Some(im) = r.vector_im {
                added |= basis.add(im, op)?;
            }
        }
        if !added {
            break;
        }
    }

    let mut out = Vec::new();
    for (theta, g) in basis.rayleigh_ritz()? {
        let x = Basis::combine(&basis.w, &g);
        let mut z = if theta != 0.0 {
            let sx = Basis::combine(&basis.sw, &g);
            sx.into_iter().map(|v| v / theta).collect()
        } else {
            x
        };
        let nz = norm(&z);
        if nz > 0.0 {
            z.iter_mut().for_each(|v| *v /= nz);
        }
        out.push((theta, z));
    }
    Ok(out)
}
