use crate::{Error, Result};

const LSHAPE: [f64; 5] = [1.47562, 3.53403, 9.86960, 9.86960, 11.38948];

const SLIT: [f64; 10] = [1.03407, 2.46740, 4.04693, 9.86960, 9.86960, 10.84485, 12.26490, 12.33701, 19.73921, 21.24411];

/// Catalogs of exact (or benchmark) eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Catalog {
    /// Maxwell (equivalently Neumann Laplace, nonzero part) on `(0, π)²`:
    /// `m² + n²` with `m, n ≥ 0`, `m + n > 0`.
    Square,
    /// Maxwell on the L-shaped domain `(−1, 1)² \ [0, 1)²`.
    LShape,
    /// Maxwell on the slit domain `(−1, 1)² \ [0, 1) × {0}`.
    Slit,
    /// Maxwell on `(0, π)³`: `a² + b² + c²` with at most one index zero,
    /// two modes when all indices are positive and one otherwise.
    Cube,
}

impl Catalog {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "square" => Catalog::Square,
            "lshape" => Catalog::LShape,
            "slit" => Catalog::Slit,
            "cube" => Catalog::Cube,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Catalog::Square => "square",
            Catalog::LShape => "lshape",
            Catalog::Slit => "slit",
            Catalog::Cube => "cube",
        }
    }
}

/// The `count` smallest reference eigenvalues, ascending, with multiplicity.
pub fn reference_spectrum(catalog: Catalog, count: usize) -> Result<Vec<f64>> {
    let all: Vec<f64> = match catalog {
        Catalog::Square => lattice(count, 2),
        Catalog::Cube => lattice(count, 3),
        Catalog::LShape => LSHAPE.to_vec(),
        Catalog::Slit => SLIT.to_vec(),
    };
    if all.len() < count {
        return Err(Error::invalid(format!(
            "the {} catalog holds only {} eigenvalues, {count} requested",
            catalog.name(),
            all.len()
        )));
    }
    Ok(all[..count].to_vec())
}

fn lattice(count: usize, dim: usize) -> Vec<f64> {
    // Grow the index box until the count-th value is certainly inside.
    let mut k = 2;
    loop {
        let mut vals = Vec::new();
        let range = 0..=k as u64;
        if dim == 2 {
            for a in range.clone() {
                for b in range.clone() {
                    if a + b > 0 {
                        vals.push((a * a + b * b) as f64);
                    }
                }
            }
        } else {
            for a in range.clone() {
                for b in range.clone() {
                    for c in range.clone() {
                        let zeros = [a, b, c].iter().filter(|&&x| x == 0).count();
                        let copies = match zeros {
                            0 => 2,
                            1 => 1,
                            _ => 0,
                        };
                        for _ in 0..copies {
                            vals.push((a * a + b * b + c * c) as f64);
                        }
                    }
                }
            }
        }
        vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let bound = ((k + 1) * (k + 1)) as f64;
        if vals.iter().filter(|&&v| v < bound).count() >= count {
            vals.retain(|&v| v < bound);
            vals.truncate(count);
            return vals;
        }
        k *= 2;
    }
}

/// Convergence rates `log(e_{k−1}/e_k) / log(n_k/n_{k−1})` for a mesh
/// sequence with `n` subdivisions per unit length. The first entry, and
/// any entry involving a zero or non-finite error, is `None`.
pub fn compute_rates(errors: &[f64], ns: &[usize]) -> Result<Vec<Option<f64>>> {
    if errors.len() != ns.len() {
        return Err(Error::invalid("one error per mesh is needed"));
    }
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("mesh parameters must increase strictly"));
    }
    let mut out = vec![None];
    for k in 1..errors.len() {
        let (a, b) = (errors[k - 1], errors[k]);
        let rate = (a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite())
            .then(|| (a / b).ln() / (ns[k] as f64 / ns[k - 1] as f64).ln());
        out.push(rate);
    }
    out.truncate(errors.len());
    Ok(out)
}
