use super::barycentric;
use crate::mesh::local_edges;
use crate::{Error, Result};

/// Values and reference gradients of the Lagrange basis of degree `k` at a
/// point of the reference simplex. Vertex functions come first, followed by
/// one function per edge (for `k = 2`) in local edge order.
pub fn eval_lagrange(k: u8, dim: usize, point: &[f64]) -> Result<(Vec<f64>, Vec<[f64; 3]>)> {
    let (lam, dlam) = barycentric(dim, point)?;
    match k {
        1 => Ok((lam, dlam)),
        2 => {
            let mut v = Vec::new();
            let mut g = Vec::new();
            for i in 0..=dim {
                v.push(lam[i] * (2.0 * lam[i] - 1.0));
                g.push(dlam[i].map(|d| d * (4.0 * lam[i] - 1.0)));
            }
            for e in local_edges(dim) {
                let (a, b) = (e[0], e[1]);
                v.push(4.0 * lam[a] * lam[b]);
                g.push(std::array::from_fn(|c| 4.0 * (dlam[a][c] * lam[b] + lam[a] * dlam[b][c])));
            }
            Ok((v, g))
        }
        _ => Err(Error::Unsupported(format!("Lagrange degree {k}"))),
    }
}
