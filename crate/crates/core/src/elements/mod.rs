//! Reference finite elements on simplices, quadrature, and the affine maps
//! that carry them to physical cells.

mod lagrange;
mod map;
mod nedelec;
mod quadrature;

pub use lagrange::eval_lagrange;
pub use map::AffineMap;
pub use nedelec::{cross as cross_product, eval_nedelec2d, eval_nedelec3d};
pub use quadrature::{gauss_legendre, quadrature, QuadratureRule};

use crate::mesh::local_edges;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementFamily {
    /// Continuous Lagrange elements of the given degree (1 or 2).
    Lagrange(u8),
    /// Lowest-order Nédélec edge elements of the first kind.
    Nedelec,
}

/// Mesh entity a degree of freedom is attached to, in local numbering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Entity {
    Vertex(usize),
    Edge(usize),
}

/// Values of all reference basis functions at one point. Scalar bases use
/// component 0 of `values`; `derivs` holds gradients for Lagrange bases and
/// curls for Nédélec bases (the scalar rot in component 0 in 2D).
#[derive(Clone, Debug, Default)]
pub struct BasisValues {
    pub values: Vec<[f64; 3]>,
    pub derivs: Vec<[f64; 3]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReferenceBasis {
    pub family: ElementFamily,
    pub dim: usize,
}

impl ReferenceBasis {
    pub fn new(family: ElementFamily, dim: usize) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::invalid(format!("element dimension must be 2 or 3, got {dim}")));
        }
        if let ElementFamily::Lagrange(k) = family {
            if k != 1 && k != 2 {
                return Err(Error::Unsupported(format!("Lagrange degree {k}")));
            }
        }
        Ok(ReferenceBasis { family, dim })
    }

    pub fn dof_count(&self) -> usize {
        let nv = self.dim + 1;
        let ne = local_edges(self.dim).len();
        match self.family {
            ElementFamily::Lagrange(1) => nv,
            ElementFamily::Lagrange(_) => nv + ne,
            ElementFamily::Nedelec => ne,
        }
    }

    pub fn entity(&self, i: usize) -> Entity {
        let nv = self.dim + 1;
        match self.family {
            ElementFamily::Nedelec => Entity::Edge(i),
            ElementFamily::Lagrange(_) if i < nv => Entity::Vertex(i),
            ElementFamily::Lagrange(_) => Entity::Edge(i - nv),
        }
    }

    pub fn is_vector_valued(&self) -> bool {
        self.family == ElementFamily::Nedelec
    }

    /// Evaluates every basis function at a point given in reference
    /// Cartesian coordinates.
    pub fn eval(&self, point: &[f64]) -> Result<BasisValues> {
        match self.family {
            ElementFamily::Lagrange(k) => {
                let (v, g) = eval_lagrange(k, self.dim, point)?;
                Ok(BasisValues { values: v.into_iter().map(|x| [x, 0.0, 0.0]).collect(), derivs: g })
            }
            ElementFamily::Nedelec if self.dim == 2 => {
                let (v, r) = eval_nedelec2d(point)?;
                Ok(BasisValues { values: v, derivs: r.into_iter().map(|x| [x, 0.0, 0.0]).collect() })
            }
            ElementFamily::Nedelec => {
                let (v, c) = eval_nedelec3d(point)?;
                Ok(BasisValues { values: v, derivs: c })
            }
        }
    }
}

/// Barycentric coordinates and their (constant) reference gradients.
pub(crate) fn barycentric(dim: usize, point: &[f64]) -> Result<(Vec<f64>, Vec<[f64; 3]>)> {
    if point.len() < dim {
        return Err(Error::invalid(format!("point has {} coordinates, need {dim}", point.len())));
    }
    let tol = 1e-12;
    let sum: f64 = point[..dim].iter().sum();
    if point[..dim].iter().any(|&x| x < -tol) || sum > 1.0 + tol || point[..dim].iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid(format!("point {:?} is outside the reference simplex", &point[..dim])));
    }
    let mut lam = vec![1.0 - sum];
    lam.extend_from_slice(&point[..dim]);
    let mut grad = vec![[0.0; 3]; dim + 1];
    for k in 0..dim {
        grad[0][k] = -1.0;
        grad[k + 1][k] = 1.0;
    }
    Ok((lam, grad))
}
