//! Finite element spaces, bilinear forms and sparse matrices.

mod coefficients;
mod forms;
mod reduce;
mod space;
mod sparse;

pub use coefficients::{CoefficientField, Material};
pub use forms::{assemble, assemble_with_degree, discrete_gradient, Form, DEFAULT_QUADRATURE_DEGREE};
pub use reduce::{eliminate_constraints, DofMap, Reduced};
pub use space::{Constraint, FESpace, SpaceKind};
pub use sparse::SparseMatrix;
