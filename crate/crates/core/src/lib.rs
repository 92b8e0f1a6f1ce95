//! Least-squares finite element discretization of the Maxwell eigenvalue
//! problem, written as a first-order system.
//!
//! The crate builds structured simplicial meshes of the usual benchmark
//! domains, assembles the block matrices of the least-squares formulation
//! with edge or nodal elements, and computes the smallest eigenvalues of the
//! resulting non-symmetric pencil `K z = λ M z` by shift-and-invert Arnoldi.
//! A dense QZ solver and a Schur-complement reduction serve as independent
//! checks on small problems.

pub mod assembly;
pub mod bench;
pub mod elements;
mod error;
pub mod formulations;
pub mod mesh;
pub mod pencil;

pub use error::{Error, Result};
