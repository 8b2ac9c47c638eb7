//! Dense complex linear algebra: Kronecker products, partial traces,
//! Hermitian eigendecomposition and spectral calculus.
//!
//! Everything here is sized for the small systems of the laboratory
//! (dimension up to a few dozen); no BLAS, no sparse storage.

pub mod eigen;
mod matrix;
pub mod random;

pub use eigen::{eigen_decompose, eigenvalues_of, Eigen};
pub use matrix::{
    ComplexMatrix, DensityMatrix, HermitianMatrix, Side, Spectrum, DENSITY_TOL, HERMITIAN_TOL,
};

use crate::error::Result;

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

pub fn partial_trace(m: &HermitianMatrix, dims: (usize, usize), keep: Side) -> Result<HermitianMatrix> {
    m.partial_trace(dims, keep)
}

pub fn eig_hermitian(m: &HermitianMatrix) -> Result<(Spectrum, ComplexMatrix)> {
    let e = m.eig()?;
    Ok((e.values, e.vectors))
}

pub fn spectral_apply(f: impl Fn(f64) -> f64, m: &HermitianMatrix) -> Result<HermitianMatrix> {
    m.spectral_apply(f)
}
