//! Schmidt decomposition of bipartite pure states.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigen_decompose, ComplexMatrix};
use crate::optimize::PureState;
use crate::werner::SchmidtVector;

/// `ψ = Σₖ cₖ |uₖ⟩ ⊗ |vₖ⟩` with `c` descending; `left` and `right` hold `u` and `v` as columns.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    pub coefficients: Vec<f64>,
    pub left: ComplexMatrix,
    pub right: ComplexMatrix,
}

impl SchmidtDecomposition {
    /// The squared coefficients as a probability vector.
    pub fn schmidt_vector(&self) -> Result<SchmidtVector> {
        SchmidtVector::normalized(self.coefficients.iter().map(|c| c * c).collect())
    }

    /// `Σₖ cₖ uₖ ⊗ vₖ` as amplitudes.
    pub fn reconstruct(&self) -> Vec<Complex64> {
        let (d1, d2) = (self.left.rows(), self.right.rows());
        let mut psi = vec![Complex64::new(0.0, 0.0); d1 * d2];
        for (k, &c) in self.coefficients.iter().enumerate() {
            for i in 0..d1 {
                let a = self.left[(i, k)] * c;
                for j in 0..d2 {
                    psi[i * d2 + j] += a * self.right[(j, k)];
                }
            }
        }
        psi
    }
}

/// Completes the first `filled` orthonormal columns of `basis` to `basis.cols()` columns.
fn complete_orthonormal(basis: &mut ComplexMatrix, filled: usize) {
    let dim = basis.rows();
    let mut col = filled;
    let mut candidate = 0;
    while col < basis.cols() && candidate < dim {
        let mut v: Vec<Complex64> = (0..dim)
            .map(|i| Complex64::new(if i == candidate { 1.0 } else { 0.0 }, 0.0))
            .collect();
        candidate += 1;
        for _ in 0..2 {
            for k in 0..col {
                let proj: Complex64 = (0..dim).map(|i| basis[(i, k)].conj() * v[i]).sum();
                for (i, x) in v.iter_mut().enumerate() {
                    *x -= proj * basis[(i, k)];
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for (i, x) in v.into_iter().enumerate() {
                basis[(i, col)] = x / norm;
            }
            col += 1;
        }
    }
}

/// Schmidt decomposition of `psi ∈ C^{d1} ⊗ C^{d2}` with `min(d1, d2)` terms.
pub fn schmidt_decompose(psi: &PureState, d1: usize, d2: usize) -> Result<SchmidtDecomposition> {
    if psi.dim() != d1 * d2 || d1 == 0 || d2 == 0 {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} cannot split as {d1} x {d2}",
            psi.dim()
        )));
    }
    let amps = psi.amplitudes();
    let m = ComplexMatrix::from_fn(d1, d2, |i, j| amps[i * d2 + j]);
    // left reduced state M M†; its eigenvectors are the left Schmidt vectors
    let eig = eigen_decompose(&m.matmul(&m.adjoint()))?;
    let r = d1.min(d2);
    let coefficients: Vec<f64> = eig.values.values()[..r].iter().map(|&l| l.max(0.0).sqrt()).collect();
    let left = ComplexMatrix::from_fn(d1, r, |i, k| eig.vectors[(i, k)]);

    let mut right = ComplexMatrix::zeros(d2, r);
    let mut filled = 0;
    for (k, &c) in coefficients.iter().enumerate() {
        if c <= 1e-10 {
            break;
        }
        // vₖ = Mᵀ conj(uₖ) / cₖ
        for j in 0..d2 {
            let s: Complex64 = (0..d1).map(|i| m[(i, j)] * left[(i, k)].conj()).sum();
            right[(j, k)] = s / c;
        }
        filled += 1;
    }
    complete_orthonormal(&mut right, filled);
    Ok(SchmidtDecomposition {
        coefficients,
        left,
        right,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_pure_state, stream_rng};
    use crate::linalg::{DensityMatrix, Side};

    fn state(v: Vec<Complex64>) -> PureState {
        PureState::new(v).unwrap()
    }

    fn phase_aligned_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
        let overlap: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
        let phase = if overlap.norm() > 0.0 { overlap / overlap.norm() } else { Complex64::new(1.0, 0.0) };
        a.iter().zip(b).map(|(x, y)| (x * phase - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn product_state() {
        let mut v = vec![Complex64::new(0.0, 0.0); 9];
        v[1] = Complex64::new(1.0, 0.0); // |0>|1>
        let s = schmidt_decompose(&state(v.clone()), 3, 3).unwrap();
        assert!((s.coefficients[0] - 1.0).abs() < 1e-12);
        assert!(s.coefficients[1..].iter().all(|&c| c < 1e-12));
        assert!(phase_aligned_diff(&s.reconstruct(), &v) < 1e-8);
    }

    #[test]
    fn maximally_entangled() {
        let sv = SchmidtVector::triple(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0).unwrap();
        let s = schmidt_decompose(&state(sv.canonical_state()), 3, 3).unwrap();
        for c in &s.coefficients {
            assert!((c - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn random_states_match_reduced_density() {
        let mut rng = stream_rng(17, 0);
        for (d1, d2) in [(3, 3), (2, 3), (3, 2), (2, 4)] {
            let psi = random_pure_state(&mut rng, d1 * d2);
            let s = schmidt_decompose(&state(psi.clone()), d1, d2).unwrap();
            let sq: f64 = s.coefficients.iter().map(|c| c * c).sum();
            assert!((sq - 1.0).abs() < 1e-10);
            assert!(phase_aligned_diff(&s.reconstruct(), &psi) < 1e-8);
            let reduced = DensityMatrix::pure(&psi).unwrap().partial_trace((d1, d2), Side::Left).unwrap();
            let eig = reduced.op().eigenvalues().unwrap();
            for (k, c) in s.coefficients.iter().enumerate() {
                assert!((c * c - eig.values()[k]).abs() < 1e-10);
            }
            let right_gram = s.right.adjoint().matmul(&s.right);
            assert!(right_gram.max_diff(&ComplexMatrix::identity(d1.min(d2))) < 1e-8);
        }
    }

    #[test]
    fn rank_deficient_state_reconstructs() {
        let mut rng = stream_rng(5, 0);
        let a = random_pure_state(&mut rng, 3);
        let b = random_pure_state(&mut rng, 3);
        let psi: Vec<Complex64> = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        let s = schmidt_decompose(&state(psi.clone()), 3, 3).unwrap();
        assert!(phase_aligned_diff(&s.reconstruct(), &psi) < 1e-8);
        assert!(s.right.adjoint().matmul(&s.right).max_diff(&ComplexMatrix::identity(3)) < 1e-8);
    }

    #[test]
    fn dimension_mismatch() {
        let psi = state(vec![Complex64::new(1.0, 0.0); 1]);
        assert!(schmidt_decompose(&psi, 2, 2).is_err());
    }
}
