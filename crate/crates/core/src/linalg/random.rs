//! Seeded random matrices and states.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rand_distr::StandardNormal;

use crate::linalg::matrix::{ComplexMatrix, DensityMatrix, HermitianMatrix};

/// Generator for job `stream` of a run seeded with `seed`.
///
/// Streams are independent, so parallel jobs reproduce regardless of scheduling.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar-distributed unit vector in `C^dim`.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Haar-random unitary: Gram-Schmidt on the columns of a complex Ginibre matrix.
///
/// Gram-Schmidt leaves a positive diagonal in the implied `R` factor, which is
/// the phase fixing needed for the Haar measure.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let mut cols: Vec<Vec<Complex64>> = (0..dim).map(|j| (0..dim).map(|i| g[(i, j)]).collect()).collect();
    for j in 0..dim {
        // two passes of modified Gram-Schmidt for orthogonality to machine precision
        for _ in 0..2 {
            for k in 0..j {
                let (done, rest) = cols.split_at_mut(j);
                let qk = &done[k];
                let proj: Complex64 = qk.iter().zip(rest[0].iter()).map(|(a, b)| a.conj() * b).sum();
                for (x, q) in rest[0].iter_mut().zip(qk) {
                    *x -= proj * q;
                }
            }
        }
        let norm = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for x in cols[j].iter_mut() {
            *x /= norm;
        }
    }
    ComplexMatrix::from_fn(dim, dim, |i, j| cols[j][i])
}

/// Hermitian matrix with independent Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    HermitianMatrix::symmetrized(&g + &g.adjoint())
}

/// Hermitian matrix `U diag(x) U†` with eigenvalues drawn uniformly from `[0, 1]`.
pub fn random_unit_interval_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> HermitianMatrix {
    let u = haar_unitary(rng, dim);
    let values: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    HermitianMatrix::diag(&values).conjugate_by(&u)
}

/// Mixed state `G G† / Tr(G G†)` from a square Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| complex_gaussian(rng));
    let w = g.matmul(&g.adjoint());
    let tr = w.trace().re;
    DensityMatrix::from_trusted(HermitianMatrix::symmetrized(w.scale_real(1.0 / tr)))
}

/// Random probability vector (normalized exponentials, i.e. flat Dirichlet).
pub fn random_probability_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}
