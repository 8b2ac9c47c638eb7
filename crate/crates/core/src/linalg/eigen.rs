//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a[p][q]` with a
//! diagonal unitary and then applies the classical real Jacobi rotation, so
//! the combined 2x2 unitary is
//!
//! ```text
//! J = [ c        s      ]      e = a[p][q] / |a[p][q]|
//!     [ -s·ē     c·ē    ]
//! ```
//!
//! and `A <- J† A J`, `V <- V J`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::matrix::{ComplexMatrix, HermitianMatrix, Spectrum};

/// Sweep until the off-diagonal Frobenius mass drops below this (scaled by `max(1, ||A||_F)`).
pub const OFF_DIAGONAL_TOL: f64 = 1e-13;
pub const MAX_SWEEPS: usize = 100;

/// Eigenvalues (descending) with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Spectrum,
    /// Unitary whose column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl Eigen {
    /// `U diag(mapped) U†`.
    pub fn reconstruct_with(&self, mapped: &[f64]) -> HermitianMatrix {
        let u = &self.vectors;
        let n = u.rows();
        assert_eq!(mapped.len(), u.cols());
        let m = ComplexMatrix::from_fn(n, n, |i, j| {
            mapped
                .iter()
                .enumerate()
                .map(|(k, &l)| u[(i, k)] * u[(j, k)].conj() * l)
                .sum()
        });
        HermitianMatrix::symmetrized(m)
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.reconstruct_with(self.values.values())
    }
}

fn off_diagonal_mass(a: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += a[i * n + j].norm_sqr();
        }
    }
    (2.0 * s).sqrt()
}

/// Runs Jacobi sweeps in place. Returns the unsorted diagonal and, if requested, the accumulated rotations.
///
/// Only Hermitian input is meaningful: the rotation updates columns `p`, `q`
/// and mirrors them into rows `p`, `q` by conjugation.
fn jacobi_in_place(m: &mut ComplexMatrix, want_vectors: bool) -> Result<(Vec<f64>, Option<ComplexMatrix>)> {
    let n = m.rows();
    let mut v = want_vectors.then(|| ComplexMatrix::identity(n));
    let threshold = OFF_DIAGONAL_TOL * m.frobenius_norm().max(1.0);
    let a = m.as_mut_slice();
    let zero = Complex64::new(0.0, 0.0);
    let negligible = (1e-3 * threshold / n as f64).max(f64::MIN_POSITIVE);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_mass(a, n);
        if off <= threshold {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let b = apq.norm_sqr().sqrt();
                // pivots this small cannot keep the off-diagonal mass above the threshold
                if b <= negligible {
                    continue;
                }
                let e = apq / b;
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let tau = (aqq - app) / (2.0 * b);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let ec = e.conj();
                let (ecs, ecc) = (ec * s, ec * c);

                // 2x2 block: columns first, then rows
                let aqp = a[q * n + p];
                let (bpp, bpq) = (app * c - apq * ec * s, app * s + apq * ec * c);
                let (bqp, bqq) = (aqp * c - aqq * ec * s, aqp * s + aqq * ec * c);
                let new_pp = (bpp * c - bqp * e * s).re;
                let new_qq = (bpq * s + bqq * e * c).re;

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let kp = akp * c - akq * ecs;
                    let kq = akp * s + akq * ecc;
                    a[k * n + p] = kp;
                    a[k * n + q] = kq;
                    a[p * n + k] = kp.conj();
                    a[q * n + k] = kq.conj();
                }
                a[p * n + q] = zero;
                a[q * n + p] = zero;
                a[p * n + p] = Complex64::new(new_pp, 0.0);
                a[q * n + q] = Complex64::new(new_qq, 0.0);

                if let Some(v) = v.as_mut() {
                    let vs = v.as_mut_slice();
                    for k in 0..n {
                        let vkp = vs[k * n + p];
                        let vkq = vs[k * n + q];
                        vs[k * n + p] = vkp * c - vkq * ecs;
                        vs[k * n + q] = vkp * s + vkq * ecc;
                    }
                }
            }
        }
    }
    Ok(((0..n).map(|i| a[i * n + i].re).collect(), v))
}

fn check_input(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigensolver needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Full Hermitian eigendecomposition.
///
/// The caller is responsible for Hermiticity; only the upper triangle's
/// conjugate symmetry is assumed by the rotation formulas.
pub fn eigen_decompose(m: &ComplexMatrix) -> Result<Eigen> {
    check_input(m)?;
    let mut a = m.clone();
    let (diag, v) = jacobi_in_place(&mut a, true)?;
    let v = v.expect("vectors requested");
    let n = diag.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let vectors = ComplexMatrix::from_fn(n, n, |r, k| v[(r, order[k])]);
    let values = Spectrum::new(order.iter().map(|&i| diag[i]).collect());
    Ok(Eigen { values, vectors })
}

/// Eigenvalues only; consumes its argument as workspace.
pub fn eigenvalues_of(mut m: ComplexMatrix) -> Result<Spectrum> {
    check_input(&m)?;
    let (diag, _) = jacobi_in_place(&mut m, false)?;
    Ok(Spectrum::new(diag))
}

pub(crate) fn jacobi_eigen(m: &ComplexMatrix, want_vectors: bool) -> Result<Eigen> {
    if want_vectors {
        eigen_decompose(m)
    } else {
        Ok(Eigen {
            values: eigenvalues_of(m.clone())?,
            vectors: ComplexMatrix::zeros(0, 0),
        })
    }
}
