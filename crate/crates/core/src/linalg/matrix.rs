//! Dense row-major complex matrices and the Hermitian / density wrappers.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::eigen::{self, Eigen};

/// Max-norm tolerance on `A - A†` for a matrix to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Tolerance on eigenvalue positivity and unit trace for density matrices.
pub const DENSITY_TOL: f64 = 1e-9;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from row-major entries, rejecting wrong lengths and non-finite values.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidArgument("matrix dimensions must be positive".into()));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self::from_row_major(r, c, data)
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = Complex64::new(v, 0.0);
        }
        m
    }

    /// Rank-one projector `|v><v|` (no normalization applied).
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    /// The matrix unit `|i><j|` of size `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(i, j)] = ONE;
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max-norm distance to another matrix of the same shape.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max-norm of `A - A†`; infinite for non-square matrices.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let row = &other.data[k * other.cols..(k + 1) * other.cols];
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect()
    }

    /// Kronecker product: block `(i, j)` of the result is `self[i, j] * other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (ra, ca, rb, cb) = (self.rows, self.cols, other.rows, other.cols);
        let mut out = Self::zeros(ra * rb, ca * cb);
        for i in 0..ra {
            for j in 0..ca {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..rb {
                    for l in 0..cb {
                        out[(i * rb + k, j * cb + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// `U * self * U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.matmul(self).matmul(&u.adjoint())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:>10.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// JSON wire form. Square matrices use `dim`; rectangular ones use `rows`/`cols`.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    rows: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    cols: Option<usize>,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (dim, rows, cols) = if self.is_square() {
            (Some(self.rows), None, None)
        } else {
            (None, Some(self.rows), Some(self.cols))
        };
        MatrixRepr {
            dim,
            rows,
            cols,
            re: self.data.iter().map(|z| z.re).collect(),
            im: self.data.iter().map(|z| z.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = MatrixRepr::deserialize(d)?;
        let (rows, cols) = match (repr.dim, repr.rows, repr.cols) {
            (Some(n), None, None) => (n, n),
            (None, Some(r), Some(c)) => (r, c),
            _ => {
                return Err(D::Error::custom(
                    "matrix needs either `dim` or both `rows` and `cols`",
                ))
            }
        };
        if repr.re.len() != repr.im.len() {
            return Err(D::Error::custom("`re` and `im` differ in length"));
        }
        let data = repr
            .re
            .iter()
            .zip(&repr.im)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect();
        ComplexMatrix::from_row_major(rows, cols, data).map_err(D::Error::custom)
    }
}

/// Which tensor factor a partial trace keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Square matrix equal to its conjugate transpose within [`HERMITIAN_TOL`].
#[derive(Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct HermitianMatrix {
    inner: ComplexMatrix,
}

impl HermitianMatrix {
    pub fn new(inner: ComplexMatrix) -> Result<Self> {
        if !inner.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian matrix must be square, got {}x{}",
                inner.rows, inner.cols
            )));
        }
        let dev = inner.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self::symmetrized(inner))
    }

    /// Replaces `m` by `(m + m†)/2`. The caller guarantees the input is square.
    pub(crate) fn symmetrized(mut inner: ComplexMatrix) -> Self {
        let n = inner.rows;
        for i in 0..n {
            inner[(i, i)].im = 0.0;
            for j in (i + 1)..n {
                let avg = (inner[(i, j)] + inner[(j, i)].conj()) * 0.5;
                inner[(i, j)] = avg;
                inner[(j, i)] = avg.conj();
            }
        }
        Self { inner }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: ComplexMatrix::identity(n),
        }
    }

    pub fn diag(values: &[f64]) -> Self {
        Self {
            inner: ComplexMatrix::diag_real(values),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.inner
    }

    pub fn trace(&self) -> f64 {
        self.inner.trace().re
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            inner: self.inner.kron(&other.inner),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            inner: &self.inner + &other.inner,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            inner: &self.inner - &other.inner,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            inner: self.inner.scale_real(s),
        }
    }

    /// `U * self * U†`, which stays Hermitian for any square `U`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        Self::symmetrized(self.inner.conjugate_by(u))
    }

    /// Traces out one factor of a `d1 x d2` bipartite operator.
    pub fn partial_trace(&self, (d1, d2): (usize, usize), keep: Side) -> Result<Self> {
        if d1 * d2 != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "cannot split dimension {} as {d1}x{d2}",
                self.dim()
            )));
        }
        let m = &self.inner;
        let out = match keep {
            Side::Left => ComplexMatrix::from_fn(d1, d1, |i, j| {
                (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum()
            }),
            Side::Right => ComplexMatrix::from_fn(d2, d2, |k, l| {
                (0..d1).map(|i| m[(i * d2 + k, i * d2 + l)]).sum()
            }),
        };
        Ok(Self::symmetrized(out))
    }

    /// Full eigendecomposition by cyclic Jacobi rotations.
    pub fn eig(&self) -> Result<Eigen> {
        eigen::jacobi_eigen(&self.inner, true)
    }

    /// Eigenvalues only (skips eigenvector accumulation).
    pub fn eigenvalues(&self) -> Result<Spectrum> {
        eigen::jacobi_eigen(&self.inner, false).map(|e| e.values)
    }

    /// Spectral calculus `U diag(f(λ)) U†` for an arbitrary real function.
    pub fn spectral_apply(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let eig = self.eig()?;
        let mapped: Vec<f64> = eig.values.values().iter().map(|&x| f(x)).collect();
        Ok(eig.reconstruct_with(&mapped))
    }
}

impl<'de> Deserialize<'de> for HermitianMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = ComplexMatrix::deserialize(d)?;
        HermitianMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for HermitianMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Hermitian{:?}", self.inner)
    }
}

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct DensityMatrix {
    op: HermitianMatrix,
}

impl DensityMatrix {
    pub fn new(op: HermitianMatrix) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > DENSITY_TOL {
            return Err(Error::NotDensity(format!("trace {tr} differs from 1")));
        }
        let spec = op.eigenvalues()?;
        let min = spec.min();
        if min < -DENSITY_TOL {
            return Err(Error::NotDensity(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { op })
    }

    /// Projector onto the normalized vector `psi`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidArgument("state vector has zero or non-finite norm".into()));
        }
        let v: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Ok(Self {
            op: HermitianMatrix::symmetrized(ComplexMatrix::outer(&v)),
        })
    }

    /// `|i><i|` in dimension `n`.
    pub fn basis(n: usize, i: usize) -> Self {
        Self {
            op: HermitianMatrix::diag(&(0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect::<Vec<_>>()),
        }
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            op: HermitianMatrix::identity(n).scale(1.0 / n as f64),
        }
    }

    /// Diagonal state with the given probability vector.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::diag(probs))
    }

    /// Trusted constructor for operators that are density matrices by construction.
    pub(crate) fn from_trusted(op: HermitianMatrix) -> Self {
        Self { op }
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn op(&self) -> &HermitianMatrix {
        &self.op
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.op.matrix()
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            op: self.op.kron(&other.op),
        }
    }

    pub fn partial_trace(&self, dims: (usize, usize), keep: Side) -> Result<Self> {
        self.op.partial_trace(dims, keep).map(Self::from_trusted)
    }

    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        Self {
            op: self.op.conjugate_by(u),
        }
    }

    /// Spectrum, checked against the density-matrix bounds.
    pub fn spectrum(&self) -> Result<Spectrum> {
        let s = self.op.eigenvalues()?;
        s.check_density()?;
        Ok(s)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let op = HermitianMatrix::deserialize(d)?;
        DensityMatrix::new(op).map_err(serde::de::Error::custom)
    }
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Density{:?}", self.op.matrix())
    }
}

/// Real eigenvalues sorted in descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    /// Sorts the given values descending.
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.values.first().copied().unwrap_or(f64::NAN)
    }

    pub fn min(&self) -> f64 {
        self.values.last().copied().unwrap_or(f64::NAN)
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Largest absolute difference against another spectrum of equal length.
    pub fn max_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.len(), other.len(), "spectra differ in length");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// All pairwise products, as the spectrum of a Kronecker product.
    pub fn tensor(&self, other: &Self) -> Self {
        Self::new(
            self.values
                .iter()
                .flat_map(|a| other.values.iter().map(move |b| a * b))
                .collect(),
        )
    }

    /// Sum within 1e-8 of one and every value in `[-1e-9, 1 + 1e-9]`.
    pub fn check_density(&self) -> Result<()> {
        let sum = self.sum();
        if (sum - 1.0).abs() > 1e-8 {
            return Err(Error::NotDensity(format!("eigenvalues sum to {sum}")));
        }
        if let Some(&bad) = self
            .values
            .iter()
            .find(|&&x| !(-DENSITY_TOL..=1.0 + DENSITY_TOL).contains(&x))
        {
            return Err(Error::NotDensity(format!("eigenvalue {bad} outside [0, 1]")));
        }
        Ok(())
    }
}
