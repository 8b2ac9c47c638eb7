//! Quantum channels: representations, the closed-form channels, tensor
//! products, and CPTP / covariance checks.
//!
//! Every channel is a linear map on operators. Closed-form channels are
//! evaluated by formula; Kraus and superoperator channels by their matrices.
//! The Choi matrix is only assembled when [`QuantumChannel::check_cptp`] asks
//! for it.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::random::{haar_unitary, random_pure_state, stream_rng};
use crate::linalg::{eigenvalues_of, ComplexMatrix, DensityMatrix, HermitianMatrix, Spectrum};

/// Allowed trace drift of a channel output before it is rejected.
pub const TRACE_DRIFT_TOL: f64 = 1e-8;
/// Tolerance used by [`QuantumChannel::check_cptp`].
pub const CPTP_TOL: f64 = 1e-9;
/// Spectrum agreement required by [`QuantumChannel::check_unitary_covariance`].
pub const COVARIANCE_TOL: f64 = 1e-7;
/// Default number of sampled unitaries (and states per unitary) for covariance checks.
pub const DEFAULT_COVARIANCE_SAMPLES: usize = 20;

#[derive(Clone, PartialEq)]
pub enum NamedChannel {
    Identity(usize),
    /// `ρ ↦ (Tr ρ · 1 - ρᵀ)/(d - 1)`.
    WernerHolevo(usize),
    /// `A ↦ Tr(A) σ`.
    Depolarize(DensityMatrix),
    Tensor(Box<QuantumChannel>, Box<QuantumChannel>),
}

#[derive(Clone, PartialEq)]
pub enum ChannelRep {
    /// `X ↦ Σ K X K†` with each `K` of shape `dim_out x dim_in`.
    Kraus(Vec<ComplexMatrix>),
    /// `dim_out² x dim_in²` matrix acting on row-major vectorized operators.
    Superoperator(ComplexMatrix),
    Named(NamedChannel),
}

#[derive(Clone, PartialEq)]
pub struct QuantumChannel {
    dim_in: usize,
    dim_out: usize,
    rep: ChannelRep,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CptpReport {
    pub trace_preserving: bool,
    pub completely_positive: bool,
    pub max_violation: f64,
}

/// On-disk Kraus representation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KrausFile {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<ComplexMatrix>,
}

impl QuantumChannel {
    pub fn identity(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("identity channel needs d >= 1".into()));
        }
        Ok(Self {
            dim_in: d,
            dim_out: d,
            rep: ChannelRep::Named(NamedChannel::Identity(d)),
        })
    }

    pub fn werner_holevo(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidArgument(format!("Werner-Holevo channel needs d >= 2, got {d}")));
        }
        Ok(Self {
            dim_in: d,
            dim_out: d,
            rep: ChannelRep::Named(NamedChannel::WernerHolevo(d)),
        })
    }

    /// Constant-output channel `A ↦ Tr(A) σ` on `C^dim_in`.
    pub fn depolarize(dim_in: usize, sigma: DensityMatrix) -> Result<Self> {
        if dim_in == 0 {
            return Err(Error::InvalidArgument("depolarizing channel needs dim_in >= 1".into()));
        }
        Ok(Self {
            dim_in,
            dim_out: sigma.dim(),
            rep: ChannelRep::Named(NamedChannel::Depolarize(sigma)),
        })
    }

    /// Maximally depolarizing channel onto `1/d` on `C^d`.
    pub fn maximally_depolarizing(d: usize) -> Result<Self> {
        Self::depolarize(d, DensityMatrix::maximally_mixed(d.max(1)))
    }

    pub fn from_kraus(ops: Vec<ComplexMatrix>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty Kraus list".into()))?;
        let (dim_out, dim_in) = (first.rows(), first.cols());
        if let Some(bad) = ops.iter().find(|k| (k.rows(), k.cols()) != (dim_out, dim_in)) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operator {}x{} does not match {dim_out}x{dim_in}",
                bad.rows(),
                bad.cols()
            )));
        }
        Ok(Self {
            dim_in,
            dim_out,
            rep: ChannelRep::Kraus(ops),
        })
    }

    pub fn from_superoperator(dim_in: usize, dim_out: usize, s: ComplexMatrix) -> Result<Self> {
        if (s.rows(), s.cols()) != (dim_out * dim_out, dim_in * dim_in) {
            return Err(Error::DimensionMismatch(format!(
                "superoperator is {}x{}, expected {}x{}",
                s.rows(),
                s.cols(),
                dim_out * dim_out,
                dim_in * dim_in
            )));
        }
        Ok(Self {
            dim_in,
            dim_out,
            rep: ChannelRep::Superoperator(s),
        })
    }

    /// The transpose map `ρ ↦ ρᵀ` on `C^d` (positive and trace preserving, not CP).
    pub fn transpose_map(d: usize) -> Result<Self> {
        let mut s = ComplexMatrix::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                s[(j * d + i, i * d + j)] = Complex64::new(1.0, 0.0);
            }
        }
        Self::from_superoperator(d, d, s)
    }

    /// Loads and validates a Kraus file; the channel must pass [`check_cptp`](Self::check_cptp).
    pub fn from_kraus_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        let file: KrausFile = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("bad Kraus file {}: {e}", path.display())))?;
        Self::from_kraus_data(file)
    }

    pub fn from_kraus_data(file: KrausFile) -> Result<Self> {
        let ch = Self::from_kraus(file.kraus)?;
        if (ch.dim_in, ch.dim_out) != (file.dim_in, file.dim_out) {
            return Err(Error::DimensionMismatch(format!(
                "Kraus operators are {}x{} but file declares dim_out={} dim_in={}",
                ch.dim_out, ch.dim_in, file.dim_out, file.dim_in
            )));
        }
        let report = ch.check_cptp()?;
        if !(report.trace_preserving && report.completely_positive) {
            return Err(Error::InvalidArgument(format!(
                "Kraus operators do not form a channel (violation {:e})",
                report.max_violation
            )));
        }
        Ok(ch)
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn rep(&self) -> &ChannelRep {
        &self.rep
    }

    pub fn named(&self) -> Option<&NamedChannel> {
        match &self.rep {
            ChannelRep::Named(n) => Some(n),
            _ => None,
        }
    }

    /// `Some(d)` for the closed-form Werner-Holevo channel in dimension `d`.
    pub fn werner_holevo_dim(&self) -> Option<usize> {
        match self.named() {
            Some(NamedChannel::WernerHolevo(d)) => Some(*d),
            _ => None,
        }
    }

    /// The linear extension of the channel to arbitrary `dim_in x dim_in` operators.
    pub fn map_operator(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        if (x.rows(), x.cols()) != (self.dim_in, self.dim_in) {
            return Err(Error::DimensionMismatch(format!(
                "channel input is {}-dimensional, operator is {}x{}",
                self.dim_in,
                x.rows(),
                x.cols()
            )));
        }
        Ok(self.map_unchecked(x))
    }

    pub(crate) fn map_unchecked(&self, x: &ComplexMatrix) -> ComplexMatrix {
        match &self.rep {
            ChannelRep::Kraus(ops) => {
                let mut out = ComplexMatrix::zeros(self.dim_out, self.dim_out);
                for k in ops {
                    out = &out + &k.matmul(x).matmul(&k.adjoint());
                }
                out
            }
            ChannelRep::Superoperator(s) => {
                let v = s.mul_vec(x.as_slice());
                ComplexMatrix::from_row_major(self.dim_out, self.dim_out, v)
                    .unwrap_or_else(|_| ComplexMatrix::zeros(self.dim_out, self.dim_out))
            }
            ChannelRep::Named(named) => match named {
                NamedChannel::Identity(_) => x.clone(),
                NamedChannel::WernerHolevo(d) => {
                    let d = *d;
                    let tr = x.trace();
                    let inv = 1.0 / (d as f64 - 1.0);
                    ComplexMatrix::from_fn(d, d, |i, j| {
                        let diag = if i == j { tr } else { Complex64::new(0.0, 0.0) };
                        (diag - x[(j, i)]) * inv
                    })
                }
                NamedChannel::Depolarize(sigma) => sigma.matrix().scale(x.trace()),
                NamedChannel::Tensor(a, b) => tensor_map(a, b, x),
            },
        }
    }

    /// Applies the channel to a state and validates the output.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let out = self.map_operator(rho.matrix())?;
        let tr = out.trace();
        if (tr.re - 1.0).abs() > TRACE_DRIFT_TOL || tr.im.abs() > TRACE_DRIFT_TOL {
            return Err(Error::ChannelViolation(format!("output trace {tr}")));
        }
        let dev = out.hermitian_deviation();
        if dev > TRACE_DRIFT_TOL {
            return Err(Error::ChannelViolation(format!("output not Hermitian (deviation {dev:e})")));
        }
        let op = HermitianMatrix::new(out).map_err(|e| Error::ChannelViolation(e.to_string()))?;
        let min = op.eigenvalues()?.min();
        if min < -crate::linalg::DENSITY_TOL {
            return Err(Error::ChannelViolation(format!("output has eigenvalue {min:e}")));
        }
        Ok(DensityMatrix::from_trusted(op))
    }

    /// Output spectrum for the pure input `psi` (assumed normalized). Hot path of the optimizer.
    pub fn pure_output_spectrum(&self, psi: &[Complex64]) -> Result<Spectrum> {
        let out = self.map_operator(&ComplexMatrix::outer(psi))?;
        eigenvalues_of(out)
    }

    /// Materializes the superoperator on row-major vectorized operators.
    pub fn superoperator(&self) -> ComplexMatrix {
        let (di, d_o) = (self.dim_in, self.dim_out);
        let mut s = ComplexMatrix::zeros(d_o * d_o, di * di);
        for i in 0..di {
            for j in 0..di {
                let img = self.map_unchecked(&ComplexMatrix::unit(di, i, j));
                for (r, &z) in img.as_slice().iter().enumerate() {
                    s[(r, i * di + j)] = z;
                }
            }
        }
        s
    }

    /// Normalized Choi matrix `(1/d_in) Σ |i><j| ⊗ Φ(|i><j|)`.
    pub fn choi(&self) -> ComplexMatrix {
        let (di, d_o) = (self.dim_in, self.dim_out);
        let mut c = ComplexMatrix::zeros(di * d_o, di * d_o);
        let w = 1.0 / di as f64;
        for i in 0..di {
            for j in 0..di {
                let img = self.map_unchecked(&ComplexMatrix::unit(di, i, j));
                for k in 0..d_o {
                    for l in 0..d_o {
                        c[(i * d_o + k, j * d_o + l)] = img[(k, l)] * w;
                    }
                }
            }
        }
        c
    }

    /// CP iff the Choi matrix is PSD, TP iff its output partial trace is `1/d_in`.
    pub fn check_cptp(&self) -> Result<CptpReport> {
        let choi = self.choi();
        let herm_dev = choi.hermitian_deviation();
        let (di, d_o) = (self.dim_in, self.dim_out);

        let reduced = ComplexMatrix::from_fn(di, di, |i, j| {
            (0..d_o).map(|k| choi[(i * d_o + k, j * d_o + k)]).sum::<Complex64>() * di as f64
        });
        let tp_violation = reduced.max_diff(&ComplexMatrix::identity(di));

        let cp_violation = if herm_dev > CPTP_TOL {
            herm_dev
        } else {
            let op = HermitianMatrix::symmetrized(choi);
            (-op.eigenvalues()?.min()).max(0.0)
        };
        Ok(CptpReport {
            trace_preserving: tp_violation <= CPTP_TOL,
            completely_positive: cp_violation <= CPTP_TOL,
            max_violation: tp_violation.max(cp_violation),
        })
    }

    /// Sampled spectrum-level unitary covariance.
    ///
    /// True iff for `samples` Haar unitaries `U` and `samples` Haar pure states
    /// `ρ` per unitary, `spec Φ(UρU†)` equals `spec Φ(ρ)` within 1e-7.
    pub fn check_unitary_covariance(&self, samples: usize, seed: u64) -> Result<bool> {
        let mut rng = stream_rng(seed, 0);
        for _ in 0..samples {
            let u = haar_unitary(&mut rng, self.dim_in);
            for _ in 0..samples {
                let psi = random_pure_state(&mut rng, self.dim_in);
                let rotated = u.mul_vec(&psi);
                let a = self.pure_output_spectrum(&psi)?;
                let b = self.pure_output_spectrum(&rotated)?;
                if a.max_diff(&b) > COVARIANCE_TOL {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Short description in the channel-spec language where possible.
    pub fn describe(&self) -> String {
        match &self.rep {
            ChannelRep::Named(NamedChannel::Identity(d)) => format!("id:{d}"),
            ChannelRep::Named(NamedChannel::WernerHolevo(d)) => format!("wh:{d}"),
            ChannelRep::Named(NamedChannel::Depolarize(sigma)) => {
                if sigma.matrix().max_diff(DensityMatrix::maximally_mixed(sigma.dim()).matrix()) < 1e-15
                    && sigma.dim() == self.dim_in
                {
                    format!("depol:{}", self.dim_in)
                } else {
                    format!("const({}->{})", self.dim_in, self.dim_out)
                }
            }
            ChannelRep::Named(NamedChannel::Tensor(a, b)) => format!("({})x({})", a.describe(), b.describe()),
            ChannelRep::Kraus(ops) => format!("kraus({}->{},{} ops)", self.dim_in, self.dim_out, ops.len()),
            ChannelRep::Superoperator(_) => format!("superop({}->{})", self.dim_in, self.dim_out),
        }
    }
}

impl fmt::Debug for QuantumChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuantumChannel({})", self.describe())
    }
}

/// `Φ ⊗ Ω` as a channel.
pub fn tensor(a: &QuantumChannel, b: &QuantumChannel) -> QuantumChannel {
    QuantumChannel {
        dim_in: a.dim_in * b.dim_in,
        dim_out: a.dim_out * b.dim_out,
        rep: ChannelRep::Named(NamedChannel::Tensor(Box::new(a.clone()), Box::new(b.clone()))),
    }
}

/// `(A ⊗ B)(X)`: apply `A` blockwise on the left factor, then `B` on the right factor.
fn tensor_map(a: &QuantumChannel, b: &QuantumChannel, x: &ComplexMatrix) -> ComplexMatrix {
    let (ai, ao, bi, bo) = (a.dim_in, a.dim_out, b.dim_in, b.dim_out);
    // Z[(i',k),(j',l)] = A(X^{kl})[i',j'] where X^{kl}[i,j] = X[(i,k),(j,l)]
    let mut z = ComplexMatrix::zeros(ao * bi, ao * bi);
    for k in 0..bi {
        for l in 0..bi {
            let block = ComplexMatrix::from_fn(ai, ai, |i, j| x[(i * bi + k, j * bi + l)]);
            let img = a.map_unchecked(&block);
            for i in 0..ao {
                for j in 0..ao {
                    z[(i * bi + k, j * bi + l)] = img[(i, j)];
                }
            }
        }
    }
    let mut out = ComplexMatrix::zeros(ao * bo, ao * bo);
    for i in 0..ao {
        for j in 0..ao {
            let block = ComplexMatrix::from_fn(bi, bi, |k, l| z[(i * bi + k, j * bi + l)]);
            let img = b.map_unchecked(&block);
            for k in 0..bo {
                for l in 0..bo {
                    out[(i * bo + k, j * bo + l)] = img[(k, l)];
                }
            }
        }
    }
    out
}

/// An ordered pair `(Φ, Ω)` whose joint channel is `Φ ⊗ Ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelPair {
    pub left: QuantumChannel,
    pub right: QuantumChannel,
}

impl ChannelPair {
    pub fn new(left: QuantumChannel, right: QuantumChannel) -> Self {
        Self { left, right }
    }

    pub fn joint(&self) -> QuantumChannel {
        tensor(&self.left, &self.right)
    }

    pub fn output_dim(&self) -> usize {
        self.left.dim_out * self.right.dim_out
    }

    pub fn input_dims(&self) -> (usize, usize) {
        (self.left.dim_in, self.right.dim_in)
    }

    /// True for the closed-form pair `(Φ₃, Φ₃)`.
    pub fn is_werner_holevo_3(&self) -> bool {
        self.left.werner_holevo_dim() == Some(3) && self.right.werner_holevo_dim() == Some(3)
    }

    pub fn describe(&self) -> String {
        format!("{},{}", self.left.describe(), self.right.describe())
    }

    /// Output of `Φ(ψ₁) ⊗ Ω(ψ₂)` as an operator.
    pub fn product_output(&self, psi1: &[Complex64], psi2: &[Complex64]) -> Result<ComplexMatrix> {
        let a = self.left.map_operator(&ComplexMatrix::outer(psi1))?;
        let b = self.right.map_operator(&ComplexMatrix::outer(psi2))?;
        Ok(a.kron(&b))
    }
}

/// Parses `wh:<d>`, `id:<d>`, `depol:<d>` or `@<kraus.json>`.
pub fn parse_channel_spec(spec: &str) -> Result<QuantumChannel> {
    let spec = spec.trim();
    if let Some(path) = spec.strip_prefix('@') {
        return QuantumChannel::from_kraus_file(path);
    }
    let (tag, arg) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("channel spec `{spec}` needs the form tag:dim or @file")))?;
    let d: usize = arg
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad dimension in channel spec `{spec}`")))?;
    match tag.trim() {
        "wh" => QuantumChannel::werner_holevo(d),
        "id" => QuantumChannel::identity(d),
        "depol" => QuantumChannel::maximally_depolarizing(d),
        other => Err(Error::Parse(format!("unknown channel tag `{other}`"))),
    }
}

/// Parses `left,right` (the right spec may itself not contain a comma).
pub fn parse_pair_spec(spec: &str) -> Result<ChannelPair> {
    let (l, r) = spec
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("pair spec `{spec}` needs the form left,right")))?;
    Ok(ChannelPair::new(parse_channel_spec(l)?, parse_channel_spec(r)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::random::{random_density, random_pure_state};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn amplitude_damping(gamma: f64) -> QuantumChannel {
        let k0 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, (1.0 - gamma).sqrt()]]).unwrap();
        let k1 = ComplexMatrix::from_real_rows(&[&[0.0, gamma.sqrt()], &[0.0, 0.0]]).unwrap();
        QuantumChannel::from_kraus(vec![k0, k1]).unwrap()
    }

    /// Qutrit channel with Kraus {|0><0|, |0><1|, |1><2|}: decays 2 -> 1 -> 0 asymmetrically.
    fn qutrit_ladder() -> QuantumChannel {
        let mut k0 = ComplexMatrix::zeros(3, 3);
        k0[(0, 0)] = c(1.0);
        let mut k1 = ComplexMatrix::zeros(3, 3);
        k1[(0, 1)] = c(1.0);
        let mut k2 = ComplexMatrix::zeros(3, 3);
        k2[(1, 2)] = c(1.0);
        QuantumChannel::from_kraus(vec![k0, k1, k2]).unwrap()
    }

    #[test]
    fn identity_apply() {
        let mut rng = stream_rng(1, 0);
        let rho = random_density(&mut rng, 3);
        let out = QuantumChannel::identity(3).unwrap().apply(&rho).unwrap();
        assert!(out.matrix().max_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn werner_holevo_on_basis_state() {
        let wh = QuantumChannel::werner_holevo(3).unwrap();
        let out = wh.apply(&DensityMatrix::basis(3, 0)).unwrap();
        // oracle: (1/(d-1))(I - ρᵀ) evaluated directly
        let expected = ComplexMatrix::diag_real(&[0.0, 0.5, 0.5]);
        assert!(out.matrix().max_diff(&expected) < 1e-15);
    }

    #[test]
    fn werner_holevo_rejects_small_d() {
        assert!(QuantumChannel::werner_holevo(1).is_err());
        assert!(QuantumChannel::werner_holevo(0).is_err());
    }

    #[test]
    fn werner_holevo_pure_spectra() {
        let mut rng = stream_rng(2, 0);
        let wh3 = QuantumChannel::werner_holevo(3).unwrap();
        let wh2 = QuantumChannel::werner_holevo(2).unwrap();
        for _ in 0..10 {
            let s3 = wh3.pure_output_spectrum(&random_pure_state(&mut rng, 3)).unwrap();
            assert!(s3.max_diff(&Spectrum::new(vec![0.5, 0.5, 0.0])) < 1e-12);
            let s2 = wh2.pure_output_spectrum(&random_pure_state(&mut rng, 2)).unwrap();
            assert!(s2.max_diff(&Spectrum::new(vec![1.0, 0.0])) < 1e-12);
        }
    }

    #[test]
    fn depolarize_is_constant() {
        let ch = QuantumChannel::maximally_depolarizing(3).unwrap();
        let mut rng = stream_rng(3, 0);
        let out = ch.apply(&random_density(&mut rng, 3)).unwrap();
        assert!(out.matrix().max_diff(DensityMatrix::maximally_mixed(3).matrix()) < 1e-15);
    }

    #[test]
    fn tensor_of_identities() {
        let id4 = tensor(&QuantumChannel::identity(2).unwrap(), &QuantumChannel::identity(2).unwrap());
        let mut rng = stream_rng(4, 0);
        let rho = random_density(&mut rng, 4);
        assert!(id4.apply(&rho).unwrap().matrix().max_diff(rho.matrix()) < 1e-15);
    }

    #[test]
    fn wh3_pair_on_product_basis_state() {
        let wh = QuantumChannel::werner_holevo(3).unwrap();
        let joint = tensor(&wh, &wh);
        let out = joint.apply(&DensityMatrix::basis(9, 0)).unwrap();
        let spec = out.spectrum().unwrap();
        let expected = Spectrum::new(vec![0.25, 0.25, 0.25, 0.25, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(spec.max_diff(&expected) < 1e-9);
    }

    #[test]
    fn tensor_with_depolarizing_factorizes() {
        let mut rng = stream_rng(5, 0);
        let phi = amplitude_damping(0.3);
        let sigma = random_density(&mut rng, 3);
        let dep = QuantumChannel::depolarize(2, sigma).unwrap();
        let joint = tensor(&phi, &dep);
        let rho = random_density(&mut rng, 2);
        let tau = random_density(&mut rng, 2);
        let direct = joint.apply(&rho.kron(&tau)).unwrap();
        // oracle: explicit kron of the individual outputs
        let oracle = phi.apply(&rho).unwrap().kron(&dep.apply(&tau).unwrap());
        assert!(direct.matrix().max_diff(oracle.matrix()) < 1e-12);
    }

    #[test]
    fn builtin_channels_are_cptp() {
        let sigma = DensityMatrix::basis(2, 0);
        let chans = vec![
            QuantumChannel::identity(3).unwrap(),
            QuantumChannel::werner_holevo(2).unwrap(),
            QuantumChannel::werner_holevo(3).unwrap(),
            QuantumChannel::werner_holevo(4).unwrap(),
            QuantumChannel::maximally_depolarizing(3).unwrap(),
            QuantumChannel::depolarize(3, sigma).unwrap(),
            amplitude_damping(0.4),
            qutrit_ladder(),
            tensor(&QuantumChannel::werner_holevo(3).unwrap(), &QuantumChannel::identity(2).unwrap()),
        ];
        for ch in chans {
            let r = ch.check_cptp().unwrap();
            assert!(r.trace_preserving && r.completely_positive, "{ch:?}: {r:?}");
        }
    }

    #[test]
    fn transpose_is_tp_not_cp() {
        for d in 2..=3 {
            let r = QuantumChannel::transpose_map(d).unwrap().check_cptp().unwrap();
            assert!(r.trace_preserving);
            assert!(!r.completely_positive);
            // normalized Choi of the transpose is swap/d, min eigenvalue -1/d
            assert!((r.max_violation - 1.0 / d as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn non_trace_preserving_kraus_detected() {
        let k = ComplexMatrix::diag_real(&[1.0, 0.5]);
        let r = QuantumChannel::from_kraus(vec![k]).unwrap().check_cptp().unwrap();
        assert!(!r.trace_preserving);
        assert!(r.completely_positive);
    }

    #[test]
    fn covariance_checks() {
        assert!(QuantumChannel::werner_holevo(3).unwrap().check_unitary_covariance(20, 1).unwrap());
        let pure0 = QuantumChannel::depolarize(2, DensityMatrix::basis(2, 0)).unwrap();
        assert!(pure0.check_unitary_covariance(20, 2).unwrap());
        assert!(QuantumChannel::identity(3).unwrap().check_unitary_covariance(20, 3).unwrap());
        assert!(!qutrit_ladder().check_unitary_covariance(20, 4).unwrap());
        assert!(!amplitude_damping(0.5).check_unitary_covariance(20, 5).unwrap());
    }

    #[test]
    fn ladder_has_distinct_output_spectra() {
        // oracle for the covariance failure: |0> and (|1>+|2>)/√2 are unitarily
        // related inputs, but the first stays pure and the second does not
        let ch = qutrit_ladder();
        let s0 = ch.apply(&DensityMatrix::basis(3, 0)).unwrap().spectrum().unwrap();
        assert_eq!(s0, Spectrum::new(vec![1.0, 0.0, 0.0]));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let s = ch.pure_output_spectrum(&[c(0.0), c(h), c(h)]).unwrap();
        assert!(s.max_diff(&Spectrum::new(vec![0.5, 0.5, 0.0])) < 1e-15);
    }

    #[test]
    fn superoperator_and_kraus_agree() {
        let ch = amplitude_damping(0.2);
        let s = ch.superoperator();
        let via_s = QuantumChannel::from_superoperator(2, 2, s).unwrap();
        let mut rng = stream_rng(6, 0);
        let rho = random_density(&mut rng, 2);
        let a = ch.apply(&rho).unwrap();
        let b = via_s.apply(&rho).unwrap();
        assert!(a.matrix().max_diff(b.matrix()) < 1e-15);
    }

    #[test]
    fn apply_rejects_wrong_dimension() {
        let wh = QuantumChannel::werner_holevo(3).unwrap();
        assert!(matches!(wh.apply(&DensityMatrix::basis(2, 0)), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn apply_rejects_trace_drift() {
        let k = ComplexMatrix::diag_real(&[1.0, 0.5]);
        let ch = QuantumChannel::from_kraus(vec![k]).unwrap();
        assert!(matches!(ch.apply(&DensityMatrix::basis(2, 1)), Err(Error::ChannelViolation(_))));
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(parse_channel_spec("wh:3").unwrap().describe(), "wh:3");
        assert_eq!(parse_channel_spec("id:2").unwrap().describe(), "id:2");
        assert_eq!(parse_channel_spec("depol:3").unwrap().describe(), "depol:3");
        assert!(parse_channel_spec("wh:1").is_err());
        assert!(parse_channel_spec("foo:3").is_err());
        assert!(parse_channel_spec("wh").is_err());
        let pair = parse_pair_spec("wh:3,id:3").unwrap();
        assert_eq!(pair.describe(), "wh:3,id:3");
        assert!(parse_pair_spec("wh:3,wh:3").unwrap().is_werner_holevo_3());
    }

    #[test]
    fn kraus_file_round_trip() {
        let ch = amplitude_damping(0.3);
        let ChannelRep::Kraus(ops) = ch.rep().clone() else { unreachable!() };
        let file = KrausFile { dim_in: 2, dim_out: 2, kraus: ops };
        let text = serde_json::to_string(&file).unwrap();
        let dir = std::env::temp_dir().join(format!("addlab-kraus-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("ad.json");
        std::fs::write(&path, text).unwrap();
        let loaded = parse_channel_spec(&format!("@{}", path.display())).unwrap();
        assert_eq!(loaded, ch);

        let bad = KrausFile {
            dim_in: 2,
            dim_out: 2,
            kraus: vec![ComplexMatrix::diag_real(&[1.0, 0.5])],
        };
        assert!(QuantumChannel::from_kraus_data(bad).is_err());
        std::fs::remove_dir_all(&dir).ok();
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]

        #[test]
        fn tensor_is_associative(seed in proptest::prelude::any::<u64>()) {
            let mut rng = stream_rng(seed, 0);
            let a = amplitude_damping(0.25);
            let b = QuantumChannel::werner_holevo(2).unwrap();
            let cc = QuantumChannel::depolarize(2, random_density(&mut rng, 2)).unwrap();
            let left = tensor(&tensor(&a, &b), &cc);
            let right = tensor(&a, &tensor(&b, &cc));
            let rho = random_density(&mut rng, 8);
            let x = left.apply(&rho).unwrap();
            let y = right.apply(&rho).unwrap();
            proptest::prop_assert!(x.matrix().max_diff(y.matrix()) <= 1e-12);
        }

        #[test]
        fn tensor_spectrum_on_products(seed in proptest::prelude::any::<u64>(), d1 in 2usize..=3, d2 in 2usize..=3) {
            let mut rng = stream_rng(seed, 1);
            let a = QuantumChannel::werner_holevo(d1).unwrap();
            let b = QuantumChannel::depolarize(d2, random_density(&mut rng, d2)).unwrap();
            let rho = random_density(&mut rng, d1);
            let sigma = random_density(&mut rng, d2);
            let joint = tensor(&a, &b).apply(&rho.kron(&sigma)).unwrap().spectrum().unwrap();
            let sa = a.apply(&rho).unwrap().spectrum().unwrap();
            let sb = b.apply(&sigma).unwrap().spectrum().unwrap();
            proptest::prop_assert!(joint.max_diff(&sa.tensor(&sb)) <= 1e-8);
        }

        #[test]
        fn werner_holevo_spectrum_is_covariant(seed in proptest::prelude::any::<u64>(), d in 2usize..=4) {
            let mut rng = stream_rng(seed, 2);
            let wh = QuantumChannel::werner_holevo(d).unwrap();
            let rho = random_density(&mut rng, d);
            let u = haar_unitary(&mut rng, d);
            let a = wh.apply(&rho).unwrap().spectrum().unwrap();
            let b = wh.apply(&rho.conjugate_by(&u)).unwrap().spectrum().unwrap();
            proptest::prop_assert!(a.max_diff(&b) <= 1e-7);
        }
    }
}
