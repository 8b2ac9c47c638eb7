//! Seeded multi-start maximization of `ρ ↦ Tr f((Φ⊗Ω)(ρ))`.
//!
//! Convex objectives attain their maximum on pure inputs, so every search runs
//! over unit vectors. Each restart draws its start from its own generator
//! stream `(seed, restart)`, restarts run on the rayon pool, and the final
//! reduction picks the best value with ties going to the lowest restart index;
//! results therefore do not depend on the number of worker threads.
//!
//! Local search is Nelder-Mead in a tangent chart of the sphere around the
//! current point, re-centered after each run until the gain drops below the
//! configured tolerance.

pub mod nelder_mead;
mod schmidt;
mod simplex;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{ChannelPair, QuantumChannel, DEFAULT_COVARIANCE_SAMPLES};
use crate::error::{Error, Result};
use crate::functions::ConvexFunction;
use crate::linalg::random::{random_pure_state, stream_rng};
use crate::linalg::{DensityMatrix, Spectrum};
use crate::werner::SchmidtVector;

use nelder_mead::{maximize, Tolerances};
pub use schmidt::{schmidt_decompose, SchmidtDecomposition};
pub use simplex::max_trace_schmidt_wh3;

/// Final values within this distance of the best count as agreeing restarts.
pub const AGREEMENT_TOL: f64 = 1e-7;
const INITIAL_STEP: f64 = 0.5;
const RECENTER_STEP: f64 = 0.05;
const MAX_ROUNDS: usize = 12;
/// Simplex size (in chart coordinates) at which a local search counts as converged.
const CHART_XTOL: f64 = 1e-6;
const PRODUCT_ROUNDS: usize = 10;

// distinct generator streams per search kind
const STREAM_PRODUCT: u64 = 0;
const STREAM_ENTANGLED: u64 = 1 << 32;
const STREAM_MAXEIG: u64 = 2 << 32;
const STREAM_SINGLE: u64 = 3 << 32;

/// Normalized vector in `C^dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "StateRepr", try_from = "StateRepr")]
pub struct PureState {
    amplitudes: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl From<PureState> for StateRepr {
    fn from(s: PureState) -> Self {
        Self {
            dim: s.amplitudes.len(),
            re: s.amplitudes.iter().map(|z| z.re).collect(),
            im: s.amplitudes.iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<StateRepr> for PureState {
    type Error = Error;

    fn try_from(r: StateRepr) -> Result<Self> {
        if r.re.len() != r.dim || r.im.len() != r.dim {
            return Err(Error::Parse(format!("state of dim {} has {}/{} components", r.dim, r.re.len(), r.im.len())));
        }
        PureState::new(r.re.into_iter().zip(r.im).map(|(a, b)| Complex64::new(a, b)).collect())
    }
}

impl PureState {
    /// Requires unit norm within 1e-12.
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = norm(&amplitudes);
        if amplitudes.is_empty() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("state norm is {norm}, expected 1")));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = norm(&amplitudes);
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        amplitudes.iter_mut().for_each(|z| *z /= norm);
        Ok(Self { amplitudes })
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[i] = Complex64::new(1.0, 0.0);
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            amplitudes: self
                .amplitudes
                .iter()
                .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
                .collect(),
        }
    }

    pub fn density(&self) -> Result<DensityMatrix> {
        DensityMatrix::pure(&self.amplitudes)
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub restarts: usize,
    /// Nelder-Mead iteration budget per local search.
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
    /// Points per edge of the Schmidt-simplex grid.
    pub simplex_grid: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 64,
            max_iters: 2000,
            tol: 1e-10,
            seed: 0,
            simplex_grid: 200,
        }
    }
}

impl OptimizerConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 || self.simplex_grid == 0 {
            return Err(Error::InvalidArgument("restarts, max_iters and simplex_grid must be positive".into()));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub value: f64,
    pub argmax: PureState,
    pub schmidt: Option<SchmidtVector>,
    pub restarts_agreeing: usize,
    pub converged: bool,
}

/// Tangent chart of the unit sphere at `base`: `v ↦ normalize(base + Σ vₖ tₖ)`
/// with the `tₖ` an orthonormal real basis of the complement of `base` and `i·base`.
struct Chart {
    base: Vec<Complex64>,
    directions: Vec<Vec<Complex64>>,
}

fn real_dot(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.re * y.re + x.im * y.im).sum()
}

impl Chart {
    fn new(base: &[Complex64]) -> Self {
        let n = base.len();
        let i_base: Vec<Complex64> = base.iter().map(|z| z * Complex64::i()).collect();
        let mut frame: Vec<Vec<Complex64>> = vec![base.to_vec(), i_base];
        let mut directions = Vec::with_capacity(2 * n - 2);
        for k in 0..n {
            for unit in [Complex64::new(1.0, 0.0), Complex64::i()] {
                if directions.len() == 2 * n - 2 {
                    break;
                }
                let mut v = vec![Complex64::new(0.0, 0.0); n];
                v[k] = unit;
                for _ in 0..2 {
                    for u in &frame {
                        let p = real_dot(u, &v);
                        v.iter_mut().zip(u).for_each(|(x, y)| *x -= y * p);
                    }
                }
                let len = norm(&v);
                if len > 1e-6 {
                    v.iter_mut().for_each(|x| *x /= len);
                    frame.push(v.clone());
                    directions.push(v);
                }
            }
        }
        Self {
            base: base.to_vec(),
            directions,
        }
    }

    fn dim(&self) -> usize {
        self.directions.len()
    }

    fn point_into(&self, v: &[f64], out: &mut Vec<Complex64>) {
        out.clear();
        out.extend_from_slice(&self.base);
        for (c, d) in v.iter().zip(&self.directions) {
            if *c != 0.0 {
                out.iter_mut().zip(d).for_each(|(x, y)| *x += y * c);
            }
        }
        let len = norm(out);
        out.iter_mut().for_each(|x| *x /= len);
    }
}

struct LocalMax {
    psi: Vec<Complex64>,
    value: f64,
    converged: bool,
}

/// Re-centered Nelder-Mead ascent on the unit sphere from `start`.
fn sphere_search(obj: &(dyn Fn(&[Complex64]) -> f64 + Sync), start: Vec<Complex64>, cfg: &OptimizerConfig) -> LocalMax {
    let mut psi = start;
    let mut value = obj(&psi);
    if psi.len() == 1 {
        return LocalMax { psi, value, converged: true };
    }
    let mut used = 0;
    let mut step = INITIAL_STEP;
    let mut converged = false;
    let mut buf = Vec::with_capacity(psi.len());
    for _ in 0..MAX_ROUNDS {
        if used >= cfg.max_iters {
            break;
        }
        let chart = Chart::new(&psi);
        let tol = Tolerances {
            ftol: cfg.tol,
            xtol: CHART_XTOL,
            max_iters: cfg.max_iters - used,
        };
        let out = maximize(
            |v| {
                chart.point_into(v, &mut buf);
                obj(&buf)
            },
            &vec![0.0; chart.dim()],
            step,
            tol,
        );
        used += out.iterations;
        let gain = out.value - value;
        if gain > 0.0 {
            chart.point_into(&out.x, &mut buf);
            psi.clone_from(&buf);
            value = out.value;
        }
        if gain <= cfg.tol && out.converged {
            converged = true;
            break;
        }
        step = RECENTER_STEP;
    }
    LocalMax { psi, value, converged }
}

/// Runs `restarts` independent searches and reduces them deterministically.
fn multi_start(
    restarts: usize,
    search: impl Fn(usize) -> Result<LocalMax> + Sync,
) -> Result<(LocalMax, usize)> {
    let results: Vec<Result<LocalMax>> = (0..restarts).into_par_iter().map(&search).collect();
    let results: Vec<LocalMax> = results.into_iter().collect::<Result<_>>()?;
    let mut best = 0;
    for (k, r) in results.iter().enumerate() {
        if r.value > results[best].value {
            best = k;
        }
    }
    let top = results[best].value;
    let agreeing = results.iter().filter(|r| (r.value - top).abs() <= AGREEMENT_TOL).count();
    let winner = results.into_iter().nth(best).expect("at least one restart");
    Ok((winner, agreeing))
}

fn trace_objective(f: &ConvexFunction, channel: &QuantumChannel, psi: &[Complex64]) -> Result<f64> {
    f.trace_of_spectrum(&channel.pure_output_spectrum(psi)?)
}

fn or_neg_inf(r: Result<f64>) -> f64 {
    match r {
        Ok(v) if v.is_finite() => v,
        _ => f64::NEG_INFINITY,
    }
}

fn schmidt_of(psi: &PureState, pair: &ChannelPair) -> Result<SchmidtVector> {
    let (d1, d2) = pair.input_dims();
    schmidt_decompose(psi, d1, d2)?.schmidt_vector()
}

fn product_value(f: &ConvexFunction, a: &Spectrum, b: &Spectrum) -> Result<f64> {
    f.trace_of_spectrum(&a.tensor(b))
}

/// True when both channels pass the sampled unitary-covariance check.
pub fn pair_is_covariant(pair: &ChannelPair, seed: u64) -> Result<bool> {
    Ok(pair.left.check_unitary_covariance(DEFAULT_COVARIANCE_SAMPLES, seed)?
        && pair.right.check_unitary_covariance(DEFAULT_COVARIANCE_SAMPLES, seed)?)
}

/// Maximum over product inputs `ψ₁ ⊗ ψ₂`.
///
/// For covariant pairs every product input gives the same value, so one
/// evaluation is exact. Otherwise each restart alternates between the two
/// factors for up to ten rounds.
pub fn max_trace_product(f: &ConvexFunction, pair: &ChannelPair, cfg: &OptimizerConfig) -> Result<OptResult> {
    cfg.validate()?;
    let (d1, d2) = pair.input_dims();
    if pair_is_covariant(pair, cfg.seed)? {
        let (a, b) = (PureState::basis(d1, 0), PureState::basis(d2, 0));
        let value = product_value(
            f,
            &pair.left.pure_output_spectrum(a.amplitudes())?,
            &pair.right.pure_output_spectrum(b.amplitudes())?,
        )?;
        let argmax = a.tensor(&b);
        return Ok(OptResult {
            value,
            schmidt: Some(schmidt_of(&argmax, pair)?),
            argmax,
            restarts_agreeing: cfg.restarts,
            converged: true,
        });
    }

    let search = |r: usize| -> Result<(Vec<Complex64>, Vec<Complex64>, f64, bool)> {
        let mut rng = stream_rng(cfg.seed, STREAM_PRODUCT + r as u64);
        let mut psi1 = random_pure_state(&mut rng, d1);
        let mut psi2 = random_pure_state(&mut rng, d2);
        let mut s1 = pair.left.pure_output_spectrum(&psi1)?;
        let mut s2 = pair.right.pure_output_spectrum(&psi2)?;
        let mut value = product_value(f, &s1, &s2)?;
        let mut converged = false;
        for _ in 0..PRODUCT_ROUNDS {
            let before = value;
            let fixed = s2.clone();
            let left = sphere_search(
                &|p: &[Complex64]| or_neg_inf(pair.left.pure_output_spectrum(p).and_then(|s| product_value(f, &s, &fixed))),
                psi1.clone(),
                cfg,
            );
            if left.value >= value {
                psi1 = left.psi;
                s1 = pair.left.pure_output_spectrum(&psi1)?;
                value = left.value;
            }
            let fixed = s1.clone();
            let right = sphere_search(
                &|p: &[Complex64]| or_neg_inf(pair.right.pure_output_spectrum(p).and_then(|s| product_value(f, &fixed, &s))),
                psi2.clone(),
                cfg,
            );
            if right.value >= value {
                psi2 = right.psi;
                s2 = pair.right.pure_output_spectrum(&psi2)?;
                value = right.value;
            }
            if value - before <= cfg.tol && left.converged && right.converged {
                converged = true;
                break;
            }
        }
        Ok((psi1, psi2, value, converged))
    };

    let results: Vec<_> = (0..cfg.restarts).into_par_iter().map(search).collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (k, r) in results.iter().enumerate() {
        if r.2 > results[best].2 {
            best = k;
        }
    }
    let top = results[best].2;
    let agreeing = results.iter().filter(|r| (r.2 - top).abs() <= AGREEMENT_TOL).count();
    let (psi1, psi2, _, converged) = results.into_iter().nth(best).expect("at least one restart");
    let (a, b) = (PureState::normalized(psi1)?, PureState::normalized(psi2)?);
    let value = product_value(
        f,
        &pair.left.pure_output_spectrum(a.amplitudes())?,
        &pair.right.pure_output_spectrum(b.amplitudes())?,
    )?;
    let argmax = a.tensor(&b);
    Ok(OptResult {
        value,
        schmidt: Some(schmidt_of(&argmax, pair)?),
        argmax,
        restarts_agreeing: agreeing,
        converged,
    })
}

/// Maximum over all pure joint inputs; restart 0 starts from `warm_start`, the others from Haar-random states.
pub fn max_trace_entangled_from(
    f: &ConvexFunction,
    pair: &ChannelPair,
    cfg: &OptimizerConfig,
    warm_start: &PureState,
) -> Result<OptResult> {
    cfg.validate()?;
    let joint = pair.joint();
    let dim = joint.dim_in();
    if warm_start.dim() != dim {
        return Err(Error::DimensionMismatch(format!("warm start has dim {}, pair input is {dim}", warm_start.dim())));
    }
    let obj = |p: &[Complex64]| or_neg_inf(trace_objective(f, &joint, p));
    let (best, agreeing) = multi_start(cfg.restarts, |r| {
        let start = if r == 0 {
            warm_start.amplitudes().to_vec()
        } else {
            random_pure_state(&mut stream_rng(cfg.seed, STREAM_ENTANGLED + r as u64), dim)
        };
        Ok(sphere_search(&obj, start, cfg))
    })?;
    let argmax = PureState::normalized(best.psi)?;
    Ok(OptResult {
        value: trace_objective(f, &joint, argmax.amplitudes())?,
        schmidt: Some(schmidt_of(&argmax, pair)?),
        argmax,
        restarts_agreeing: agreeing,
        converged: best.converged,
    })
}

/// Maximum over all pure joint inputs, warm-started from the product optimum
/// so that it never falls below [`max_trace_product`].
pub fn max_trace_entangled(f: &ConvexFunction, pair: &ChannelPair, cfg: &OptimizerConfig) -> Result<OptResult> {
    let product = max_trace_product(f, pair, cfg)?;
    let mut r = max_trace_entangled_from(f, pair, cfg, &product.argmax)?;
    r.converged &= product.converged;
    Ok(r)
}

/// Maximum over pure inputs of the largest output eigenvalue of `Φ ⊗ Ω`.
pub fn max_output_eigenvalue(pair: &ChannelPair, cfg: &OptimizerConfig) -> Result<OptResult> {
    cfg.validate()?;
    let joint = pair.joint();
    let dim = joint.dim_in();
    let obj = |p: &[Complex64]| or_neg_inf(joint.pure_output_spectrum(p).map(|s| s.max()));
    let (best, agreeing) = multi_start(cfg.restarts, |r| {
        let start = random_pure_state(&mut stream_rng(cfg.seed, STREAM_MAXEIG + r as u64), dim);
        Ok(sphere_search(&obj, start, cfg))
    })?;
    let argmax = PureState::normalized(best.psi)?;
    Ok(OptResult {
        value: joint.pure_output_spectrum(argmax.amplitudes())?.max(),
        schmidt: Some(schmidt_of(&argmax, pair)?),
        argmax,
        restarts_agreeing: agreeing,
        converged: best.converged,
    })
}

/// Maximum of `Tr f(Φ(ψ))` over pure inputs of a single channel.
pub fn max_trace_single(f: &ConvexFunction, channel: &QuantumChannel, cfg: &OptimizerConfig) -> Result<OptResult> {
    cfg.validate()?;
    let dim = channel.dim_in();
    if channel.check_unitary_covariance(DEFAULT_COVARIANCE_SAMPLES, cfg.seed)? {
        let argmax = PureState::basis(dim, 0);
        return Ok(OptResult {
            value: trace_objective(f, channel, argmax.amplitudes())?,
            argmax,
            schmidt: None,
            restarts_agreeing: cfg.restarts,
            converged: true,
        });
    }
    let obj = |p: &[Complex64]| or_neg_inf(trace_objective(f, channel, p));
    let (best, agreeing) = multi_start(cfg.restarts, |r| {
        let start = random_pure_state(&mut stream_rng(cfg.seed, STREAM_SINGLE + r as u64), dim);
        Ok(sphere_search(&obj, start, cfg))
    })?;
    let argmax = PureState::normalized(best.psi)?;
    Ok(OptResult {
        value: trace_objective(f, channel, argmax.amplitudes())?,
        argmax,
        schmidt: None,
        restarts_agreeing: agreeing,
        converged: best.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::QuantumChannel;
    use crate::linalg::ComplexMatrix;

    fn wh3() -> QuantumChannel {
        QuantumChannel::werner_holevo(3).unwrap()
    }

    fn id(d: usize) -> QuantumChannel {
        QuantumChannel::identity(d).unwrap()
    }

    fn quick(seed: u64) -> OptimizerConfig {
        OptimizerConfig {
            restarts: 8,
            ..OptimizerConfig::with_seed(seed)
        }
    }

    fn amplitude_damping(gamma: f64) -> QuantumChannel {
        let k0 = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, (1.0 - gamma).sqrt()]]).unwrap();
        let k1 = ComplexMatrix::from_real_rows(&[&[0.0, gamma.sqrt()], &[0.0, 0.0]]).unwrap();
        QuantumChannel::from_kraus(vec![k0, k1]).unwrap()
    }

    #[test]
    fn chart_is_orthonormal_and_tangent() {
        let mut rng = stream_rng(1, 0);
        let base = random_pure_state(&mut rng, 4);
        let chart = Chart::new(&base);
        assert_eq!(chart.dim(), 6);
        let ib: Vec<Complex64> = base.iter().map(|z| z * Complex64::i()).collect();
        for (a, u) in chart.directions.iter().enumerate() {
            assert!(real_dot(u, &base).abs() < 1e-12 && real_dot(u, &ib).abs() < 1e-12);
            for (b, v) in chart.directions.iter().enumerate() {
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((real_dot(u, v) - expected).abs() < 1e-12);
            }
        }
        let mut out = Vec::new();
        chart.point_into(&[0.3, -0.2, 0.0, 0.1, 0.5, 0.0], &mut out);
        assert!((norm(&out) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn pure_state_validation_and_json() {
        assert!(PureState::new(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]).is_err());
        let s = PureState::normalized(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)]).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        assert!(text.starts_with("{\"dim\":2,"));
        let back: PureState = serde_json::from_str(&text).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<PureState>(r#"{"dim":2,"re":[1,1],"im":[0,0]}"#).is_err());
    }

    #[test]
    fn config_defaults_and_validation() {
        let c = OptimizerConfig::default();
        assert_eq!((c.restarts, c.max_iters, c.tol, c.simplex_grid), (64, 2000, 1e-10, 200));
        assert!(OptimizerConfig { restarts: 0, ..c.clone() }.validate().is_err());
        assert!(OptimizerConfig { tol: 0.0, ..c }.validate().is_err());
    }

    #[test]
    fn product_examples_on_wh3_pair() {
        let pair = ChannelPair::new(wh3(), wh3());
        let r = max_trace_product(&ConvexFunction::power(5.0).unwrap(), &pair, &quick(1)).unwrap();
        assert!((r.value - 4.0 * 0.25f64.powi(5)).abs() < 1e-15);
        assert!(r.converged);
        let r = max_trace_product(&ConvexFunction::power(2.0).unwrap(), &pair, &quick(1)).unwrap();
        assert!((r.value - 0.25).abs() < 1e-15);
    }

    #[test]
    fn affine_is_input_independent() {
        let (b, c) = (0.4, -0.3);
        let f = ConvexFunction::affine(b, c);
        for pair in [
            ChannelPair::new(wh3(), wh3()),
            ChannelPair::new(amplitude_damping(0.3), QuantumChannel::from_kraus(vec![ComplexMatrix::identity(3)]).unwrap()),
        ] {
            let expected = b + c * pair.output_dim() as f64;
            let r = max_trace_product(&f, &pair, &quick(2)).unwrap();
            assert!((r.value - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn non_covariant_product_search() {
        // amplitude damping keeps |0> pure, so the best product input is |0>|0>
        let pair = ChannelPair::new(amplitude_damping(0.4), amplitude_damping(0.7));
        let r = max_trace_product(&ConvexFunction::power(2.0).unwrap(), &pair, &quick(3)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9, "{}", r.value);
        assert!(r.converged);
    }

    #[test]
    fn entangled_fifth_power_beats_product() {
        let pair = ChannelPair::new(wh3(), wh3());
        let r = max_trace_entangled(&ConvexFunction::power(5.0).unwrap(), &pair, &quick(4)).unwrap();
        let maxent = (1.0f64 / 3.0).powi(5) + 8.0 * (1.0f64 / 12.0).powi(5);
        assert!(r.value >= maxent - 1e-9, "{}", r.value);
        for l in r.schmidt.unwrap().values() {
            assert!((l - 1.0 / 3.0).abs() < 1e-3);
        }
    }

    #[test]
    fn entangled_operator_convex_stays_at_product() {
        let pair = ChannelPair::new(wh3(), wh3());
        let f = ConvexFunction::flambda(-0.5).unwrap();
        let prod = max_trace_product(&f, &pair, &quick(5)).unwrap();
        let ent = max_trace_entangled(&f, &pair, &quick(5)).unwrap();
        assert!((ent.value - prod.value).abs() <= 1e-7);
        assert!(ent.schmidt.unwrap().sorted_descending().values()[0] > 1.0 - 1e-4);
    }

    #[test]
    fn identity_partner_is_additive() {
        let pair = ChannelPair::new(wh3(), id(3));
        for f in [ConvexFunction::power(5.0).unwrap(), ConvexFunction::xlogx(), ConvexFunction::kink(0.3).unwrap()] {
            let prod = max_trace_product(&f, &pair, &quick(6)).unwrap();
            let ent = max_trace_entangled(&f, &pair, &quick(6)).unwrap();
            assert!(ent.value >= prod.value - 1e-9);
            assert!((ent.value - prod.value).abs() <= 1e-7, "{f}: {} vs {}", ent.value, prod.value);
        }
    }

    #[test]
    fn max_eigenvalue_examples() {
        let r = max_output_eigenvalue(&ChannelPair::new(wh3(), wh3()), &quick(7)).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() < 1e-6, "{}", r.value);
        let r = max_output_eigenvalue(&ChannelPair::new(id(2), id(2)), &quick(7)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
        let dep = QuantumChannel::maximally_depolarizing(3).unwrap();
        let r = max_output_eigenvalue(&ChannelPair::new(dep.clone(), dep), &quick(7)).unwrap();
        assert!((r.value - 1.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn single_channel_maxima() {
        let r = max_trace_single(&ConvexFunction::power(2.0).unwrap(), &wh3(), &quick(8)).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
        let r = max_trace_single(&ConvexFunction::power(2.0).unwrap(), &amplitude_damping(0.5), &quick(8)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn restarts_are_deterministic() {
        let pair = ChannelPair::new(amplitude_damping(0.2), wh3());
        let f = ConvexFunction::xp_logx(0.75).unwrap();
        let a = max_trace_entangled(&f, &pair, &quick(9)).unwrap();
        let b = max_trace_entangled(&f, &pair, &quick(9)).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.argmax, b.argmax);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let c = pool.install(|| max_trace_entangled(&f, &pair, &quick(9))).unwrap();
        assert_eq!(a.value.to_bits(), c.value.to_bits());
    }

    #[test]
    fn scaling_keeps_argmax() {
        let pair = ChannelPair::new(wh3(), wh3());
        let f = ConvexFunction::power(5.0).unwrap();
        let g = f.normalize_affine(3.0, 0.7, -0.2).unwrap();
        let cfg = OptimizerConfig::default();
        let a = max_trace_schmidt_wh3(&f, &cfg).unwrap().schmidt.unwrap();
        let b = max_trace_schmidt_wh3(&g, &cfg).unwrap().schmidt.unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() <= 1e-5);
        }
        let ea = max_trace_entangled(&f, &pair, &quick(10)).unwrap().schmidt.unwrap().sorted_descending();
        let eb = max_trace_entangled(&g, &pair, &quick(10)).unwrap().schmidt.unwrap().sorted_descending();
        for (x, y) in ea.values().iter().zip(eb.values()) {
            assert!((x - y).abs() <= 1e-3);
        }
    }

    #[test]
    fn entangled_never_below_product() {
        let pair = ChannelPair::new(amplitude_damping(0.3), amplitude_damping(0.6));
        for (k, f) in ConvexFunction::builtin_library().iter().enumerate() {
            let cfg = quick(20 + k as u64);
            let prod = max_trace_product(f, &pair, &cfg).unwrap();
            let ent = max_trace_entangled(f, &pair, &cfg).unwrap();
            assert!(ent.value >= prod.value - 1e-9, "{f}: {} < {}", ent.value, prod.value);
        }
    }
}
