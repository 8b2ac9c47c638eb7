//! Convex functions on `[0, 1]`, their trace functionals `σ ↦ Tr f(σ)`,
//! the additivity-preserving transforms, and a sampled operator-convexity
//! tester.
//!
//! Transforms build new functions out of old ones:
//!
//! * [`ConvexFunction::normalize_affine`]: `x ↦ a f(x) + b x + c` with `a > 0`;
//! * [`ConvexFunction::dilate`]: `x ↦ f(x / n)`;
//! * [`ConvexFunction::mu_transform`]: `x ↦ Σᵢ f(μᵢ x)` for a (sub-)probability vector `μ`;
//! * [`ConvexFunction::sum`]: pointwise sums, e.g. to modify a function at a single point.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::random::{random_unit_interval_hermitian, stream_rng};
use crate::linalg::{DensityMatrix, HermitianMatrix, Spectrum};

/// Eigenvalues this far outside `[0, 1]` are clamped; the δ-functions treat
/// values this close to 0 (or 1) as exactly 0 (or 1).
pub const CLAMP_TOL: f64 = 1e-9;
/// Slack allowed by the grid midpoint-convexity check.
pub const MIDPOINT_SLACK: f64 = 1e-12;
/// Minimum eigenvalue of the operator-convexity gap tolerated as numerical noise.
pub const OPERATOR_CONVEXITY_TOL: f64 = 1e-8;

/// Finite measure on `(-1, 0]` given by point masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.is_empty() || nodes.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "measure needs matching non-empty nodes and weights ({} vs {})",
                nodes.len(),
                weights.len()
            )));
        }
        if let Some(bad) = nodes.iter().find(|&&l| !(l > -1.0 && l <= 0.0)) {
            return Err(Error::InvalidArgument(format!("measure node {bad} outside (-1, 0]")));
        }
        if weights.iter().any(|&w| !(w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument("measure weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("measure weights sum to {total}, not 1")));
        }
        Ok(Self { nodes, weights })
    }

    pub fn point_mass(lambda: f64) -> Result<Self> {
        Self::new(vec![lambda], vec![1.0])
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// On-disk form of a [`FunctionKind::FromMeasure`] function.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureFile {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionKind {
    /// `b x + c`.
    Affine { b: f64, c: f64 },
    /// `x^p`, `p >= 1`.
    Power(f64),
    /// `-x^p`, `0 < p < 1`.
    NegPower(f64),
    /// `x ln x` with `0 ln 0 = 0`.
    XLogX,
    /// `x^p ln x`, `1/2 <= p <= 1`.
    XpLogX(f64),
    /// `max(0, x - x0)`.
    Kink(f64),
    /// `(2x-1)² / (1 - λ(2x-1))`, `λ ∈ (-1, 0]`.
    FLambda(f64),
    /// 1 at zero, 0 elsewhere; arguments up to [`CLAMP_TOL`] count as zero.
    Delta0,
    /// 1 at one, 0 elsewhere; arguments within [`CLAMP_TOL`] of one count as one.
    Delta1,
    /// `α + β x + γ Σⱼ wⱼ f_{λⱼ}(x)`.
    FromMeasure {
        alpha: f64,
        beta: f64,
        gamma: f64,
        measure: DiscreteMeasure,
    },
    /// `a f(x) + b x + c`.
    Normalized {
        inner: Box<ConvexFunction>,
        a: f64,
        b: f64,
        c: f64,
    },
    /// `f(x / n)`.
    Dilated { inner: Box<ConvexFunction>, n: f64 },
    /// `Σᵢ f(μᵢ x)`.
    MuTransformed { inner: Box<ConvexFunction>, mu: Vec<f64> },
    Sum(Vec<ConvexFunction>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexFunction {
    kind: FunctionKind,
}

fn flambda(lambda: f64, x: f64) -> f64 {
    let u = 2.0 * x - 1.0;
    u * u / (1.0 - lambda * u)
}

fn flambda_derivative_at_0(lambda: f64) -> f64 {
    2.0 * (-2.0 - lambda) / ((1.0 + lambda) * (1.0 + lambda))
}

impl ConvexFunction {
    fn from_kind(kind: FunctionKind) -> Self {
        Self { kind }
    }

    pub fn kind(&self) -> &FunctionKind {
        &self.kind
    }

    pub fn affine(b: f64, c: f64) -> Self {
        Self::from_kind(FunctionKind::Affine { b, c })
    }

    pub fn power(p: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidArgument(format!("x^p is convex on [0,1] only for p >= 1, got {p}")));
        }
        Ok(Self::from_kind(FunctionKind::Power(p)))
    }

    pub fn neg_power(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidArgument(format!("-x^p needs 0 < p < 1, got {p}")));
        }
        Ok(Self::from_kind(FunctionKind::NegPower(p)))
    }

    pub fn xlogx() -> Self {
        Self::from_kind(FunctionKind::XLogX)
    }

    pub fn xp_logx(p: f64) -> Result<Self> {
        if !(0.5..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("x^p log x is convex only for 1/2 <= p <= 1, got {p}")));
        }
        Ok(Self::from_kind(FunctionKind::XpLogX(p)))
    }

    pub fn kink(x0: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x0) {
            return Err(Error::InvalidArgument(format!("kink location {x0} outside [0, 1]")));
        }
        Ok(Self::from_kind(FunctionKind::Kink(x0)))
    }

    pub fn flambda(lambda: f64) -> Result<Self> {
        if !(lambda > -1.0 && lambda <= 0.0) {
            return Err(Error::InvalidArgument(format!("f_λ needs λ in (-1, 0], got {lambda}")));
        }
        Ok(Self::from_kind(FunctionKind::FLambda(lambda)))
    }

    pub fn delta0() -> Self {
        Self::from_kind(FunctionKind::Delta0)
    }

    pub fn delta1() -> Self {
        Self::from_kind(FunctionKind::Delta1)
    }

    /// The function whose additivity matches additivity of the p-Rényi
    /// entropy: `x^p` for `p > 1`, `x ln x` for `p = 1`, `-x^p` for `0 < p < 1`.
    pub fn renyi(p: f64) -> Result<Self> {
        if p > 1.0 {
            Self::power(p)
        } else if p == 1.0 {
            Ok(Self::xlogx())
        } else {
            Self::neg_power(p)
        }
    }

    /// `α + β x + γ ∫ f_λ(x) dμ(λ)` for a discrete `μ`.
    pub fn from_measure(alpha: f64, beta: f64, gamma: f64, measure: DiscreteMeasure) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidArgument(format!("from_measure needs finite α, β and γ >= 0, got γ = {gamma}")));
        }
        Ok(Self::from_kind(FunctionKind::FromMeasure {
            alpha,
            beta,
            gamma,
            measure,
        }))
    }

    pub fn from_measure_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        let file: MeasureFile = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("bad measure file {}: {e}", path.display())))?;
        Self::from_measure(file.alpha, file.beta, file.gamma, DiscreteMeasure::new(file.nodes, file.weights)?)
    }

    /// `x ↦ a f(x) + b x + c`, which shares additivity with `f` for `a > 0`.
    pub fn normalize_affine(&self, a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidArgument(format!("affine normalization needs a > 0, got {a}")));
        }
        Ok(Self::from_kind(FunctionKind::Normalized {
            inner: Box::new(self.clone()),
            a,
            b,
            c,
        }))
    }

    /// `x ↦ f(x / n)`.
    pub fn dilate(&self, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("dilation factor must be >= 1".into()));
        }
        Ok(Self::from_kind(FunctionKind::Dilated {
            inner: Box::new(self.clone()),
            n: n as f64,
        }))
    }

    /// `x ↦ Σᵢ f(μᵢ x)`.
    ///
    /// A strict sub-probability vector is accepted only when `f` is
    /// differentiable at zero.
    pub fn mu_transform(&self, mu: &[f64]) -> Result<Self> {
        if mu.is_empty() {
            return Err(Error::InvalidArgument("μ must be non-empty".into()));
        }
        if mu.iter().any(|&m| !(m >= 0.0) || !m.is_finite()) {
            return Err(Error::InvalidArgument("μ entries must be nonnegative".into()));
        }
        let total: f64 = mu.iter().sum();
        if total > 1.0 + 1e-12 {
            return Err(Error::InvalidArgument(format!("μ sums to {total} > 1")));
        }
        if total < 1.0 - 1e-12 && !self.differentiable_at_0() {
            return Err(Error::InvalidArgument(
                "sub-probability μ requires a function differentiable at 0".into(),
            ));
        }
        Ok(Self::from_kind(FunctionKind::MuTransformed {
            inner: Box::new(self.clone()),
            mu: mu.iter().map(|&m| m.min(1.0)).collect(),
        }))
    }

    pub fn sum(parts: Vec<ConvexFunction>) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidArgument("empty sum".into()));
        }
        Ok(Self::from_kind(FunctionKind::Sum(parts)))
    }

    /// Evaluates at `x ∈ [0, 1]`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutsideDomain(x));
        }
        Ok(self.eval_in_domain(x))
    }

    /// Evaluation without the domain check; `x` must lie in `[0, 1]`.
    pub fn eval_in_domain(&self, x: f64) -> f64 {
        match &self.kind {
            FunctionKind::Affine { b, c } => b * x + c,
            FunctionKind::Power(p) => {
                if *p == 2.0 {
                    x * x
                } else {
                    x.powf(*p)
                }
            }
            FunctionKind::NegPower(p) => -x.powf(*p),
            FunctionKind::XLogX => {
                if x == 0.0 {
                    0.0
                } else {
                    x * x.ln()
                }
            }
            FunctionKind::XpLogX(p) => {
                if x == 0.0 {
                    0.0
                } else {
                    x.powf(*p) * x.ln()
                }
            }
            FunctionKind::Kink(x0) => (x - x0).max(0.0),
            FunctionKind::FLambda(l) => flambda(*l, x),
            FunctionKind::Delta0 => {
                if x <= CLAMP_TOL {
                    1.0
                } else {
                    0.0
                }
            }
            FunctionKind::Delta1 => {
                if x >= 1.0 - CLAMP_TOL {
                    1.0
                } else {
                    0.0
                }
            }
            FunctionKind::FromMeasure {
                alpha,
                beta,
                gamma,
                measure,
            } => {
                let integral: f64 = measure
                    .nodes
                    .iter()
                    .zip(&measure.weights)
                    .map(|(&l, &w)| w * flambda(l, x))
                    .sum();
                alpha + beta * x + gamma * integral
            }
            FunctionKind::Normalized { inner, a, b, c } => a * inner.eval_in_domain(x) + b * x + c,
            FunctionKind::Dilated { inner, n } => inner.eval_in_domain(x / n),
            FunctionKind::MuTransformed { inner, mu } => mu.iter().map(|&m| inner.eval_in_domain(m * x)).sum(),
            FunctionKind::Sum(parts) => parts.iter().map(|f| f.eval_in_domain(x)).sum(),
        }
    }

    pub fn value_at_0(&self) -> f64 {
        self.eval_in_domain(0.0)
    }

    pub fn differentiable_at_0(&self) -> bool {
        self.derivative_at_0().is_some()
    }

    /// Right derivative at zero, when it exists and is finite.
    pub fn derivative_at_0(&self) -> Option<f64> {
        match &self.kind {
            FunctionKind::Affine { b, .. } => Some(*b),
            FunctionKind::Power(p) => Some(if *p == 1.0 { 1.0 } else { 0.0 }),
            FunctionKind::NegPower(_) | FunctionKind::XLogX | FunctionKind::XpLogX(_) | FunctionKind::Delta0 => None,
            FunctionKind::Kink(x0) => Some(if *x0 == 0.0 { 1.0 } else { 0.0 }),
            FunctionKind::FLambda(l) => Some(flambda_derivative_at_0(*l)),
            FunctionKind::Delta1 => Some(0.0),
            FunctionKind::FromMeasure {
                beta, gamma, measure, ..
            } => Some(
                beta + gamma
                    * measure
                        .nodes
                        .iter()
                        .zip(&measure.weights)
                        .map(|(&l, &w)| w * flambda_derivative_at_0(l))
                        .sum::<f64>(),
            ),
            FunctionKind::Normalized { inner, a, b, .. } => inner.derivative_at_0().map(|d| a * d + b),
            FunctionKind::Dilated { inner, n } => inner.derivative_at_0().map(|d| d / n),
            FunctionKind::MuTransformed { inner, mu } => {
                inner.derivative_at_0().map(|d| d * mu.iter().sum::<f64>())
            }
            FunctionKind::Sum(parts) => parts.iter().map(|f| f.derivative_at_0()).sum(),
        }
    }

    /// `Σᵢ f(λᵢ)` over a spectrum, after clamping eigenvalues at most 1e-9 outside `[0, 1]`.
    pub fn trace_of_spectrum(&self, spectrum: &Spectrum) -> Result<f64> {
        spectrum
            .values()
            .iter()
            .map(|&l| clamp_eigenvalue(l).map(|x| self.eval_in_domain(x)))
            .sum()
    }

    /// `Tr f(σ)` by spectral calculus.
    pub fn trace_apply(&self, sigma: &DensityMatrix) -> Result<f64> {
        self.trace_of_spectrum(&sigma.op().eigenvalues()?)
    }

    /// `f(m)` by spectral calculus for a Hermitian `m` with spectrum in `[0, 1]`.
    pub fn apply_matrix(&self, m: &HermitianMatrix) -> Result<HermitianMatrix> {
        let eig = m.eig()?;
        let mapped = eig
            .values
            .values()
            .iter()
            .map(|&l| clamp_eigenvalue(l).map(|x| self.eval_in_domain(x)))
            .collect::<Result<Vec<f64>>>()?;
        Ok(eig.reconstruct_with(&mapped))
    }

    /// Largest violation of midpoint convexity on an evenly spaced grid of `points` nodes.
    pub fn midpoint_convexity_violation(&self, points: usize) -> f64 {
        let xs: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
        let mut worst = 0.0_f64;
        for &x in &xs {
            for &y in &xs {
                let mid = self.eval_in_domain(0.5 * (x + y));
                let chord = 0.5 * (self.eval_in_domain(x) + self.eval_in_domain(y));
                worst = worst.max(mid - chord);
            }
        }
        worst
    }

    /// Spec-language rendering (`power:5`, `kink:0.3`, ...); transforms render structurally.
    pub fn spec_string(&self) -> String {
        match &self.kind {
            FunctionKind::Affine { b, c } => format!("affine:{b},{c}"),
            FunctionKind::Power(p) => format!("power:{p}"),
            FunctionKind::NegPower(p) => format!("negpower:{p}"),
            FunctionKind::XLogX => "xlogx".into(),
            FunctionKind::XpLogX(p) => format!("xplogx:{p}"),
            FunctionKind::Kink(x0) => format!("kink:{x0}"),
            FunctionKind::FLambda(l) => format!("flambda:{l}"),
            FunctionKind::Delta0 => "delta0".into(),
            FunctionKind::Delta1 => "delta1".into(),
            FunctionKind::FromMeasure { alpha, beta, gamma, measure } => {
                format!("measure(alpha={alpha},beta={beta},gamma={gamma},nodes={})", measure.nodes.len())
            }
            FunctionKind::Normalized { inner, a, b, c } => {
                format!("normalize({},{a},{b},{c})", inner.spec_string())
            }
            FunctionKind::Dilated { inner, n } => format!("dilate({},{n})", inner.spec_string()),
            FunctionKind::MuTransformed { inner, mu } => {
                let mu: Vec<String> = mu.iter().map(|m| m.to_string()).collect();
                format!("mu({},[{}])", inner.spec_string(), mu.join(","))
            }
            FunctionKind::Sum(parts) => {
                let parts: Vec<String> = parts.iter().map(|p| p.spec_string()).collect();
                format!("sum({})", parts.join("+"))
            }
        }
    }

    /// Parses the function mini-language.
    ///
    /// ```text
    /// power:<p> | negpower:<p> | renyi:<p> | xlogx | xplogx:<p> | kink:<x0>
    /// flambda:<λ> | affine:<b>,<c> | delta0 | delta1 | measure:@<file.json>
    /// ```
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (tag, arg) = match spec.split_once(':') {
            Some((t, a)) => (t.trim(), Some(a.trim())),
            None => (spec, None),
        };
        let number = |a: Option<&str>| -> Result<f64> {
            let a = a.ok_or_else(|| Error::Parse(format!("function spec `{spec}` needs a numeric argument")))?;
            a.parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number `{a}` in function spec `{spec}`")))
        };
        let no_arg = |f: ConvexFunction| -> Result<ConvexFunction> {
            match arg {
                None => Ok(f),
                Some(_) => Err(Error::Parse(format!("function spec `{spec}` takes no argument"))),
            }
        };
        match tag {
            "power" => Self::power(number(arg)?),
            "negpower" => Self::neg_power(number(arg)?),
            "renyi" => {
                let p = number(arg)?;
                if !(p > 0.0) {
                    return Err(Error::InvalidArgument(format!("Rényi order must be positive, got {p}")));
                }
                Self::renyi(p)
            }
            "xlogx" => no_arg(Self::xlogx()),
            "xplogx" => Self::xp_logx(number(arg)?),
            "kink" => Self::kink(number(arg)?),
            "flambda" => Self::flambda(number(arg)?),
            "delta0" => no_arg(Self::delta0()),
            "delta1" => no_arg(Self::delta1()),
            "affine" => {
                let a = arg.ok_or_else(|| Error::Parse("affine needs `affine:b,c`".into()))?;
                let (b, c) = a
                    .split_once(',')
                    .ok_or_else(|| Error::Parse("affine needs `affine:b,c`".into()))?;
                Ok(Self::affine(number(Some(b.trim()))?, number(Some(c.trim()))?))
            }
            "measure" => {
                let a = arg.ok_or_else(|| Error::Parse("measure needs `measure:@file.json`".into()))?;
                let path = a
                    .strip_prefix('@')
                    .ok_or_else(|| Error::Parse("measure needs `measure:@file.json`".into()))?;
                Self::from_measure_file(path)
            }
            other => Err(Error::Parse(format!("unknown function `{other}`"))),
        }
    }

    /// The named library used by the bulk experiments.
    pub fn builtin_library() -> Vec<ConvexFunction> {
        let measure = DiscreteMeasure::new(vec![-0.8, -0.3, 0.0], vec![0.25, 0.25, 0.5]).expect("valid nodes");
        vec![
            Self::affine(0.5, 1.0),
            Self::power(2.0).expect("p >= 1"),
            Self::power(5.0).expect("p >= 1"),
            Self::neg_power(0.5).expect("0 < p < 1"),
            Self::xlogx(),
            Self::xp_logx(0.75).expect("p in range"),
            Self::kink(0.3).expect("x0 in range"),
            Self::flambda(-0.5).expect("λ in range"),
            Self::from_measure(0.1, -0.2, 0.7, measure).expect("γ >= 0"),
            Self::delta0(),
            Self::delta1(),
        ]
    }
}

impl fmt::Display for ConvexFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.spec_string())
    }
}

/// Moves an eigenvalue up to [`CLAMP_TOL`] outside `[0, 1]` back onto the interval; errors beyond that.
pub fn clamp_eigenvalue(l: f64) -> Result<f64> {
    if (-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&l) {
        Ok(l.clamp(0.0, 1.0))
    } else {
        Err(Error::OutsideDomain(l))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperatorConvexityReport {
    pub passed: bool,
    /// `max(0, -λ_min)` over samples of `(f(A)+f(B))/2 - f((A+B)/2)`.
    pub worst_violation: f64,
    /// The sampled pair achieving the smallest minimum eigenvalue.
    pub witness: (HermitianMatrix, HermitianMatrix),
}

/// Samples Hermitian pairs with spectra in `[0, 1]` and checks midpoint operator convexity.
pub fn operator_convexity_test(
    f: &ConvexFunction,
    dim: usize,
    samples: usize,
    seed: u64,
) -> Result<OperatorConvexityReport> {
    if dim < 2 {
        return Err(Error::InvalidArgument("operator convexity test needs dim >= 2".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let mut rng = stream_rng(seed, dim as u64);
    let mut worst_min = f64::INFINITY;
    let mut witness = None;
    for _ in 0..samples {
        let a = random_unit_interval_hermitian(&mut rng, dim);
        let b = random_unit_interval_hermitian(&mut rng, dim);
        let mid = a.add(&b).scale(0.5);
        let chord = f.apply_matrix(&a)?.add(&f.apply_matrix(&b)?).scale(0.5);
        let gap = chord.sub(&f.apply_matrix(&mid)?);
        let min = gap.eigenvalues()?.min();
        if min < worst_min {
            worst_min = min;
            witness = Some((a, b));
        }
    }
    Ok(OperatorConvexityReport {
        passed: worst_min >= -OPERATOR_CONVEXITY_TOL,
        worst_violation: (-worst_min).max(0.0),
        witness: witness.expect("at least one sample"),
    })
}
