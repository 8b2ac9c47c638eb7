//! Closed-form output spectra of the Werner-Holevo pair `Φ₃ ⊗ Φ₃`.
//!
//! By covariance, the output spectrum for a pure input depends only on its
//! Schmidt coefficients `(λ₁, λ₂, λ₃)`. Six eigenvalues have the form
//! `e_{αβ} = (1 - λ_α - λ_β)/4` (ordered pairs `α ≠ β`) and three have the form
//! `G_α = cos²(θ/6 - 2π(α-1)/6)/3`, where `θ ∈ [0, π]` is determined by the
//! product `t = λ₁λ₂λ₃`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functions::ConvexFunction;
use crate::linalg::Spectrum;

/// Upper end of the range of `t = λ₁λ₂λ₃`.
pub const T_MAX: f64 = 1.0 / 27.0;
/// Drift of `t` past its range that is clamped rather than rejected.
pub const T_CLAMP_TOL: f64 = 1e-14;

/// Squared Schmidt coefficients of a bipartite pure state: nonnegative, summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SchmidtVector {
    values: Vec<f64>,
}

impl SchmidtVector {
    /// Accepts entries in `[0, 1]` summing to one within 1e-12, then renormalizes.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty Schmidt vector".into()));
        }
        if let Some(bad) = values.iter().find(|&&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::InvalidArgument(format!("Schmidt coefficient {bad} outside [0, 1]")));
        }
        let total: f64 = values.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("Schmidt coefficients sum to {total}")));
        }
        Ok(Self {
            values: values.into_iter().map(|v| v / total).collect(),
        })
    }

    /// Clips negatives to zero and rescales; for vectors produced by numerics.
    pub fn normalized(values: Vec<f64>) -> Result<Self> {
        let clipped: Vec<f64> = values.into_iter().map(|v| v.max(0.0)).collect();
        let total: f64 = clipped.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidArgument("Schmidt vector has no positive mass".into()));
        }
        Ok(Self {
            values: clipped.into_iter().map(|v| v / total).collect(),
        })
    }

    pub fn triple(l1: f64, l2: f64, l3: f64) -> Result<Self> {
        Self::new(vec![l1, l2, l3])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Copy with entries sorted in descending order.
    pub fn sorted_descending(&self) -> Self {
        let mut values = self.values.clone();
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values }
    }

    /// Largest absolute coordinate difference to the nearest simplex vertex.
    pub fn distance_to_vertex(&self) -> f64 {
        (0..self.values.len())
            .map(|k| {
                self.values
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| (v - if i == k { 1.0 } else { 0.0 }).abs())
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// The state `Σᵢ √λᵢ |i⟩|i⟩` in `C^d ⊗ C^d`, `d = len`.
    pub fn canonical_state(&self) -> Vec<Complex64> {
        let d = self.values.len();
        let mut psi = vec![Complex64::new(0.0, 0.0); d * d];
        for (i, &l) in self.values.iter().enumerate() {
            psi[i * d + i] = Complex64::new(l.sqrt(), 0.0);
        }
        psi
    }

    fn as_triple(&self) -> Result<[f64; 3]> {
        match self.values.as_slice() {
            &[a, b, c] => Ok([a, b, c]),
            other => Err(Error::DimensionMismatch(format!(
                "expected three Schmidt coefficients, got {}",
                other.len()
            ))),
        }
    }
}

/// The nine eigenvalues of `(Φ₃ ⊗ Φ₃)(|ψ⟩⟨ψ|)` in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WHSpectrum {
    /// `e_{αβ}` for ordered pairs (1,2), (1,3), (2,1), (2,3), (3,1), (3,2).
    pub e_values: [f64; 6],
    pub g_values: [f64; 3],
    pub t: f64,
    pub theta: f64,
}

impl WHSpectrum {
    pub fn spectrum(&self) -> Spectrum {
        Spectrum::new(self.e_values.iter().chain(&self.g_values).copied().collect())
    }

    pub fn total(&self) -> f64 {
        self.e_values.iter().sum::<f64>() + self.g_values.iter().sum::<f64>()
    }
}

/// `θ = atan2(√(t(1/27 - t)), t - 1/54)`, with `t` clamped within 1e-14 of its range.
pub fn theta_of_t(t: f64) -> Result<f64> {
    if !(-T_CLAMP_TOL..=T_MAX + T_CLAMP_TOL).contains(&t) {
        return Err(Error::OutsideDomain(t));
    }
    let t = t.clamp(0.0, T_MAX);
    let y = (t * (T_MAX - t)).max(0.0).sqrt();
    Ok(y.atan2(t - 1.0 / 54.0))
}

/// `G_α(θ) = cos²(θ/6 - 2π(α-1)/6)/3` for α = 1, 2, 3.
pub fn g_values_of_theta(theta: f64) -> [f64; 3] {
    let g = |alpha: f64| {
        let c = (theta / 6.0 - 2.0 * PI * (alpha - 1.0) / 6.0).cos();
        c * c / 3.0
    };
    [g(1.0), g(2.0), g(3.0)]
}

/// Closed-form output spectrum of the Werner-Holevo pair for Schmidt coefficients `s`.
pub fn wh3_pair_spectrum(s: &SchmidtVector) -> Result<WHSpectrum> {
    let l = s.as_triple()?;
    let e = |a: usize, b: usize| (1.0 - l[a] - l[b]) / 4.0;
    let t = l[0] * l[1] * l[2];
    let theta = theta_of_t(t)?;
    Ok(WHSpectrum {
        e_values: [e(0, 1), e(0, 2), e(1, 0), e(1, 2), e(2, 0), e(2, 1)],
        g_values: g_values_of_theta(theta),
        t,
        theta,
    })
}

/// `Tr f` of the closed-form output for Schmidt coefficients `s`.
pub fn wh3_objective(f: &ConvexFunction, s: &SchmidtVector) -> Result<f64> {
    f.trace_of_spectrum(&wh3_pair_spectrum(s)?.spectrum())
}

fn check_dim(d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("Werner-Holevo dimension must be >= 2, got {d}")));
    }
    Ok(d as f64)
}

/// Output spectrum of `Φ_d ⊗ Φ_d` on a product input.
pub fn wh_product_spectrum(d: usize) -> Result<Spectrum> {
    let df = check_dim(d)?;
    let k = (d - 1) * (d - 1);
    let mut values = vec![1.0 / ((df - 1.0) * (df - 1.0)); k];
    values.extend(std::iter::repeat_n(0.0, 2 * d - 1));
    Ok(Spectrum::new(values))
}

/// Output spectrum of `Φ_d ⊗ Φ_d` on the maximally entangled input.
pub fn wh_maxent_spectrum(d: usize) -> Result<Spectrum> {
    let df = check_dim(d)?;
    let denom = (df - 1.0) * (df - 1.0);
    let mut values = vec![(2.0 - 2.0 / df) / denom];
    values.extend(std::iter::repeat_n((1.0 - 2.0 / df) / denom, d * d - 1));
    Ok(Spectrum::new(values))
}
