//! Series hybrid valve model.
//!
//! The orifice equation fixes the model structure but its effective flow
//! area is not measurable. Here an LSSVM identifies that inner function
//! from telemetry, and the mechanism converts its output back to flow:
//!
//! ```text
//! Q = Cv · ε · f(x) / sqrt(1 − β⁴) · sqrt(2 (p1 − pvc) / ρ1)
//! ```
//!
//! Fitting inverts the equation per sample to expose the area target
//! `f = q sqrt(1 − β⁴) / (Cv ε sqrt(2 (p1 − pvc)/ρ1))`, trains the LSSVM
//! on (features → f), and prediction substitutes the learned area back.
//!
//! Conventions:
//! - the vena-contracta pressure is approximated by the measured
//!   downstream pressure (`pvc = P2`), both when extracting targets and
//!   when predicting;
//! - feature vectors are ordered `(P1 kPa, P2 kPa, X stroke fraction)`,
//!   optionally followed by `T K`;
//! - negative area predictions are clamped to zero;
//! - with the temperature feature enabled, upstream density may follow a
//!   linear law `ρ1(T) = ρ_ref (1 − α_T (T − T_ref))`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lssvm::{self, Dataset, KernelSpec, LssvmError, TrainedLssvm};
use crate::mechanism::{orifice_flow, FluidProperties, MechanismError, ValveGeometry};
use crate::scalar::Scalar;

/// Input-vector layout for the data-driven part.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSet {
    /// (P1, P2, X)
    P1P2X,
    /// (P1, P2, X, T)
    P1P2XT,
}

impl FeatureSet {
    pub fn arity(self) -> usize {
        match self {
            Self::P1P2X => 3,
            Self::P1P2XT => 4,
        }
    }

    /// Canonical feature names, in vector order.
    pub fn names(self) -> &'static [&'static str] {
        match self {
            Self::P1P2X => &["p1", "p2", "x"],
            Self::P1P2XT => &["p1", "p2", "x", "temp"],
        }
    }

    pub fn includes_temperature(self) -> bool {
        matches!(self, Self::P1P2XT)
    }
}

impl std::fmt::Display for FeatureSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            Self::P1P2X => "p1p2x",
            Self::P1P2XT => "p1p2xt",
        })
    }
}

impl std::str::FromStr for FeatureSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "p1p2x" => Ok(Self::P1P2X),
            "p1p2xt" => Ok(Self::P1P2XT),
            other => Err(format!("unknown feature set `{other}` (expected p1p2x or p1p2xt)")),
        }
    }
}

/// Linear density–temperature law `ρ1(T) = ρ_ref (1 − α_T (T − T_ref))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityLaw<T> {
    /// Density at the reference temperature \[kg/m³\].
    pub rho_ref: T,
    /// Thermal expansion coefficient \[1/K\].
    pub alpha_t: T,
    /// Reference temperature \[K\].
    pub t_ref: T,
}

impl<T: Scalar> DensityLaw<T> {
    /// Water-like defaults: α_T = 2.1e-4 K⁻¹ around 293.15 K.
    pub fn water_like(rho_ref: T) -> Self {
        Self {
            rho_ref,
            alpha_t: T::of(2.1e-4),
            t_ref: T::of(293.15),
        }
    }

    pub fn density(&self, temp: T) -> T {
        self.rho_ref * (T::one() - self.alpha_t * (temp - self.t_ref))
    }
}

/// One telemetry sample prepared for hybrid fitting. `features[0]` is P1
/// and `pvc` is the vena-contracta proxy (P2 under the default convention).
#[derive(Debug, Clone, PartialEq)]
pub struct HybridSample<T> {
    pub features: Vec<T>,
    /// Measured flow \[m³/s\].
    pub q: T,
    /// Vena-contracta pressure proxy \[kPa\].
    pub pvc: T,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HybridError {
    #[error("feature vector needs {expected} entries, got {got}")]
    FeatureArity { expected: usize, got: usize },
    #[error("hybrid fitting needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("inconsistent samples (q > 0 with no pressure drop) at indices {0:?}")]
    InconsistentSamples(Vec<usize>),
    #[error("density law requires the temperature feature (feature set p1p2xt)")]
    DensityLawNeedsTemperature,
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
    #[error(transparent)]
    Lssvm(#[from] LssvmError),
}

fn invalid(field: &'static str, reason: impl Into<String>) -> HybridError {
    HybridError::Invalid {
        field,
        reason: reason.into(),
    }
}

/// Inverts the orifice equation at one sample to expose the effective flow
/// area that reproduces the measured flow, using the fluid's constant
/// upstream density.
pub fn area_target<T: Scalar>(
    sample: &HybridSample<T>,
    geom: &ValveGeometry<T>,
    fluid: &FluidProperties<T>,
) -> Result<T, HybridError> {
    area_target_with_density(sample, geom, fluid.rho1)
}

fn area_target_with_density<T: Scalar>(
    sample: &HybridSample<T>,
    geom: &ValveGeometry<T>,
    rho1: T,
) -> Result<T, HybridError> {
    geom.validate()?;
    if !(rho1 > T::zero()) {
        return Err(invalid("rho1", format!("must be positive, got {}", rho1)));
    }
    if sample.features.len() < 2 {
        return Err(HybridError::FeatureArity {
            expected: 2,
            got: sample.features.len(),
        });
    }
    if !(sample.q >= T::zero()) {
        return Err(invalid("q", format!("must be >= 0, got {}", sample.q)));
    }
    let p1 = sample.features[0];
    let pvc = sample.pvc;
    if p1 < pvc {
        return Err(MechanismError::PressureOrder {
            p1: p1.widen(),
            pvc: pvc.widen(),
        }
        .into());
    }
    if p1 == pvc {
        return if sample.q == T::zero() {
            Ok(T::zero())
        } else {
            Err(HybridError::InconsistentSamples(vec![0]))
        };
    }
    let beta2 = geom.beta * geom.beta;
    let head = (T::of(2.0) * (p1 - pvc) * T::of(1000.0) / rho1).sqrt();
    Ok(sample.q * (T::one() - beta2 * beta2).sqrt() / (geom.cv * geom.epsilon * head))
}

/// Mechanism parameters plus the trained area model.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridValveModel<T> {
    /// Valve geometry; `ac` is ignored (the area model replaces it).
    pub geom: ValveGeometry<T>,
    pub fluid: FluidProperties<T>,
    pub area_model: TrainedLssvm<T>,
    pub feature_set: FeatureSet,
    /// Temperature-dependent upstream density; only meaningful with the
    /// temperature feature present.
    pub density_law: Option<DensityLaw<T>>,
}

impl<T: Scalar> HybridValveModel<T> {
    pub(crate) fn from_parts(
        geom: ValveGeometry<T>,
        fluid: FluidProperties<T>,
        area_model: TrainedLssvm<T>,
        feature_set: FeatureSet,
        density_law: Option<DensityLaw<T>>,
    ) -> Result<Self, HybridError> {
        geom.validate()?;
        fluid.validate()?;
        if density_law.is_some() && !feature_set.includes_temperature() {
            return Err(HybridError::DensityLawNeedsTemperature);
        }
        if area_model.dim() < feature_set.arity() {
            return Err(HybridError::FeatureArity {
                expected: feature_set.arity(),
                got: area_model.dim(),
            });
        }
        Ok(Self {
            geom,
            fluid,
            area_model,
            feature_set,
            density_law,
        })
    }

    fn resolve_density(&self, features: &[T]) -> T {
        match (&self.density_law, self.feature_set) {
            (Some(law), FeatureSet::P1P2XT) => law.density(features[3]),
            _ => self.fluid.rho1,
        }
    }

    /// Predicts flow \[m³/s\] at a feature vector: the learned area (clamped
    /// to zero) substituted into the orifice equation with `pvc = P2`.
    pub fn predict_flow(&self, features: &[T]) -> Result<T, HybridError> {
        if features.len() != self.area_model.dim() {
            return Err(HybridError::FeatureArity {
                expected: self.area_model.dim(),
                got: features.len(),
            });
        }
        let area = self.area_model.predict(features)?.max(T::zero());
        let p1 = features[0];
        let pvc = features[1];
        let rho1 = self.resolve_density(features);
        let geom = ValveGeometry { ac: area, ..self.geom };
        Ok(orifice_flow(&geom, p1, pvc, rho1)?)
    }
}

/// Fits the series hybrid model: area targets from the inverted orifice
/// equation, then an LSSVM (z-score normalized features) on
/// (features → area).
///
/// Feature vectors must start with the feature-set layout; trailing extra
/// entries (lagged copies of the features, for instance) are passed to
/// the LSSVM untouched.
pub fn fit_hybrid<T: Scalar>(
    samples: &[HybridSample<T>],
    feature_set: FeatureSet,
    geom: &ValveGeometry<T>,
    fluid: &FluidProperties<T>,
    kernel: &KernelSpec<T>,
    c: T,
    density_law: Option<DensityLaw<T>>,
) -> Result<HybridValveModel<T>, HybridError> {
    geom.validate()?;
    fluid.validate()?;
    if density_law.is_some() && !feature_set.includes_temperature() {
        return Err(HybridError::DensityLawNeedsTemperature);
    }
    if samples.len() < 2 {
        return Err(HybridError::TooFewSamples(samples.len()));
    }
    let arity = feature_set.arity();
    let mut rows = Vec::with_capacity(samples.len());
    let mut targets = Vec::with_capacity(samples.len());
    let mut inconsistent = Vec::new();
    for (index, sample) in samples.iter().enumerate() {
        if sample.features.len() < arity {
            return Err(HybridError::FeatureArity {
                expected: arity,
                got: sample.features.len(),
            });
        }
        let rho1 = match (&density_law, feature_set) {
            (Some(law), FeatureSet::P1P2XT) => law.density(sample.features[3]),
            _ => fluid.rho1,
        };
        match area_target_with_density(sample, geom, rho1) {
            Ok(target) => {
                rows.push(sample.features.clone());
                targets.push(target);
            }
            Err(HybridError::InconsistentSamples(_)) => inconsistent.push(index),
            Err(other) => return Err(other),
        }
    }
    if !inconsistent.is_empty() {
        return Err(HybridError::InconsistentSamples(inconsistent));
    }
    let data = Dataset::from_rows(rows, targets)?.with_zscore();
    let area_model = lssvm::train(&data, kernel, c)?;
    HybridValveModel::from_parts(*geom, *fluid, area_model, feature_set, density_law)
}
