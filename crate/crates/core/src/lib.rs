//! Grey-box modeling toolkit for control valves.
//!
//! Combines a first-principles hydraulics model ([`mechanism`]) with a
//! least-squares support-vector-machine regressor ([`lssvm`]) in a series
//! hybrid configuration ([`hybrid`]): the data-driven part identifies the
//! unmeasurable effective flow area, and the orifice equation turns that
//! area plus pressures into flow. A fault-injecting actuator simulator
//! ([`simulator`]) generates telemetry with known ground truth, and
//! [`metrics`] scores flow predictions (RMSE / MAPE / Err_max).
//!
//! The numeric core is generic over the scalar type via [`Scalar`]
//! (`f32`/`f64`); the aliases at the crate root pin the default `f64`
//! working precision used by persistence and the CLI.
//!
//! # Example
//!
//! Fit a hybrid model on flow samples and predict at a new operating
//! point:
//!
//! ```
//! use greyvalve_core::hybrid::{fit_hybrid, FeatureSet, HybridSample};
//! use greyvalve_core::{FluidProperties, KernelSpec, ValveGeometry};
//!
//! let geom = ValveGeometry { ac: 0.0, beta: 0.5, cv: 0.95, epsilon: 1.0, fl: 0.9 };
//! let samples: Vec<HybridSample<f64>> = (1..=10)
//!     .map(|i| {
//!         let x = i as f64 / 10.0;
//!         HybridSample { features: vec![700.0, 300.0, x], q: 0.02 * x, pvc: 300.0 }
//!     })
//!     .collect();
//! let model = fit_hybrid(
//!     &samples,
//!     FeatureSet::P1P2X,
//!     &geom,
//!     &FluidProperties::water(),
//!     &KernelSpec::rbf(1.0),
//!     1e6,
//!     None,
//! )
//! .unwrap();
//! let q = model.predict_flow(&[700.0, 300.0, 0.55]).unwrap();
//! assert!((q - 0.011).abs() < 0.011 * 0.01);
//! ```

// Validation guards are written `!(x > 0)` so NaN fails them too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod hybrid;
pub mod lssvm;
pub mod mechanism;
pub mod metrics;
pub mod persist;
pub mod scalar;
pub mod simulator;
pub mod telemetry;

pub use scalar::Scalar;

/// Double-precision aliases for the generic core types.
pub type FluidProperties = mechanism::FluidProperties<f64>;
pub type ValveGeometry = mechanism::ValveGeometry<f64>;
pub type OperatingPoint = mechanism::OperatingPoint<f64>;
pub type Dataset = lssvm::Dataset<f64>;
pub type KernelSpec = lssvm::KernelSpec<f64>;
pub type TrainedLssvm = lssvm::TrainedLssvm<f64>;
pub type HybridSample = hybrid::HybridSample<f64>;
pub type HybridValveModel = hybrid::HybridValveModel<f64>;
pub type DensityLaw = hybrid::DensityLaw<f64>;
pub type EvaluationReport = metrics::EvaluationReport<f64>;
