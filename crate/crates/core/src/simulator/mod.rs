//! Fault-injecting pneumatic-valve telemetry generator.
//!
//! A deliberately small surrogate plant with fully documented semantics:
//! a first-order actuator `dX/dt = (cv_eff − X)/τ_eff` integrated with
//! explicit Euler (keep `dt ≪ τ`; the default is `τ/50`), a valve
//! characteristic mapping stroke to area fraction, and the orifice
//! equation for flow with the pressure drop capped at the choked-flow
//! boundary. Sensed channels add per-channel seeded Gaussian noise on top
//! of the true values.
//!
//! Every fault of the catalog maps to an explicit parameter effect, with
//! effective intensity `z` from the fault's development profile. Effects
//! compose in the fixed order cv-path → actuator → hydraulics → sensors:
//!
//! | fault | effect |
//! |-------|--------|
//! | f1  | stroke ceiling `1 − z` and area factor `1 − z` |
//! | f2  | characteristic scaled by `1 − 0.5 z` (sedimentation) |
//! | f3  | characteristic scaled by `1 + 0.5 z` (erosion) |
//! | f4  | `τ·(1 + 4·z)` and hysteresis band `0.02·z` on cv_eff |
//! | f5  | upstream pressure reduced by `5% · z` |
//! | f6  | internal leak flow `z · 5%` of full-open flow |
//! | f7  | vapor pressure raised so the flow chokes as `z → 1` |
//! | f8  | `cv_eff · (1 − z)` (twisted rod) |
//! | f9  | actuator response gain `1 − z` (housing tightness) |
//! | f10 | actuator response gain `1 − z` (diaphragm perforation) |
//! | f11 | static offset `0.1 z` on cv_eff (spring) |
//! | f12 | signed bias `0.1 z` on cv_eff (transducer) |
//! | f13 | signed bias `0.1 z` on sensed stroke |
//! | f14 | signed bias `2% · z` on sensed upstream pressure |
//! | f15 | cv_eff frozen at its previous value when `z > 0.5` |
//! | f16 | `τ / (1 − 0.9 z)` (supply pressure drop) |
//! | f17 | signed shift `10% · z` of upstream pressure |
//! | f18 | bypass flow `z · 20%` of full-open flow added |
//! | f19 | signed bias `5% · z` on sensed flow |
//!
//! The magnitude constants are surrogate design choices (tunable via this
//! module's constants, not per-config). Zero intensity reduces every
//! effect to an exact arithmetic identity, so a zero-intensity fault is
//! bit-identical to a fault-free run under the same seed.
//!
//! Randomness: one master seed, split per sensor channel with SplitMix64
//! so adding or silencing a channel never perturbs the other channels'
//! streams. Zero noise draws nothing.

pub mod faults;
pub mod profile;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hybrid::DensityLaw;
use crate::mechanism::{
    choked_pressure_drop, orifice_flow, FluidProperties, MechanismError, ValveGeometry,
};
use crate::telemetry::TelemetryRecord;
use faults::{FaultId, FaultSpec, FAULT_COUNT};
use profile::Profile;

/// Internal leak at full intensity, as a fraction of full-open flow (f6).
pub const INTERNAL_LEAK_FRACTION: f64 = 0.05;
/// Bypass flow at full intensity, as a fraction of full-open flow (f18).
pub const BYPASS_FRACTION: f64 = 0.2;
/// Friction time-constant multiplier per unit intensity (f4).
pub const FRICTION_TAU_GAIN: f64 = 4.0;
/// Hysteresis band width per unit intensity (f4).
pub const FRICTION_BAND: f64 = 0.02;
/// Relative upstream-pressure loss at full intensity (f5).
pub const EXTERNAL_LEAK_PRESSURE_DROP: f64 = 0.05;
/// Relative upstream-pressure shift at full intensity (f17).
pub const PRESSURE_CHANGE_SHIFT: f64 = 0.1;
/// cv-path offset and bias scale (f11, f12) and rod-sensor bias (f13).
pub const SIGNAL_BIAS: f64 = 0.1;
/// Relative sensed-pressure bias at full intensity (f14).
pub const PRESSURE_SENSOR_BIAS: f64 = 0.02;
/// Relative sensed-flow bias at full intensity (f19).
pub const FLOW_SENSOR_BIAS: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("non-finite {what} at step {step} (t = {t} s)")]
    NonFinite {
        what: &'static str,
        step: usize,
        t: f64,
    },
    #[error("step {step} (t = {t} s): {source}")]
    StepFailed {
        step: usize,
        t: f64,
        source: MechanismError,
    },
    #[error(transparent)]
    Mechanism(#[from] MechanismError),
}

fn bad(field: &'static str, reason: impl Into<String>) -> SimError {
    SimError::InvalidConfig {
        field,
        reason: reason.into(),
    }
}

/// Stroke-to-area-fraction characteristic of the valve trim.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Characteristic {
    #[default]
    Linear,
    /// `char(X) = R^(X−1)` with rangeability `R`.
    EqualPercentage { rangeability: f64 },
}

impl Characteristic {
    pub fn fraction(&self, x: f64) -> f64 {
        match self {
            Self::Linear => x,
            Self::EqualPercentage { rangeability } => rangeability.powf(x - 1.0),
        }
    }
}

/// Valve geometry constants of the simulated plant (the flow area itself
/// comes from `ac_max` and the characteristic).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    pub cv: f64,
    pub epsilon: f64,
    pub beta: f64,
    pub fl: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            cv: 0.95,
            epsilon: 1.0,
            beta: 0.5,
            fl: 0.9,
        }
    }
}

impl GeometryConfig {
    pub fn to_geometry(self, ac: f64) -> ValveGeometry<f64> {
        ValveGeometry {
            ac,
            beta: self.beta,
            cv: self.cv,
            epsilon: self.epsilon,
            fl: self.fl,
        }
    }
}

/// Per-channel sensor noise standard deviations. Interpreted as absolute
/// values, or as fractions of the true value when `noise_relative` is set
/// in the config.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseStd {
    pub x: f64,
    pub p1: f64,
    pub p2: f64,
    pub q: f64,
}

fn default_fluid() -> FluidProperties<f64> {
    FluidProperties::water()
}

fn default_base_p1() -> f64 {
    700.0
}

fn default_base_p2() -> f64 {
    300.0
}

fn default_base_temp() -> f64 {
    293.15
}

fn default_tau() -> f64 {
    1.0
}

fn default_ac_max() -> f64 {
    5e-4
}

/// Full simulation scenario: plant constants, input trajectories, noise
/// and the injected faults. Deserializable from JSON; always validated
/// before a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    /// Timestep \[s\]; defaults to `tau / 50`.
    #[serde(default)]
    pub dt: Option<f64>,
    /// Total simulated time \[s\]; the run emits `floor(duration/dt)` records.
    pub duration: f64,
    #[serde(default)]
    pub seed: u64,
    /// Commanded control signal over time, clamped to [0, 1].
    pub cv_profile: Profile,
    /// Nominal upstream pressure \[kPa\].
    #[serde(default = "default_base_p1")]
    pub base_p1: f64,
    /// Nominal downstream pressure \[kPa\].
    #[serde(default = "default_base_p2")]
    pub base_p2: f64,
    /// Medium temperature \[K\] when no profile is given.
    #[serde(default = "default_base_temp")]
    pub base_temp: f64,
    /// Optional temperature trajectory \[K\].
    #[serde(default)]
    pub temp_profile: Option<Profile>,
    /// Actuator time constant \[s\].
    #[serde(default = "default_tau")]
    pub tau: f64,
    /// Flow area at full stroke \[m²\].
    #[serde(default = "default_ac_max")]
    pub ac_max: f64,
    #[serde(default)]
    pub characteristic: Characteristic,
    #[serde(default)]
    pub geom: GeometryConfig,
    #[serde(default = "default_fluid")]
    pub fluid: FluidProperties<f64>,
    /// Optional temperature-dependent upstream density.
    #[serde(default)]
    pub density: Option<DensityLaw<f64>>,
    #[serde(default)]
    pub noise_std: NoiseStd,
    /// Treat `noise_std` entries as fractions of the true value.
    #[serde(default)]
    pub noise_relative: bool,
    /// Stroke at t = 0; defaults to the initial commanded value (settled).
    #[serde(default)]
    pub initial_stroke: Option<f64>,
    #[serde(default)]
    pub faults: Vec<FaultSpec>,
}

impl SimConfig {
    /// Resolved timestep: explicit `dt` or `tau / 50`.
    pub fn timestep(&self) -> f64 {
        self.dt.unwrap_or(self.tau / 50.0)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(bad("dt", format!("must be positive, got {dt}")));
            }
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(bad("tau", format!("must be positive, got {}", self.tau)));
        }
        if !(self.duration >= self.timestep() && self.duration.is_finite()) {
            return Err(bad(
                "duration",
                format!("must be at least one timestep ({}), got {}", self.timestep(), self.duration),
            ));
        }
        self.cv_profile
            .validate("cv_profile")
            .map_err(|reason| bad("cv_profile", reason))?;
        if let Some(tp) = &self.temp_profile {
            tp.validate("temp_profile").map_err(|reason| bad("temp_profile", reason))?;
        }
        if !(self.base_p1 > 0.0 && self.base_p1.is_finite()) {
            return Err(bad("base_p1", format!("must be positive, got {}", self.base_p1)));
        }
        if !(self.base_p2 >= 0.0 && self.base_p2.is_finite()) {
            return Err(bad("base_p2", format!("must be >= 0, got {}", self.base_p2)));
        }
        if self.base_p1 < self.base_p2 {
            return Err(bad("base_p2", "exceeds base_p1"));
        }
        if !(self.base_temp > 0.0 && self.base_temp.is_finite()) {
            return Err(bad("base_temp", format!("must be positive, got {}", self.base_temp)));
        }
        if !(self.ac_max > 0.0 && self.ac_max.is_finite()) {
            return Err(bad("ac_max", format!("must be positive, got {}", self.ac_max)));
        }
        if let Characteristic::EqualPercentage { rangeability } = self.characteristic {
            if !(rangeability > 1.0 && rangeability.is_finite()) {
                return Err(bad("characteristic", format!("rangeability must exceed 1, got {rangeability}")));
            }
        }
        self.geom
            .to_geometry(self.ac_max)
            .validate()
            .map_err(|e| bad("geom", e.to_string()))?;
        self.fluid.validate().map_err(|e| bad("fluid", e.to_string()))?;
        if let Some(law) = &self.density {
            if !(law.rho_ref > 0.0 && law.rho_ref.is_finite()) {
                return Err(bad("density", format!("rho_ref must be positive, got {}", law.rho_ref)));
            }
            if !law.alpha_t.is_finite() || !(law.t_ref > 0.0 && law.t_ref.is_finite()) {
                return Err(bad("density", "alpha_t and t_ref must be finite, t_ref positive"));
            }
        }
        for (value, name) in [
            (self.noise_std.x, "noise_std.x"),
            (self.noise_std.p1, "noise_std.p1"),
            (self.noise_std.p2, "noise_std.p2"),
            (self.noise_std.q, "noise_std.q"),
        ] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(bad("noise_std", format!("{name} must be >= 0, got {value}")));
            }
        }
        if let Some(x0) = self.initial_stroke {
            if !(0.0..=1.0).contains(&x0) {
                return Err(bad("initial_stroke", format!("must lie in [0, 1], got {x0}")));
            }
        }
        let mut seen = [false; FAULT_COUNT];
        for fault in &self.faults {
            fault.validate().map_err(|reason| bad("faults", reason))?;
            let idx = fault.id.index();
            if seen[idx] {
                return Err(bad("faults", format!("{} configured more than once", fault.id)));
            }
            seen[idx] = true;
        }
        Ok(())
    }

    /// Upstream density at a temperature: the density law when configured,
    /// the fluid's constant otherwise.
    fn density_at(&self, temp: f64) -> f64 {
        match &self.density {
            Some(law) => law.density(temp),
            None => self.fluid.rho1,
        }
    }

    /// Nominal full-open flow (full stroke, base pressures, base
    /// temperature); the reference that scales leak (f6) and bypass (f18)
    /// flows.
    pub fn reference_full_open_flow(&self) -> Result<f64, SimError> {
        let geom = self.geom.to_geometry(self.ac_max);
        let drop = (self.base_p1 - self.base_p2).max(0.0);
        let rho = self.density_at(self.base_temp);
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(bad("density", format!("density at base_temp is {rho}")));
        }
        Ok(orifice_flow(&geom, drop, 0.0, rho)?)
    }
}

/// Mutable simulation state carried across steps.
#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    /// True stroke fraction.
    pub x: f64,
    /// Backlash memory for the friction hysteresis band (f4).
    hysteresis_cv: f64,
    /// Last applied effective control signal (frozen by f15).
    held_cv: f64,
    step_index: usize,
}

impl SimState {
    pub fn initial(cfg: &SimConfig) -> Self {
        let cv0 = cfg.cv_profile.value_at(0.0).clamp(0.0, 1.0);
        Self {
            x: cfg.initial_stroke.unwrap_or(cv0),
            hysteresis_cv: cv0,
            held_cv: cv0,
            step_index: 0,
        }
    }

    pub fn step_index(&self) -> usize {
        self.step_index
    }
}

/// Per-channel noise streams, split from the master seed so the channels
/// stay independent.
#[derive(Debug, Clone)]
pub struct SimRng {
    x: ChaCha8Rng,
    p1: ChaCha8Rng,
    p2: ChaCha8Rng,
    q: ChaCha8Rng,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SimRng {
    pub fn from_seed(seed: u64) -> Self {
        let channel = |salt: u64| ChaCha8Rng::seed_from_u64(splitmix64(seed ^ salt));
        Self {
            x: channel(0x01),
            p1: channel(0x02),
            p2: channel(0x03),
            q: channel(0x04),
        }
    }
}

/// One Gaussian draw for a channel; zero std draws nothing so silent
/// channels never consume randomness.
fn sensor_noise(rng: &mut ChaCha8Rng, std: f64, relative: bool, truth: f64) -> f64 {
    if std <= 0.0 {
        return 0.0;
    }
    let n: f64 = StandardNormal.sample(rng);
    let scale = if relative { std * truth.abs() } else { std };
    n * scale
}

/// Classic backlash operator: the output follows the input only once it
/// escapes the `±band` window around the memory value. A zero band is an
/// exact pass-through.
fn backlash(memory: &mut f64, input: f64, band: f64) -> f64 {
    if band <= 0.0 {
        *memory = input;
        return input;
    }
    if input > *memory + band {
        *memory = input - band;
    } else if input < *memory - band {
        *memory = input + band;
    }
    *memory
}

/// Raises the vapor pressure toward a value that chokes the valve (f7):
/// at full intensity `F_F · pv` reaches the upstream pressure, collapsing
/// the choked-flow boundary below any positive drop.
fn vapor_pressure_under_evaporation(pv: f64, p1: f64, p_crit: f64, z: f64) -> f64 {
    if z <= 0.0 {
        return pv;
    }
    let target = (p1 / 0.68 * 1.001).min(p_crit).max(pv);
    pv + z * (target - pv)
}

fn intensities_at(faults: &[FaultSpec], t: f64) -> [f64; FAULT_COUNT] {
    let mut z = [0.0; FAULT_COUNT];
    for fault in faults {
        z[fault.id.index()] = fault.effective_intensity(t);
    }
    z
}

/// Advances the plant one timestep and returns the telemetry record at
/// time `t`. The commanded `cv` must lie in [0, 1].
pub fn step(
    state: &mut SimState,
    cv: f64,
    cfg: &SimConfig,
    t: f64,
    rng: &mut SimRng,
) -> Result<TelemetryRecord, SimError> {
    if !(0.0..=1.0).contains(&cv) {
        return Err(bad("cv", format!("must lie in [0, 1], got {cv}")));
    }
    let dt = cfg.timestep();
    let z = intensities_at(&cfg.faults, t);
    let zi = |id: FaultId| z[id.index()];
    use FaultId::*;

    // cv path: transducer bias, rod twist, spring offset, friction
    // hysteresis; the positioner hold (f15) freezes the whole path.
    let mut cv_eff = cv + SIGNAL_BIAS * zi(F12);
    cv_eff *= 1.0 - zi(F8);
    cv_eff += SIGNAL_BIAS * zi(F11);
    if zi(F15) > 0.5 {
        cv_eff = state.held_cv;
    } else {
        cv_eff = backlash(&mut state.hysteresis_cv, cv_eff, FRICTION_BAND * zi(F4).abs());
        cv_eff = cv_eff.clamp(0.0, 1.0);
        state.held_cv = cv_eff;
    }

    // actuator: first-order lag with fault-adjusted time constant and gain
    let tau_eff = cfg.tau * (1.0 + FRICTION_TAU_GAIN * zi(F4).abs()) / (1.0 - 0.9 * zi(F16));
    let target = cv_eff * (1.0 - zi(F9)) * (1.0 - zi(F10));
    let x_max = (1.0 - zi(F1)).max(0.0);
    let x = (state.x + dt * (target - state.x) / tau_eff).clamp(0.0, x_max);
    state.x = x;

    // hydraulics
    let p1_eff = cfg.base_p1
        * (1.0 - EXTERNAL_LEAK_PRESSURE_DROP * zi(F5))
        * (1.0 + PRESSURE_CHANGE_SHIFT * zi(F17));
    let p2_eff = cfg.base_p2;
    let temp = cfg
        .temp_profile
        .as_ref()
        .map(|p| p.value_at(t))
        .unwrap_or(cfg.base_temp);
    let rho1 = cfg.density_at(temp);
    if !(rho1 > 0.0 && rho1.is_finite()) {
        return Err(SimError::NonFinite {
            what: "upstream density",
            step: state.step_index,
            t,
        });
    }
    let at_step = |source: MechanismError| SimError::StepFailed {
        step: state.step_index,
        t,
        source,
    };
    let ac = cfg.ac_max
        * cfg.characteristic.fraction(x)
        * (1.0 - 0.5 * zi(F2))
        * (1.0 + 0.5 * zi(F3))
        * (1.0 - zi(F1));
    let geom = cfg.geom.to_geometry(ac);
    let pv = crate::mechanism::vapor_pressure(&cfg.fluid, temp).map_err(at_step)?;
    let pv_eff = vapor_pressure_under_evaporation(pv, p1_eff, cfg.fluid.p_crit, zi(F7));
    let dp_choked =
        choked_pressure_drop(&geom, p1_eff, pv_eff, cfg.fluid.p_crit).map_err(at_step)?;
    let dp = (p1_eff - p2_eff).max(0.0);
    let drop = dp.min(dp_choked.max(0.0));
    let q_valve = orifice_flow(&geom, drop, 0.0, rho1).map_err(at_step)?;
    let q_full = cfg.reference_full_open_flow()?;
    let q = q_valve + zi(F6) * INTERNAL_LEAK_FRACTION * q_full + zi(F18) * BYPASS_FRACTION * q_full;

    // sensors: true value + fault bias + seeded Gaussian noise
    let x_sensed =
        x + SIGNAL_BIAS * zi(F13) + sensor_noise(&mut rng.x, cfg.noise_std.x, cfg.noise_relative, x);
    let p1_sensed = p1_eff * (1.0 + PRESSURE_SENSOR_BIAS * zi(F14))
        + sensor_noise(&mut rng.p1, cfg.noise_std.p1, cfg.noise_relative, p1_eff);
    let p2_sensed =
        p2_eff + sensor_noise(&mut rng.p2, cfg.noise_std.p2, cfg.noise_relative, p2_eff);
    let q_sensed = q * (1.0 + FLOW_SENSOR_BIAS * zi(F19))
        + sensor_noise(&mut rng.q, cfg.noise_std.q, cfg.noise_relative, q);

    for (value, what) in [(x, "stroke"), (q, "flow"), (q_sensed, "sensed flow")] {
        if !value.is_finite() {
            return Err(SimError::NonFinite {
                what,
                step: state.step_index,
                t,
            });
        }
    }

    let active_faults: Vec<(FaultId, f64)> = FaultId::ALL
        .iter()
        .filter(|id| z[id.index()] != 0.0)
        .map(|id| (*id, z[id.index()]))
        .collect();

    state.step_index += 1;
    Ok(TelemetryRecord {
        t,
        cv,
        x,
        x_sensed,
        p1: p1_eff,
        p1_sensed,
        p2: p2_eff,
        p2_sensed,
        temp,
        q,
        q_sensed,
        active_faults,
    })
}

/// Runs the full scenario: `floor(duration/dt)` steps at `t = 0, dt, …`,
/// deterministic for a given config (and bit-reproducible per seed).
pub fn run(cfg: &SimConfig) -> Result<Vec<TelemetryRecord>, SimError> {
    cfg.validate()?;
    let dt = cfg.timestep();
    let steps = (cfg.duration / dt * (1.0 + 1e-12)).floor() as usize;
    let mut rng = SimRng::from_seed(cfg.seed);
    let mut state = SimState::initial(cfg);
    let mut records = Vec::with_capacity(steps);
    for i in 0..steps {
        let t = i as f64 * dt;
        let cv = cfg.cv_profile.value_at(t).clamp(0.0, 1.0);
        records.push(step(&mut state, cv, cfg, t, &mut rng)?);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use profile::TimePoint;

    fn base_config() -> SimConfig {
        SimConfig {
            dt: Some(0.02),
            duration: 10.0,
            seed: 42,
            cv_profile: Profile::Constant { value: 0.5 },
            base_p1: 700.0,
            base_p2: 300.0,
            base_temp: 293.15,
            temp_profile: None,
            tau: 1.0,
            ac_max: 5e-4,
            characteristic: Characteristic::Linear,
            geom: GeometryConfig::default(),
            fluid: FluidProperties::water(),
            density: None,
            noise_std: NoiseStd::default(),
            noise_relative: false,
            initial_stroke: None,
            faults: Vec::new(),
        }
    }

    #[test]
    fn record_count_matches_duration_over_dt() {
        let mut cfg = base_config();
        cfg.dt = Some(0.5);
        cfg.duration = 5.0;
        assert_eq!(run(&cfg).unwrap().len(), 10);
    }

    #[test]
    fn first_order_lag_settles_on_command() {
        let mut cfg = base_config();
        cfg.initial_stroke = Some(0.0);
        cfg.duration = 10.0; // 10 · tau
        let records = run(&cfg).unwrap();
        let last = records.last().unwrap();
        assert!((last.x - 0.5).abs() < 1e-3, "x = {} after 10 tau", last.x);
    }

    #[test]
    fn default_initial_stroke_is_settled() {
        let cfg = base_config();
        let records = run(&cfg).unwrap();
        assert!((records[0].x - 0.5).abs() < 1e-9);
        assert!(records.iter().all(|r| r.q > 0.0));
    }

    #[test]
    fn full_clogging_closes_the_valve() {
        let mut cfg = base_config();
        cfg.cv_profile = Profile::Constant { value: 1.0 };
        cfg.faults = vec![FaultSpec::abrupt(FaultId::F1, 1.0, 0.0)];
        let records = run(&cfg).unwrap();
        let last = records.last().unwrap();
        assert_eq!(last.x, 0.0);
        assert_eq!(last.q, 0.0);
    }

    #[test]
    fn identical_seed_reproduces_telemetry_bit_for_bit() {
        let mut cfg = base_config();
        cfg.noise_std = NoiseStd { x: 0.01, p1: 1.0, p2: 1.0, q: 1e-4 };
        let a = run(&cfg).unwrap();
        let b = run(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_noise_makes_seed_irrelevant() {
        let mut cfg = base_config();
        cfg.seed = 1;
        let a = run(&cfg).unwrap();
        cfg.seed = 999;
        let b = run(&cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_intensity_fault_is_bit_identical_to_fault_free() {
        let mut cfg = base_config();
        cfg.noise_std = NoiseStd { x: 0.01, p1: 0.5, p2: 0.5, q: 1e-4 };
        let clean = run(&cfg).unwrap();
        for id in FaultId::ALL {
            let mut faulty_cfg = cfg.clone();
            faulty_cfg.faults = vec![FaultSpec::abrupt(id, 0.0, 0.0)];
            let faulty = run(&faulty_cfg).unwrap();
            assert_eq!(clean, faulty, "zero-intensity {id} perturbed the run");
        }
    }

    #[test]
    fn sensor_faults_only_touch_sensed_channels() {
        let mut cfg = base_config();
        cfg.cv_profile = Profile::Sine {
            mean: 0.5,
            amplitude: 0.3,
            period: 4.0,
            phase: 0.0,
        };
        cfg.noise_std = NoiseStd { x: 0.005, p1: 0.5, p2: 0.5, q: 1e-5 };
        let clean = run(&cfg).unwrap();
        for (id, intensity) in [(FaultId::F13, 1.0), (FaultId::F14, -1.0), (FaultId::F19, 0.5)] {
            let mut faulty_cfg = cfg.clone();
            faulty_cfg.faults = vec![FaultSpec::abrupt(id, intensity, 0.0)];
            let faulty = run(&faulty_cfg).unwrap();
            for (c, f) in clean.iter().zip(&faulty) {
                assert_eq!(c.x.to_bits(), f.x.to_bits());
                assert_eq!(c.p1.to_bits(), f.p1.to_bits());
                assert_eq!(c.p2.to_bits(), f.p2.to_bits());
                assert_eq!(c.q.to_bits(), f.q.to_bits());
            }
        }
    }

    #[test]
    fn rod_sensor_bias_shows_up_verbatim_in_paired_runs() {
        let cfg = base_config(); // zero noise
        let clean = run(&cfg).unwrap();
        let mut faulty_cfg = cfg.clone();
        faulty_cfg.faults = vec![FaultSpec::abrupt(FaultId::F13, 1.0, 0.0)];
        let faulty = run(&faulty_cfg).unwrap();
        for (c, f) in clean.iter().zip(&faulty) {
            assert_eq!(c.x, f.x);
            assert!((f.x_sensed - c.x_sensed - SIGNAL_BIAS).abs() < 1e-12);
        }
    }

    #[test]
    fn stroke_and_flow_stay_bounded_for_every_fault() {
        for id in FaultId::ALL {
            let (lo, _) = id.info().interval.bounds();
            let mut intensities = vec![0.25, 1.0];
            if lo < 0.0 {
                intensities.extend([-0.25, -1.0]);
            }
            for intensity in intensities {
                let mut cfg = base_config();
                cfg.duration = 4.0;
                cfg.cv_profile = Profile::Sine {
                    mean: 0.5,
                    amplitude: 0.5,
                    period: 1.7,
                    phase: 0.3,
                };
                cfg.faults = vec![FaultSpec {
                    id,
                    intensity,
                    onset: 1.0,
                    development: None,
                    ramp_duration: Some(1.5),
                }];
                let records = run(&cfg).unwrap_or_else(|e| panic!("{id} z={intensity}: {e}"));
                for r in &records {
                    assert!((0.0..=1.0).contains(&r.x), "{id} z={intensity}: x={}", r.x);
                    assert!(r.q >= 0.0, "{id} z={intensity}: q={}", r.q);
                }
            }
        }
    }

    #[test]
    fn clogging_degrades_flow_monotonically() {
        let mut last_q = f64::INFINITY;
        for z in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let mut cfg = base_config();
            cfg.cv_profile = Profile::Constant { value: 1.0 };
            cfg.duration = 8.0;
            cfg.faults = vec![FaultSpec::abrupt(FaultId::F1, z, 0.0)];
            let records = run(&cfg).unwrap();
            let q = records.last().unwrap().q;
            assert!(q <= last_q + 1e-15, "q grew from {last_q} to {q} at z={z}");
            last_q = q;
        }
    }

    #[test]
    fn evaporation_fault_chokes_the_flow() {
        let mut cfg = base_config();
        cfg.duration = 3.0;
        let clean_q = run(&cfg).unwrap().last().unwrap().q;
        cfg.faults = vec![FaultSpec::abrupt(FaultId::F7, 1.0, 0.0)];
        let choked_q = run(&cfg).unwrap().last().unwrap().q;
        assert!(choked_q < clean_q);
    }

    #[test]
    fn bypass_and_internal_leak_add_flow() {
        let mut cfg = base_config();
        cfg.duration = 3.0;
        let q_full = cfg.reference_full_open_flow().unwrap();
        let clean_q = run(&cfg).unwrap().last().unwrap().q;
        for (id, fraction) in [(FaultId::F6, INTERNAL_LEAK_FRACTION), (FaultId::F18, BYPASS_FRACTION)] {
            let mut faulty_cfg = cfg.clone();
            faulty_cfg.faults = vec![FaultSpec::abrupt(id, 1.0, 0.0)];
            let q = run(&faulty_cfg).unwrap().last().unwrap().q;
            assert!((q - clean_q - fraction * q_full).abs() < 1e-12);
        }
    }

    #[test]
    fn seat_faults_scale_the_flow_in_opposite_directions() {
        let mut cfg = base_config();
        cfg.duration = 3.0;
        let clean_q = run(&cfg).unwrap().last().unwrap().q;
        cfg.faults = vec![FaultSpec::abrupt(FaultId::F2, 1.0, 0.0)];
        let sedimented = run(&cfg).unwrap().last().unwrap().q;
        cfg.faults = vec![FaultSpec::abrupt(FaultId::F3, 1.0, 0.0)];
        let eroded = run(&cfg).unwrap().last().unwrap().q;
        // Flow is linear in area, so the half/one-and-a-half area factors
        // carry straight through.
        assert!((sedimented / clean_q - 0.5).abs() < 1e-9);
        assert!((eroded / clean_q - 1.5).abs() < 1e-9);
    }

    #[test]
    fn simultaneous_faults_compose_in_order() {
        let mut cfg = base_config();
        cfg.duration = 3.0;
        cfg.faults = vec![
            FaultSpec::abrupt(FaultId::F5, 1.0, 0.0),
            FaultSpec::abrupt(FaultId::F17, -0.5, 0.0),
            FaultSpec::abrupt(FaultId::F6, 1.0, 0.0),
        ];
        let records = run(&cfg).unwrap();
        let last = records.last().unwrap();
        // Both pressure effects apply multiplicatively to the true p1.
        let expected_p1 = cfg.base_p1 * (1.0 - 0.05) * (1.0 - 0.05);
        assert!((last.p1 - expected_p1).abs() < 1e-12);
        // The internal leak rides on top of the (reduced-drop) valve flow.
        let q_full = cfg.reference_full_open_flow().unwrap();
        let mut no_leak_cfg = cfg.clone();
        no_leak_cfg.faults.truncate(2);
        let no_leak_q = run(&no_leak_cfg).unwrap().last().unwrap().q;
        assert!((last.q - no_leak_q - INTERNAL_LEAK_FRACTION * q_full).abs() < 1e-12);
    }

    #[test]
    fn positioner_feedback_freezes_the_stroke() {
        let mut cfg = base_config();
        cfg.duration = 6.0;
        cfg.cv_profile = Profile::Steps {
            schedule: vec![
                TimePoint { t: 0.0, value: 0.3 },
                TimePoint { t: 3.0, value: 0.9 },
            ],
        };
        cfg.faults = vec![FaultSpec::abrupt(FaultId::F15, 1.0, 0.0)];
        let records = run(&cfg).unwrap();
        let last = records.last().unwrap();
        assert!((last.x - 0.3).abs() < 1e-9, "stroke followed the step: {}", last.x);
    }

    #[test]
    fn supply_drop_slows_the_actuator() {
        let mut cfg = base_config();
        cfg.initial_stroke = Some(0.0);
        cfg.duration = 1.0;
        let clean_x = run(&cfg).unwrap().last().unwrap().x;
        cfg.faults = vec![FaultSpec::abrupt(FaultId::F16, 0.9, 0.0)];
        let slow_x = run(&cfg).unwrap().last().unwrap().x;
        assert!(slow_x < clean_x / 2.0);
    }

    #[test]
    fn friction_hysteresis_creates_a_dead_band() {
        let mut cfg = base_config();
        cfg.duration = 20.0;
        cfg.cv_profile = Profile::Sine {
            mean: 0.5,
            amplitude: 0.005, // inside the f4 band at z = 1
            period: 5.0,
            phase: 0.0,
        };
        cfg.faults = vec![FaultSpec::abrupt(FaultId::F4, 1.0, 0.0)];
        let records = run(&cfg).unwrap();
        let (min_x, max_x) = records
            .iter()
            .fold((f64::MAX, f64::MIN), |(lo, hi), r| (lo.min(r.x), hi.max(r.x)));
        assert!(max_x - min_x < 1e-9, "stroke moved {min_x}..{max_x} inside the dead band");
    }

    #[test]
    fn equal_percentage_characteristic_leaks_at_zero_stroke() {
        let c = Characteristic::EqualPercentage { rangeability: 50.0 };
        assert!((c.fraction(0.0) - 0.02).abs() < 1e-12);
        assert_eq!(c.fraction(1.0), 1.0);
    }

    #[test]
    fn runtime_failures_carry_the_timestep() {
        let mut cfg = base_config();
        cfg.duration = 4.0;
        // Shape-valid profile that drives the temperature unphysical
        // mid-run.
        cfg.temp_profile = Some(Profile::Table {
            points: vec![
                TimePoint { t: 0.0, value: 300.0 },
                TimePoint { t: 4.0, value: -100.0 },
            ],
        });
        match run(&cfg) {
            Err(SimError::StepFailed { step, t, .. }) => {
                assert!(step > 0);
                assert!(t > 0.0);
            }
            other => panic!("expected a step failure, got {other:?}"),
        }
    }

    #[test]
    fn config_validation_names_the_field() {
        let mut cfg = base_config();
        cfg.dt = Some(0.0);
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("`dt`"), "message was: {err}");

        let mut cfg = base_config();
        cfg.faults = vec![
            FaultSpec::abrupt(FaultId::F1, 0.5, 0.0),
            FaultSpec::abrupt(FaultId::F1, 0.7, 1.0),
        ];
        assert!(cfg.validate().is_err());

        let mut cfg = base_config();
        cfg.faults = vec![FaultSpec::abrupt(FaultId::F4, 2.0, 0.0)];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let mut cfg = base_config();
        cfg.temp_profile = Some(Profile::Table {
            points: vec![
                TimePoint { t: 0.0, value: 290.0 },
                TimePoint { t: 10.0, value: 350.0 },
            ],
        });
        cfg.density = Some(DensityLaw::water_like(998.0));
        cfg.faults = vec![FaultSpec {
            id: FaultId::F2,
            intensity: 0.5,
            onset: 2.0,
            development: None,
            ramp_duration: Some(3.0),
        }];
        let json = serde_json::to_string_pretty(&cfg).unwrap();
        let back: SimConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back, cfg);

        let err = serde_json::from_str::<SimConfig>("{\"duration\": 1.0}");
        assert!(err.is_err()); // cv_profile is required
    }
}
