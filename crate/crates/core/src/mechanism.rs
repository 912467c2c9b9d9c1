//! First-principles valve hydraulics.
//!
//! Thin-wall orifice flow through the vena contracta:
//!
//! ```text
//! Q = Cv · ε · Ac / sqrt(1 − β⁴) · sqrt(2 (p1 − pvc) / ρ1)
//! ```
//!
//! plus the supporting quantities needed to classify the flow regime:
//! saturated vapor pressure from the integrated Clausius–Clapeyron
//! relation, the critical pressure ratio `F_F = 0.96 − 0.28 sqrt(pv/pc)`,
//! and the choked-flow boundary `Δp_T = F_L² (p1 − F_F pv)`. Sizing-style
//! flow coefficients are computed for the non-choked turbulent and laminar
//! regimes.
//!
//! Unit conventions (fixed at this module boundary):
//! - pressures in kPa absolute; the kPa→Pa factor is applied inside the
//!   orifice equation only,
//! - temperatures in K,
//! - orifice flow in m³/s; the flow-coefficient formulas take `qv` in m³/h
//!   with `N1` matching that convention (default [`DEFAULT_N1`]),
//! - densities in kg/m³, areas in m².

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

/// kPa → Pa, applied inside the orifice equation only.
const KPA_TO_PA: f64 = 1000.0;

/// Default unit constant for the flow-coefficient formulas
/// (`qv` in m³/h, `Δp` in kPa).
pub const DEFAULT_N1: f64 = 0.1;

/// Errors from the hydraulics operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MechanismError {
    #[error("temperature must be positive, got {0} K")]
    NonPositiveTemperature(f64),
    #[error("vapor pressure {pv} kPa outside [0, {p_crit}] kPa")]
    VaporPressureRange { pv: f64, p_crit: f64 },
    #[error("upstream pressure {p1} kPa below contraction pressure {pvc} kPa")]
    PressureOrder { p1: f64, pvc: f64 },
    #[error("valve Reynolds number required for regime classification")]
    MissingReynolds,
    #[error("volumetric flow qv required for flow-coefficient computation")]
    MissingFlow,
    #[error("pressure drop must be positive, got {0} kPa")]
    NonPositiveDrop(f64),
    #[error("Reynolds factor must lie in (0, 1], got {0}")]
    InvalidReynoldsFactor(f64),
    #[error("flow coefficient is undefined in the {0:?} regime")]
    ChokedNotApplicable(FlowRegime),
    #[error("invalid {field}: {reason}")]
    Invalid { field: &'static str, reason: String },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> MechanismError {
    MechanismError::Invalid {
        field,
        reason: reason.into(),
    }
}

/// Medium constants for the hydraulics formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluidProperties<T> {
    /// Upstream density ρ1 \[kg/m³\].
    pub rho1: T,
    /// Reference density ρ0 for the density-ratio term \[kg/m³\].
    pub rho0: T,
    /// Specific gas constant of the vapor \[J/(kg·K)\].
    pub rs: T,
    /// Specific heat of vaporization \[J/kg\].
    pub dh_vap: T,
    /// Critical pressure \[kPa\].
    pub p_crit: T,
    /// Vapor-pressure calibration temperature \[K\].
    pub vapor_ref_t: T,
    /// Vapor pressure at the calibration temperature \[kPa\].
    pub vapor_ref_p: T,
}

impl<T: Scalar> FluidProperties<T> {
    /// Liquid water near ambient conditions, calibrated at the normal
    /// boiling point.
    pub fn water() -> Self {
        Self {
            rho1: T::of(998.0),
            rho0: T::of(1000.0),
            rs: T::of(461.5),
            dh_vap: T::of(2.257e6),
            p_crit: T::of(22565.0),
            vapor_ref_t: T::of(373.15),
            vapor_ref_p: T::of(101.325),
        }
    }

    /// Water with the 287 N·m/(kg·K) gas constant quoted by some valve
    /// references for the vapor term. Prefer [`FluidProperties::water`]
    /// unless matching such a data source.
    pub fn water_r287() -> Self {
        Self {
            rs: T::of(287.0),
            ..Self::water()
        }
    }

    pub fn validate(&self) -> Result<(), MechanismError> {
        let pos = |field, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(field, format!("must be positive, got {}", v)))
            }
        };
        pos("rho1", self.rho1)?;
        pos("rho0", self.rho0)?;
        pos("rs", self.rs)?;
        pos("dh_vap", self.dh_vap)?;
        pos("p_crit", self.p_crit)?;
        pos("vapor_ref_t", self.vapor_ref_t)?;
        pos("vapor_ref_p", self.vapor_ref_p)?;
        if self.vapor_ref_p > self.p_crit {
            return Err(invalid("vapor_ref_p", "exceeds critical pressure"));
        }
        Ok(())
    }
}

/// Valve geometry for the orifice equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValveGeometry<T> {
    /// Vena-contracta flow area \[m²\].
    pub ac: T,
    /// Diameter ratio d_e/d_1 (contraction over pipe).
    pub beta: T,
    /// Flow velocity coefficient.
    pub cv: T,
    /// Expansibility coefficient (supplied constant, 1 for liquids).
    pub epsilon: T,
    /// Pressure recovery coefficient F_L.
    pub fl: T,
}

impl<T: Scalar> ValveGeometry<T> {
    pub fn validate(&self) -> Result<(), MechanismError> {
        if !(self.ac >= T::zero() && self.ac.is_finite()) {
            return Err(invalid("ac", format!("must be >= 0, got {}", self.ac)));
        }
        if !(self.beta >= T::zero() && self.beta < T::one()) {
            return Err(invalid("beta", format!("must lie in [0, 1), got {}", self.beta)));
        }
        if !(self.cv > T::zero() && self.cv.is_finite()) {
            return Err(invalid("cv", format!("must be positive, got {}", self.cv)));
        }
        if !(self.epsilon > T::zero() && self.epsilon <= T::one()) {
            return Err(invalid("epsilon", format!("must lie in (0, 1], got {}", self.epsilon)));
        }
        if !(self.fl > T::zero() && self.fl <= T::one()) {
            return Err(invalid("fl", format!("must lie in (0, 1], got {}", self.fl)));
        }
        Ok(())
    }
}

/// One operating point of the valve. `qv` \[m³/h\] and `re_v` are supplied
/// measurements; neither is computed here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint<T> {
    /// Upstream pressure \[kPa absolute\].
    pub p1: T,
    /// Downstream pressure \[kPa absolute\].
    pub p2: T,
    /// Temperature \[K\].
    pub temp: T,
    /// Volumetric flow \[m³/h\], when a coefficient is to be computed.
    pub qv: Option<T>,
    /// Valve Reynolds number, when regime classification is needed.
    pub re_v: Option<T>,
}

impl<T: Scalar> OperatingPoint<T> {
    pub fn validate(&self) -> Result<(), MechanismError> {
        if !(self.p1 > T::zero() && self.p1.is_finite()) {
            return Err(invalid("p1", format!("must be positive, got {}", self.p1)));
        }
        if !(self.p2 >= T::zero() && self.p2.is_finite()) {
            return Err(invalid("p2", format!("must be >= 0, got {}", self.p2)));
        }
        if self.p1 < self.p2 {
            return Err(invalid("p2", "exceeds upstream pressure p1"));
        }
        if !(self.temp > T::zero()) {
            return Err(MechanismError::NonPositiveTemperature(self.temp.widen()));
        }
        if let Some(re) = self.re_v {
            if !(re > T::zero()) {
                return Err(invalid("re_v", format!("must be positive, got {}", re)));
            }
        }
        Ok(())
    }
}

/// Flow regime of a classified operating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FlowRegime {
    /// Turbulent, below the choked-flow boundary.
    NonChokedTurbulent,
    /// Re_v < 1000.
    Laminar,
    /// Choked with downstream pressure recovering above the vapor pressure.
    ChokedCavitation,
    /// Choked with downstream pressure staying below the vapor pressure.
    ChokedFlashing,
}

/// Saturated vapor pressure \[kPa\] at temperature `t` \[K\].
///
/// Integrated Clausius–Clapeyron form anchored at the fluid's calibration
/// point: `pv = ref_p · exp((ΔH/Rs) (1/ref_T − 1/T))`, so `ln pv` is affine
/// in `1/T` with slope `−ΔH/Rs`.
pub fn vapor_pressure<T: Scalar>(fluid: &FluidProperties<T>, t: T) -> Result<T, MechanismError> {
    if !(t > T::zero()) {
        return Err(MechanismError::NonPositiveTemperature(t.widen()));
    }
    let slope = fluid.dh_vap / fluid.rs;
    Ok(fluid.vapor_ref_p * (slope * (fluid.vapor_ref_t.recip() - t.recip())).exp())
}

/// Critical pressure ratio `F_F = 0.96 − 0.28 sqrt(pv/p_crit)`, in
/// [0.68, 0.96] over the admissible domain `0 ≤ pv ≤ p_crit`.
pub fn critical_pressure_ratio<T: Scalar>(pv: T, p_crit: T) -> Result<T, MechanismError> {
    if !(p_crit > T::zero()) || pv < T::zero() || pv > p_crit {
        return Err(MechanismError::VaporPressureRange {
            pv: pv.widen(),
            p_crit: p_crit.widen(),
        });
    }
    // Integer numerators keep the endpoint values 0.96 and 0.68 exact.
    Ok((T::of(96.0) - T::of(28.0) * (pv / p_crit).sqrt()) / T::of(100.0))
}

/// Choked-flow pressure-drop boundary `Δp_T = F_L² (p1 − F_F pv)` \[kPa\].
///
/// May be ≤ 0 when `p1 < F_F pv`; every positive drop is then choked.
pub fn choked_pressure_drop<T: Scalar>(
    geom: &ValveGeometry<T>,
    p1: T,
    pv: T,
    p_crit: T,
) -> Result<T, MechanismError> {
    if !(p1 > T::zero()) {
        return Err(invalid("p1", format!("must be positive, got {}", p1)));
    }
    let ff = critical_pressure_ratio(pv, p_crit)?;
    Ok(geom.fl * geom.fl * (p1 - ff * pv))
}

/// Classifies the flow regime at an operating point.
///
/// Laminar below `Re_v = 1000`; otherwise non-choked turbulent while
/// `Δp < Δp_T`, and choked beyond, split into cavitation (`p2 > pv`) and
/// flashing (`p2 ≤ pv`).
pub fn classify_regime<T: Scalar>(
    op: &OperatingPoint<T>,
    geom: &ValveGeometry<T>,
    fluid: &FluidProperties<T>,
) -> Result<FlowRegime, MechanismError> {
    op.validate()?;
    let re_v = op.re_v.ok_or(MechanismError::MissingReynolds)?;
    if re_v < T::of(1000.0) {
        return Ok(FlowRegime::Laminar);
    }
    let pv = vapor_pressure(fluid, op.temp)?;
    let dp_t = choked_pressure_drop(geom, op.p1, pv, fluid.p_crit)?;
    if op.p1 - op.p2 < dp_t {
        Ok(FlowRegime::NonChokedTurbulent)
    } else if op.p2 > pv {
        Ok(FlowRegime::ChokedCavitation)
    } else {
        Ok(FlowRegime::ChokedFlashing)
    }
}

/// Volumetric flow \[m³/s\] through the contraction.
///
/// `Q = Cv ε Ac / sqrt(1 − β⁴) · sqrt(2 (p1 − pvc) / ρ1)` with `p1`, `pvc`
/// in kPa (converted to Pa here) and `ρ1` in kg/m³.
pub fn orifice_flow<T: Scalar>(
    geom: &ValveGeometry<T>,
    p1: T,
    pvc: T,
    rho1: T,
) -> Result<T, MechanismError> {
    geom.validate()?;
    if !(rho1 > T::zero()) {
        return Err(invalid("rho1", format!("must be positive, got {}", rho1)));
    }
    if p1 < pvc {
        return Err(MechanismError::PressureOrder {
            p1: p1.widen(),
            pvc: pvc.widen(),
        });
    }
    let beta2 = geom.beta * geom.beta;
    let head = T::of(2.0) * (p1 - pvc) * T::of(KPA_TO_PA) / rho1;
    Ok(geom.cv * geom.epsilon * geom.ac / (T::one() - beta2 * beta2).sqrt() * head.sqrt())
}

/// Flow coefficient for the non-choked turbulent and laminar regimes.
///
/// Turbulent: `C = qv/N1 · sqrt((ρ1/ρ0)/Δp)`; laminar divides by the
/// caller-supplied Reynolds factor `fr` ∈ (0, 1]. Undefined (error) in the
/// choked regimes.
pub fn flow_coefficient<T: Scalar>(
    op: &OperatingPoint<T>,
    fluid: &FluidProperties<T>,
    regime: FlowRegime,
    n1: T,
    fr: T,
) -> Result<T, MechanismError> {
    let qv = op.qv.ok_or(MechanismError::MissingFlow)?;
    if !(qv > T::zero()) {
        return Err(invalid("qv", format!("must be positive, got {}", qv)));
    }
    if !(n1 > T::zero()) {
        return Err(invalid("n1", format!("must be positive, got {}", n1)));
    }
    let dp = op.p1 - op.p2;
    if !(dp > T::zero()) {
        return Err(MechanismError::NonPositiveDrop(dp.widen()));
    }
    let base = qv / n1 * ((fluid.rho1 / fluid.rho0) / dp).sqrt();
    match regime {
        FlowRegime::NonChokedTurbulent => Ok(base),
        FlowRegime::Laminar => {
            if !(fr > T::zero() && fr <= T::one()) {
                return Err(MechanismError::InvalidReynoldsFactor(fr.widen()));
            }
            Ok(base / fr)
        }
        choked => Err(MechanismError::ChokedNotApplicable(choked)),
    }
}
