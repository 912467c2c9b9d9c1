//! The 19-fault catalog of the benchmark pneumatic actuator and the
//! time profile of an injected fault.
//!
//! Each fault has a legal intensity interval (`<0,1>` or `<-1,1>`; the
//! sign of a signed fault sets the direction of its bias or shift) and a
//! development type. Abrupt faults jump to full intensity at onset;
//! developing faults ramp linearly over their ramp duration. The "slowly"
//! versus "rapidly" labels describe the ramp durations typically
//! configured, not different ramp shapes.

use serde::{Deserialize, Serialize};

/// Fault identifier, `f1` through `f19`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FaultId {
    F1, F2, F3, F4, F5, F6, F7, F8, F9, F10,
    F11, F12, F13, F14, F15, F16, F17, F18, F19,
}

pub const FAULT_COUNT: usize = 19;

impl FaultId {
    pub const ALL: [FaultId; FAULT_COUNT] = [
        FaultId::F1, FaultId::F2, FaultId::F3, FaultId::F4, FaultId::F5,
        FaultId::F6, FaultId::F7, FaultId::F8, FaultId::F9, FaultId::F10,
        FaultId::F11, FaultId::F12, FaultId::F13, FaultId::F14, FaultId::F15,
        FaultId::F16, FaultId::F17, FaultId::F18, FaultId::F19,
    ];

    /// Zero-based position in the catalog.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        const NAMES: [&str; FAULT_COUNT] = [
            "f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8", "f9", "f10",
            "f11", "f12", "f13", "f14", "f15", "f16", "f17", "f18", "f19",
        ];
        NAMES[self.index()]
    }

    pub fn info(self) -> &'static FaultInfo {
        &CATALOG[self.index()]
    }
}

impl std::fmt::Display for FaultId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.as_str())
    }
}

impl std::str::FromStr for FaultId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FaultId::ALL
            .iter()
            .find(|id| id.as_str() == s.to_ascii_lowercase())
            .copied()
            .ok_or_else(|| format!("unknown fault id `{s}` (expected f1..f19)"))
    }
}

/// Legal intensity interval of a fault.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntensityInterval {
    /// `<0,1>`
    UnitPositive,
    /// `<-1,1>`: the sign sets the bias/shift direction.
    Signed,
}

impl IntensityInterval {
    pub fn bounds(self) -> (f64, f64) {
        match self {
            Self::UnitPositive => (0.0, 1.0),
            Self::Signed => (-1.0, 1.0),
        }
    }

    pub fn contains(self, v: f64) -> bool {
        let (lo, hi) = self.bounds();
        v.is_finite() && v >= lo && v <= hi
    }
}

impl std::fmt::Display for IntensityInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            Self::UnitPositive => "<0,1>",
            Self::Signed => "<-1,1>",
        })
    }
}

/// How a fault's intensity evolves after onset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Development {
    Abrupt,
    SlowlyDeveloping,
    RapidlyDeveloping,
}

impl Development {
    pub fn is_developing(self) -> bool {
        !matches!(self, Self::Abrupt)
    }
}

impl std::fmt::Display for Development {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(match self {
            Self::Abrupt => "abrupt",
            Self::SlowlyDeveloping => "slowly developing",
            Self::RapidlyDeveloping => "rapidly developing",
        })
    }
}

/// One catalog entry: identifier, description, legal intensity interval
/// and nominal development type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaultInfo {
    pub id: FaultId,
    pub description: &'static str,
    pub interval: IntensityInterval,
    pub development: Development,
}

/// The benchmark actuator fault catalog: control-valve faults (f1–f7),
/// pneumatic servo-motor faults (f8–f11), positioner faults (f12–f15) and
/// general/external faults (f16–f19).
pub const CATALOG: [FaultInfo; FAULT_COUNT] = {
    use Development::{Abrupt, RapidlyDeveloping, SlowlyDeveloping};
    use IntensityInterval::{Signed, UnitPositive};
    [
        FaultInfo { id: FaultId::F1, description: "Valve clogging", interval: UnitPositive, development: Abrupt },
        FaultInfo { id: FaultId::F2, description: "Valve plug or valve seat sedimentation", interval: UnitPositive, development: SlowlyDeveloping },
        FaultInfo { id: FaultId::F3, description: "Valve plug or valve seat erosion", interval: UnitPositive, development: SlowlyDeveloping },
        FaultInfo { id: FaultId::F4, description: "Increased of valve or bushing friction", interval: Signed, development: SlowlyDeveloping },
        FaultInfo { id: FaultId::F5, description: "External leakage (leaky bushing, covers, terminals)", interval: UnitPositive, development: SlowlyDeveloping },
        FaultInfo { id: FaultId::F6, description: "Internal leakage (valve tightness)", interval: UnitPositive, development: SlowlyDeveloping },
        FaultInfo { id: FaultId::F7, description: "Medium evaporation or critical flow", interval: UnitPositive, development: Abrupt },
        FaultInfo { id: FaultId::F8, description: "Twisted servo-motor's piston rod", interval: UnitPositive, development: Abrupt },
        FaultInfo { id: FaultId::F9, description: "Servo-motor's housing or terminals tightness", interval: UnitPositive, development: Abrupt },
        FaultInfo { id: FaultId::F10, description: "Servo-motor's diaphragm perforation", interval: UnitPositive, development: Abrupt },
        FaultInfo { id: FaultId::F11, description: "Servo-motor's spring fault", interval: UnitPositive, development: Abrupt },
        FaultInfo { id: FaultId::F12, description: "Electro-pneumatic transducer fault", interval: Signed, development: Abrupt },
        FaultInfo { id: FaultId::F13, description: "Rod displacement sensor fault", interval: Signed, development: SlowlyDeveloping },
        FaultInfo { id: FaultId::F14, description: "Pressure sensor fault", interval: Signed, development: Abrupt },
        FaultInfo { id: FaultId::F15, description: "Positioner feedback fault", interval: UnitPositive, development: Abrupt },
        FaultInfo { id: FaultId::F16, description: "Positioner supply pressure drop", interval: UnitPositive, development: RapidlyDeveloping },
        FaultInfo { id: FaultId::F17, description: "Unexpected pressure change across the valve", interval: Signed, development: RapidlyDeveloping },
        FaultInfo { id: FaultId::F18, description: "Fully or partly opened bypass valves", interval: UnitPositive, development: Abrupt },
        FaultInfo { id: FaultId::F19, description: "Flow rate sensor fault", interval: Signed, development: Abrupt },
    ]
};

/// An injected fault: target intensity, onset time and development
/// profile. `development` defaults to the catalog entry for `id`;
/// `ramp_duration` is required for developing types and ignored for
/// abrupt ones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultSpec {
    pub id: FaultId,
    pub intensity: f64,
    #[serde(default)]
    pub onset: f64,
    #[serde(default)]
    pub development: Option<Development>,
    #[serde(default)]
    pub ramp_duration: Option<f64>,
}

impl FaultSpec {
    /// Abrupt fault at full catalog semantics, active from `onset`.
    pub fn abrupt(id: FaultId, intensity: f64, onset: f64) -> Self {
        Self {
            id,
            intensity,
            onset,
            development: Some(Development::Abrupt),
            ramp_duration: None,
        }
    }

    /// The development profile in effect (explicit or catalog default).
    pub fn effective_development(&self) -> Development {
        self.development.unwrap_or(self.id.info().development)
    }

    pub fn validate(&self) -> Result<(), String> {
        let info = self.id.info();
        if !info.interval.contains(self.intensity) {
            return Err(format!(
                "intensity {} of {} outside its legal interval {}",
                self.intensity, self.id, info.interval
            ));
        }
        if !(self.onset >= 0.0 && self.onset.is_finite()) {
            return Err(format!("onset of {} must be >= 0, got {}", self.id, self.onset));
        }
        if self.effective_development().is_developing() {
            match self.ramp_duration {
                Some(r) if r > 0.0 && r.is_finite() => {}
                other => {
                    return Err(format!(
                        "{} develops over time and needs ramp_duration > 0, got {:?}",
                        self.id, other
                    ));
                }
            }
        }
        Ok(())
    }

    /// Intensity in effect at time `t`: zero before onset, the full value
    /// immediately for abrupt faults, and a linear ramp over
    /// `ramp_duration` (then clamped) for developing ones.
    pub fn effective_intensity(&self, t: f64) -> f64 {
        if t < self.onset {
            return 0.0;
        }
        match self.effective_development() {
            Development::Abrupt => self.intensity,
            _ => match self.ramp_duration {
                Some(ramp) if ramp > 0.0 => {
                    let frac = ((t - self.onset) / ramp).min(1.0);
                    self.intensity * frac
                }
                // Unvalidated ramp degenerates to an abrupt step.
                _ => self.intensity,
            },
        }
    }
}
