//! Time profiles for simulator inputs (control signal, temperature).

use serde::{Deserialize, Serialize};

/// A sample point of a step schedule or interpolation table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimePoint {
    pub t: f64,
    pub value: f64,
}

/// Input trajectory evaluated at arbitrary times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    Constant {
        value: f64,
    },
    /// Piecewise-constant: each point's value holds from its time onward;
    /// the first value also holds before its time.
    Steps {
        schedule: Vec<TimePoint>,
    },
    /// `mean + amplitude · sin(2π t / period + phase)`.
    Sine {
        mean: f64,
        amplitude: f64,
        period: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Piecewise-linear interpolation, clamped at both ends.
    Table {
        points: Vec<TimePoint>,
    },
}

impl Profile {
    pub fn value_at(&self, t: f64) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Steps { schedule } => {
                let mut current = schedule[0].value;
                for p in schedule {
                    if p.t <= t {
                        current = p.value;
                    } else {
                        break;
                    }
                }
                current
            }
            Self::Sine {
                mean,
                amplitude,
                period,
                phase,
            } => mean + amplitude * (std::f64::consts::TAU * t / period + phase).sin(),
            Self::Table { points } => {
                if t <= points[0].t {
                    return points[0].value;
                }
                let last = points[points.len() - 1];
                if t >= last.t {
                    return last.value;
                }
                let hi = points.iter().position(|p| p.t > t).expect("t below last point");
                let (a, b) = (points[hi - 1], points[hi]);
                a.value + (b.value - a.value) * (t - a.t) / (b.t - a.t)
            }
        }
    }

    /// Validates shape and finiteness; `field` names the config entry in
    /// error messages.
    pub fn validate(&self, field: &'static str) -> Result<(), String> {
        let finite = |v: f64, what: &str| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(format!("{field}: {what} must be finite, got {v}"))
            }
        };
        match self {
            Self::Constant { value } => finite(*value, "value"),
            Self::Sine {
                mean,
                amplitude,
                period,
                phase,
            } => {
                finite(*mean, "mean")?;
                finite(*amplitude, "amplitude")?;
                finite(*phase, "phase")?;
                if !(period.is_finite() && *period > 0.0) {
                    return Err(format!("{field}: period must be positive, got {period}"));
                }
                Ok(())
            }
            Self::Steps { schedule } => Self::check_points(field, schedule),
            Self::Table { points } => Self::check_points(field, points),
        }
    }

    fn check_points(field: &'static str, points: &[TimePoint]) -> Result<(), String> {
        if points.is_empty() {
            return Err(format!("{field}: needs at least one point"));
        }
        for pair in points.windows(2) {
            if !(pair[1].t > pair[0].t) {
                return Err(format!(
                    "{field}: times must be strictly increasing ({} then {})",
                    pair[0].t, pair[1].t
                ));
            }
        }
        if points.iter().any(|p| !p.t.is_finite() || !p.value.is_finite()) {
            return Err(format!("{field}: points must be finite"));
        }
        Ok(())
    }
}
