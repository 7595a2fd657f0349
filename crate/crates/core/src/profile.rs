//! Speed-of-propagation profiles `c(t, x)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Result, WalkError};

type ProfileFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// The hopping rate / local speed of light `c(t, x) ∈ [0, 1]`.
///
/// A profile that depends on `x` describes a synchronous metric with
/// `g¹¹ = −1/c²`. Values are range-checked when sampled, not at construction.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CProfile {
    /// Constant `c`.
    Flat { c: f64 },
    /// `c0 + amplitude · sin(2πx/length)`.
    SineBump {
        c0: f64,
        amplitude: f64,
        length: f64,
    },
    /// `c0 − depth · exp(−d²/(2 width²))`, `d` the periodic distance to `center`.
    GaussianWell {
        c0: f64,
        depth: f64,
        center: f64,
        width: f64,
        length: f64,
    },
    /// Arbitrary rule, for tests and library users. Not serializable.
    #[serde(skip)]
    Custom {
        name: String,
        homogeneous: bool,
        rule: ProfileFn,
    },
}

impl CProfile {
    pub fn flat(c: f64) -> Self {
        CProfile::Flat { c }
    }

    pub fn sine_bump(c0: f64, amplitude: f64, length: f64) -> Self {
        CProfile::SineBump {
            c0,
            amplitude,
            length,
        }
    }

    pub fn custom<F>(name: impl Into<String>, homogeneous: bool, rule: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        CProfile::Custom {
            name: name.into(),
            homogeneous,
            rule: Arc::new(rule),
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        match self {
            CProfile::Flat { .. } => true,
            CProfile::Custom { homogeneous, .. } => *homogeneous,
            _ => false,
        }
    }

    /// Raw evaluation, no range check.
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        match self {
            CProfile::Flat { c } => *c,
            CProfile::SineBump {
                c0,
                amplitude,
                length,
            } => c0 + amplitude * (2.0 * PI * x / length).sin(),
            CProfile::GaussianWell {
                c0,
                depth,
                center,
                width,
                length,
            } => {
                let d = periodic_offset(x - center, *length);
                c0 - depth * (-d * d / (2.0 * width * width)).exp()
            }
            CProfile::Custom { rule, .. } => rule(t, x),
        }
    }

    /// Evaluate and check `0 ≤ c ≤ 1`.
    pub fn sample(&self, t: f64, x: f64) -> Result<f64> {
        let c = self.eval(t, x);
        if !(0.0..=1.0).contains(&c) {
            return Err(WalkError::Domain(format!(
                "c(t={t}, x={x}) = {c} is outside [0, 1]"
            )));
        }
        Ok(c)
    }

    /// Check the whole grid, cell centers and half sites, at time `t`.
    pub fn validate_on_grid(&self, n: usize, dx: f64, t: f64) -> Result<()> {
        for l in 0..n {
            let x = l as f64 * dx;
            self.sample(t, x)?;
            self.sample(t, x + 0.5 * dx)?;
        }
        Ok(())
    }

    /// Short label for reports.
    pub fn label(&self) -> String {
        match self {
            CProfile::Flat { c } => format!("flat(c={c})"),
            CProfile::SineBump {
                c0,
                amplitude,
                length,
            } => {
                format!("sine-bump(c0={c0}, a={amplitude}, L={length})")
            }
            CProfile::GaussianWell {
                c0,
                depth,
                center,
                width,
                ..
            } => format!("gaussian-well(c0={c0}, depth={depth}, x0={center}, w={width})"),
            CProfile::Custom { name, .. } => format!("custom({name})"),
        }
    }
}

/// Wrap `d` into `[−L/2, L/2)`.
pub(crate) fn periodic_offset(d: f64, length: f64) -> f64 {
    (d + 0.5 * length).rem_euclid(length) - 0.5 * length
}

impl fmt::Debug for CProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl PartialEq for CProfile {
    fn eq(&self, other: &Self) -> bool {
        use CProfile::*;
        match (self, other) {
            (Flat { c: a }, Flat { c: b }) => a == b,
            (
                SineBump {
                    c0,
                    amplitude,
                    length,
                },
                SineBump {
                    c0: c1,
                    amplitude: a1,
                    length: l1,
                },
            ) => c0 == c1 && amplitude == a1 && length == l1,
            (
                GaussianWell {
                    c0,
                    depth,
                    center,
                    width,
                    length,
                },
                GaussianWell {
                    c0: c1,
                    depth: d1,
                    center: x1,
                    width: w1,
                    length: l1,
                },
            ) => c0 == c1 && depth == d1 && center == x1 && width == w1 && length == l1,
            (Custom { rule: a, .. }, Custom { rule: b, .. }) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}
