//! Run configuration: a single JSON document, overridable from the command line.

use std::f64::consts::PI;
use std::path::Path;

use plasticwalk::{CProfile, Encoding, ExperimentSpec, Reference, Wavepacket};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const PRESETS: [&str; 3] = ["flat", "sine-bump", "gaussian-well"];

/// QCA report settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QcaConfig {
    pub cells: usize,
    pub theta: f64,
    pub zeta: f64,
    /// Cells for the dense number-conservation check; 0 skips it.
    pub number_check_cells: usize,
}

impl Default for QcaConfig {
    fn default() -> Self {
        Self {
            cells: 8,
            theta: 1.0,
            zeta: 0.3,
            number_check_cells: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub alpha: f64,
    pub m: f64,
    pub profile: CProfile,
    pub length: f64,
    pub time: f64,
    /// Single ε for `simulate` and `dispersion`.
    pub epsilon: f64,
    /// ε list for `sweep`.
    pub epsilons: Vec<f64>,
    pub packet: Wavepacket,
    /// Defaults to the natural reference for `alpha` and the profile.
    pub reference: Option<Reference>,
    /// Defaults to `shift-and-lambda` at `alpha = 1`, `none` otherwise.
    pub encoding: Option<Encoding>,
    /// Snapshot every `stride` walk steps (the final state is always written).
    pub stride: usize,
    pub k_count: usize,
    /// Sweep check: fail unless the fitted order reaches this.
    pub min_order: Option<f64>,
    pub qca: QcaConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            m: 0.2,
            profile: CProfile::flat(0.5),
            length: 64.0,
            time: 4.0,
            epsilon: 0.05,
            epsilons: vec![0.2, 0.1, 0.05, 0.025],
            packet: Wavepacket {
                x0: 32.0,
                width: 8.0,
                k0: PI / 8.0,
                chirality_mix: 1.0,
            },
            reference: None,
            encoding: None,
            stride: 10,
            k_count: 64,
            min_order: None,
            qca: QcaConfig::default(),
        }
    }
}

/// A named speed profile on a ring of circumference `length`.
pub fn preset_profile(name: &str, length: f64) -> Result<CProfile, CliError> {
    match name {
        "flat" => Ok(CProfile::flat(0.5)),
        "sine-bump" => Ok(CProfile::sine_bump(0.5, 0.3, length)),
        "gaussian-well" => Ok(CProfile::GaussianWell {
            c0: 0.8,
            depth: 0.4,
            center: 0.5 * length,
            width: length / 16.0,
            length,
        }),
        other => Err(CliError::config(
            "profile",
            format!(
                "unknown preset '{other}', expected one of {}",
                PRESETS.join(", ")
            ),
        )),
    }
}

fn range(field: &str, value: f64, lo: f64, hi: f64) -> Result<(), CliError> {
    if !(lo..=hi).contains(&value) {
        return Err(CliError::config(
            field,
            format!("{field}={value} is out of range, must be in [{lo}, {hi}]"),
        ));
    }
    Ok(())
}

fn positive(field: &str, value: f64) -> Result<(), CliError> {
    if !(value.is_finite() && value > 0.0) {
        return Err(CliError::config(
            field,
            format!("{field}={value} must be positive"),
        ));
    }
    Ok(())
}

impl RunConfig {
    pub fn preset(name: &str) -> Result<Self, CliError> {
        let mut c = Self::default();
        c.profile = preset_profile(name, c.length)?;
        if name != "flat" {
            c.m = 0.1;
        }
        Ok(c)
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Parse(msg) => CliError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is serializable")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        range("alpha", self.alpha, 0.0, 1.0)?;
        range("m", self.m, 0.0, f64::MAX)?;
        positive("length", self.length)?;
        positive("time", self.time)?;
        range("epsilon", self.epsilon, f64::MIN_POSITIVE, 1.0)?;
        for (i, e) in self.epsilons.iter().enumerate() {
            range(&format!("epsilons[{i}]"), *e, f64::MIN_POSITIVE, 1.0)?;
        }
        if self.epsilons.windows(2).any(|w| w[1] >= w[0]) {
            return Err(CliError::config(
                "epsilons",
                "epsilons must be strictly decreasing",
            ));
        }
        range("packet.chirality_mix", self.packet.chirality_mix, 0.0, 1.0)?;
        positive("packet.width", self.packet.width)?;
        if self.stride == 0 {
            return Err(CliError::config(
                "stride",
                "stride=0 is out of range, must be >= 1",
            ));
        }
        if self.k_count == 0 {
            return Err(CliError::config(
                "k_count",
                "k_count=0 is out of range, must be >= 1",
            ));
        }
        if self.qca.cells < 2 {
            return Err(CliError::config(
                "qca.cells",
                format!("qca.cells={} is out of range, must be >= 2", self.qca.cells),
            ));
        }
        if let CProfile::Custom { .. } = self.profile {
            return Err(CliError::config(
                "profile",
                "custom profiles cannot be configured",
            ));
        }
        Ok(())
    }

    pub fn reference(&self) -> Reference {
        self.reference
            .unwrap_or_else(|| Reference::for_limit(self.alpha, &self.profile))
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding.unwrap_or(if self.alpha == 1.0 {
            Encoding::ShiftAndLambda
        } else {
            Encoding::None
        })
    }

    pub fn experiment(&self, epsilons: Vec<f64>) -> ExperimentSpec {
        ExperimentSpec {
            alpha: self.alpha,
            m: self.m,
            profile: self.profile.clone(),
            length: self.length,
            time: self.time,
            epsilons,
            packet: self.packet.clone(),
            reference: self.reference(),
            encoding: self.encoding(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_round_trip() {
        for name in PRESETS {
            let c = RunConfig::preset(name).unwrap();
            c.validate().unwrap();
            assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c, "{name}");
        }
    }

    #[test]
    fn round_trip_keeps_every_bit() {
        let mut c = RunConfig {
            m: 0.1 + 0.2,
            ..RunConfig::default()
        };
        c.packet.k0 = std::f64::consts::E / 7.0;
        c.reference = Some(Reference::CurvedFineGrid { refinement: 4 });
        c.min_order = Some(0.9);
        assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn partial_documents_fill_defaults() {
        let c = RunConfig::from_json(r#"{"alpha": 0.5, "qca": {"cells": 4}}"#).unwrap();
        assert_eq!(c.alpha, 0.5);
        assert_eq!(c.qca.cells, 4);
        assert_eq!(c.qca.theta, 1.0);
        assert_eq!(c.length, 64.0);
    }

    #[test]
    fn out_of_range_alpha_names_the_field() {
        let c = RunConfig::from_json(r#"{"alpha": 1.5}"#).unwrap();
        let err = c.validate().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("alpha=1.5") && msg.contains("[0, 1]"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(matches!(
            RunConfig::from_json(r#"{"alhpa": 0.5}"#),
            Err(CliError::Parse(_))
        ));
        assert!(matches!(
            preset_profile("bowl", 64.0),
            Err(CliError::Config { .. })
        ));
    }
}
