//! JSON scenario files.
//!
//! Files use dB, dBm, degrees and GHz; everything is converted to the core's
//! linear SI units once, here. Unknown keys are rejected.

use std::path::Path;

use phykey::linkbudget::{AntennaPattern, NodeSpec, RadioParams, Scenario, DEFAULT_SECTOR_FLOOR};
use phykey::modem::{ModScheme, PhaseMode, SymbolPlacement};
use phykey::num::{db_to_linear, dbm_to_watts};
use phykey::simkernel::{EveDecoder, InterferencePhase, ResidualModel, TrialConfig};
use phykey::Point2;
use serde::{Deserialize, Serialize};

use crate::error::{input, CliError};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub schema_version: u32,
    pub radio: RadioSection,
    pub master: NodeSection,
    pub slave: NodeSection,
    pub eve: NodeSection,
    pub scheme: SchemeSection,
    /// Self-interference cancellation depth, dB (β_si = 10^(−x/10)).
    pub sic_rejection_db: f64,
    pub sim: SimSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadioSection {
    pub frequency_ghz: f64,
    pub noise_dbm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSection {
    pub x_m: f64,
    pub y_m: f64,
    /// Transmit power; absent or null for a passive node.
    #[serde(default)]
    pub power_dbm: Option<f64>,
    #[serde(default)]
    pub antenna: AntennaSection,
    #[serde(default)]
    pub rx_gain_dbi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum AntennaSection {
    Omni {
        #[serde(default)]
        gain_dbi: f64,
    },
    Directional {
        boresight_gain_dbi: f64,
        boresight_azimuth_deg: f64,
        directivity_angle_deg: f64,
        /// Gain outside the main sector; defaults to 30 dB below boresight.
        #[serde(default)]
        floor_gain_dbi: Option<f64>,
    },
}

impl Default for AntennaSection {
    fn default() -> Self {
        AntennaSection::Omni { gain_dbi: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeSection {
    pub m: usize,
    pub theta_b_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterferencePhaseSection {
    RandomPerSymbol,
    FixedAngleDeg(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub n_symbols: u64,
    pub seed: u64,
    #[serde(default = "default_phase")]
    pub interference_phase: InterferencePhaseSection,
    #[serde(default)]
    pub eve_decoder: EveDecoder,
    #[serde(default)]
    pub symbol_placement: SymbolPlacement,
    #[serde(default)]
    pub residual_model: ResidualModel,
    #[serde(default = "yes")]
    pub thermal_noise: bool,
}

fn default_phase() -> InterferencePhaseSection {
    InterferencePhaseSection::RandomPerSymbol
}

fn yes() -> bool {
    true
}

/// Thresholds used by the region and security-factor reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    /// SIR_min (proposed) or SNR_min (directional) bounding the
    /// eavesdropping region, dB.
    #[serde(default = "ten")]
    pub eve_threshold_db: f64,
    /// SNR_min of reliable communication, dB; also the SIR_min that sets
    /// d_max at the master.
    #[serde(default = "fifteen")]
    pub comm_threshold_db: f64,
    #[serde(default)]
    pub phase_model: PhaseMode,
}

fn ten() -> f64 {
    10.0
}

fn fifteen() -> f64 {
    15.0
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            eve_threshold_db: ten(),
            comm_threshold_db: fifteen(),
            phase_model: PhaseMode::default(),
        }
    }
}

/// Linear-unit thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Analysis {
    pub eve_threshold: f64,
    pub comm_threshold: f64,
    pub eve_threshold_db: f64,
    pub comm_threshold_db: f64,
    pub phase_model: PhaseMode,
}

/// A validated scenario ready for the core.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Loaded {
    pub trial: TrialConfig,
    pub analysis: Analysis,
}

impl Loaded {
    pub fn scenario(&self) -> &Scenario<f64> {
        &self.trial.scenario
    }
}

fn finite(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Input(format!("{name}: must be a finite number")))
    }
}

impl AntennaSection {
    fn to_pattern(&self, role: &str) -> Result<AntennaPattern<f64>, CliError> {
        let p = match *self {
            AntennaSection::Omni { gain_dbi } => {
                AntennaPattern::omni(db_to_linear(finite(&format!("{role}.antenna.gain_dbi"), gain_dbi)?))
            }
            AntennaSection::Directional {
                boresight_gain_dbi,
                boresight_azimuth_deg,
                directivity_angle_deg,
                floor_gain_dbi,
            } => {
                let g = db_to_linear(boresight_gain_dbi);
                AntennaPattern::Directional {
                    boresight_gain: g,
                    boresight_azimuth: boresight_azimuth_deg.to_radians(),
                    directivity_angle: directivity_angle_deg.to_radians(),
                    floor_gain: floor_gain_dbi.map_or(g * DEFAULT_SECTOR_FLOOR, db_to_linear),
                }
            }
        };
        p.validate()
            .map_err(|e| CliError::Input(format!("{role}.antenna: {e}")))?;
        Ok(p)
    }
}

impl NodeSection {
    fn to_node(&self, role: &str) -> Result<NodeSpec<f64>, CliError> {
        let position = Point2::new(
            finite(&format!("{role}.x_m"), self.x_m)?,
            finite(&format!("{role}.y_m"), self.y_m)?,
        );
        let tx_power = match self.power_dbm {
            Some(dbm) => dbm_to_watts(finite(&format!("{role}.power_dbm"), dbm)?),
            None => 0.0,
        };
        let rx_gain = db_to_linear(finite(&format!("{role}.rx_gain_dbi"), self.rx_gain_dbi)?);
        Ok(NodeSpec::new(position, tx_power, self.antenna.to_pattern(role)?, rx_gain))
    }
}

impl ScenarioFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| {
            CliError::Input(format!("{origin}:{}:{}: {e}", e.line(), e.column()))
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Validates and converts to core types.
    pub fn resolve(&self) -> Result<Loaded, CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Input(format!(
                "schema_version: expected {SCHEMA_VERSION}, found {}",
                self.schema_version
            )));
        }
        let freq = finite("radio.frequency_ghz", self.radio.frequency_ghz)?;
        let noise = dbm_to_watts(finite("radio.noise_dbm", self.radio.noise_dbm)?);
        let radio = RadioParams::from_frequency(freq * 1e9, noise)
            .map_err(|e| CliError::Input(format!("radio: {e}")))?;
        let scheme = ModScheme::new(
            self.scheme.m,
            finite("scheme.theta_b_deg", self.scheme.theta_b_deg)?.to_radians(),
        )
        .map_err(|e| CliError::Input(format!("scheme: {e}")))?;
        let sic = finite("sic_rejection_db", self.sic_rejection_db)?;
        if sic < 0.0 {
            return Err(CliError::Input("sic_rejection_db: must be ≥ 0".into()));
        }
        let scenario = Scenario::new(
            radio,
            self.master.to_node("master")?,
            self.slave.to_node("slave")?,
            self.eve.to_node("eve")?,
            scheme,
            db_to_linear(-sic),
        )
        .map_err(input)?;

        let interference_phase = match self.sim.interference_phase {
            InterferencePhaseSection::RandomPerSymbol => InterferencePhase::RandomPerSymbol,
            InterferencePhaseSection::FixedAngleDeg(a) => {
                InterferencePhase::FixedAngle(finite("sim.interference_phase", a)?.to_radians())
            }
        };
        let trial = TrialConfig {
            interference_phase,
            eve_decoder: self.sim.eve_decoder,
            symbol_placement: self.sim.symbol_placement,
            residual_model: self.sim.residual_model,
            phase_model: self.analysis.phase_model,
            thermal_noise: self.sim.thermal_noise,
            ..TrialConfig::new(scenario, self.sim.n_symbols, self.sim.seed)
        };
        trial.validate().map_err(input)?;

        let a = &self.analysis;
        let analysis = Analysis {
            eve_threshold: db_to_linear(finite("analysis.eve_threshold_db", a.eve_threshold_db)?),
            comm_threshold: db_to_linear(finite("analysis.comm_threshold_db", a.comm_threshold_db)?),
            eve_threshold_db: a.eve_threshold_db,
            comm_threshold_db: a.comm_threshold_db,
            phase_model: a.phase_model,
        };
        Ok(Loaded { trial, analysis })
    }
}

pub fn load_scenario(path: &Path) -> Result<Loaded, CliError> {
    ScenarioFile::load(path)?.resolve()
}

#[cfg(test)]
mod tests {
    use super::*;

    pub const EXAMPLE: &str = r#"{
  "schema_version": 1,
  "radio": { "frequency_ghz": 2.4, "noise_dbm": -90 },
  "master": { "x_m": 0.15, "y_m": 0.0, "power_dbm": 10.0 },
  "slave": { "x_m": 0.0, "y_m": 0.0, "power_dbm": 0.0 },
  "eve": { "x_m": 0.05, "y_m": 0.05 },
  "scheme": { "m": 4, "theta_b_deg": 90 },
  "sic_rejection_db": 50,
  "sim": { "n_symbols": 1000, "seed": 7 }
}"#;

    #[test]
    fn example_converts_units() {
        let l = ScenarioFile::parse(EXAMPLE, "t").unwrap().resolve().unwrap();
        let s = l.scenario();
        assert!((s.master.tx_power - 1e-2).abs() < 1e-15);
        assert!((s.slave.tx_power - 1e-3).abs() < 1e-18);
        assert_eq!(s.eve.tx_power, 0.0);
        assert!((s.sic_rejection - 1e-5).abs() < 1e-20);
        assert!((s.radio.noise_power - 1e-12).abs() < 1e-25);
        assert!((s.scheme.theta_b() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(l.analysis.eve_threshold_db, 10.0);
        assert!((l.analysis.comm_threshold - 10f64.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn unknown_keys_rejected_with_position() {
        let bad = EXAMPLE.replace("\"seed\": 7", "\"seed\": 7, \"sead\": 1");
        let err = ScenarioFile::parse(&bad, "bad.json").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bad.json:9:"), "{msg}");
        assert!(msg.contains("sead"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn invalid_values_are_input_errors() {
        let bad = EXAMPLE.replace("\"m\": 4", "\"m\": 3");
        let e = ScenarioFile::parse(&bad, "t").unwrap().resolve().unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let bad = EXAMPLE.replace("\"schema_version\": 1", "\"schema_version\": 2");
        assert!(ScenarioFile::parse(&bad, "t").unwrap().resolve().is_err());
        let bad = EXAMPLE.replace("\"x_m\": 0.15", "\"x_m\": 0.0");
        assert!(ScenarioFile::parse(&bad, "t").unwrap().resolve().is_err());
    }

    #[test]
    fn directional_antenna_section() {
        let text = EXAMPLE.replace(
            "\"slave\": { \"x_m\": 0.0, \"y_m\": 0.0, \"power_dbm\": 0.0 }",
            "\"slave\": { \"x_m\": 0.0, \"y_m\": 0.0, \"power_dbm\": 0.0, \"antenna\": { \"type\": \"directional\", \"boresight_gain_dbi\": 10, \"boresight_azimuth_deg\": 0, \"directivity_angle_deg\": 60 } }",
        );
        let l = ScenarioFile::parse(&text, "t").unwrap().resolve().unwrap();
        match l.scenario().slave.antenna {
            AntennaPattern::Directional { boresight_gain, floor_gain, directivity_angle, .. } => {
                assert!((boresight_gain - 10.0).abs() < 1e-12);
                assert!((floor_gain - 1e-2).abs() < 1e-12);
                assert!((directivity_angle - std::f64::consts::FRAC_PI_3).abs() < 1e-12);
            }
            _ => panic!("expected directional"),
        }
    }
}
