//! Strict TOML scenario configuration.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Fraunhofer,
    Kirchhoff,
    Ensemble,
    QtmPotential,
    QtmTrajectories,
    QtmAccumulate,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fraunhofer => "fraunhofer",
            Scenario::Kirchhoff => "kirchhoff",
            Scenario::Ensemble => "ensemble",
            Scenario::QtmPotential => "qtm-potential",
            Scenario::QtmTrajectories => "qtm-trajectories",
            Scenario::QtmAccumulate => "qtm-accumulate",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Optional; must match the scenario named on the command line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fraunhofer: Option<FraunhoferConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kirchhoff: Option<KirchhoffConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qtm: Option<QtmConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    /// Not recorded in the manifest.
    #[serde(skip_serializing)]
    pub dir: Option<PathBuf>,
    /// Emit PGM heatmaps next to 2-D tables.
    pub heatmap: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            heatmap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FraunhoferConfig {
    pub k: f64,
    /// Slit half-width.
    pub a: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub theta_count: usize,
    pub alpha: Vec<f64>,
}

impl Default for FraunhoferConfig {
    fn default() -> Self {
        Self {
            k: 2.0 * std::f64::consts::PI / 0.1,
            a: 1.0,
            theta_min: -0.2,
            theta_max: 0.2,
            theta_count: 401,
            alpha: vec![0.0, std::f64::consts::FRAC_PI_4, std::f64::consts::FRAC_PI_2],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApertureKind {
    Single,
    Double,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KirchhoffConfig {
    pub wavelength: f64,
    pub aperture: ApertureKind,
    pub half_width_x: f64,
    pub half_width_y: f64,
    /// Center-to-center distance for the double slit.
    pub separation: f64,
    /// Point-source position; a plane wave when absent.
    pub source: Option<[f64; 3]>,
    pub alpha: f64,
    pub distance: f64,
    pub screen_min: f64,
    pub screen_max: f64,
    pub screen_count: usize,
    pub quadrature: ilab_core::kirchhoff::QuadratureSpec,
}

impl Default for KirchhoffConfig {
    fn default() -> Self {
        Self {
            wavelength: 0.1,
            aperture: ApertureKind::Single,
            half_width_x: 1.0,
            half_width_y: 1.0,
            separation: 4.0,
            source: None,
            alpha: 0.0,
            distance: 1000.0,
            screen_min: -150.0,
            screen_max: 150.0,
            screen_count: 301,
            quadrature: Default::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeChoice {
    MassNormalized,
    UnitProbability,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnsembleConfig {
    pub total_energy: f64,
    /// Constant potential; ignored when `radial_potential` is set.
    pub potential: f64,
    /// `V(|r|)` sampled at `radial_origin + i * radial_spacing`.
    pub radial_potential: Option<Vec<f64>>,
    pub radial_origin: f64,
    pub radial_spacing: f64,
    pub mass_weight: f64,
    pub amplitude: AmplitudeChoice,
    pub r_max: f64,
    pub r_count: usize,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            total_energy: 2.0,
            potential: 0.0,
            radial_potential: None,
            radial_origin: 0.0,
            radial_spacing: 1.0,
            mass_weight: 1.0,
            amplitude: AmplitudeChoice::MassNormalized,
            r_max: 20.0,
            r_count: 401,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedingChoice {
    Quantile,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QtmConfig {
    pub sigma0: f64,
    pub half_separation: f64,
    pub v_long: f64,
    pub screen_distance: f64,
    pub hbar: f64,
    pub mass: f64,
    pub tolerance: f64,
    /// Surface grid for `qtm-potential`.
    pub x_min: f64,
    pub x_max: f64,
    pub x_count: usize,
    pub t_count: usize,
    /// Fan for `qtm-trajectories`.
    pub trajectories: usize,
    pub samples: usize,
    pub seeding: SeedingChoice,
    /// Hit accumulation for `qtm-accumulate`.
    pub hits: usize,
    pub checkpoints: Vec<usize>,
    pub bins: usize,
    /// Histogram range; defaults to `±(Y + 5σ₀)·σ_T/σ₀`.
    pub screen_range: Option<[f64; 2]>,
}

impl Default for QtmConfig {
    fn default() -> Self {
        Self {
            sigma0: 1.0,
            half_separation: 5.0,
            v_long: 1.0,
            screen_distance: 40.0,
            hbar: 1.0,
            mass: 1.0,
            tolerance: 1e-9,
            x_min: -16.0,
            x_max: 16.0,
            x_count: 513,
            t_count: 161,
            trajectories: 61,
            samples: 401,
            seeding: SeedingChoice::Quantile,
            hits: 70000,
            checkpoints: ilab_core::qtm::DEFAULT_CHECKPOINTS.to_vec(),
            bins: 200,
            screen_range: None,
        }
    }
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Fills the block for `scenario` with defaults when absent and drops
    /// blocks that the scenario does not read.
    pub fn resolve(mut self, scenario: Scenario) -> CliResult<Self> {
        if let Some(s) = self.scenario {
            if s != scenario {
                return Err(CliError::Config(format!(
                    "key `scenario`: config is for `{s}` but `{scenario}` was requested"
                )));
            }
        }
        self.scenario = Some(scenario);
        let reads = |block: &str| match scenario {
            Scenario::Fraunhofer => block == "fraunhofer",
            Scenario::Kirchhoff => block == "kirchhoff",
            Scenario::Ensemble => block == "ensemble",
            _ => block == "qtm",
        };
        for (block, present) in [
            ("fraunhofer", self.fraunhofer.is_some()),
            ("kirchhoff", self.kirchhoff.is_some()),
            ("ensemble", self.ensemble.is_some()),
            ("qtm", self.qtm.is_some()),
        ] {
            if present && !reads(block) {
                return Err(CliError::Config(format!(
                    "key `{block}`: block is not used by scenario `{scenario}`"
                )));
            }
        }
        match scenario {
            Scenario::Fraunhofer => {
                self.fraunhofer.get_or_insert_with(Default::default);
            }
            Scenario::Kirchhoff => {
                self.kirchhoff.get_or_insert_with(Default::default);
            }
            Scenario::Ensemble => {
                self.ensemble.get_or_insert_with(Default::default);
            }
            _ => {
                self.qtm.get_or_insert_with(Default::default);
            }
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        let err = ScenarioConfig::parse("[qtm]\nsigma = 1.0\n").unwrap_err();
        assert!(err.to_string().contains("sigma"), "{err}");
        let err = ScenarioConfig::parse("colour = 1\n").unwrap_err();
        assert!(err.to_string().contains("colour"));
        let err = ScenarioConfig::parse("[kirchhoff.quadrature]\nordr = 3\n").unwrap_err();
        assert!(err.to_string().contains("ordr"));
    }

    #[test]
    fn defaults_fill_the_requested_block() {
        let c = ScenarioConfig::parse("seed = 9\n").unwrap().resolve(Scenario::QtmAccumulate).unwrap();
        let q = c.qtm.unwrap();
        assert_eq!(q.hits, 70000);
        assert_eq!(q.checkpoints, vec![100, 3000, 20000, 70000]);
        assert_eq!(c.seed, 9);
    }

    #[test]
    fn mismatched_scenario_and_stray_blocks() {
        let c = ScenarioConfig::parse("scenario = \"kirchhoff\"\n").unwrap();
        assert!(c.resolve(Scenario::Ensemble).is_err());
        let c = ScenarioConfig::parse("[qtm]\nsigma0 = 2.0\n").unwrap();
        assert!(c.resolve(Scenario::Fraunhofer).is_err());
    }
}
