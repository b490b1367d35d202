//! Flat run configuration: defaults, config files and flag overrides.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use gravent_core::constants::Constants;
use gravent_core::decoherence::{CavityParams, EnvironmentParams};
use gravent_core::design::SandwichGeometry;
use gravent_core::model::PhysicalParams;
use gravent_core::units::{laser_angular_frequency, Unit};
use gravent_core::SystemParams;
use serde::{Deserialize, Serialize};

use crate::record::RunRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TauEntMode {
    Asymptotic,
    Numeric,
    Both,
}

/// Every knob of every subcommand in one flat namespace. Field names are
/// the config-file keys; user-facing units are in the names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunInputs {
    pub omega_khz: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub eta: f64,
    pub mu: f64,
    pub chi: f64,
    pub tau_max: f64,
    pub steps: usize,
    pub grid: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub target_en: f64,
    pub mode: TauEntMode,
    pub include_decoherence: bool,
    pub format: OutputFormat,
    pub jobs: usize,

    pub mass_mg: f64,
    pub density_g_cm3: f64,
    pub pressure_pa: f64,
    pub temperature_k: f64,
    pub radius_mm: f64,
    pub omega_in_mhz: f64,
    pub laser_nm: f64,
    pub input_transmittance: f64,
    pub detuning_ratio: f64,
    pub power_lower_kw: f64,
    pub power_upper_kw: f64,
    pub a_lower_mm: f64,
    pub a_upper_mm: f64,
    pub a_upper_harmonic_mm: f64,
    pub a_upper_inverted_mm: f64,
    pub design_power_upper_kw: f64,
    pub gravity: f64,
}

impl Default for RunInputs {
    fn default() -> Self {
        Self {
            omega_khz: 1.0,
            lambda1: -1.0,
            lambda2: -1.0,
            eta: 1e-12,
            mu: 5e-13,
            chi: 1.0,
            tau_max: 13.0,
            steps: 200,
            grid: 41,
            lambda_min: -1.0,
            lambda_max: 1.0,
            target_en: 1e-2,
            mode: TauEntMode::Both,
            include_decoherence: false,
            format: OutputFormat::Csv,
            jobs: 1,

            mass_mg: 0.1,
            density_g_cm3: 2.0,
            pressure_pa: 1e-17,
            temperature_k: 1.0,
            radius_mm: 0.2,
            omega_in_mhz: 1.0,
            laser_nm: 1064.0,
            input_transmittance: 0.1,
            detuning_ratio: 1e13,
            power_lower_kw: 30.0,
            power_upper_kw: 0.0,
            a_lower_mm: 2.0,
            a_upper_mm: 20.0,
            a_upper_harmonic_mm: 1.0,
            a_upper_inverted_mm: 4.0,
            design_power_upper_kw: 30.0,
            gravity: gravent_core::design::DEFAULT_GRAVITY,
        }
    }
}

impl RunInputs {
    pub fn omega(&self) -> f64 {
        Unit::KiloHertz.si(self.omega_khz)
    }

    pub fn system(&self) -> gravent_core::Result<SystemParams> {
        SystemParams::new(self.omega(), self.lambda1, self.lambda2, self.eta, self.mu, self.chi)
    }

    pub fn mass(&self) -> f64 {
        Unit::Milligram.si(self.mass_mg)
    }

    pub fn physical(&self) -> gravent_core::Result<PhysicalParams> {
        PhysicalParams::from_density(self.mass(), Unit::GramPerCubicCentimeter.si(self.density_g_cm3), self.omega())
    }

    pub fn environment(&self) -> gravent_core::Result<EnvironmentParams> {
        EnvironmentParams::new(
            self.pressure_pa,
            self.temperature_k,
            Unit::Millimeter.si(self.radius_mm),
            self.mass(),
            self.omega(),
        )
    }

    /// Resonant input cavity carrying the lower power.
    pub fn cavity(&self, constants: &Constants) -> gravent_core::Result<CavityParams> {
        let transmittance = self.input_transmittance;
        let p_cav = Unit::KiloWatt.si(self.power_lower_kw);
        CavityParams::new(
            laser_angular_frequency(Unit::Nanometer.si(self.laser_nm), constants.speed_of_light),
            0.0,
            1.0,
            Unit::Millimeter.si(self.a_lower_mm),
            transmittance,
            p_cav * transmittance / 4.0,
            self.mass(),
        )
    }

    pub fn sandwich(&self) -> gravent_core::Result<SandwichGeometry> {
        SandwichGeometry::new(
            self.mass(),
            Unit::KiloWatt.si(self.power_lower_kw),
            Unit::KiloWatt.si(self.power_upper_kw),
            Unit::Millimeter.si(self.a_lower_mm),
            Unit::Millimeter.si(self.a_upper_mm),
            self.gravity,
        )
    }

    pub fn check_run_options(&self) -> Result<()> {
        if self.jobs == 0 {
            bail!(crate::InvalidInput("jobs must be >= 1".into()));
        }
        Ok(())
    }
}

/// Reads a configuration. `.json` is a saved run record, `.csv` a saved
/// table whose header carries the inputs; anything else is flat TOML.
pub fn load_config(path: &Path) -> Result<RunInputs> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => serde_json::from_str::<RunRecord>(&text).map(|r| r.inputs).map_err(anyhow::Error::from),
        Some("csv") => inputs_from_csv_header(&text),
        _ => toml::from_str::<RunInputs>(&text).map_err(anyhow::Error::from),
    };
    parsed.map_err(|e| anyhow!(crate::InvalidInput(format!("config {}: {e:#}", path.display()))))
}

fn inputs_from_csv_header(text: &str) -> Result<RunInputs> {
    let line = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .find_map(|l| l.strip_prefix(crate::record::INPUTS_PREFIX))
        .ok_or_else(|| anyhow!("no inputs line in CSV header"))?;
    Ok(serde_json::from_str(line)?)
}
