//! Pipeline configuration: TOML schema, defaults, and validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub paths: Paths,
    #[serde(default)]
    pub window: Window,
    #[serde(default)]
    pub grid: Grid,
    #[serde(default)]
    pub kernel: Kernel,
    #[serde(default)]
    pub sensor: Sensor,
    #[serde(default)]
    pub analysis: Analysis,
    #[serde(default)]
    pub output: Output,
    #[serde(default = "default_seed")]
    pub rng_seed: u64,
}

fn default_seed() -> u64 {
    20220520
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    /// Spherical-harmonic geomagnetic coefficient file (.COF).
    pub wmm_coefficients: PathBuf,
    /// Radial Earth profile CSV.
    pub earth_profile: PathBuf,
    /// Two-line element file for the platform orbit.
    pub tle: PathBuf,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Window {
    /// Offset of the simulation window start from the orbit epoch, s.
    pub start_s: f64,
    pub duration_days: f64,
    pub dt_s: f64,
}

impl Default for Window {
    fn default() -> Self {
        Self {
            start_s: 0.0,
            duration_days: 12.0,
            dt_s: 60.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Grid {
    pub n_r: usize,
    pub n_theta: usize,
    pub n_phi: usize,
    /// Inner integration radius, m; must stay above the core-mantle boundary.
    pub r_min_m: f64,
    pub r_max_m: f64,
    /// Flip the source polarization from anti-parallel to parallel.
    pub parallel_polarization: bool,
    /// Also dump every grid cell to CSV during simulate-field.
    pub export_cells: bool,
}

impl Default for Grid {
    fn default() -> Self {
        Self {
            n_r: 32,
            n_theta: 64,
            n_phi: 128,
            r_min_m: geospin::constants::CORE_MANTLE_BOUNDARY,
            r_max_m: geospin::constants::EARTH_RADIUS,
            parallel_polarization: false,
            export_cells: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Kernel {
    /// Kernel registry name; only "vs" ships with a functional form.
    pub kind: String,
    /// Dimensionless coupling strength.
    pub coupling: f64,
    /// Interaction range, m; `inf` disables the exponential falloff.
    pub lambda_m: f64,
}

impl Default for Kernel {
    fn default() -> Self {
        Self {
            kind: "vs".into(),
            // Terrestrial-bound coupling: tuned so the mission-peak
            // orbit-normal amplitude is about 20 pT with the default profile.
            coupling: 1.03e-41,
            lambda_m: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sensor {
    pub bias_field_t: f64,
    pub shield_factor: f64,
    pub calibration_error: f64,
    pub gyro_noise_deg_s: f64,
    pub laser_coefficient_t_per_ppm: f64,
    pub laser_stability_ppm: f64,
    pub shot_sensitivity_t: f64,
    /// Constant true platform rotation rate, rad/s.
    pub platform_rotation_rad_s: f64,
}

impl Default for Sensor {
    fn default() -> Self {
        Self {
            bias_field_t: 1.0e-6,
            shield_factor: 1.0e8,
            calibration_error: 1.0e-4,
            gyro_noise_deg_s: 2.0e-6,
            laser_coefficient_t_per_ppm: 1.9e-17,
            laser_stability_ppm: 190.0,
            shot_sensitivity_t: 4.3e-15,
            platform_rotation_rad_s: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Analysis {
    /// Allan averaging times, s.
    pub tau_list_s: Vec<f64>,
    /// Interaction ranges for the exclusion forecast, m.
    pub lambda_grid_m: Vec<f64>,
    /// Detection threshold, T; 0 derives it from the campaign parameters.
    pub detection_threshold_t: f64,
    pub campaign_days: f64,
    pub shot_time_s: f64,
    /// Series the spectrum and Allan commands read: "field" or "sensor".
    pub source: String,
    /// Spectral window: "none" or "hann".
    pub spectrum_window: String,
}

impl Default for Analysis {
    fn default() -> Self {
        Self {
            tau_list_s: vec![60.0, 120.0, 300.0, 600.0, 1165.0, 2330.0, 5825.0],
            lambda_grid_m: vec![1.0e5, 1.0e6, 1.0e7, 1.0e8, 1.0e9],
            detection_threshold_t: 0.0,
            campaign_days: 100.0,
            shot_time_s: 1165.0,
            source: "field".into(),
            spectrum_window: "none".into(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    pub dir: PathBuf,
}

impl Default for Output {
    fn default() -> Self {
        Self { dir: "out".into() }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            CliError::Io(format!("cannot read config {}: {e}", path.display()))
        })?;
        let cfg: PipelineConfig = toml::from_str(&text)
            .map_err(|e| CliError::Config(format!("config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        for (what, p) in [
            ("wmm_coefficients", &self.paths.wmm_coefficients),
            ("earth_profile", &self.paths.earth_profile),
            ("tle", &self.paths.tle),
        ] {
            if !p.is_file() {
                return Err(CliError::Config(format!(
                    "paths.{what}: file not found: {}",
                    p.display()
                )));
            }
        }
        if !(self.window.dt_s > 0.0) {
            return Err(CliError::Config(
                "window.dt_s must be > 0".into(),
            ));
        }
        if !(self.window.duration_days > 0.0) {
            return Err(CliError::Config(
                "window.duration_days must be > 0".into(),
            ));
        }
        if self.window.start_s < 0.0 {
            return Err(CliError::Config("window.start_s must be >= 0".into()));
        }
        if self.grid.n_r == 0 || self.grid.n_theta == 0 || self.grid.n_phi == 0 {
            return Err(CliError::Config(
                "grid resolution axes must all be > 0".into(),
            ));
        }
        if !(self.grid.r_min_m >= geospin::constants::CORE_MANTLE_BOUNDARY) {
            return Err(CliError::Config(format!(
                "grid.r_min_m must be >= {} (core-mantle boundary)",
                geospin::constants::CORE_MANTLE_BOUNDARY
            )));
        }
        if !(self.grid.r_max_m > self.grid.r_min_m) {
            return Err(CliError::Config(
                "grid.r_max_m must exceed grid.r_min_m".into(),
            ));
        }
        if !(self.kernel.lambda_m > 0.0) {
            return Err(CliError::Config("kernel.lambda_m must be > 0".into()));
        }
        if !self.kernel.coupling.is_finite() {
            return Err(CliError::Config("kernel.coupling must be finite".into()));
        }
        if !(self.sensor.shield_factor >= 1.0) {
            return Err(CliError::Config("sensor.shield_factor must be >= 1".into()));
        }
        if !(self.sensor.bias_field_t > 0.0) {
            return Err(CliError::Config("sensor.bias_field_t must be > 0".into()));
        }
        match self.analysis.source.as_str() {
            "field" | "sensor" => {}
            other => {
                return Err(CliError::Config(format!(
                    "analysis.source must be \"field\" or \"sensor\", got \"{other}\""
                )))
            }
        }
        match self.analysis.spectrum_window.as_str() {
            "none" | "hann" => {}
            other => {
                return Err(CliError::Config(format!(
                    "analysis.spectrum_window must be \"none\" or \"hann\", got \"{other}\""
                )))
            }
        }
        if self.analysis.detection_threshold_t < 0.0 {
            return Err(CliError::Config(
                "analysis.detection_threshold_t must be >= 0".into(),
            ));
        }
        if !(self.analysis.campaign_days > 0.0) || !(self.analysis.shot_time_s > 0.0) {
            return Err(CliError::Config(
                "analysis.campaign_days and analysis.shot_time_s must be > 0".into(),
            ));
        }
        Ok(())
    }

    pub fn duration_s(&self) -> f64 {
        self.window.duration_days * 86_400.0
    }

    /// Fully resolved TOML echo, defaults included.
    pub fn to_resolved_toml(&self) -> Result<String, CliError> {
        toml::to_string_pretty(self)
            .map_err(|e| CliError::Config(format!("cannot serialize resolved config: {e}")))
    }
}
