//! TOML run configuration.
//!
//! Every section is optional; missing values fall back to the NV-centre
//! reference drive and state. See `configs/reference.toml` for a complete
//! example.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::explore::{time_window, SweepConfig};
use crate::model::{DriveParams, FrequencyUnit, InitialStateSpec};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{}", self.render())]
pub struct ConfigError {
    pub file: Option<PathBuf>,
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl ConfigError {
    pub fn field(field: &str, message: impl Into<String>) -> Self {
        Self { file: None, line: None, field: Some(field.into()), message: message.into() }
    }

    fn render(&self) -> String {
        let mut s = String::from("config error");
        if let Some(f) = &self.file {
            s += &format!(" in {}", f.display());
        }
        if let Some(l) = self.line {
            s += &format!(" at line {l}");
        }
        if let Some(k) = &self.field {
            s += &format!(" (field `{k}`)");
        }
        s + ": " + &self.message
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    #[serde(default)]
    pub units: FrequencyUnit,
    pub omega1: f64,
    pub omega2: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl Default for DriveSection {
    fn default() -> Self {
        Self { units: FrequencyUnit::MhzTimes2pi, omega1: 2.219, omega2: 2.219, phi1: 1.09 * 2.219, phi2: 1.09 * 2.219 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSection {
    pub p: [f64; 3],
    pub a: [f64; 3],
}

impl Default for StateSection {
    fn default() -> Self {
        let s = InitialStateSpec::nv_reference();
        Self { p: s.p, a: s.a }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default)]
    pub start: f64,
    /// End time in µs; overrides `periods`.
    pub end: Option<f64>,
    /// End time as a multiple of the window `2π/√(2(Ω₁² + Ω₂²) + φ₁²)`.
    pub periods: Option<f64>,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_points() -> usize {
    401
}

impl Default for GridSection {
    fn default() -> Self {
        Self { start: 0.0, end: None, periods: None, points: default_points() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default = "default_sets")]
    pub n_sets: usize,
    #[serde(default = "default_n_time")]
    pub n_time: usize,
    #[serde(default)]
    pub units: FrequencyUnit,
    #[serde(default = "default_omega_min")]
    pub omega_min: f64,
    #[serde(default = "default_omega_max")]
    pub omega_max: f64,
    #[serde(default = "default_phi_factor")]
    pub phi_factor: f64,
}

fn default_sets() -> usize {
    1000
}
fn default_n_time() -> usize {
    200
}
fn default_omega_min() -> f64 {
    1.0
}
fn default_omega_max() -> f64 {
    20.0
}
fn default_phi_factor() -> f64 {
    2.0
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            n_sets: default_sets(),
            n_time: default_n_time(),
            units: FrequencyUnit::MhzTimes2pi,
            omega_min: default_omega_min(),
            omega_max: default_omega_max(),
            phi_factor: default_phi_factor(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub drive: DriveSection,
    #[serde(default)]
    pub state: StateSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub sweep: SweepSection,
    /// Repetitions per measured distribution; absent means exact probabilities.
    pub shots: Option<u64>,
    #[serde(default)]
    pub seed: u64,
    /// Midpoint steps for the stepped-propagator cross-check; absent skips it.
    pub steps: Option<usize>,
    pub out: Option<PathBuf>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| ConfigError {
            file: None,
            line: e.span().map(|s| line_of(text, s.start)),
            field: None,
            message: e.message().to_string(),
        })?;
        cfg.validate().map_err(|mut err| {
            // Point at the offending key when it appears literally.
            if let Some(key) = err.field.as_deref().and_then(|f| f.rsplit('.').next()) {
                if let Some(pos) = text.lines().position(|l| l.trim_start().starts_with(key)) {
                    err.line = Some(pos + 1);
                }
            }
            err
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            file: Some(path.to_path_buf()),
            line: None,
            field: None,
            message: format!("cannot read file: {e}"),
        })?;
        Self::from_toml(&text).map_err(|e| ConfigError { file: Some(path.to_path_buf()), ..e })
    }

    pub fn drive_params(&self) -> Result<DriveParams, ConfigError> {
        let u = self.drive.units;
        DriveParams::new(
            u.to_angular(self.drive.omega1),
            u.to_angular(self.drive.omega2),
            u.to_angular(self.drive.phi1),
            u.to_angular(self.drive.phi2),
        )
        .map_err(|e| ConfigError::field("drive", e.to_string()))
    }

    pub fn state_spec(&self) -> InitialStateSpec {
        InitialStateSpec { p: self.state.p, a: self.state.a }
    }

    pub fn sweep_config(&self) -> SweepConfig {
        SweepConfig {
            n_sets: self.sweep.n_sets,
            n_time: self.sweep.n_time,
            seed: self.seed,
            omega_min: self.sweep.omega_min,
            omega_max: self.sweep.omega_max,
            phi_factor: self.sweep.phi_factor,
            unit: self.sweep.units,
        }
    }

    /// Grid end in µs.
    pub fn grid_end(&self) -> Result<f64, ConfigError> {
        match (self.grid.end, self.grid.periods) {
            (Some(end), _) => Ok(end),
            (None, periods) => Ok(periods.unwrap_or(1.0) * time_window(&self.drive_params()?)),
        }
    }

    pub fn times(&self) -> Result<Vec<f64>, ConfigError> {
        let (start, end, n) = (self.grid.start, self.grid_end()?, self.grid.points);
        if n == 1 {
            return Ok(vec![start]);
        }
        Ok((0..n).map(|k| start + (end - start) * k as f64 / (n - 1) as f64).collect())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, x) in [("drive.omega1", self.drive.omega1), ("drive.omega2", self.drive.omega2)] {
            if !(x.is_finite() && x > 0.0) {
                return Err(ConfigError::field(name, "must be a positive number"));
            }
        }
        self.drive_params()?;
        self.state_spec().validate().map_err(|e| ConfigError::field("state.p", e.to_string()))?;
        if !self.grid.start.is_finite() || self.grid.start < -1e-12 {
            return Err(ConfigError::field("grid.start", "must be finite and non-negative"));
        }
        if let Some(p) = self.grid.periods {
            if !(p.is_finite() && p > 0.0) {
                return Err(ConfigError::field("grid.periods", "must be positive"));
            }
        }
        let end = self.grid_end()?;
        if !(end.is_finite() && end > self.grid.start) {
            return Err(ConfigError::field("grid.end", format!("must exceed grid.start ({end} <= {})", self.grid.start)));
        }
        if self.grid.points == 0 {
            return Err(ConfigError::field("grid.points", "must be at least 1"));
        }
        if self.shots == Some(0) {
            return Err(ConfigError::field("shots", "must be positive"));
        }
        if self.steps == Some(0) {
            return Err(ConfigError::field("steps", "must be positive"));
        }
        self.sweep_config().validate().map_err(|e| ConfigError::field("sweep", e.to_string()))?;
        Ok(())
    }
}
