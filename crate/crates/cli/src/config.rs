//! Run configuration: a TOML file plus `--set key.path=value` overrides.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use floquet_amp::{DriveSpec, ModelParams};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub eta_omega: f64,
    pub eta_kappa: f64,
    pub eta_gamma: f64,
    pub eta_p: f64,
    /// Modulation phase in radians; `phi_over_pi` takes precedence.
    #[serde(default = "default_phi")]
    pub phi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_over_pi: Option<f64>,
    #[serde(default = "default_omega_mod")]
    pub omega_mod: f64,
}

fn default_phi() -> f64 {
    PI / 2.0
}

fn default_omega_mod() -> f64 {
    2.0 * PI
}

impl ModelSection {
    pub fn params(&self) -> ModelParams {
        ModelParams {
            eta_omega: self.eta_omega,
            eta_kappa: self.eta_kappa,
            eta_gamma: self.eta_gamma,
            eta_p: self.eta_p,
            phi: self.phi_over_pi.map_or(self.phi, |x| x * PI),
            omega_mod: self.omega_mod,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSection {
    #[serde(default = "one")]
    pub amplitude_re: f64,
    #[serde(default)]
    pub amplitude_im: f64,
    /// Drive harmonic; the peak of the optimal input profile when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_d: Option<i64>,
    #[serde(default)]
    pub omega_bar_d: f64,
}

fn one() -> f64 {
    1.0
}

impl Default for DriveSection {
    fn default() -> Self {
        DriveSection { amplitude_re: 1.0, amplitude_im: 0.0, n_d: None, omega_bar_d: 0.0 }
    }
}

impl DriveSection {
    pub fn amplitude(&self) -> Complex64 {
        Complex64::new(self.amplitude_re, self.amplitude_im)
    }

    pub fn spec(&self, n_d: i64) -> DriveSpec {
        DriveSpec::new(self.amplitude(), n_d, self.omega_bar_d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsSection {
    /// Truncation half-width; chosen from the soliton widths when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_trunc: Option<usize>,
    /// Reduced frequency for single-frequency analyses.
    pub omega_bar: f64,
    /// Number of reduced frequencies spanning `[0, Omega)` in the winding map.
    pub omega_bar_points: usize,
    pub k_points: usize,
    pub quad_points: usize,
    pub rtol: f64,
    pub atol: f64,
    pub samples_per_period: usize,
}

impl Default for NumericsSection {
    fn default() -> Self {
        NumericsSection {
            n_trunc: None,
            omega_bar: 0.0,
            omega_bar_points: 32,
            k_points: floquet_amp::topology::DEFAULT_K_POINTS,
            quad_points: floquet_amp::response::DEFAULT_QUAD_POINTS,
            rtol: floquet_amp::ode::DEFAULT_RTOL,
            atol: floquet_amp::ode::DEFAULT_ATOL,
            samples_per_period: floquet_amp::response::DEFAULT_SAMPLES_PER_PERIOD,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    /// `count` points including both ends.
    Endpoints,
    /// Midpoints of `count` equal cells, excluding both ends.
    Midpoints,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    #[serde(default = "default_spacing")]
    pub spacing: Spacing,
}

fn default_spacing() -> Spacing {
    Spacing::Endpoints
}

impl SweepSection {
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        let span = self.stop - self.start;
        match (self.spacing, n) {
            (_, 0) => Vec::new(),
            (Spacing::Endpoints, 1) => vec![self.start],
            (Spacing::Endpoints, _) => (0..n).map(|k| self.start + span * k as f64 / (n - 1) as f64).collect(),
            (Spacing::Midpoints, _) => (0..n).map(|k| self.start + span * (k as f64 + 0.5) / n as f64).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DynamicsSection {
    /// Length of the comparison window after the transient, in periods.
    pub window_periods: f64,
    /// Total length when no steady state exists, in periods.
    pub fallback_periods: f64,
    pub three_mode: bool,
    pub kappa_b_over_omega: f64,
    pub kappa_c_over_omega: f64,
    pub photon_number: bool,
    pub photon_periods: usize,
    pub photon_n_init: f64,
}

impl Default for DynamicsSection {
    fn default() -> Self {
        DynamicsSection {
            window_periods: 5.0,
            fallback_periods: 25.0,
            three_mode: false,
            kappa_b_over_omega: 200.0,
            kappa_c_over_omega: 1200.0,
            photon_number: true,
            photon_periods: 40,
            photon_n_init: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    /// CSV is always written; JSON adds full result dumps and SVG heatmaps.
    pub formats: Vec<Format>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { dir: PathBuf::from("out"), formats: vec![Format::Csv] }
    }
}

impl OutputSection {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    #[serde(default)]
    pub drive: DriveSection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub dynamics: DynamicsSection,
    #[serde(default)]
    pub output: OutputSection,
}

impl RunConfig {
    pub fn params(&self) -> ModelParams {
        self.model.params()
    }

    /// Reads `path` (if any), applies `key.path=value` overrides and checks
    /// the result.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, CliError> {
        let mut table = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
                text.parse::<toml::Table>()
                    .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => toml::Table::new(),
        };
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        Self::from_table(table)
    }

    pub fn from_table(table: toml::Table) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<(), CliError> {
        self.params().validate().map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(s) = &self.sweep {
            if !ModelParams::FIELD_NAMES.contains(&s.parameter.as_str()) {
                return Err(CliError::Config(format!(
                    "sweep.parameter `{}` is not one of {:?}",
                    s.parameter,
                    ModelParams::FIELD_NAMES
                )));
            }
            if s.count == 0 {
                return Err(CliError::Config("sweep.count must be positive".into()));
            }
        }
        if self.numerics.n_trunc == Some(0) {
            return Err(CliError::Config("numerics.n_trunc must be at least 1".into()));
        }
        if self.numerics.omega_bar_points == 0 || self.numerics.samples_per_period == 0 {
            return Err(CliError::Config("numerics point counts must be positive".into()));
        }
        Ok(())
    }
}

/// `model.eta_p=58.5` style override. The value is read as a TOML literal
/// and falls back to a bare string.
pub fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), CliError> {
    let (path, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{spec}` is not key.path=value")))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(CliError::Config(format!("override `{spec}` has an empty key")));
    }
    let value = format!("v = {}", raw.trim())
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
    let (last, parents) = keys.split_last().unwrap();
    let mut cur = table;
    for k in parents {
        let entry = cur.entry(k.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("override `{spec}`: `{k}` is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG2D: &str = r#"
[model]
eta_omega = 10.0
eta_kappa = 30.0
eta_gamma = 30.0
eta_p = 58.5
"#;

    #[test]
    fn defaults_fill_missing_sections() {
        let cfg = RunConfig::from_table(FIG2D.parse().unwrap()).unwrap();
        assert_eq!(cfg.params().phi, PI / 2.0);
        assert_eq!(cfg.params().omega_mod, 2.0 * PI);
        assert_eq!(cfg.numerics.k_points, 2048);
        assert_eq!(cfg.drive.n_d, None);
        assert!(cfg.output.wants(Format::Csv));
    }

    #[test]
    fn overrides_replace_and_create_keys() {
        let mut t: toml::Table = FIG2D.parse().unwrap();
        apply_override(&mut t, "model.eta_p=60").unwrap();
        apply_override(&mut t, "model.phi_over_pi=-0.5").unwrap();
        apply_override(&mut t, "numerics.n_trunc = 40").unwrap();
        apply_override(&mut t, "output.dir=results/a").unwrap();
        let cfg = RunConfig::from_table(t).unwrap();
        assert_eq!(cfg.model.eta_p, 60.0);
        assert_eq!(cfg.params().phi, -PI / 2.0);
        assert_eq!(cfg.numerics.n_trunc, Some(40));
        assert_eq!(cfg.output.dir, PathBuf::from("results/a"));
    }

    #[test]
    fn bad_configs_are_config_errors() {
        let mut t: toml::Table = FIG2D.parse().unwrap();
        assert!(matches!(apply_override(&mut t, "model.eta_p"), Err(CliError::Config(_))));
        apply_override(&mut t, "model.eta_kappa=-1").unwrap();
        assert!(matches!(RunConfig::from_table(t), Err(CliError::Config(_))));
        let mut t: toml::Table = FIG2D.parse().unwrap();
        apply_override(&mut t, "model.bogus=1").unwrap();
        assert!(matches!(RunConfig::from_table(t), Err(CliError::Config(_))));
        let mut t: toml::Table = FIG2D.parse().unwrap();
        apply_override(&mut t, "sweep.parameter=\"nope\"").unwrap();
        apply_override(&mut t, "sweep.start=0").unwrap();
        apply_override(&mut t, "sweep.stop=1").unwrap();
        apply_override(&mut t, "sweep.count=3").unwrap();
        assert!(matches!(RunConfig::from_table(t), Err(CliError::Config(_))));
    }

    #[test]
    fn sweep_spacings() {
        let s = SweepSection { parameter: "eta_p".into(), start: 9.0, stop: 30.0, count: 20, spacing: Spacing::Midpoints };
        let v = s.values();
        assert_eq!(v.len(), 20);
        assert!((v[0] - 9.525).abs() < 1e-12 && (v[19] - 29.475).abs() < 1e-12);
        let e = SweepSection { spacing: Spacing::Endpoints, count: 3, ..s };
        assert_eq!(e.values(), vec![9.0, 19.5, 30.0]);
    }
}
