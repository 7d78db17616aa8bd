//! Model parameters shared by every other module.
//!
//! All rates are measured in units of the modulation frequency `omega_mod`;
//! the `eta_*` fields are the dimensionless amplitudes that enter the
//! harmonic-space dynamical matrix.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Modulation amplitudes, phase and base frequency of the single-mode model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Frequency-modulation amplitude.
    pub eta_omega: f64,
    /// Decay-modulation amplitude.
    pub eta_kappa: f64,
    /// Static loss (the coherent drive port).
    pub eta_gamma: f64,
    /// Incoherent pump.
    pub eta_p: f64,
    /// Modulation phase in radians.
    pub phi: f64,
    /// Modulation frequency.
    pub omega_mod: f64,
}

impl ModelParams {
    /// Normalized pump-loss imbalance `(eta_p - eta_gamma) / eta_kappa`.
    pub fn beta(&self) -> Result<f64> {
        beta(self)
    }

    /// Static loss rate `gamma = eta_gamma * omega_mod`.
    pub fn gamma(&self) -> f64 {
        self.eta_gamma * self.omega_mod
    }

    /// Incoherent pump rate `P = eta_p * omega_mod`.
    pub fn pump(&self) -> f64 {
        self.eta_p * self.omega_mod
    }

    /// Modulation period `2 pi / omega_mod`.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega_mod
    }

    /// Net period-averaged gain `(P - gamma - <kappa>) / omega_mod`.
    /// Negative means the mean field decays.
    pub fn net_gain(&self) -> f64 {
        self.eta_p - self.eta_gamma - self.eta_kappa
    }

    /// Returns a copy with a named field replaced. Used by sweeps.
    pub fn with_field(mut self, name: &str, value: f64) -> Result<Self> {
        match name {
            "eta_omega" => self.eta_omega = value,
            "eta_kappa" => self.eta_kappa = value,
            "eta_gamma" => self.eta_gamma = value,
            "eta_p" => self.eta_p = value,
            "phi" => self.phi = value,
            "omega_mod" => self.omega_mod = value,
            other => {
                return Err(Error::InvalidParams(format!(
                    "unknown model parameter `{other}`"
                )))
            }
        }
        Ok(self)
    }

    pub const FIELD_NAMES: [&'static str; 6] =
        ["eta_omega", "eta_kappa", "eta_gamma", "eta_p", "phi", "omega_mod"];

    pub fn validate(self) -> Result<Validated> {
        validate(self)
    }
}

/// `(eta_p - eta_gamma) / eta_kappa`; errors when `eta_kappa == 0`.
pub fn beta(params: &ModelParams) -> Result<f64> {
    if params.eta_kappa == 0.0 {
        return Err(Error::DegenerateBeta);
    }
    Ok((params.eta_p - params.eta_gamma) / params.eta_kappa)
}

/// Parameters that passed validation, annotated with the dynamical regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Validated {
    pub params: ModelParams,
    /// `true` when the mean field has net loss (`beta < 1`).
    pub stable: bool,
}

pub fn validate(params: ModelParams) -> Result<Validated> {
    let amplitudes = [
        ("eta_omega", params.eta_omega),
        ("eta_kappa", params.eta_kappa),
        ("eta_gamma", params.eta_gamma),
        ("eta_p", params.eta_p),
    ];
    for (name, value) in amplitudes {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidParams(format!(
                "{name} must be finite and non-negative, got {value}"
            )));
        }
    }
    if !params.phi.is_finite() {
        return Err(Error::InvalidParams(format!("phi must be finite, got {}", params.phi)));
    }
    if !(params.omega_mod.is_finite() && params.omega_mod > 0.0) {
        return Err(Error::InvalidParams(format!(
            "omega_mod must be positive, got {}",
            params.omega_mod
        )));
    }
    Ok(Validated {
        params,
        stable: params.net_gain() < 0.0,
    })
}

/// Coherent tone injected at the static port, at `omega_d = omega_bar_d + n_d * omega_mod`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveSpec {
    pub amplitude: Complex64,
    pub n_d: i64,
    pub omega_bar_d: f64,
}

impl DriveSpec {
    pub fn new(amplitude: Complex64, n_d: i64, omega_bar_d: f64) -> Self {
        Self {
            amplitude,
            n_d,
            omega_bar_d,
        }
    }

    /// Absolute drive frequency.
    pub fn omega_d(&self, omega_mod: f64) -> f64 {
        self.omega_bar_d + self.n_d as f64 * omega_mod
    }

    pub fn validate(&self, omega_mod: f64) -> Result<()> {
        if !(0.0..omega_mod).contains(&self.omega_bar_d) {
            return Err(Error::InvalidParams(format!(
                "omega_bar_d = {} must lie in [0, {omega_mod})",
                self.omega_bar_d
            )));
        }
        if !(self.amplitude.re.is_finite() && self.amplitude.im.is_finite()) {
            return Err(Error::InvalidParams("drive amplitude must be finite".into()));
        }
        Ok(())
    }
}
