//! Input-output scattering matrices at the static (drive) port.
//!
//! `R[n][m] = delta_nm - i Omega eta_gamma G[n][m]` maps coherent input at
//! harmonic `m` to output at harmonic `n`; `P[n][m] = i Omega sqrt(eta_p eta_gamma) G[n][m]`
//! carries the pump noise. Spectra are kept as coefficient vectors at discrete
//! `(omega_bar, harmonic)` points: the `sqrt(2 pi) delta(omega_bar - omega_bar_d)`
//! factor is stripped on both input and output.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::green::{green_function, GreenFunction};
use crate::model::{DriveSpec, ModelParams};
use crate::sambe::SambeMatrix;

#[derive(Debug, Clone)]
pub struct ScatteringMatrices {
    pub omega_bar: f64,
    pub omega_mod: f64,
    pub n_trunc: usize,
    pub r: DMatrix<Complex64>,
    pub p: DMatrix<Complex64>,
}

impl ScatteringMatrices {
    /// Assembles `R` and `P` from an already computed Green's function.
    pub fn from_green(green: &GreenFunction, params: &ModelParams) -> Self {
        let om = params.omega_mod;
        let g = green.matrix();
        let refl = Complex64::new(0.0, -om * params.eta_gamma);
        let pump = Complex64::new(0.0, om * (params.eta_p * params.eta_gamma).sqrt());
        let mut r = g * refl;
        for i in 0..r.nrows() {
            r[(i, i)] += 1.0;
        }
        ScatteringMatrices {
            omega_bar: green.omega_bar(),
            omega_mod: om,
            n_trunc: green.n_trunc(),
            r,
            p: g * pump,
        }
    }

    pub fn r_entry(&self, n: i64, m: i64) -> Complex64 {
        let off = self.n_trunc as i64;
        self.r[((n + off) as usize, (m + off) as usize)]
    }

    pub fn p_entry(&self, n: i64, m: i64) -> Complex64 {
        let off = self.n_trunc as i64;
        self.p[((n + off) as usize, (m + off) as usize)]
    }

    pub fn index_of(&self, n: i64) -> Result<usize> {
        let idx = n + self.n_trunc as i64;
        if (0..self.r.nrows() as i64).contains(&idx) {
            Ok(idx as usize)
        } else {
            Err(Error::HarmonicOutOfRange { n, n_trunc: self.n_trunc })
        }
    }
}

pub fn scattering_matrices(sambe: &SambeMatrix, params: &ModelParams, omega_bar: f64) -> Result<ScatteringMatrices> {
    let green = green_function(sambe, omega_bar)?;
    Ok(ScatteringMatrices::from_green(&green, params))
}

/// Output amplitudes `alpha_d R[n][n_d]` over all harmonics `n`. The
/// matrices must have been evaluated at the drive's `omega_bar_d`.
pub fn mean_output(scat: &ScatteringMatrices, drive: &DriveSpec) -> Result<DVector<Complex64>> {
    let j = scat.index_of(drive.n_d)?;
    Ok(scat.r.column(j).into_owned() * drive.amplitude)
}
