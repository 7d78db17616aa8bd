//! Truncated Floquet-Sambe dynamical matrix and its frozen-n Bloch symbol.
//!
//! Harmonics `n` in `[-N, N]` map to row/column `n + N`. The matrix is
//! tridiagonal: a linear tilt `-n * omega_mod` on the diagonal plus
//! asymmetric nearest-neighbour hopping from the frequency and decay
//! modulations.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jackiw;
use crate::model::ModelParams;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Tridiagonal harmonic-space dynamical matrix `H[n][m]` with hard-cut edges.
#[derive(Debug, Clone, PartialEq)]
pub struct SambeMatrix {
    n_trunc: usize,
    omega_mod: f64,
    diag: Vec<Complex64>,
    /// `H[n][n+1]`
    upper: Vec<Complex64>,
    /// `H[n+1][n]`
    lower: Vec<Complex64>,
}

impl SambeMatrix {
    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    pub fn omega_mod(&self) -> f64 {
        self.omega_mod
    }

    /// Matrix dimension `2N + 1`.
    pub fn dim(&self) -> usize {
        2 * self.n_trunc + 1
    }

    /// Row index of harmonic `n`, if it lies inside the window.
    pub fn index_of(&self, n: i64) -> Option<usize> {
        let shifted = n + self.n_trunc as i64;
        (0..self.dim() as i64).contains(&shifted).then_some(shifted as usize)
    }

    pub fn harmonic(&self, index: usize) -> i64 {
        index as i64 - self.n_trunc as i64
    }

    pub fn harmonics(&self) -> impl Iterator<Item = i64> + Clone {
        let n = self.n_trunc as i64;
        -n..=n
    }

    /// Entry `H[n][m]` addressed by harmonic labels; zero outside the band
    /// or the window.
    pub fn entry(&self, n: i64, m: i64) -> Complex64 {
        let (Some(i), Some(j)) = (self.index_of(n), self.index_of(m)) else {
            return Complex64::new(0.0, 0.0);
        };
        match j as i64 - i as i64 {
            0 => self.diag[i],
            1 => self.upper[i],
            -1 => self.lower[j],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    pub fn diag(&self) -> &[Complex64] {
        &self.diag
    }

    pub fn upper(&self) -> &[Complex64] {
        &self.upper
    }

    pub fn lower(&self) -> &[Complex64] {
        &self.lower
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = self.diag[i];
        }
        for i in 0..d - 1 {
            m[(i, i + 1)] = self.upper[i];
            m[(i + 1, i)] = self.lower[i];
        }
        m
    }

    /// Dense `omega_bar * I - H`.
    pub fn shifted_dense(&self, omega_bar: f64) -> DMatrix<Complex64> {
        let mut m = -self.to_dense();
        for i in 0..self.dim() {
            m[(i, i)] += omega_bar;
        }
        m
    }

    /// The sub-block on harmonics `[-n_small, n_small]`.
    pub fn restrict(&self, n_small: usize) -> Result<SambeMatrix> {
        if n_small < 1 || n_small > self.n_trunc {
            return Err(Error::InvalidArgument(format!(
                "cannot restrict N = {} to {n_small}",
                self.n_trunc
            )));
        }
        let off = self.n_trunc - n_small;
        let d = 2 * n_small + 1;
        Ok(SambeMatrix {
            n_trunc: n_small,
            omega_mod: self.omega_mod,
            diag: self.diag[off..off + d].to_vec(),
            upper: self.upper[off..off + d - 1].to_vec(),
            lower: self.lower[off..off + d - 1].to_vec(),
        })
    }

    /// Nonzero entries as `(n, m, value)`, row-major.
    pub fn nonzero_entries(&self) -> Vec<(i64, i64, Complex64)> {
        let mut out = Vec::with_capacity(3 * self.dim());
        for n in self.harmonics() {
            for m in (n - 1)..=(n + 1) {
                let v = self.entry(n, m);
                if v != Complex64::new(0.0, 0.0) {
                    out.push((n, m, v));
                }
            }
        }
        out
    }
}

/// Builds the `(2N+1)`-dimensional Sambe matrix with open boundaries.
pub fn build_sambe(params: &ModelParams, n_trunc: usize) -> Result<SambeMatrix> {
    if n_trunc < 1 {
        return Err(Error::TruncationTooSmall(n_trunc as i64));
    }
    let om = params.omega_mod;
    let d = 2 * n_trunc + 1;
    let onsite_gain = I * (params.net_gain() / 2.0);
    let diag = (0..d)
        .map(|i| {
            let n = i as f64 - n_trunc as f64;
            (Complex64::new(-n, 0.0) + onsite_gain) * om
        })
        .collect();
    let (upper_val, lower_val) = hoppings(params);
    Ok(SambeMatrix {
        n_trunc,
        omega_mod: om,
        diag,
        upper: vec![upper_val; d - 1],
        lower: vec![lower_val; d - 1],
    })
}

/// `(H[n][n+1], H[n+1][n])`.
fn hoppings(params: &ModelParams) -> (Complex64, Complex64) {
    let om = params.omega_mod;
    let dissipative = I * (params.eta_kappa / 4.0);
    let up = Complex64::from_polar(params.eta_omega, params.phi) - dissipative;
    let down = Complex64::from_polar(params.eta_omega, -params.phi) - dissipative;
    (up * om, down * om)
}

/// Frozen-n Bloch symbol `h(k; n, omega_bar)`. Its zeros in `k` mark gap
/// closings of the doubled Bloch Hamiltonian.
pub fn bloch_symbol(params: &ModelParams, n: i64, omega_bar: f64, k: f64) -> Complex64 {
    let band = Complex64::new(2.0 * params.eta_omega * (k + params.phi).cos(), 0.0)
        - I * (params.eta_kappa / 2.0 * k.cos())
        + I * (params.net_gain() / 2.0)
        - n as f64;
    Complex64::new(omega_bar, 0.0) - band * params.omega_mod
}

/// Instantaneous detuning `omega_0(t)` and modulated decay `kappa(t)`.
pub fn time_signals(params: &ModelParams, t: f64) -> (f64, f64) {
    let om = params.omega_mod;
    let omega0 = 2.0 * params.eta_omega * om * (om * t + params.phi).cos();
    let c = (om * t / 2.0).cos();
    let kappa = 2.0 * params.eta_kappa * om * c * c;
    (omega0, kappa)
}

/// Truncation half-width large enough for both solitons and their Gaussian
/// tails: `max(ceil(n0 + 6 sigma_r), 2 ceil(2 eta_omega) + 10)`.
pub fn default_truncation(params: &ModelParams) -> usize {
    let floor = 2 * (2.0 * params.eta_omega).ceil() as usize + 10;
    let soliton = jackiw::predict(params, jackiw::Side::Right)
        .ok()
        .map(|p| (p.n0 + 6.0 * p.sigma_r_sq.sqrt()).ceil())
        .filter(|v| v.is_finite())
        .map(|v| v as usize)
        .unwrap_or(0);
    floor.max(soliton)
}
