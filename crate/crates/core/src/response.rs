//! Cyclostationary signal and noise fluxes at the static port and the
//! signal-to-noise ratio of the amplifier.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::green::{green_function_with_limit, singular_triples, NEAR_SINGULAR_COND};
use crate::model::{DriveSpec, ModelParams};
use crate::sambe::{build_sambe, default_truncation, SambeMatrix};
use crate::scattering::ScatteringMatrices;

pub const DEFAULT_QUAD_POINTS: usize = 128;
pub const MIN_QUAD_POINTS: usize = 32;
pub const DEFAULT_SAMPLES_PER_PERIOD: usize = 256;
/// Largest accepted disagreement between the even- and odd-node half rules.
const QUAD_REL_TOL: f64 = 0.01;

fn cis(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, x)
}

/// Output amplitude column `alpha_d R[., n_d]` ready for time evaluation.
#[derive(Debug, Clone)]
pub struct SignalKernel {
    omega_mod: f64,
    n_trunc: usize,
    column: Vec<Complex64>,
}

impl SignalKernel {
    pub fn new(scat: &ScatteringMatrices, drive: &DriveSpec) -> Result<Self> {
        let j = scat.index_of(drive.n_d)?;
        let column = scat.r.column(j).iter().map(|z| z * drive.amplitude).collect();
        Ok(SignalKernel { omega_mod: scat.omega_mod, n_trunc: scat.n_trunc, column })
    }

    /// `S_out(t) = |sum_n e^{-i n Omega t} alpha_d R[n][n_d]|^2`.
    pub fn eval(&self, t: f64) -> f64 {
        let n0 = self.n_trunc as i64;
        self.column
            .iter()
            .enumerate()
            .map(|(i, z)| z * cis(-((i as i64 - n0) as f64) * self.omega_mod * t))
            .sum::<Complex64>()
            .norm_sqr()
    }

    /// Period average, `sum_n |alpha_d R[n][n_d]|^2`.
    pub fn time_average(&self) -> f64 {
        self.column.iter().map(|z| z.norm_sqr()).sum()
    }
}

pub fn signal_out(scat: &ScatteringMatrices, drive: &DriveSpec, t: f64) -> Result<f64> {
    Ok(SignalKernel::new(scat, drive)?.eval(t))
}

/// Hermitian correlation matrix `C[n][m] = (1/2 pi) sum_l int P*[n][l] P[m][l] d omega_bar`
/// so that `N_out(t) = sum_{n,m} e^{i(n-m) Omega t} C[n][m]`.
#[derive(Debug, Clone)]
pub struct NoiseKernel {
    omega_mod: f64,
    n_trunc: usize,
    quad_points: usize,
    corr: DMatrix<Complex64>,
}

impl NoiseKernel {
    /// Composite midpoint rule with `quad_points` nodes on `[0, Omega)`.
    /// The even- and odd-indexed nodes form two interleaved half rules; if
    /// their period-averaged noise differs by more than 1% the quadrature is
    /// reported as unconverged.
    pub fn new(sambe: &SambeMatrix, params: &ModelParams, quad_points: usize) -> Result<Self> {
        Self::with_cond_limit(sambe, params, quad_points, NEAR_SINGULAR_COND)
    }

    pub fn with_cond_limit(sambe: &SambeMatrix, params: &ModelParams, quad_points: usize, max_cond: f64) -> Result<Self> {
        if quad_points < MIN_QUAD_POINTS || quad_points % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "quad_points must be even and at least {MIN_QUAD_POINTS}, got {quad_points}"
            )));
        }
        let om = params.omega_mod;
        let d = sambe.dim();
        let strength = om * om * params.eta_p * params.eta_gamma;
        if strength == 0.0 {
            return Ok(NoiseKernel {
                omega_mod: om,
                n_trunc: sambe.n_trunc(),
                quad_points,
                corr: DMatrix::zeros(d, d),
            });
        }
        let h = om / quad_points as f64;
        let nodes: Vec<DMatrix<Complex64>> = (0..quad_points)
            .into_par_iter()
            .map(|j| {
                let g = green_function_with_limit(sambe, (j as f64 + 0.5) * h, max_cond)?.into_matrix();
                Ok(g.conjugate() * g.transpose())
            })
            .collect::<Result<_>>()?;
        let mut even = DMatrix::zeros(d, d);
        let mut odd = DMatrix::zeros(d, d);
        for (j, m) in nodes.iter().enumerate() {
            if j % 2 == 0 {
                even += m;
            } else {
                odd += m;
            }
        }
        let weight = Complex64::new(strength * h / (2.0 * PI), 0.0);
        let corr = (&even + &odd) * weight;
        let tr_even = (even.trace() * weight * 2.0).re;
        let tr_odd = (odd.trace() * weight * 2.0).re;
        let tr = corr.trace().re;
        let rel = (tr_even - tr_odd).abs() / tr.abs().max(f64::MIN_POSITIVE);
        if !(rel <= QUAD_REL_TOL) {
            return Err(Error::QuadratureNotConverged(rel));
        }
        Ok(NoiseKernel { omega_mod: om, n_trunc: sambe.n_trunc(), quad_points, corr })
    }

    pub fn quad_points(&self) -> usize {
        self.quad_points
    }

    pub fn correlation(&self) -> &DMatrix<Complex64> {
        &self.corr
    }

    /// Complex value of the double sum; its imaginary part is roundoff.
    pub fn eval_complex(&self, t: f64) -> Complex64 {
        let n0 = self.n_trunc as i64;
        let d = self.corr.nrows();
        let phases: Vec<Complex64> = (0..d).map(|i| cis((i as i64 - n0) as f64 * self.omega_mod * t)).collect();
        let mut total = Complex64::new(0.0, 0.0);
        for m in 0..d {
            let mut col = Complex64::new(0.0, 0.0);
            for n in 0..d {
                col += phases[n] * self.corr[(n, m)];
            }
            total += col * phases[m].conj();
        }
        total
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_complex(t).re.max(0.0)
    }

    /// Period average, the trace of the correlation matrix.
    pub fn time_average(&self) -> f64 {
        self.corr.trace().re
    }
}

pub fn noise_out(params: &ModelParams, n_trunc: usize, quad_points: usize, t: f64) -> Result<f64> {
    let sambe = build_sambe(params, n_trunc)?;
    Ok(NoiseKernel::new(&sambe, params, quad_points)?.eval(t))
}

/// SNR evaluation at one pump strength.
#[derive(Debug, Clone, Serialize)]
pub struct SnrResult {
    pub eta_p: f64,
    pub beta: f64,
    /// `+inf` when the noise vanishes identically.
    pub snr_max: f64,
    pub t_star: f64,
    pub stable: bool,
    pub n_d: i64,
    pub signal_series: Vec<f64>,
    pub noise_series: Vec<f64>,
}

/// How the drive harmonic is picked at each sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveChoice {
    Fixed(DriveSpec),
    /// `omega_bar_d = 0` and `n_d` at the largest component of the optimal
    /// input profile `u0` (the smallest singular triple at `omega_bar = 0`).
    OptimalInput { amplitude: Complex64 },
}

impl Default for DriveChoice {
    fn default() -> Self {
        DriveChoice::OptimalInput { amplitude: Complex64::new(1.0, 0.0) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrOptions {
    /// `None` picks [`default_truncation`] per point.
    pub n_trunc: Option<usize>,
    pub quad_points: usize,
    pub samples_per_period: usize,
    pub max_cond: f64,
}

impl Default for SnrOptions {
    fn default() -> Self {
        SnrOptions {
            n_trunc: None,
            quad_points: DEFAULT_QUAD_POINTS,
            samples_per_period: DEFAULT_SAMPLES_PER_PERIOD,
            max_cond: NEAR_SINGULAR_COND,
        }
    }
}

/// Harmonic where the optimal input profile peaks.
pub fn optimal_input_harmonic(sambe: &SambeMatrix, omega_bar: f64) -> Result<i64> {
    let t = singular_triples(sambe, omega_bar, 1)?.remove(0);
    let (idx, _) = t
        .u
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best });
    Ok(sambe.harmonic(idx))
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Maximum of `S_out(t) / N_out(t)` over one period. The grid maximum is
/// refined by golden-section search between its neighbours.
pub fn snr_at(params: &ModelParams, drive: DriveChoice, opts: &SnrOptions) -> Result<SnrResult> {
    let beta = params.beta()?;
    let n_trunc = opts.n_trunc.unwrap_or_else(|| default_truncation(params));
    let sambe = build_sambe(params, n_trunc)?;
    let drive = match drive {
        DriveChoice::Fixed(d) => d,
        DriveChoice::OptimalInput { amplitude } => DriveSpec::new(amplitude, optimal_input_harmonic(&sambe, 0.0)?, 0.0),
    };
    drive.validate(params.omega_mod)?;
    let green = green_function_with_limit(&sambe, drive.omega_bar_d, opts.max_cond)?;
    let scat = ScatteringMatrices::from_green(&green, params);
    let signal = SignalKernel::new(&scat, &drive)?;
    let noise = NoiseKernel::with_cond_limit(&sambe, params, opts.quad_points, opts.max_cond)?;

    let samples = opts.samples_per_period.max(4);
    let period = params.period();
    let dt = period / samples as f64;
    let times: Vec<f64> = (0..samples).map(|j| j as f64 * dt).collect();
    let signal_series: Vec<f64> = times.iter().map(|&t| signal.eval(t)).collect();
    let noise_series: Vec<f64> = times.iter().map(|&t| noise.eval(t)).collect();
    let ratio = |s: f64, n: f64| if n > 0.0 { s / n } else { f64::INFINITY };

    let (j_best, grid_best) = signal_series
        .iter()
        .zip(&noise_series)
        .map(|(&s, &n)| ratio(s, n))
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (j, r)| if r > best.1 { (j, r) } else { best });
    let (snr_max, t_star) = if grid_best.is_finite() {
        let f = |t: f64| ratio(signal.eval(t), noise.eval(t));
        let t0 = times[j_best];
        let t = golden_max(&f, t0 - dt, t0 + dt, 1e-10 * period);
        let v = f(t);
        if v >= grid_best {
            (v, t.rem_euclid(period))
        } else {
            (grid_best, t0)
        }
    } else {
        (grid_best, times[j_best])
    };
    Ok(SnrResult {
        eta_p: params.eta_p,
        beta,
        snr_max,
        t_star,
        stable: beta < 1.0,
        n_d: drive.n_d,
        signal_series,
        noise_series,
    })
}

/// SNR over a list of pump strengths; the other parameters stay at `base`.
/// Results keep the input order.
pub fn snr_sweep(base: &ModelParams, eta_ps: &[f64], drive: DriveChoice, opts: &SnrOptions) -> Result<Vec<SnrResult>> {
    eta_ps
        .par_iter()
        .map(|&eta_p| snr_at(&ModelParams { eta_p, ..*base }, drive, opts))
        .collect()
}

/// The stable point with the largest SNR, if any.
pub fn stable_maximum(results: &[SnrResult]) -> Option<&SnrResult> {
    results
        .iter()
        .filter(|r| r.stable)
        .max_by(|a, b| a.snr_max.total_cmp(&b.snr_max))
}
