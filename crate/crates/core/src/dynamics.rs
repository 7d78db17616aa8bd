//! Time-domain mean-field dynamics: the one-mode equation of motion, the
//! three-mode model it is adiabatically reduced from, and the photon-number
//! balance equation.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::green::green_function;
use crate::model::{DriveSpec, ModelParams};
use crate::ode::{integrate, OdeOptions};
use crate::sambe::{time_signals, SambeMatrix};

const I: Complex64 = Complex64::new(0.0, 1.0);
/// Auxiliary decay rates below this multiple of `omega_mod` trigger a warning.
pub const ADIABATIC_RATIO: f64 = 10.0;
/// Photon numbers beyond this are treated as divergent.
pub const PHOTON_CAP: f64 = 1e200;

/// Sampled mean-field amplitudes. `amplitudes[j]` holds one value per mode at
/// `times[j]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub amplitudes: Vec<Vec<Complex64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn modes(&self) -> usize {
        self.amplitudes.first().map_or(0, Vec::len)
    }

    /// Samples of one mode.
    pub fn mode(&self, k: usize) -> Vec<Complex64> {
        self.amplitudes.iter().map(|a| a[k]).collect()
    }
}

/// `count` evenly spaced times on `[t0, t1]`.
pub fn uniform_times(t0: f64, t1: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![t0],
        _ => (0..count).map(|j| t0 + (t1 - t0) * j as f64 / (count - 1) as f64).collect(),
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidArgument("no sample times".into()));
    }
    if times.windows(2).any(|w| !(w[0] < w[1])) || times[0] < 0.0 {
        return Err(Error::InvalidArgument("sample times must be nonnegative and strictly increasing".into()));
    }
    Ok(())
}

fn drive_term(params: &ModelParams, drive: &DriveSpec) -> impl Fn(f64) -> Complex64 {
    let eps = drive.amplitude * params.gamma().sqrt();
    let omega_d = drive.omega_d(params.omega_mod);
    move |t| -eps * Complex64::from_polar(1.0, -omega_d * t)
}

/// Integrates
/// `d alpha/dt = -i omega0(t) alpha + (P - gamma - kappa(t))/2 alpha - sqrt(gamma) alpha_d e^{-i omega_d t}`
/// from `alpha(0) = alpha0` and samples it at `times`.
pub fn integrate_one_mode(
    params: &ModelParams,
    drive: &DriveSpec,
    alpha0: Complex64,
    times: &[f64],
    opts: &OdeOptions,
) -> Result<Trajectory> {
    check_times(times)?;
    let source = drive_term(params, drive);
    let (pump, gamma) = (params.pump(), params.gamma());
    let rhs = |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let (omega0, kappa) = time_signals(params, t);
        dy[0] = y[0] * Complex64::new(0.5 * (pump - gamma - kappa), -omega0) + source(t);
    };
    let amplitudes = integrate(rhs, 0.0, &[alpha0], times, opts)?;
    Ok(Trajectory { times: times.to_vec(), amplitudes })
}

/// Periodic steady state assembled from one Green's function column,
/// `alpha_G(t) = sum_n c_n e^{-i (omega_bar_d + n Omega) t}` with
/// `c_n = -i sqrt(gamma) alpha_d G[n][n_d]`.
#[derive(Debug, Clone)]
pub struct SteadyState {
    omega_mod: f64,
    omega_bar_d: f64,
    n_trunc: usize,
    coeffs: Vec<Complex64>,
}

impl SteadyState {
    pub fn eval(&self, t: f64) -> Complex64 {
        let n0 = self.n_trunc as i64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * Complex64::from_polar(1.0, -(self.omega_bar_d + (i as i64 - n0) as f64 * self.omega_mod) * t))
            .sum()
    }

    /// Fourier-Floquet coefficients, lowest harmonic first.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }
}

pub fn reconstruct_steady_state(sambe: &SambeMatrix, params: &ModelParams, drive: &DriveSpec) -> Result<SteadyState> {
    drive.validate(params.omega_mod)?;
    let g = green_function(sambe, drive.omega_bar_d)?;
    let eps = drive.amplitude * params.gamma().sqrt();
    let coeffs = g.column(drive.n_d)?.iter().map(|z| -I * eps * z).collect();
    Ok(SteadyState {
        omega_mod: params.omega_mod,
        omega_bar_d: drive.omega_bar_d,
        n_trunc: sambe.n_trunc(),
        coeffs,
    })
}

/// Microscopic couplings of the three-mode model: a beam splitter to a
/// lossy mode `b` with `g_b(t) = g_b0 cos(Omega t / 2)` and a parametric
/// coupling `g_c` to a lossy mode `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MicroParams {
    pub base: ModelParams,
    pub kappa_b: f64,
    pub kappa_c: f64,
    pub g_b0: f64,
    pub g_c: f64,
}

impl MicroParams {
    /// Couplings that reproduce the base model after eliminating `b` and `c`:
    /// `4 g_b(t)^2 / kappa_b = kappa(t)` and `4 g_c^2 / kappa_c = P`.
    pub fn from_effective(base: ModelParams, kappa_b: f64, kappa_c: f64) -> Result<Self> {
        if !(kappa_b > 0.0 && kappa_c > 0.0) {
            return Err(Error::InvalidParams("auxiliary decay rates must be positive".into()));
        }
        let om = base.omega_mod;
        Ok(MicroParams {
            base,
            kappa_b,
            kappa_c,
            g_b0: (base.eta_kappa * om * kappa_b / 2.0).sqrt(),
            g_c: (base.eta_p * om * kappa_c / 4.0).sqrt(),
        })
    }

    /// Peak of the effective decay, `4 g_b0^2 / kappa_b`.
    pub fn effective_kappa_peak(&self) -> f64 {
        4.0 * self.g_b0 * self.g_b0 / self.kappa_b
    }

    pub fn effective_pump(&self) -> f64 {
        4.0 * self.g_c * self.g_c / self.kappa_c
    }

    /// Message when an auxiliary mode is too slow for adiabatic elimination.
    pub fn adiabatic_warning(&self) -> Option<String> {
        let om = self.base.omega_mod;
        let slow: Vec<String> = [("kappa_b", self.kappa_b), ("kappa_c", self.kappa_c)]
            .into_iter()
            .filter(|(_, k)| *k / om < ADIABATIC_RATIO)
            .map(|(name, k)| format!("{name}/Omega = {:.3}", k / om))
            .collect();
        (!slow.is_empty()).then(|| format!("adiabatic elimination questionable: {}", slow.join(", ")))
    }
}

/// Integrates the coupled system for `(alpha, alpha_b, alpha_c*)`:
///
/// ```text
/// d alpha/dt    = -i omega0(t) alpha - gamma/2 alpha - g_b(t) alpha_b - i g_c alpha_c* + drive
/// d alpha_b/dt  = g_b(t) alpha - kappa_b/2 alpha_b
/// d alpha_c*/dt = i g_c alpha - kappa_c/2 alpha_c*
/// ```
pub fn integrate_three_mode(
    micro: &MicroParams,
    drive: &DriveSpec,
    initial: [Complex64; 3],
    times: &[f64],
    opts: &OdeOptions,
) -> Result<Trajectory> {
    check_times(times)?;
    let p = &micro.base;
    let source = drive_term(p, drive);
    let gamma = p.gamma();
    let om = p.omega_mod;
    let rhs = |t: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let (omega0, _) = time_signals(p, t);
        let g_b = micro.g_b0 * (0.5 * om * t).cos();
        dy[0] = y[0] * Complex64::new(-0.5 * gamma, -omega0) - y[1] * g_b - I * micro.g_c * y[2] + source(t);
        dy[1] = y[0] * g_b - y[1] * (0.5 * micro.kappa_b);
        dy[2] = I * micro.g_c * y[0] - y[2] * (0.5 * micro.kappa_c);
    };
    let amplitudes = integrate(rhs, 0.0, &initial, times, opts)?;
    Ok(Trajectory { times: times.to_vec(), amplitudes })
}

/// Start of the steady-state comparison window:
/// `10 / ((1 - beta) eta_kappa Omega)`, at least 20 periods. Infinite when
/// there is no decay toward a steady state.
pub fn transient_cutoff(params: &ModelParams) -> Result<f64> {
    let beta = params.beta()?;
    let rate = (1.0 - beta) * params.eta_kappa * params.omega_mod;
    if !(rate > 0.0) {
        return Ok(f64::INFINITY);
    }
    Ok((10.0 / rate).max(20.0 * params.period()))
}

/// `max |a - b| / max |b|`.
pub fn relative_sup_discrepancy(a: &[Complex64], reference: &[Complex64]) -> Result<f64> {
    if a.len() != reference.len() {
        return Err(Error::LengthMismatch(a.len(), reference.len()));
    }
    let diff = a.iter().zip(reference).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let scale = reference.iter().map(|y| y.norm()).fold(0.0, f64::max);
    Ok(if scale > 0.0 { diff / scale } else if diff == 0.0 { 0.0 } else { f64::INFINITY })
}

/// Photon-number trajectory and its period-averaged growth exponent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhotonNumber {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Slope of `ln n` per unit time for the source-free balance equation,
    /// fitted at whole periods over the second half of the run.
    pub growth_rate: f64,
    pub stable: bool,
    /// The trajectory exceeded [`PHOTON_CAP`] and stops early.
    pub diverged: bool,
}

/// Integrates `dn/dt = Omega [eta_kappa (beta - 1) - eta_kappa cos(Omega t)] n + Omega eta_p`
/// over `periods` modulation periods, sampling `samples_per_period` points
/// per period.
///
/// The growth exponent is read from the homogeneous part, integrated in
/// logarithmic form so it neither saturates at the pumped steady state nor
/// overflows on the unstable side.
pub fn photon_number_ode(
    params: &ModelParams,
    n_init: f64,
    periods: usize,
    samples_per_period: usize,
    opts: &OdeOptions,
) -> Result<PhotonNumber> {
    if !(n_init >= 0.0) {
        return Err(Error::InvalidArgument(format!("initial photon number must be nonnegative, got {n_init}")));
    }
    if periods < 2 || samples_per_period == 0 {
        return Err(Error::InvalidArgument("need at least two periods and one sample per period".into()));
    }
    let beta = params.beta()?;
    let om = params.omega_mod;
    let ek = params.eta_kappa;
    let rate = move |t: f64| om * (ek * (beta - 1.0) - ek * (om * t).cos());
    let source = om * params.eta_p;
    let period = params.period();

    let times = uniform_times(0.0, periods as f64 * period, periods * samples_per_period + 1);
    let mut values = Vec::with_capacity(times.len());
    let mut diverged = false;
    // period by period, so an overflow truncates the record cleanly
    let mut n = n_init;
    values.push(n);
    for k in 0..periods {
        let chunk = &times[k * samples_per_period..=(k + 1) * samples_per_period];
        let ys = integrate(
            |t, y, dy| dy[0] = y[0] * rate(t) + source,
            chunk[0],
            &[Complex64::new(n, 0.0)],
            &chunk[1..],
            opts,
        );
        let ys = match ys {
            Ok(ys) => ys,
            Err(Error::Divergence { .. }) => {
                diverged = true;
                break;
            }
            Err(e) => return Err(e),
        };
        let mut stop = false;
        for y in ys {
            let v = y[0].re;
            if !v.is_finite() || v > PHOTON_CAP {
                stop = true;
                break;
            }
            values.push(v);
        }
        if stop {
            diverged = true;
            break;
        }
        n = *values.last().unwrap();
    }
    let kept = values.len();

    let whole: Vec<f64> = (0..=periods).map(|k| k as f64 * period).collect();
    let logs = integrate(|t, _, dy| dy[0] = Complex64::new(rate(t), 0.0), 0.0, &[Complex64::new(0.0, 0.0)], &whole, opts)?;
    let first = periods / 2;
    let growth_rate = fit_slope(&whole[first..], &logs[first..].iter().map(|y| y[0].re).collect::<Vec<_>>());

    Ok(PhotonNumber {
        times: times[..kept].to_vec(),
        values,
        growth_rate,
        stable: beta < 1.0,
        diverged,
    })
}

fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
