//! Adaptive Dormand-Prince 5(4) integrator for complex linear systems, with
//! PI step control and 4th-order dense output.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_RTOL: f64 = 1e-9;
pub const DEFAULT_ATOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; estimated from the right-hand side when absent.
    pub h_init: Option<f64>,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: DEFAULT_RTOL, atol: DEFAULT_ATOL, h_init: None, max_steps: 50_000_000 }
    }
}

impl OdeOptions {
    pub fn with_rtol(rtol: f64) -> Self {
        OdeOptions { rtol, ..Default::default() }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const PI_BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

fn axpy(out: &mut [Complex64], y: &[Complex64], h: f64, terms: &[(f64, &[Complex64])]) {
    for i in 0..out.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (c, k) in terms {
            acc += k[i] * *c;
        }
        out[i] = y[i] + acc * h;
    }
}

/// Integrates `dy/dt = f(t, y)` from `t0` and returns the state at each of
/// the sorted `sample_times` (all `>= t0`).
pub fn integrate<F>(f: F, t0: f64, y0: &[Complex64], sample_times: &[f64], opts: &OdeOptions) -> Result<Vec<Vec<Complex64>>>
where
    F: Fn(f64, &[Complex64], &mut [Complex64]),
{
    if sample_times.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidArgument("sample times must be sorted".into()));
    }
    if sample_times.first().is_some_and(|&t| t < t0) {
        return Err(Error::InvalidArgument("sample times must not precede the start time".into()));
    }
    if !(opts.rtol > 0.0 && opts.atol >= 0.0) {
        return Err(Error::InvalidArgument("tolerances must be positive".into()));
    }
    let n = y0.len();
    let mut out = Vec::with_capacity(sample_times.len());
    let mut next = 0;
    while next < sample_times.len() && sample_times[next] == t0 {
        out.push(y0.to_vec());
        next += 1;
    }
    let Some(&t_end) = sample_times.last() else {
        return Ok(out);
    };
    if next == sample_times.len() {
        return Ok(out);
    }

    let zero = Complex64::new(0.0, 0.0);
    let mut y = y0.to_vec();
    let mut k: [Vec<Complex64>; 7] = std::array::from_fn(|_| vec![zero; n]);
    let mut ytmp = vec![zero; n];
    let mut ynew = vec![zero; n];
    let mut t = t0;
    f(t, &y, &mut k[0]);

    let scale = |a: Complex64, b: Complex64| opts.atol + opts.rtol * a.norm().max(b.norm());
    let mut h = match opts.h_init {
        Some(h) => h,
        None => {
            let d0 = (y.iter().map(|z| (z.norm() / scale(*z, *z)).powi(2)).sum::<f64>() / n.max(1) as f64).sqrt();
            let d1 = (y.iter().zip(&k[0]).map(|(z, dz)| (dz.norm() / scale(*z, *z)).powi(2)).sum::<f64>()
                / n.max(1) as f64)
                .sqrt();
            let guess = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            guess.min(t_end - t0)
        }
    };
    let mut err_old: f64 = 1e-4;
    let mut steps = 0usize;

    while next < sample_times.len() {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::Divergence { t_last: t });
        }
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Divergence { t_last: t });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let [k1, k2, k3, k4, k5, k6, k7] = &mut k;
        axpy(&mut ytmp, &y, h, &[(A21, k1)]);
        f(t + C2 * h, &ytmp, k2);
        axpy(&mut ytmp, &y, h, &[(A31, k1), (A32, k2)]);
        f(t + C3 * h, &ytmp, k3);
        axpy(&mut ytmp, &y, h, &[(A41, k1), (A42, k2), (A43, k3)]);
        f(t + C4 * h, &ytmp, k4);
        axpy(&mut ytmp, &y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]);
        f(t + C5 * h, &ytmp, k5);
        axpy(&mut ytmp, &y, h, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]);
        let t_new = if last { t_end } else { t + h };
        f(t_new, &ytmp, k6);
        axpy(&mut ynew, &y, h, &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)]);
        f(t_new, &ynew, k7);

        let mut err = 0.0;
        for i in 0..n {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            err += (e.norm() / scale(y[i], ynew[i])).powi(2);
        }
        let err = (err / n.max(1) as f64).sqrt();
        if !err.is_finite() || ynew.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            if !y.iter().all(|z| z.re.is_finite() && z.im.is_finite()) || h < 1e-300 {
                return Err(Error::Divergence { t_last: t });
            }
            h *= FAC_MIN;
            continue;
        }

        if err <= 1.0 {
            // dense output over [t, t_new]
            while next < sample_times.len() && sample_times[next] <= t_new {
                let theta = ((sample_times[next] - t) / h).clamp(0.0, 1.0);
                let th1 = 1.0 - theta;
                let sample = (0..n)
                    .map(|i| {
                        let r2 = ynew[i] - y[i];
                        let r3 = k1[i] * h - r2;
                        let r4 = r2 - k7[i] * h - r3;
                        let r5 = (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6 + k7[i] * D7) * h;
                        y[i] + (r2 + (r3 + (r4 + r5 * th1) * theta) * th1) * theta
                    })
                    .collect();
                out.push(sample);
                next += 1;
            }
            std::mem::swap(&mut y, &mut ynew);
            std::mem::swap(k1, k7);
            t = t_new;
            let fac = (err.max(1e-10).powf(0.2 - PI_BETA * 0.75) / err_old.powf(PI_BETA) / SAFETY)
                .clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            h /= fac;
            err_old = err.max(1e-4);
        } else {
            let fac = (err.powf(0.2) / SAFETY).min(1.0 / FAC_MIN);
            h /= fac;
        }
    }
    Ok(out)
}
