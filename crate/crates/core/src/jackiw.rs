//! Continuum (Jackiw-Rebbi) description of the zero singular channel.
//!
//! Linearizing the doubled Bloch Hamiltonian around its two Dirac points
//! `(k, n) = (+k0, -n0)` and `(-k0, +n0)` gives a Dirac equation whose mass
//! changes sign across the window edge. Each point binds one normalizable
//! Gaussian zero mode: the left one lives on the input (`u`) sublattice, the
//! right one on the output (`v`) sublattice.

use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Centered at `-n0`, input sublattice.
    Left,
    /// Centered at `+n0`, output sublattice.
    Right,
}

impl Side {
    /// Soliton center in units of harmonics.
    pub fn center(self, n0: f64) -> f64 {
        match self {
            Side::Left => -n0,
            Side::Right => n0,
        }
    }

    /// Momentum of the Dirac point the soliton is expanded around.
    pub fn momentum(self, k0: f64) -> f64 {
        match self {
            Side::Left => k0,
            Side::Right => -k0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolitonPrediction {
    pub side: Side,
    pub k0: f64,
    pub n0: f64,
    /// `A = 2 eta_omega (beta - 1)`
    pub a_velocity: f64,
    /// `B = (eta_kappa / 2) sqrt(beta (2 - beta))`
    pub b_velocity: f64,
    /// `(A^2 + B^2) / |B|`
    pub sigma_r_sq: f64,
    /// `(A^2 + B^2) / A`, signed; infinite at `beta = 1`.
    pub sigma_i_sq: f64,
}

impl SolitonPrediction {
    /// `1 / sigma_i^2 = A / (A^2 + B^2)`; exactly zero at `beta = 1`.
    pub fn inv_sigma_i_sq(&self) -> f64 {
        let (a, b) = (self.a_velocity, self.b_velocity);
        a / (a * a + b * b)
    }

    pub fn center(&self) -> f64 {
        self.side.center(self.n0)
    }

    /// Envelope (without Bloch factor) at harmonic `n`, unnormalized.
    pub fn envelope(&self, n: f64) -> Complex64 {
        let x = n - self.center();
        let x2 = x * x;
        Complex64::from_polar(
            (-x2 / (2.0 * self.sigma_r_sq)).exp(),
            -x2 * self.inv_sigma_i_sq() / 2.0,
        )
    }
}

fn beta_in_window(params: &ModelParams) -> Result<f64> {
    let beta = params.beta()?;
    if beta > 0.0 && beta < 2.0 {
        Ok(beta)
    } else {
        Err(Error::NoDiracPoints(beta))
    }
}

/// `k0 = |arccos(beta - 1)|`, `n0 = |2 eta_omega sin k0|`.
pub fn dirac_points(params: &ModelParams) -> Result<(f64, f64)> {
    let beta = beta_in_window(params)?;
    let k0 = (beta - 1.0).acos().abs();
    let n0 = (2.0 * params.eta_omega * (beta * (2.0 - beta)).sqrt()).abs();
    Ok((k0, n0))
}

/// Dirac point, velocities and Gaussian widths for one side.
pub fn predict(params: &ModelParams, side: Side) -> Result<SolitonPrediction> {
    let beta = beta_in_window(params)?;
    let (k0, n0) = dirac_points(params)?;
    let a = 2.0 * params.eta_omega * (beta - 1.0);
    let b = params.eta_kappa / 2.0 * (beta * (2.0 - beta)).sqrt();
    let speed_sq = a * a + b * b;
    Ok(SolitonPrediction {
        side,
        k0,
        n0,
        a_velocity: a,
        b_velocity: b,
        sigma_r_sq: speed_sq / b.abs(),
        sigma_i_sq: if a == 0.0 { f64::INFINITY } else { speed_sq / a },
    })
}

/// `(1/sigma_r^2, 1/sigma_i^2)` written in terms of `r = eta_kappa / eta_omega`.
/// Independent route to the same widths as [`predict`].
pub fn inverse_widths_from_ratio(beta: f64, eta_omega: f64, r: f64) -> (f64, f64) {
    let w = beta * (2.0 - beta);
    let denom = 4.0 * (beta - 1.0).powi(2) + r * r / 4.0 * w;
    let inv_r = r / (2.0 * eta_omega) * w.sqrt() / denom;
    let inv_i = 2.0 * (beta - 1.0) / (eta_omega * denom);
    (inv_r, inv_i)
}

/// Unit-norm soliton sampled on `grid`. With `bloch` set, the fast factor
/// `exp(i k n)` of the expansion point (`+k0` left, `-k0` right) is included.
pub fn soliton_profile(
    params: &ModelParams,
    side: Side,
    grid: RangeInclusive<i64>,
    bloch: bool,
) -> Result<Vec<Complex64>> {
    let pred = predict(params, side)?;
    let k = side.momentum(pred.k0);
    let mut out: Vec<Complex64> = grid
        .map(|n| {
            let env = pred.envelope(n as f64);
            if bloch {
                env * Complex64::from_polar(1.0, k * n as f64)
            } else {
                env
            }
        })
        .collect();
    normalize(&mut out);
    Ok(out)
}

fn normalize(v: &mut [Complex64]) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|z| *z /= norm);
    }
}

/// `|<a, b>|^2` for unit vectors; insensitive to global phase.
pub fn fidelity(numeric: &[Complex64], analytic: &[Complex64]) -> Result<f64> {
    if numeric.len() != analytic.len() {
        return Err(Error::LengthMismatch(numeric.len(), analytic.len()));
    }
    let overlap: Complex64 = numeric.iter().zip(analytic).map(|(a, b)| a.conj() * b).sum();
    Ok(overlap.norm_sqr().min(1.0))
}

/// Best agreement between a numerical singular vector and the prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct SolitonMatch {
    pub fidelity: f64,
    /// Momentum of the Bloch factor that won: `0`, `+k0` or `-k0`.
    pub momentum: f64,
    /// The winning prediction, unit norm, rotated onto the numerical
    /// vector's global phase.
    pub profile: Vec<Complex64>,
}

/// Compares `numeric` against the predicted envelope dressed with no Bloch
/// factor, `exp(+i k0 n)` and `exp(-i k0 n)`, and keeps the best.
pub fn soliton_match(
    numeric: &[Complex64],
    params: &ModelParams,
    side: Side,
    grid: RangeInclusive<i64>,
) -> Result<SolitonMatch> {
    let pred = predict(params, side)?;
    let envelope = soliton_profile(params, side, grid.clone(), false)?;
    let mut best: Option<SolitonMatch> = None;
    for k in [0.0, pred.k0, -pred.k0] {
        let dressed: Vec<Complex64> = grid
            .clone()
            .zip(&envelope)
            .map(|(n, e)| e * Complex64::from_polar(1.0, k * n as f64))
            .collect();
        let f = fidelity(numeric, &dressed)?;
        if best.as_ref().is_none_or(|b| f > b.fidelity) {
            best = Some(SolitonMatch { fidelity: f, momentum: k, profile: dressed });
        }
    }
    let mut best = best.expect("three candidates");
    let overlap: Complex64 = best.profile.iter().zip(numeric).map(|(a, b)| a.conj() * b).sum();
    if overlap.norm() > 0.0 {
        let phase = overlap / overlap.norm();
        best.profile.iter_mut().for_each(|z| *z *= phase);
    }
    Ok(best)
}

/// Fidelity of a numerical singular vector against the predicted soliton,
/// maximized over the Bloch factor: none, `exp(+i k0 n)` or `exp(-i k0 n)`.
pub fn soliton_fidelity(
    numeric: &[Complex64],
    params: &ModelParams,
    side: Side,
    grid: RangeInclusive<i64>,
) -> Result<f64> {
    Ok(soliton_match(numeric, params, side, grid)?.fidelity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn soliton_family(s: f64, beta: f64) -> ModelParams {
        ModelParams {
            eta_omega: 10.0,
            eta_kappa: 10.0 * s,
            eta_gamma: 10.0 * s,
            eta_p: 10.0 * s * (1.0 + beta),
            phi: PI / 2.0,
            omega_mod: 2.0 * PI,
        }
    }

    #[test]
    fn ideal_point_is_real_gaussian() {
        let p = soliton_family(3.0, 1.0);
        let (k0, n0) = dirac_points(&p).unwrap();
        assert!((k0 - PI / 2.0).abs() < 1e-15);
        assert!((n0 - 20.0).abs() < 1e-12);
        let pred = predict(&p, Side::Right).unwrap();
        assert!((pred.sigma_r_sq.sqrt() - 15f64.sqrt()).abs() < 1e-12);
        assert_eq!(pred.inv_sigma_i_sq(), 0.0);
        assert!(pred.sigma_i_sq.is_infinite());
        let prof = soliton_profile(&p, Side::Right, -40..=40, false).unwrap();
        assert!(prof.iter().all(|z| z.im.abs() < 1e-15 && z.re >= 0.0));
    }

    #[test]
    fn window_edge_examples() {
        let (_, n0) = dirac_points(&soliton_family(3.0, 0.95)).unwrap();
        assert!((n0 - 19.974984355438178).abs() < 1e-12);
        let (_, n0) = dirac_points(&soliton_family(1.0, 1e-9)).unwrap();
        assert!(n0 < 1e-3);
        assert_eq!(dirac_points(&soliton_family(1.0, 2.5)), Err(Error::NoDiracPoints(2.5)));
        assert!(matches!(dirac_points(&soliton_family(1.0, 0.0)), Err(Error::NoDiracPoints(_))));
    }

    #[test]
    fn dirac_invariants() {
        for beta in [0.1, 0.7, 1.3, 1.9] {
            let p = soliton_family(2.0, beta);
            let pred = predict(&p, Side::Left).unwrap();
            assert!((pred.k0.cos() - (beta - 1.0)).abs() < 1e-12);
            assert!((pred.n0 - (2.0 * p.eta_omega * pred.k0.sin()).abs()).abs() < 1e-12);
            assert!(pred.sigma_r_sq > 0.0);
            assert_eq!(pred.sigma_i_sq.signum(), (beta - 1.0).signum());
        }
    }

    #[test]
    fn profiles_are_normalized() {
        let p = soliton_family(1.0, 0.6);
        for side in [Side::Left, Side::Right] {
            for bloch in [false, true] {
                let v = soliton_profile(&p, side, -12..=31, bloch).unwrap();
                let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                assert!((norm - 1.0).abs() < 1e-14);
            }
        }
        assert!(soliton_profile(&soliton_family(1.0, 2.5), Side::Left, 0..=3, false).is_err());
    }

    #[test]
    fn fidelity_limits() {
        let a = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let rotated: Vec<_> = a.iter().map(|z| z * Complex64::from_polar(1.0, 1.2)).collect();
        assert!((fidelity(&a, &rotated).unwrap() - 1.0).abs() < 1e-15);
        let e0 = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let e1 = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        assert_eq!(fidelity(&e0, &e1).unwrap(), 0.0);
        assert_eq!(fidelity(&e0, &a[..1]), Err(Error::LengthMismatch(2, 1)));
    }

    #[test]
    fn left_profile_solves_first_order_equation() {
        // (n + n0) u - (iA - B) du/dn = 0, central differences; the residual
        // relative to |u| shrinks as the soliton widens.
        let mut last = f64::INFINITY;
        for s in [1.0, 4.0, 16.0] {
            let p = soliton_family(s, 0.8);
            let pred = predict(&p, Side::Left).unwrap();
            let coef = Complex64::new(-pred.b_velocity, pred.a_velocity);
            let mut worst: f64 = 0.0;
            let sr = pred.sigma_r_sq.sqrt();
            let mut x = -pred.n0 - 3.0 * sr;
            while x <= -pred.n0 + 3.0 * sr {
                let d = (pred.envelope(x + 1.0) - pred.envelope(x - 1.0)) / 2.0;
                let r = (x + pred.n0) * pred.envelope(x) - coef * d;
                worst = worst.max(r.norm() / pred.envelope(-pred.n0).norm());
                x += 0.5;
            }
            assert!(worst < last, "residual did not shrink at s={s}");
            last = worst;
        }
        assert!(last < 0.05);
    }

    #[test]
    fn ratio_form_matches_velocity_form() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let beta: f64 = rng.gen_range(0.01..1.99);
            let eta_omega: f64 = rng.gen_range(0.5..20.0);
            let r: f64 = rng.gen_range(0.1..10.0);
            let p = ModelParams {
                eta_omega,
                eta_kappa: r * eta_omega,
                eta_gamma: 1.0,
                eta_p: 1.0 + beta * r * eta_omega,
                phi: PI / 2.0,
                omega_mod: 1.0,
            };
            let pred = predict(&p, Side::Right).unwrap();
            let beta_p = p.beta().unwrap();
            let (inv_r, inv_i) = inverse_widths_from_ratio(beta_p, eta_omega, r);
            assert!((inv_r * pred.sigma_r_sq - 1.0).abs() < 1e-12);
            assert!((inv_i - pred.inv_sigma_i_sq()).abs() <= 1e-12 * inv_i.abs().max(1e-300));
        }
    }
}
