//! Local (frozen-n) winding number of the Bloch symbol and the resulting
//! topological frequency-conversion window.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::sambe::bloch_symbol;

pub const DEFAULT_K_POINTS: usize = 2048;
pub const MIN_K_POINTS: usize = 64;

/// `|h(k)| / omega_mod` below this counts as a gap closing.
const GAP_TOL: f64 = 1e-12;
/// Relative tolerance of the closed-form ellipse test.
const ELLIPSE_TOL: f64 = 1e-12;
/// Largest phase step accepted before a k-interval is bisected.
const MAX_PHASE_STEP: f64 = PI / 4.0;
const MAX_BISECTIONS: u32 = 40;

/// Winding number of one `(n, omega_bar)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LocalWinding {
    Index(i32),
    /// The gap closes (to tolerance); the invariant is undefined.
    Boundary,
}

impl LocalWinding {
    pub fn index(self) -> Option<i32> {
        match self {
            LocalWinding::Index(v) => Some(v),
            LocalWinding::Boundary => None,
        }
    }

    pub fn is_nontrivial(self) -> bool {
        matches!(self, LocalWinding::Index(v) if v != 0)
    }
}

/// Per-harmonic winding numbers at one reduced frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindingMap {
    pub omega_bar: f64,
    pub n_trunc: usize,
    pub values: Vec<LocalWinding>,
}

impl WindingMap {
    pub fn harmonics(&self) -> impl Iterator<Item = i64> + '_ {
        let n = self.n_trunc as i64;
        -n..=n
    }

    pub fn at(&self, n: i64) -> Option<LocalWinding> {
        let idx = n + self.n_trunc as i64;
        self.values.get(usize::try_from(idx).ok()?).copied()
    }

    /// Smallest and largest harmonic with nonzero winding.
    pub fn nontrivial_extent(&self) -> Option<(i64, i64)> {
        let mut hits = self
            .harmonics()
            .zip(&self.values)
            .filter(|(_, w)| w.is_nontrivial())
            .map(|(n, _)| n);
        let first = hits.next()?;
        let last = hits.last().unwrap_or(first);
        Some((first, last))
    }
}

/// Principal-value phase step from `a` to `b`.
fn phase_step(a: Complex64, b: Complex64) -> f64 {
    (b * a.conj()).arg()
}

/// Counts how often the Bloch vector `r(k) = (Re h, -Im h)` encircles the
/// origin as `k` runs over the Brillouin zone. Equivalent to the chiral
/// trace formula `oint dk/(4 pi i) Tr[S H^-1 dH]`, which equals minus the
/// winding of `h` itself.
///
/// Phase increments are accumulated on a uniform grid of `k_points`; an
/// interval whose increment exceeds `pi/4` is bisected until resolved.
pub fn winding_numeric(params: &ModelParams, n: i64, omega_bar: f64, k_points: usize) -> Result<i32> {
    if k_points < MIN_K_POINTS {
        return Err(Error::InvalidArgument(format!(
            "k_points must be at least {MIN_K_POINTS}, got {k_points}"
        )));
    }
    let floor = GAP_TOL * params.omega_mod;
    let sym = |k: f64| -> Result<Complex64> {
        let h = bloch_symbol(params, n, omega_bar, k);
        if h.norm() < floor {
            Err(Error::OnBoundary { n, omega_bar })
        } else {
            Ok(h)
        }
    };
    let dk = 2.0 * PI / k_points as f64;
    let mut total = 0.0;
    let mut k_prev = -PI;
    let mut h_prev = sym(k_prev)?;
    let h_first = h_prev;
    for j in 1..=k_points {
        let k = -PI + j as f64 * dk;
        let h = if j == k_points { h_first } else { sym(k)? };
        total += resolved_step(&sym, k_prev, h_prev, k, h, 0)?;
        k_prev = k;
        h_prev = h;
    }
    let winding_of_h = (total / (2.0 * PI)).round() as i32;
    Ok(-winding_of_h)
}

fn resolved_step(
    sym: &impl Fn(f64) -> Result<Complex64>,
    ka: f64,
    ha: Complex64,
    kb: f64,
    hb: Complex64,
    depth: u32,
) -> Result<f64> {
    let step = phase_step(ha, hb);
    if step.abs() <= MAX_PHASE_STEP || depth >= MAX_BISECTIONS {
        return Ok(step);
    }
    let km = 0.5 * (ka + kb);
    let hm = sym(km)?;
    Ok(resolved_step(sym, ka, ha, km, hm, depth + 1)? + resolved_step(sym, km, hm, kb, hb, depth + 1)?)
}

fn is_maximally_nonreciprocal(phi: f64) -> bool {
    phi.cos().abs() < 1e-12
}

/// Closed-form winding at `phi = +-pi/2`: `sgn(sin phi)` inside the ellipse
/// `(omega_bar/Omega + n)^2 < (2 eta_omega)^2 beta (2 - beta)`, zero outside.
pub fn winding_analytic(params: &ModelParams, n: i64, omega_bar: f64) -> Result<LocalWinding> {
    if !is_maximally_nonreciprocal(params.phi) {
        return Err(Error::UnsupportedPhase(params.phi));
    }
    let sign = params.phi.sin().signum() as i32;
    let offset = omega_bar / params.omega_mod + n as f64;
    if params.eta_kappa == 0.0 {
        // The ellipse flattens into a segment; it can only touch the origin.
        let touches = params.eta_p == params.eta_gamma && offset.abs() <= 2.0 * params.eta_omega;
        return Ok(if touches { LocalWinding::Boundary } else { LocalWinding::Index(0) });
    }
    let beta = params.beta()?;
    let lhs = offset * offset;
    let rhs = (2.0 * params.eta_omega).powi(2) * beta * (2.0 - beta);
    let scale = lhs.abs().max(rhs.abs()).max(1.0);
    if (lhs - rhs).abs() <= ELLIPSE_TOL * scale {
        Ok(LocalWinding::Boundary)
    } else if lhs < rhs {
        Ok(LocalWinding::Index(sign))
    } else {
        Ok(LocalWinding::Index(0))
    }
}

/// Winding numbers for all harmonics in `[-n_trunc, n_trunc]`. The closed
/// form is used at `phi = +-pi/2`, the numeric contour otherwise.
pub fn winding_map(params: &ModelParams, omega_bar: f64, n_trunc: usize, k_points: usize) -> Result<WindingMap> {
    let analytic = is_maximally_nonreciprocal(params.phi);
    if !analytic && k_points < MIN_K_POINTS {
        return Err(Error::InvalidArgument(format!(
            "k_points must be at least {MIN_K_POINTS}, got {k_points}"
        )));
    }
    let nt = n_trunc as i64;
    let values = (-nt..=nt)
        .into_par_iter()
        .map(|n| {
            if analytic {
                winding_analytic(params, n, omega_bar)
            } else {
                match winding_numeric(params, n, omega_bar, k_points) {
                    Ok(v) => Ok(LocalWinding::Index(v)),
                    Err(Error::OnBoundary { .. }) => Ok(LocalWinding::Boundary),
                    Err(e) => Err(e),
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WindingMap { omega_bar, n_trunc, values })
}

/// Real-valued window `[-omega_bar/Omega - n0, -omega_bar/Omega + n0]` with
/// `n0 = 2 eta_omega sqrt(beta (2 - beta))`, present only for `0 < beta < 2`.
pub fn topo_window(params: &ModelParams, omega_bar: f64) -> Option<(f64, f64)> {
    let beta = params.beta().ok()?;
    if !(beta > 0.0 && beta < 2.0) {
        return None;
    }
    let half = 2.0 * params.eta_omega * (beta * (2.0 - beta)).sqrt();
    let center = -omega_bar / params.omega_mod;
    Some((center - half, center + half))
}
