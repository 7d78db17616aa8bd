//! Floquet-Green's function `G(omega_bar) = (omega_bar - H)^-1`, the doubled
//! Hermitian matrix and its singular triples.
//!
//! A quasi-zero singular value `E_0` separated by a gap from the rest of the
//! spectrum is the signature of topological amplification: `G` is then
//! dominated by the rank-one zero channel `v_0 u_0^dagger / E_0`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sambe::SambeMatrix;
use crate::tridiag::TridiagLu;

/// Condition numbers above this are reported as near-singular.
pub const NEAR_SINGULAR_COND: f64 = 1e14;

#[derive(Debug, Clone)]
pub struct GreenFunction {
    omega_bar: f64,
    n_trunc: usize,
    entries: DMatrix<Complex64>,
    cond: f64,
}

impl GreenFunction {
    pub fn omega_bar(&self) -> f64 {
        self.omega_bar
    }

    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.entries
    }

    /// 1-norm condition number of `omega_bar - H`.
    pub fn cond(&self) -> f64 {
        self.cond
    }

    /// `G[n][m]` by harmonic label.
    pub fn entry(&self, n: i64, m: i64) -> Complex64 {
        let off = self.n_trunc as i64;
        self.entries[((n + off) as usize, (m + off) as usize)]
    }

    /// Column of `G` belonging to input harmonic `m`.
    pub fn column(&self, m: i64) -> Result<DVector<Complex64>> {
        let idx = m + self.n_trunc as i64;
        if !(0..self.entries.ncols() as i64).contains(&idx) {
            return Err(Error::HarmonicOutOfRange { n: m, n_trunc: self.n_trunc });
        }
        Ok(self.entries.column(idx as usize).into_owned())
    }

    /// `max |(omega_bar - H) G - I|`.
    pub fn residual_max(&self, sambe: &SambeMatrix) -> f64 {
        let a = sambe.shifted_dense(self.omega_bar);
        let mut r = a * &self.entries;
        for i in 0..r.nrows() {
            r[(i, i)] -= 1.0;
        }
        r.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Position `(n, m)` and magnitude of the largest `|G[n][m]|`.
    pub fn argmax_abs(&self) -> (i64, i64, f64) {
        let off = self.n_trunc as i64;
        let mut best = (0, 0, -1.0);
        for j in 0..self.entries.ncols() {
            for i in 0..self.entries.nrows() {
                let a = self.entries[(i, j)].norm();
                if a > best.2 {
                    best = (i as i64 - off, j as i64 - off, a);
                }
            }
        }
        best
    }
}

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn shifted_bands(sambe: &SambeMatrix, omega_bar: f64) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
    let lower = sambe.lower().iter().map(|z| -z).collect();
    let diag = sambe.diag().iter().map(|z| omega_bar - z).collect();
    let upper = sambe.upper().iter().map(|z| -z).collect();
    (lower, diag, upper)
}

/// Solves `(omega_bar - H) G = I` column by column with the banded LU.
/// Fails with [`Error::NearSingular`] when the 1-norm condition number
/// exceeds [`NEAR_SINGULAR_COND`].
pub fn green_function(sambe: &SambeMatrix, omega_bar: f64) -> Result<GreenFunction> {
    green_function_with_limit(sambe, omega_bar, NEAR_SINGULAR_COND)
}

/// [`green_function`] with a caller-chosen condition-number ceiling.
pub fn green_function_with_limit(sambe: &SambeMatrix, omega_bar: f64, max_cond: f64) -> Result<GreenFunction> {
    let (lower, diag, upper) = shifted_bands(sambe, omega_bar);
    let lu = TridiagLu::factor(&lower, &diag, &upper)?;
    let d = sambe.dim();
    let mut g = DMatrix::zeros(d, d);
    let mut col = vec![Complex64::new(0.0, 0.0); d];
    for j in 0..d {
        col.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        col[j] = Complex64::new(1.0, 0.0);
        lu.solve_in_place(&mut col);
        g.column_mut(j).copy_from_slice(&col);
    }
    if g.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Singular);
    }
    let a_norm = (0..d)
        .map(|j| {
            let mut s = diag[j].norm();
            if j > 0 {
                s += upper[j - 1].norm();
            }
            if j + 1 < d {
                s += lower[j].norm();
            }
            s
        })
        .fold(0.0, f64::max);
    let cond = a_norm * one_norm(&g);
    if !(cond <= max_cond) {
        return Err(Error::NearSingular { cond });
    }
    Ok(GreenFunction {
        omega_bar,
        n_trunc: sambe.n_trunc(),
        entries: g,
        cond,
    })
}

/// Block matrix `[[0, omega_bar - H], [(omega_bar - H)^dagger, 0]]`.
pub fn doubled_matrix(sambe: &SambeMatrix, omega_bar: f64) -> DMatrix<Complex64> {
    let a = sambe.shifted_dense(omega_bar);
    let d = a.nrows();
    let mut h = DMatrix::zeros(2 * d, 2 * d);
    h.view_mut((0, d), (d, d)).copy_from(&a);
    h.view_mut((d, 0), (d, d)).copy_from(&a.adjoint());
    h
}

/// Chiral operator `diag(+1, ..., -1, ...)` of the doubled space.
pub fn chiral_operator(dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(2 * dim, 2 * dim, |i, j| {
        if i != j {
            Complex64::new(0.0, 0.0)
        } else if i < dim {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(-1.0, 0.0)
        }
    })
}

/// Singular value `E` with unit vectors satisfying
/// `(omega_bar - H) v = E u` and `(omega_bar - H)^dagger u = E v`,
/// so that `G = sum_l v_l u_l^dagger / E_l`.
///
/// `u` is the input profile across harmonics and `v` the emitted one. The
/// largest-magnitude component of `u` is real and positive.
#[derive(Debug, Clone)]
pub struct SingularTriple {
    pub value: f64,
    pub u: DVector<Complex64>,
    pub v: DVector<Complex64>,
}

/// The `count` smallest singular triples, ascending, from the eigensystem of
/// the doubled Hermitian matrix.
pub fn singular_triples(sambe: &SambeMatrix, omega_bar: f64, count: usize) -> Result<Vec<SingularTriple>> {
    let d = sambe.dim();
    if count > d {
        return Err(Error::InvalidArgument(format!(
            "requested {count} singular triples from a {d}-dimensional matrix"
        )));
    }
    let a = sambe.shifted_dense(omega_bar);
    let eig = doubled_matrix(sambe, omega_bar).symmetric_eigen();
    let mut order: Vec<usize> = (0..2 * d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let mut out = Vec::with_capacity(count);
    for l in 0..count {
        let ip = order[d + l];
        let im = order[d - 1 - l];
        let value = 0.5 * (eig.eigenvalues[ip] - eig.eigenvalues[im]).max(0.0);
        let wp = eig.eigenvectors.column(ip);
        let wm = eig.eigenvectors.column(im);
        // Near E = 0 the two chiral partners mix, but within the pair the top
        // block stays parallel to u and the bottom block to v.
        let top = |w: &nalgebra::DVectorView<'_, Complex64>| w.rows(0, d).into_owned();
        let bottom = |w: &nalgebra::DVectorView<'_, Complex64>| w.rows(d, d).into_owned();
        let (tp, tm) = (top(&wp), top(&wm));
        let mut u = if tp.norm() >= tm.norm() { tp } else { tm };
        let (bp, bm) = (bottom(&wp), bottom(&wm));
        let mut v = if bp.norm() >= bm.norm() { bp } else { bm };
        u /= Complex64::new(u.norm(), 0.0);
        v /= Complex64::new(v.norm(), 0.0);

        // Relative phase from u^dagger A v = E > 0.
        let z = u.dotc(&(&a * &v));
        if z.norm() > 0.0 {
            v *= z.conj() / z.norm();
        }
        let pivot = u.iter().copied().max_by(|x, y| x.norm().total_cmp(&y.norm())).unwrap();
        let phase = pivot.conj() / pivot.norm();
        u *= phase;
        v *= phase;
        out.push(SingularTriple { value, u, v });
    }
    Ok(out)
}

/// Rebuilds `sum_l v_l u_l^dagger / E_l` from a set of triples.
pub fn reconstruct_from_triples(triples: &[SingularTriple]) -> DMatrix<Complex64> {
    let d = triples.first().map_or(0, |t| t.u.len());
    let mut g = DMatrix::zeros(d, d);
    for t in triples {
        g += (&t.v * t.u.adjoint()) / Complex64::new(t.value, 0.0);
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::sambe::build_sambe;
    use std::f64::consts::PI;

    fn params(eta_omega: f64, eta_kappa: f64, eta_gamma: f64, eta_p: f64, phi: f64) -> ModelParams {
        ModelParams { eta_omega, eta_kappa, eta_gamma, eta_p, phi, omega_mod: 2.0 * PI }
    }

    #[test]
    fn diagonal_limit_is_lorentzian_ladder() {
        let p = params(0.0, 0.0, 5.0, 5.0, 0.0);
        let h = build_sambe(&p, 3).unwrap();
        let om = p.omega_mod;
        let g = green_function(&h, om / 2.0).unwrap();
        assert!((g.entry(0, 0) - Complex64::new(2.0 / om, 0.0)).norm() < 1e-14);
        for n in -3..=3i64 {
            for m in -3..=3i64 {
                let expect = if n == m { 1.0 / (om / 2.0 + n as f64 * om) } else { 0.0 };
                assert!((g.entry(n, m) - Complex64::new(expect, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn small_system_matches_dense_inverse() {
        let p = params(1.3, 0.7, 2.0, 1.1, 0.4);
        let h = build_sambe(&p, 2).unwrap();
        let g = green_function(&h, 0.9).unwrap();
        let dense = h.shifted_dense(0.9).try_inverse().unwrap();
        for (a, b) in g.matrix().iter().zip(dense.iter()) {
            assert!((a - b).norm() < 1e-12 * (1.0 + b.norm()));
        }
        assert!(g.residual_max(&h) < 1e-12);
    }

    #[test]
    fn exact_pole_is_singular() {
        // Diagonal ladder with no gain/loss has real poles at -n * omega.
        let p = params(0.0, 0.0, 1.0, 1.0, 0.0);
        let h = build_sambe(&p, 2).unwrap();
        assert_eq!(green_function(&h, 0.0).unwrap_err(), Error::Singular);
        let err = green_function(&h, 1e-17).unwrap_err();
        assert!(matches!(err, Error::NearSingular { .. } | Error::Singular));
    }

    #[test]
    fn doubled_matrix_is_hermitian_and_chiral() {
        let p = params(3.0, 2.0, 1.5, 2.5, 0.8);
        let h = build_sambe(&p, 4).unwrap();
        let big = doubled_matrix(&h, 1.7);
        assert_eq!(big, big.adjoint());
        let s = chiral_operator(h.dim());
        let anti = &s * &big * &s + &big;
        assert!(anti.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn uncoupled_singular_values_are_detunings() {
        let p = params(0.0, 0.0, 2.0, 2.0, 0.0);
        let h = build_sambe(&p, 3).unwrap();
        let om = p.omega_mod;
        let wb = 0.3 * om;
        let triples = singular_triples(&h, wb, 7).unwrap();
        let mut expect: Vec<f64> = (-3..=3).map(|n| (wb + n as f64 * om).abs()).collect();
        expect.sort_by(f64::total_cmp);
        for (t, e) in triples.iter().zip(&expect) {
            assert!((t.value - e).abs() < 1e-12);
            // coordinate vectors
            let big = t.u.iter().filter(|z| z.norm() > 1e-9).count();
            assert_eq!(big, 1);
            assert!((t.u.iter().map(|z| z.re).sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn triples_satisfy_svd_relations() {
        let p = params(2.0, 3.0, 2.0, 3.5, PI / 2.0);
        let h = build_sambe(&p, 6).unwrap();
        let wb = 0.4;
        let a = h.shifted_dense(wb);
        let triples = singular_triples(&h, wb, h.dim()).unwrap();
        for t in &triples {
            let av = &a * &t.v - &t.u * Complex64::new(t.value, 0.0);
            let ahu = a.adjoint() * &t.u - &t.v * Complex64::new(t.value, 0.0);
            assert!(av.norm() < 1e-10 * a.norm() && ahu.norm() < 1e-10 * a.norm());
            assert!((t.u.norm() - 1.0).abs() < 1e-12 && (t.v.norm() - 1.0).abs() < 1e-12);
        }
        // cross-check against a direct SVD
        let mut direct: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
        direct.sort_by(f64::total_cmp);
        for (t, s) in triples.iter().zip(&direct) {
            assert!((t.value - s).abs() < 1e-10 * direct.last().unwrap());
        }
        let g = green_function(&h, wb).unwrap();
        let rebuilt = reconstruct_from_triples(&triples);
        assert!((rebuilt - g.matrix()).norm() < 1e-8 * g.matrix().norm());
    }

    #[test]
    fn phase_convention_pins_u_pivot() {
        let p = params(2.0, 3.0, 2.0, 3.5, 0.3);
        let h = build_sambe(&p, 5).unwrap();
        for t in singular_triples(&h, 1.0, 4).unwrap() {
            let pivot = t.u.iter().max_by(|x, y| x.norm().total_cmp(&y.norm())).unwrap();
            assert!(pivot.im.abs() < 1e-12 && pivot.re > 0.0);
        }
    }

    #[test]
    fn too_many_triples_rejected() {
        let h = build_sambe(&params(1.0, 1.0, 1.0, 1.0, 0.0), 1).unwrap();
        assert!(singular_triples(&h, 0.0, 4).is_err());
    }
}
