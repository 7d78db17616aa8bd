use std::f64::consts::PI;

use floquet_amp::topology::{winding_analytic, winding_map, winding_numeric, LocalWinding};
use floquet_amp::jackiw::dirac_points;
use floquet_amp::topology::topo_window;
use floquet_amp::ModelParams;
use proptest::prelude::*;

prop_compose! {
    fn extremal(phi_sign: f64)(
        beta in 0.02..1.98f64,
        eta_omega in 1.0..20.0f64,
        eta_kappa in 1.0..40.0f64,
        eta_gamma in 0.0..40.0f64,
    ) -> ModelParams {
        ModelParams { eta_omega, eta_kappa, eta_gamma, eta_p: eta_gamma + beta * eta_kappa, phi: phi_sign * PI / 2.0, omega_mod: 2.0 * PI }
    }
}

fn far_from_boundary(p: &ModelParams, n: i64, omega_bar: f64) -> bool {
    let beta = p.beta().unwrap();
    let radius = 2.0 * p.eta_omega * (beta * (2.0 - beta)).sqrt();
    ((omega_bar / p.omega_mod + n as f64).abs() - radius).abs() > 1e-3
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn phase_flip_negates_winding(p in extremal(1.0), n in -45i64..45, w in 0.0..1.0f64) {
        let omega_bar = w * p.omega_mod;
        prop_assume!(far_from_boundary(&p, n, omega_bar));
        let up = winding_numeric(&p, n, omega_bar, 1024).unwrap();
        let down = winding_numeric(&ModelParams { phi: -p.phi, ..p }, n, omega_bar, 1024).unwrap();
        prop_assert_eq!(up, -down);
    }

    #[test]
    fn winding_depends_on_total_frequency_only(p in extremal(1.0), n in -45i64..45, w in 0.0..1.0f64, shift in -3i64..3) {
        let omega_bar = w * p.omega_mod;
        prop_assume!(far_from_boundary(&p, n, omega_bar));
        let a = winding_numeric(&p, n, omega_bar, 1024).unwrap();
        let b = winding_numeric(&p, n + shift, omega_bar - shift as f64 * p.omega_mod, 1024).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn k_grid_refinement_is_stable(p in extremal(-1.0), n in -45i64..45, w in 0.0..1.0f64) {
        let omega_bar = w * p.omega_mod;
        prop_assume!(far_from_boundary(&p, n, omega_bar));
        let coarse = winding_numeric(&p, n, omega_bar, 512).unwrap();
        for k in [1024, 4096] {
            prop_assert_eq!(winding_numeric(&p, n, omega_bar, k).unwrap(), coarse);
        }
    }

    #[test]
    fn window_half_width_is_dirac_distance(p in extremal(1.0)) {
        let (lo, hi) = topo_window(&p, 0.0).unwrap();
        let (_, n0) = dirac_points(&p).unwrap();
        prop_assert!((0.5 * (hi - lo) - n0).abs() <= 1e-12 * n0.max(1.0));
    }
}

#[test]
fn dense_k_grid_agrees_with_closed_form() {
    let cases = [(0.3, 4.0, 7.0, 2.0), (1.0, 10.0, 30.0, 30.0), (1.7, 2.5, 13.0, 0.0)];
    for (beta, eta_omega, eta_kappa, eta_gamma) in cases {
        let p = ModelParams { eta_omega, eta_kappa, eta_gamma, eta_p: eta_gamma + beta * eta_kappa, phi: PI / 2.0, omega_mod: 2.0 * PI };
        for n in -25..=25 {
            for omega_bar in [0.0, 1.1, 4.0] {
                if !far_from_boundary(&p, n, omega_bar) {
                    continue;
                }
                let closed = winding_analytic(&p, n, omega_bar).unwrap();
                assert_eq!(LocalWinding::Index(winding_numeric(&p, n, omega_bar, 100_000).unwrap()), closed);
            }
        }
    }
}

#[test]
fn reference_panels() {
    let soliton_family = |eta_p: f64| ModelParams { eta_omega: 10.0, eta_kappa: 30.0, eta_gamma: 30.0, eta_p, phi: PI / 2.0, omega_mod: 2.0 * PI };
    // panel (a): beta < 0
    assert!(winding_map(&soliton_family(3.0), 0.0, 50, 2048).unwrap().values.iter().all(|v| *v == LocalWinding::Index(0)));
    // panel (d): block of +1, 39 cells wide
    let d = winding_map(&soliton_family(58.5), 0.0, 50, 2048).unwrap();
    assert_eq!(d.nontrivial_extent(), Some((-19, 19)));
    // beta = 1: the window reaches its full width 4 eta_omega
    assert_eq!(topo_window(&soliton_family(60.0), 0.0), Some((-20.0, 20.0)));
    assert_eq!(topo_window(&soliton_family(90.0), 0.0), None);
}
