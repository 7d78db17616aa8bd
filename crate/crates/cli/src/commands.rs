//! One function per subcommand. Each writes its artifacts under the output
//! directory and returns a short human-readable summary.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use floquet_amp::dynamics::{
    integrate_one_mode, integrate_three_mode, photon_number_ode, reconstruct_steady_state, relative_sup_discrepancy,
    transient_cutoff, uniform_times, MicroParams,
};
use floquet_amp::export::{self, heatmap_svg, write_metadata_json};
use floquet_amp::green::{green_function, singular_triples};
use floquet_amp::jackiw::{dirac_points, predict, soliton_match, Side, SolitonPrediction};
use floquet_amp::ode::OdeOptions;
use floquet_amp::response::{optimal_input_harmonic, snr_sweep, stable_maximum, DriveChoice, SnrOptions, SnrResult};
use floquet_amp::sambe::default_truncation;
use floquet_amp::topology::{topo_window, winding_analytic, winding_map, winding_numeric, LocalWinding, WindingMap};
use floquet_amp::{build_sambe, DriveSpec, ModelParams, SambeMatrix};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, RunConfig};
use crate::error::CliError;

/// Writes files into the output directory, each with a `.meta.json` sidecar.
pub struct Emitter<'a> {
    dir: PathBuf,
    cfg: &'a RunConfig,
}

impl<'a> Emitter<'a> {
    pub fn new(cfg: &'a RunConfig) -> Result<Self, CliError> {
        let dir = cfg.output.dir.clone();
        fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Emitter { dir, cfg })
    }

    fn create(&self, name: &str) -> Result<(PathBuf, BufWriter<File>), CliError> {
        let path = self.dir.join(name);
        let f = File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok((path, BufWriter::new(f)))
    }

    fn sidecar<R: Serialize>(&self, path: &Path, artifact: &str, results: &R) -> Result<(), CliError> {
        let mut name = path.file_name().unwrap().to_os_string();
        name.push(".meta.json");
        let (_, mut w) = self.create(name.to_str().unwrap())?;
        write_metadata_json(&mut w, artifact, self.cfg, results)?;
        w.flush()?;
        Ok(())
    }

    /// `name` is written by `body`; its sidecar records `results`.
    pub fn file<R: Serialize>(
        &self,
        name: &str,
        artifact: &str,
        results: &R,
        body: impl FnOnce(&mut BufWriter<File>) -> floquet_amp::Result<()>,
    ) -> Result<(), CliError> {
        let (path, mut w) = self.create(name)?;
        body(&mut w)?;
        w.flush()?;
        self.sidecar(&path, artifact, results)
    }

    pub fn json<R: Serialize>(&self, name: &str, value: &R) -> Result<(), CliError> {
        let (_, mut w) = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Io(e.to_string()))?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    pub fn svg<R: Serialize>(&self, name: &str, artifact: &str, results: &R, values: &DMatrix<f64>, title: &str) -> Result<(), CliError> {
        if !self.cfg.output.wants(Format::Svg) {
            return Ok(());
        }
        let svg = heatmap_svg(values, title);
        self.file(name, artifact, results, |w| Ok(w.write_all(svg.as_bytes())?))
    }

}

fn truncation(cfg: &RunConfig, p: &ModelParams) -> usize {
    cfg.numerics.n_trunc.unwrap_or_else(|| default_truncation(p))
}

fn ode_options(cfg: &RunConfig) -> OdeOptions {
    OdeOptions { rtol: cfg.numerics.rtol, atol: cfg.numerics.atol, ..Default::default() }
}

fn local_winding(p: &ModelParams, n: i64, omega_bar: f64, k_points: usize) -> floquet_amp::Result<LocalWinding> {
    match winding_analytic(p, n, omega_bar) {
        Err(floquet_amp::Error::UnsupportedPhase(_)) => match winding_numeric(p, n, omega_bar, k_points) {
            Ok(v) => Ok(LocalWinding::Index(v)),
            Err(floquet_amp::Error::OnBoundary { .. }) => Ok(LocalWinding::Boundary),
            Err(e) => Err(e),
        },
        other => other,
    }
}

#[derive(Debug, Serialize)]
struct Extremum {
    n: i64,
    m: i64,
    abs: f64,
}

#[derive(Debug, Serialize)]
struct GreenMapSummary {
    beta: Option<f64>,
    n_trunc: usize,
    omega_bar: f64,
    cond: f64,
    e0_over_omega: f64,
    e1_over_omega: f64,
    max_entry: Extremum,
    window: Option<(f64, f64)>,
    winding_extent: Option<(i64, i64)>,
}

pub fn green_map(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.params();
    let n = truncation(cfg, &p);
    let omega_bar = cfg.numerics.omega_bar;
    let sambe = build_sambe(&p, n)?;
    let green = green_function(&sambe, omega_bar)?;
    let triples = singular_triples(&sambe, omega_bar, 2)?;
    let winding = winding_map(&p, omega_bar, n, cfg.numerics.k_points)?;
    let (an, am, aabs) = green.argmax_abs();
    let summary = GreenMapSummary {
        beta: p.beta().ok(),
        n_trunc: n,
        omega_bar,
        cond: green.cond(),
        e0_over_omega: triples[0].value / p.omega_mod,
        e1_over_omega: triples[1].value / p.omega_mod,
        max_entry: Extremum { n: an, m: am, abs: aabs },
        window: topo_window(&p, omega_bar),
        winding_extent: winding.nontrivial_extent(),
    };
    let out = Emitter::new(cfg)?;
    out.file("green_map.csv", "green-map", &summary, |w| export::write_green_heatmap_csv(w, &green))?;
    out.file("sambe.csv", "green-map", &summary, |w| export::write_sambe_csv(w, &sambe))?;
    out.file("winding_overlay.csv", "green-map", &summary, |w| export::write_phase_map_csv(w, &[winding]))?;
    let abs = green.matrix().map(|z| z.norm());
    out.svg("green_map.svg", "green-map", &summary, &abs, "|G_nm|, rows n, columns m")?;
    if cfg.output.wants(Format::Json) {
        out.json("green_map.json", &summary)?;
    }
    Ok(format!(
        "E0/Omega = {:.6e}, E1/Omega = {:.6e}, max |G| = {:.6e} at (n, m) = ({an}, {am}), cond = {:.3e}",
        summary.e0_over_omega,
        summary.e1_over_omega,
        aabs,
        summary.cond
    ))
}

#[derive(Debug, Serialize)]
struct WindingSummary {
    beta: Option<f64>,
    n_trunc: usize,
    omega_bar_points: usize,
    window_at_zero: Option<(f64, f64)>,
    extent_at_zero: Option<(i64, i64)>,
}

pub fn winding(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.params();
    let n = truncation(cfg, &p);
    let m = cfg.numerics.omega_bar_points;
    let maps: Vec<WindingMap> = (0..m)
        .into_par_iter()
        .map(|j| winding_map(&p, j as f64 * p.omega_mod / m as f64, n, cfg.numerics.k_points))
        .collect::<floquet_amp::Result<_>>()?;
    let summary = WindingSummary {
        beta: p.beta().ok(),
        n_trunc: n,
        omega_bar_points: m,
        window_at_zero: topo_window(&p, 0.0),
        extent_at_zero: maps[0].nontrivial_extent(),
    };
    let out = Emitter::new(cfg)?;
    out.file("winding_map.csv", "winding-map", &summary, |w| export::write_phase_map_csv(w, &maps))?;
    // log-spaced levels: -1 -> 1, 0 -> 10, +1 -> 100, boundary -> blank
    let grid = DMatrix::from_fn(2 * n + 1, m, |i, j| match maps[j].values[i] {
        LocalWinding::Index(v) => 10f64.powi(v + 1),
        LocalWinding::Boundary => 0.0,
    });
    out.svg("winding_map.svg", "winding-map", &summary, &grid, "winding number, rows n, columns omega_bar")?;
    if cfg.output.wants(Format::Json) {
        out.json("winding_map.json", &summary)?;
    }
    Ok(match summary.extent_at_zero {
        Some((lo, hi)) => format!("nontrivial winding for n in [{lo}, {hi}] at omega_bar = 0"),
        None => "winding is trivial at omega_bar = 0".to_string(),
    })
}

#[derive(Debug, Serialize)]
struct SolitonSummary {
    beta: f64,
    n_trunc: usize,
    omega_bar: f64,
    k0: f64,
    n0: f64,
    e0_over_omega: f64,
    input: SideSummary,
    output: SideSummary,
}

#[derive(Debug, Serialize)]
struct SideSummary {
    prediction: SolitonPrediction,
    fidelity: f64,
    bloch_momentum: f64,
    peak_harmonic: i64,
}

fn peak(sambe: &SambeMatrix, v: &[Complex64]) -> i64 {
    let i = (0..v.len()).max_by(|&a, &b| v[a].norm().total_cmp(&v[b].norm())).unwrap_or(0);
    sambe.harmonic(i)
}

pub fn solitons(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.params();
    let beta = p.beta()?;
    let (k0, n0) = dirac_points(&p).map_err(|e| match e {
        floquet_amp::Error::NoDiracPoints(b) => {
            CliError::Numerical(format!("no topological window: beta = {b} lies outside (0, 2), so there are no solitons"))
        }
        other => other.into(),
    })?;
    let n = truncation(cfg, &p);
    let omega_bar = cfg.numerics.omega_bar;
    let sambe = build_sambe(&p, n)?;
    let t = singular_triples(&sambe, omega_bar, 1)?.remove(0);
    let grid = -(n as i64)..=(n as i64);
    let u: Vec<Complex64> = t.u.iter().copied().collect();
    let v: Vec<Complex64> = t.v.iter().copied().collect();
    let left = soliton_match(&u, &p, Side::Left, grid.clone())?;
    let right = soliton_match(&v, &p, Side::Right, grid.clone())?;
    let summary = SolitonSummary {
        beta,
        n_trunc: n,
        omega_bar,
        k0,
        n0,
        e0_over_omega: t.value / p.omega_mod,
        input: SideSummary {
            prediction: predict(&p, Side::Left)?,
            fidelity: left.fidelity,
            bloch_momentum: left.momentum,
            peak_harmonic: peak(&sambe, &u),
        },
        output: SideSummary {
            prediction: predict(&p, Side::Right)?,
            fidelity: right.fidelity,
            bloch_momentum: right.momentum,
            peak_harmonic: peak(&sambe, &v),
        },
    };
    let harmonics: Vec<i64> = grid.collect();
    let out = Emitter::new(cfg)?;
    out.file("soliton_input.csv", "solitons", &summary, |w| export::write_soliton_csv(w, &harmonics, &u, &left.profile))?;
    out.file("soliton_output.csv", "solitons", &summary, |w| export::write_soliton_csv(w, &harmonics, &v, &right.profile))?;
    if cfg.output.wants(Format::Json) {
        out.json("solitons.json", &summary)?;
    }
    Ok(format!(
        "beta = {beta:.6}, n0 = {n0:.6}, E0/Omega = {:.6e}, input fidelity = {:.6}, output fidelity = {:.6}",
        summary.e0_over_omega, left.fidelity, right.fidelity
    ))
}

#[derive(Debug, Serialize)]
struct SnrPoint {
    eta_p: f64,
    beta: f64,
    snr_max: f64,
    t_star: f64,
    stable: bool,
    n_d: i64,
}

#[derive(Debug, Serialize)]
struct SnrSummary {
    points: Vec<SnrPoint>,
    stable_maximum_beta: Option<f64>,
}

fn pump_values(cfg: &RunConfig) -> Result<Vec<f64>, CliError> {
    match &cfg.sweep {
        None => Ok(vec![cfg.model.eta_p]),
        Some(s) if s.parameter == "eta_p" => Ok(s.values()),
        Some(s) => Err(CliError::Config(format!("snr sweeps run over eta_p, not `{}`", s.parameter))),
    }
}

pub fn snr(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.params();
    let eta_ps = pump_values(cfg)?;
    let drive = match cfg.drive.n_d {
        Some(n_d) => DriveChoice::Fixed(cfg.drive.spec(n_d)),
        None => DriveChoice::OptimalInput { amplitude: cfg.drive.amplitude() },
    };
    let opts = SnrOptions {
        n_trunc: cfg.numerics.n_trunc,
        quad_points: cfg.numerics.quad_points,
        samples_per_period: cfg.numerics.samples_per_period,
        ..Default::default()
    };
    let results = snr_sweep(&p, &eta_ps, drive, &opts)?;
    let summary = SnrSummary {
        points: results
            .iter()
            .map(|r| SnrPoint { eta_p: r.eta_p, beta: r.beta, snr_max: r.snr_max, t_star: r.t_star, stable: r.stable, n_d: r.n_d })
            .collect(),
        stable_maximum_beta: stable_maximum(&results).map(|r| r.beta),
    };
    let out = Emitter::new(cfg)?;
    out.file("snr_sweep.csv", "snr", &summary, |w| export::write_sweep_csv(w, &results))?;
    out.file("snr_series.csv", "snr", &summary, |w| write_series(w, &results, p.period()))?;
    if cfg.output.wants(Format::Json) {
        out.json("snr.json", &results)?;
    }
    Ok(match summary.stable_maximum_beta {
        Some(b) => format!("{} points, stable SNR maximum at beta = {b:.6}", results.len()),
        None => format!("{} points, none stable", results.len()),
    })
}

fn write_series<W: Write>(w: W, results: &[SnrResult], period: f64) -> floquet_amp::Result<()> {
    let mut eta = Vec::new();
    let mut t = Vec::new();
    let mut s = Vec::new();
    let mut n = Vec::new();
    for r in results {
        let m = r.signal_series.len();
        for j in 0..m {
            eta.push(r.eta_p);
            t.push(period * j as f64 / m as f64);
            s.push(r.signal_series[j]);
            n.push(r.noise_series[j]);
        }
    }
    export::write_columns_csv(w, &[("eta_p", &eta), ("t", &t), ("signal", &s), ("noise", &n)])
}

#[derive(Debug, Serialize)]
struct DynamicsSummary {
    beta: f64,
    drive: DriveSpec,
    t_transient: Option<f64>,
    t_end: f64,
    steady_state_discrepancy: Option<f64>,
    three_mode_discrepancy: Option<f64>,
    adiabatic_warning: Option<String>,
    photon_growth_rate: Option<f64>,
    photon_growth_expected: f64,
    photon_diverged: Option<bool>,
}

pub fn dynamics(cfg: &RunConfig) -> Result<String, CliError> {
    let p = cfg.params();
    let beta = p.beta()?;
    let d = &cfg.dynamics;
    let n = truncation(cfg, &p);
    let sambe = build_sambe(&p, n)?;
    let n_d = match cfg.drive.n_d {
        Some(v) => v,
        None => optimal_input_harmonic(&sambe, cfg.drive.omega_bar_d)?,
    };
    let drive = cfg.drive.spec(n_d);
    drive.validate(p.omega_mod)?;
    let period = p.period();
    let t_tr = transient_cutoff(&p)?;
    let t_end = if t_tr.is_finite() { t_tr + d.window_periods * period } else { d.fallback_periods * period };
    let count = (t_end / period * cfg.numerics.samples_per_period as f64).round() as usize + 1;
    let times = uniform_times(0.0, t_end, count);
    let opts = ode_options(cfg);
    let zero = Complex64::new(0.0, 0.0);

    let one = integrate_one_mode(&p, &drive, zero, &times, &opts)?;
    let mut summary = DynamicsSummary {
        beta,
        drive,
        t_transient: t_tr.is_finite().then_some(t_tr),
        t_end,
        steady_state_discrepancy: None,
        three_mode_discrepancy: None,
        adiabatic_warning: None,
        photon_growth_rate: None,
        photon_growth_expected: p.eta_kappa * (beta - 1.0) * p.omega_mod,
        photon_diverged: None,
    };
    let mut green_traj = None;
    if t_tr.is_finite() {
        let steady = reconstruct_steady_state(&sambe, &p, &drive)?;
        let reference: Vec<Complex64> = times.iter().map(|&t| steady.eval(t)).collect();
        let first = times.iter().position(|&t| t >= t_tr).unwrap_or(times.len() - 1);
        let a = one.mode(0);
        summary.steady_state_discrepancy = Some(relative_sup_discrepancy(&a[first..], &reference[first..])?);
        green_traj = Some(floquet_amp::dynamics::Trajectory {
            times: times.clone(),
            amplitudes: reference.into_iter().map(|z| vec![z]).collect(),
        });
    }
    let mut three = None;
    if d.three_mode {
        let micro = MicroParams::from_effective(p, d.kappa_b_over_omega * p.omega_mod, d.kappa_c_over_omega * p.omega_mod)?;
        summary.adiabatic_warning = micro.adiabatic_warning();
        if let Some(w) = &summary.adiabatic_warning {
            eprintln!("warning: {w}");
        }
        let tr = integrate_three_mode(&micro, &drive, [zero; 3], &times, &opts)?;
        summary.three_mode_discrepancy = Some(relative_sup_discrepancy(&tr.mode(0), &one.mode(0))?);
        three = Some(tr);
    }
    let mut photon = None;
    if d.photon_number {
        let r = photon_number_ode(&p, d.photon_n_init, d.photon_periods, cfg.numerics.samples_per_period.min(64), &opts)?;
        summary.photon_growth_rate = Some(r.growth_rate);
        summary.photon_diverged = Some(r.diverged);
        photon = Some(r);
    }

    let out = Emitter::new(cfg)?;
    out.file("dynamics_one_mode.csv", "dynamics", &summary, |w| export::write_trajectory_csv(w, &one))?;
    if let Some(g) = &green_traj {
        out.file("dynamics_green.csv", "dynamics", &summary, |w| export::write_trajectory_csv(w, g))?;
    }
    if let Some(t) = &three {
        out.file("dynamics_three_mode.csv", "dynamics", &summary, |w| export::write_trajectory_csv(w, t))?;
    }
    if let Some(r) = &photon {
        out.file("photon_number.csv", "dynamics", &summary, |w| {
            export::write_columns_csv(w, &[("t", &r.times), ("n", &r.values)])
        })?;
    }
    out.json("dynamics_report.json", &summary)?;
    let fmt = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.3e}"));
    Ok(format!(
        "steady-state discrepancy = {}, three-mode discrepancy = {}, photon growth rate = {}",
        fmt(summary.steady_state_discrepancy),
        fmt(summary.three_mode_discrepancy),
        fmt(summary.photon_growth_rate)
    ))
}

#[derive(Debug, Serialize)]
struct SweepPoint {
    value: f64,
    beta: Option<f64>,
    stable: bool,
    e0_over_omega: f64,
    e1_over_omega: f64,
    nu_center: Option<i32>,
    window_half_width: Option<f64>,
}

pub fn sweep(cfg: &RunConfig) -> Result<String, CliError> {
    let s = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Config("the sweep subcommand needs a [sweep] section".into()))?;
    let base = cfg.params();
    let omega_bar = cfg.numerics.omega_bar;
    let points: Vec<SweepPoint> = s
        .values()
        .into_par_iter()
        .map(|value| -> Result<SweepPoint, CliError> {
            let p = base.with_field(&s.parameter, value)?;
            p.validate().map_err(|e| CliError::Config(e.to_string()))?;
            let sambe = build_sambe(&p, truncation(cfg, &p))?;
            let t = singular_triples(&sambe, omega_bar, 2)?;
            Ok(SweepPoint {
                value,
                beta: p.beta().ok(),
                stable: p.net_gain() < 0.0,
                e0_over_omega: t[0].value / p.omega_mod,
                e1_over_omega: t[1].value / p.omega_mod,
                nu_center: local_winding(&p, 0, omega_bar, cfg.numerics.k_points)?.index(),
                window_half_width: topo_window(&p, omega_bar).map(|(lo, hi)| 0.5 * (hi - lo)),
            })
        })
        .collect::<Result<_, _>>()?;
    let out = Emitter::new(cfg)?;
    out.file("sweep.csv", "sweep", &points, |w| {
        let mut csv = Vec::new();
        writeln!(csv, "{},beta,stable_flag,e0_over_omega,e1_over_omega,nu_center,window_half_width", s.parameter)?;
        let opt = |x: Option<f64>| x.map_or(String::new(), export::fmt_f64);
        for q in &points {
            writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                export::fmt_f64(q.value),
                opt(q.beta),
                u8::from(q.stable),
                export::fmt_f64(q.e0_over_omega),
                export::fmt_f64(q.e1_over_omega),
                q.nu_center.map_or(String::new(), |v| v.to_string()),
                opt(q.window_half_width)
            )?;
        }
        Ok(w.write_all(&csv)?)
    })?;
    if cfg.output.wants(Format::Json) {
        out.json("sweep.json", &points)?;
    }
    Ok(format!("{} sweep points over {}", points.len(), s.parameter))
}
