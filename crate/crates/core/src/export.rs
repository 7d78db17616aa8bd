//! CSV, JSON and SVG emission. Floats are written with 17 significant digits
//! so a rerun with the same inputs reproduces files byte for byte.

use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::Trajectory;
use crate::error::Result;
use crate::green::GreenFunction;
use crate::response::SnrResult;
use crate::sambe::SambeMatrix;
use crate::scattering::ScatteringMatrices;
use crate::topology::{LocalWinding, WindingMap};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// `{:.16e}`; infinities become `inf` / `-inf`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.16e}")
}

fn writer<W: Write>(w: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(header)?;
    Ok(out)
}

/// Nonzero Sambe entries as `(n, m, re, im)`.
pub fn write_sambe_csv<W: Write>(w: W, sambe: &SambeMatrix) -> Result<()> {
    let mut out = writer(w, &["n", "m", "re", "im"])?;
    for (n, m, z) in sambe.nonzero_entries() {
        out.write_record([n.to_string(), m.to_string(), fmt_f64(z.re), fmt_f64(z.im)])?;
    }
    out.flush()?;
    Ok(())
}

/// `|G[n][m]|` on the full grid as `(n, m, abs_g)`.
pub fn write_green_heatmap_csv<W: Write>(w: W, green: &GreenFunction) -> Result<()> {
    let mut out = writer(w, &["n", "m", "abs_g"])?;
    let nt = green.n_trunc() as i64;
    for n in -nt..=nt {
        for m in -nt..=nt {
            out.write_record([n.to_string(), m.to_string(), fmt_f64(green.entry(n, m).norm())])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// `(n, omega_bar, nu, boundary)`; boundary cells carry `nu = 0`, `boundary = 1`.
pub fn write_phase_map_csv<W: Write>(w: W, maps: &[WindingMap]) -> Result<()> {
    let mut out = writer(w, &["n", "omega_bar", "nu", "boundary"])?;
    for map in maps {
        for (n, v) in map.harmonics().zip(&map.values) {
            let (nu, b) = match v {
                LocalWinding::Index(i) => (*i, 0),
                LocalWinding::Boundary => (0, 1),
            };
            out.write_record([n.to_string(), fmt_f64(map.omega_bar), nu.to_string(), b.to_string()])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Numeric and predicted profiles side by side:
/// `(n, re_num, im_num, abs_num, re_jr, im_jr, abs_jr)`.
pub fn write_soliton_csv<W: Write>(w: W, harmonics: &[i64], numeric: &[Complex64], predicted: &[Complex64]) -> Result<()> {
    let mut out = writer(w, &["n", "re_num", "im_num", "abs_num", "re_jr", "im_jr", "abs_jr"])?;
    for ((n, a), b) in harmonics.iter().zip(numeric).zip(predicted) {
        out.write_record([
            n.to_string(),
            fmt_f64(a.re),
            fmt_f64(a.im),
            fmt_f64(a.norm()),
            fmt_f64(b.re),
            fmt_f64(b.im),
            fmt_f64(b.norm()),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `(n, m, re_r, im_r, re_p, im_p)`.
pub fn write_scattering_csv<W: Write>(w: W, scat: &ScatteringMatrices) -> Result<()> {
    let mut out = writer(w, &["n", "m", "re_r", "im_r", "re_p", "im_p"])?;
    let nt = scat.n_trunc as i64;
    for n in -nt..=nt {
        for m in -nt..=nt {
            let (r, p) = (scat.r_entry(n, m), scat.p_entry(n, m));
            out.write_record([n.to_string(), m.to_string(), fmt_f64(r.re), fmt_f64(r.im), fmt_f64(p.re), fmt_f64(p.im)])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// `(eta_p, beta, snr_max, t_star, stable_flag)`.
pub fn write_sweep_csv<W: Write>(w: W, results: &[SnrResult]) -> Result<()> {
    let mut out = writer(w, &["eta_p", "beta", "snr_max", "t_star", "stable_flag"])?;
    for r in results {
        out.write_record([
            fmt_f64(r.eta_p),
            fmt_f64(r.beta),
            fmt_f64(r.snr_max),
            fmt_f64(r.t_star),
            u8::from(r.stable).to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// `(t, re_a, im_a)` for one mode, plus `(re_b, im_b, re_cstar, im_cstar)`
/// for three.
pub fn write_trajectory_csv<W: Write>(w: W, traj: &Trajectory) -> Result<()> {
    let three = traj.modes() == 3;
    let header: &[&str] = if three {
        &["t", "re_a", "im_a", "re_b", "im_b", "re_cstar", "im_cstar"]
    } else {
        &["t", "re_a", "im_a"]
    };
    let mut out = writer(w, header)?;
    for (t, amps) in traj.times.iter().zip(&traj.amplitudes) {
        let mut row = vec![fmt_f64(*t)];
        for z in amps.iter().take(if three { 3 } else { 1 }) {
            row.push(fmt_f64(z.re));
            row.push(fmt_f64(z.im));
        }
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Named real columns of equal length.
pub fn write_columns_csv<W: Write>(w: W, columns: &[(&str, &[f64])]) -> Result<()> {
    let header: Vec<&str> = columns.iter().map(|(h, _)| *h).collect();
    let mut out = writer(w, &header)?;
    let rows = columns.iter().map(|(_, c)| c.len()).min().unwrap_or(0);
    for j in 0..rows {
        out.write_record(columns.iter().map(|(_, c)| fmt_f64(c[j])))?;
    }
    out.flush()?;
    Ok(())
}

/// JSON sidecar carried by every emitted file. Non-finite numbers inside
/// `config` or `results` serialize as `null`.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata<'a, C: Serialize, R: Serialize> {
    pub artifact: &'a str,
    pub version: &'a str,
    pub config: &'a C,
    pub results: &'a R,
}

pub fn write_metadata_json<W: Write, C: Serialize, R: Serialize>(mut w: W, artifact: &str, config: &C, results: &R) -> Result<()> {
    let meta = Metadata { artifact, version: ARTIFACT_VERSION, config, results };
    serde_json::to_writer_pretty(&mut w, &meta).map_err(|e| crate::Error::Io(e.to_string()))?;
    w.write_all(b"\n")?;
    Ok(())
}

/// Rectangle-raster SVG of a nonnegative matrix on a log color scale.
/// Row 0 is drawn at the top.
pub fn heatmap_svg(values: &DMatrix<f64>, title: &str) -> String {
    let (rows, cols) = values.shape();
    let cell = (600.0 / rows.max(cols).max(1) as f64).max(1.0);
    let (width, height) = (cell * cols as f64, cell * rows as f64 + 24.0);
    let positive = values.iter().copied().filter(|v| *v > 0.0 && v.is_finite());
    let hi = positive.clone().fold(f64::MIN_POSITIVE, f64::max).log10();
    let lo = positive.fold(f64::INFINITY, f64::min).log10().max(hi - 12.0);
    let span = (hi - lo).max(1e-12);
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.1}\" height=\"{height:.1}\" shape-rendering=\"crispEdges\">\n"
    ));
    s.push_str(&format!(
        "<text x=\"4\" y=\"16\" font-family=\"sans-serif\" font-size=\"14\">{}</text>\n",
        escape(title)
    ));
    for i in 0..rows {
        for j in 0..cols {
            let v = values[(i, j)];
            let x = if v > 0.0 && v.is_finite() { ((v.log10() - lo) / span).clamp(0.0, 1.0) } else { 0.0 };
            let (r, g, b) = colormap(x);
            s.push_str(&format!(
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{cell:.2}\" height=\"{cell:.2}\" fill=\"#{r:02x}{g:02x}{b:02x}\"/>\n",
                j as f64 * cell,
                24.0 + i as f64 * cell
            ));
        }
    }
    s.push_str("</svg>\n");
    s
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Dark blue through teal to yellow.
fn colormap(x: f64) -> (u8, u8, u8) {
    const STOPS: [(f64, f64, f64); 4] = [(0.07, 0.04, 0.30), (0.13, 0.45, 0.56), (0.30, 0.75, 0.40), (0.99, 0.91, 0.14)];
    let pos = x * (STOPS.len() - 1) as f64;
    let k = (pos.floor() as usize).min(STOPS.len() - 2);
    let f = pos - k as f64;
    let mix = |a: f64, b: f64| ((a + (b - a) * f) * 255.0).round() as u8;
    let (a, b) = (STOPS[k], STOPS[k + 1]);
    (mix(a.0, b.0), mix(a.1, b.1), mix(a.2, b.2))
}
