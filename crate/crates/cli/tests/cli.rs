use std::path::Path;
use std::process::{Command, Output};

fn amplifying_point(extra: &str) -> String {
    format!(
        r#"
[model]
eta_omega = 10.0
eta_kappa = 30.0
eta_gamma = 30.0
eta_p = 58.5
{extra}
[numerics]
n_trunc = 50
"#
    )
}

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let path = dir.join("run.toml");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_floquet-amp"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn green_map_emits_heatmap_sidecar_and_svg() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), &amplifying_point(""), &["green-map", "--format", "svg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let o = tmp.path().join("out");
    assert_eq!(rows(&o.join("green_map.csv")).len(), 101 * 101);
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(o.join("green_map.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["model"]["eta_p"], 58.5);
    let e0 = meta["results"]["e0_over_omega"].as_f64().unwrap();
    let e1 = meta["results"]["e1_over_omega"].as_f64().unwrap();
    assert!(e1 / e0 > 10.0);
    assert!(o.join("green_map.svg").exists());
}

#[test]
fn uncoupled_green_map_is_diagonal() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = "[model]\neta_omega = 0.0\neta_kappa = 0.0\neta_gamma = 2.0\neta_p = 1.0\n[numerics]\nn_trunc = 6\n";
    let out = run(tmp.path(), cfg, &["green-map"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for r in rows(&tmp.path().join("out/green_map.csv")) {
        let abs: f64 = r[2].parse().unwrap();
        assert_eq!(r[0] == r[1], abs > 0.0, "{r:?}");
    }
}

#[test]
fn winding_map_blocks_and_sign_flip() {
    let tmp = tempfile::tempdir().unwrap();
    let nu_at_zero = |dir: &Path| -> Vec<i32> {
        rows(&dir.join("out/winding_map.csv"))
            .into_iter()
            .filter(|r| r[1].parse::<f64>().unwrap() == 0.0)
            .map(|r| r[2].parse().unwrap())
            .collect()
    };
    assert!(run(tmp.path(), &amplifying_point(""), &["winding-map"]).status.success());
    let up = nu_at_zero(tmp.path());
    assert_eq!(up.iter().filter(|v| **v == 1).count(), 39);
    assert!(run(tmp.path(), &amplifying_point("phi_over_pi = -0.5"), &["winding-map"]).status.success());
    assert_eq!(nu_at_zero(tmp.path()), up.iter().map(|v| -v).collect::<Vec<_>>());
    // beta = 0 is trivial away from the collapsed window at n = 0
    let out = run(tmp.path(), &amplifying_point(""), &["winding-map", "--set", "model.eta_p=30.0", "--set", "numerics.omega_bar_points=2"]);
    assert!(out.status.success());
    assert!(rows(&tmp.path().join("out/winding_map.csv")).iter().all(|r| r[2] == "0"));
}

#[test]
fn ideal_point_solitons_are_real_gaussians() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), &amplifying_point(""), &["solitons", "--set", "model.eta_p=60.0", "--set", "numerics.n_trunc=60"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("out/soliton_output.csv.meta.json")).unwrap()).unwrap();
    let pred = &meta["results"]["output"]["prediction"];
    assert!((pred["sigma_r_sq"].as_f64().unwrap() - 15.0).abs() < 1e-12);
    assert!(pred["sigma_i_sq"].is_null());
    assert!(meta["results"]["output"]["fidelity"].as_f64().unwrap() >= 0.99);
}

#[test]
fn solitons_without_topology_exit_with_numerical_code() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(tmp.path(), &amplifying_point(""), &["solitons", "--set", "model.eta_p=105.0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no topological window"));
}

#[test]
fn exit_codes_distinguish_failures() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(run(tmp.path(), &amplifying_point(""), &["green-map", "--set", "model.eta_kappa=-3"]).status.code(), Some(2));
    assert_eq!(run(tmp.path(), "[model]\neta_omega = 1.0\n", &["green-map"]).status.code(), Some(2));
    assert_eq!(run(tmp.path(), &amplifying_point(""), &["sweep"]).status.code(), Some(2));
    // beta = 1 puts E0 far below roundoff: G is refused
    assert_eq!(run(tmp.path(), &amplifying_point(""), &["green-map", "--set", "model.eta_p=60.0"]).status.code(), Some(3));
    let missing = Command::new(env!("CARGO_BIN_EXE_floquet-amp"))
        .args(["green-map", "--config", "/definitely/not/here.toml"])
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(4));
    let blocked = tmp.path().join("file");
    std::fs::write(&blocked, "").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_floquet-amp"))
        .args(["winding-map", "--set", "model.eta_omega=1", "--set", "model.eta_kappa=1", "--set", "model.eta_gamma=1", "--set", "model.eta_p=1", "--out"])
        .arg(blocked.join("sub"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn zero_pump_snr_is_infinite() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = "[model]\neta_omega = 10.0\neta_kappa = 10.0\neta_gamma = 10.0\neta_p = 0.0\n[numerics]\nn_trunc = 30\nquad_points = 32\nsamples_per_period = 32\n";
    let out = run(tmp.path(), cfg, &["snr"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = rows(&tmp.path().join("out/snr_sweep.csv"));
    assert_eq!(r[0][2], "inf");
}

#[test]
fn undriven_dynamics_stay_at_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = "[model]\neta_omega = 10.0\neta_kappa = 10.0\neta_gamma = 10.0\neta_p = 15.0\n[drive]\namplitude_re = 0.0\nn_d = 0\n[numerics]\nsamples_per_period = 16\n";
    let out = run(tmp.path(), cfg, &["dynamics"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for r in rows(&tmp.path().join("out/dynamics_one_mode.csv")) {
        assert_eq!(r[1].parse::<f64>().unwrap(), 0.0);
        assert_eq!(r[2].parse::<f64>().unwrap(), 0.0);
    }
}

#[test]
fn fig_s1_dynamics_report() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = "[model]\neta_omega = 10.0\neta_kappa = 10.0\neta_gamma = 10.0\neta_p = 19.8\n[dynamics]\nthree_mode = true\n[numerics]\nsamples_per_period = 64\n";
    let out = run(tmp.path(), cfg, &["dynamics"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("out/dynamics_report.json")).unwrap()).unwrap();
    assert!(report["steady_state_discrepancy"].as_f64().unwrap() <= 0.05);
    assert!(report["three_mode_discrepancy"].as_f64().unwrap() < 0.5);
    assert_eq!(rows(&tmp.path().join("out/dynamics_three_mode.csv"))[0].len(), 7);
}
