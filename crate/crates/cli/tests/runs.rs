use std::fs;
use std::path::Path;
use std::process::Command;

use dcg_cli::compare::{compare, CsvTable};
use dcg_cli::{parse_config, run_scenario, Method, ModelParams, Preset, RunOptions, Trajectory};

fn opts(dir: &Path) -> RunOptions {
    RunOptions {
        out_dir: Some(dir.to_path_buf()),
        ..RunOptions::default()
    }
}

#[test]
fn fig1_preset_matches_caption() {
    let s = Preset::Fig1.scenario();
    assert_eq!(
        s.params,
        ModelParams::TwoSpin {
            lambda: 0.25,
            omega: 1.0,
            big_omega: 2.0,
            rho_b00: 0.5,
            rho_b01: dcg_core::C64::new(0.0, 0.0)
        }
    );
    assert_eq!((s.grid.t_max, s.grid.n_points), (20.0, 401));
    match Preset::Fig2.scenario().params {
        ModelParams::TwoSpin { lambda, omega, rho_b00, .. } => assert_eq!((lambda, omega, rho_b00), (0.5, 1.0, 1.0)),
        other => panic!("{other:?}"),
    }
    match Preset::Fig3.scenario().params {
        ModelParams::SpinBoson { lambda, eps_d, g0, s, omega_c, beta } => {
            assert!((lambda * lambda - 0.1).abs() < 1e-15);
            assert_eq!((eps_d, g0, s, omega_c, beta), (1.0, 1.0, 1.0, 1.0, 1.0));
        }
        other => panic!("{other:?}"),
    }
    match Preset::Fano.scenario().params {
        ModelParams::Fano { lambda, eps_d, gamma_l0, gamma_r0, delta_l, delta_r, eps_l, eps_r } => {
            assert!((lambda * lambda - 0.1).abs() < 1e-15);
            assert_eq!((eps_d, gamma_l0, gamma_r0, delta_l, delta_r, eps_l, eps_r), (1.0, 1.0, 1.0, 2.0, 1.0, 0.0, 0.0));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn fig1_run_writes_deterministic_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_scenario(&Preset::Fig1.scenario(), &opts(dir.path())).unwrap();
    assert!(!report.any_failed());
    for m in ["dcg2", "exact"] {
        let text = fs::read_to_string(dir.path().join(format!("{m}.csv"))).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 402);
        assert_eq!(
            lines[0],
            "t,re_rho_0_0,im_rho_0_0,re_rho_0_1,im_rho_0_1,re_rho_1_0,im_rho_1_0,re_rho_1_1,im_rho_1_1"
        );
        assert!(!text.contains('\r'));
    }
    let dcg2 = report.methods.iter().find(|m| m.method == Method::Dcg(2)).unwrap();
    assert!(dcg2.outcome.as_ref().unwrap().min_eigenvalue >= -1e-8);
    assert!(dir.path().join("report.csv").exists() && dir.path().join("deltas.csv").exists());

    let again = tempfile::tempdir().unwrap();
    run_scenario(&Preset::Fig1.scenario(), &opts(again.path())).unwrap();
    for m in ["dcg2.csv", "exact.csv", "deltas.csv"] {
        assert_eq!(fs::read(dir.path().join(m)).unwrap(), fs::read(again.path().join(m)).unwrap());
    }
    let a = CsvTable::read(&dir.path().join("dcg2.csv")).unwrap();
    assert!(compare(&a, &a).unwrap().0.iter().all(|c| c.max_abs == 0.0));
}

#[test]
fn fano_bms_ignores_right_lead_width() {
    let base = "preset = fano\nmethods = bms\nt_max = 10\nn_points = 51\nleads.eps_r = 1\n";
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_scenario(&parse_config(&format!("{base}leads.delta_r = 1\n")).unwrap(), &opts(a.path())).unwrap();
    run_scenario(&parse_config(&format!("{base}leads.delta_r = 5\n")).unwrap(), &opts(b.path())).unwrap();
    let bytes = |d: &Path| fs::read(d.join("bms.csv")).unwrap();
    assert_eq!(bytes(a.path()), bytes(b.path()));
    assert!(String::from_utf8(bytes(a.path())).unwrap().starts_with("t,rho00\n"));
}

#[test]
fn population_models_also_emit_rho00_files() {
    let dir = tempfile::tempdir().unwrap();
    let s = parse_config("preset = fano\nmethods = dcg1, dcg2\nt_max = 2\nn_points = 5\n").unwrap();
    run_scenario(&s, &opts(dir.path())).unwrap();
    assert!(dir.path().join("dcg1.csv").exists());
    assert!(dir.path().join("dcg1_rho00.csv").exists());
    let pops = fs::read_to_string(dir.path().join("dcg2.csv")).unwrap();
    assert!(pops.starts_with("t,rho00\n"));
}

#[test]
fn failing_method_does_not_stop_the_others() {
    // a bath with coherences is not stationary, so BMS is undefined
    let s = parse_config(
        "preset = fig1\nmethods = dcg2, bms, exact\nt_max = 2\nn_points = 5\nbath.rho01_re = 0.2\n",
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let report = run_scenario(&s, &opts(dir.path())).unwrap();
    assert!(report.any_failed());
    let failed: Vec<_> = report.methods.iter().filter(|m| m.outcome.is_err()).map(|m| m.method).collect();
    assert_eq!(failed, vec![Method::Bms]);
    assert!(dir.path().join("dcg2.csv").exists() && !dir.path().join("bms.csv").exists());
    assert!(fs::read_to_string(dir.path().join("report.csv")).unwrap().contains("bms,failed"));
    match report.trajectory(Method::Dcg(2)).unwrap() {
        Trajectory::States(s) => assert!(s.iter().all(|r| r.min_eigenvalue() >= -1e-8)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn parallel_and_serial_runs_agree() {
    let s = parse_config("preset = fig2\nmethods = dcg1, dcg2, exact\nt_max = 1\nn_points = 6\n").unwrap();
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run_scenario(&s, &opts(a.path())).unwrap();
    let mut par = opts(b.path());
    par.parallel = true;
    run_scenario(&s, &par).unwrap();
    for m in ["dcg1.csv", "dcg2.csv", "exact.csv"] {
        assert_eq!(fs::read(a.path().join(m)).unwrap(), fs::read(b.path().join(m)).unwrap());
    }
}

fn dcg() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dcg"))
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "model = two-spin-heisenberg\nmethods = dcg2\nt_max = 1\nn_points = 1\n").unwrap();
    let out = dcg().arg("run").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n_points ≥ 2"));

    let failing = dir.path().join("failing.cfg");
    fs::write(&failing, "preset = fig1\nmethods = dcg2, bms\nt_max = 1\nn_points = 3\nbath.rho01_re = 0.2\n").unwrap();
    let out = dcg().arg("run").arg(&failing).arg("--out-dir").arg(dir.path().join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let good = dir.path().join("good.cfg");
    fs::write(&good, "preset = dephasing\nt_max = 2\nn_points = 3\n").unwrap();
    let out_dir = dir.path().join("g");
    let out = dcg().arg("run").arg(&good).arg("--out-dir").arg(&out_dir).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let csv = out_dir.join("dcg2.csv");
    let out = dcg().arg("compare").arg(&csv).arg(&csv).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("re_rho_0_1"));
    let out = dcg().arg("compare").arg(&csv).arg(out_dir.join("report.csv")).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    let out = dcg().arg("presets").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let listing = String::from_utf8_lossy(&out.stdout);
    for p in Preset::ALL {
        assert!(listing.contains(&format!("preset = {}", p.name())) || listing.contains(&format!("name = {}", p.name())));
    }
    let out = dcg().args(["run", "fig1", "--quad-nodes-2d", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
