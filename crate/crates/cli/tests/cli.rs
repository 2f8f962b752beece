use std::path::PathBuf;
use std::process::Command;

use phyllo::cli::{main_with, EXIT_CONFIG, EXIT_OK, EXIT_SOLVER, EXIT_USAGE};
use phyllo::RunConfig;
use phyllo_core::CoeffSpec;

fn config(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "configs", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("phyllo").chain(args.iter().copied());
    let code = main_with(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn value(text: &str, key: &str) -> f64 {
    let prefix = format!("{key}=");
    let line = text
        .lines()
        .find(|l| l.starts_with(&prefix))
        .unwrap_or_else(|| panic!("no {key} in {text}"));
    line[prefix.len()..]
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

#[test]
fn shipped_case_a_config() {
    let cfg = RunConfig::load(config("case_a.json").as_ref(), &[]).unwrap();
    let p = cfg.params();
    assert_eq!(p.zeta, 3.0);
    assert_eq!(p.delta, 2.7);
    assert!(matches!(p.lam1, CoeffSpec::TurningLaw { amp, .. } if amp == 0.25));
    assert!(matches!(p.lam2, CoeffSpec::TurningLaw { amp, .. } if amp == 0.25));
    for c in ["case_b.json", "case_c.json", "case_d.json"] {
        RunConfig::load(config(c).as_ref(), &[]).unwrap();
    }
}

#[test]
fn stability_reports_both_thresholds() {
    let (code, out, _) = call(&["stability", "--config", &config("case_b.json")]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("delta_bar=2.59868\n"), "{out}");
    assert!((value(&out, "delta_bar") - 2.59869).abs() < 1e-4);
    assert!((value(&out, "delta_bar_exact") - 2.598683298050514).abs() < 1e-12);
    assert!(out.contains("delta_bar_printed_form=2.22368"), "{out}");
    assert!(out.contains("turing=true"));
    assert!((value(&out, "k_c2") - 100.0 / 3.0).abs() < 1e-10);
}

#[test]
fn equilibrium_output() {
    let (code, out, _) = call(&["equilibrium", "--config", &config("case_b.json")]);
    assert_eq!(code, EXIT_OK);
    assert!((value(&out, "n1") - 15.0).abs() < 1e-12);
    assert!((value(&out, "n2") - 20.0).abs() < 1e-12);
    assert!((value(&out, "trace") + 14.0 / 3.0).abs() < 1e-12);
    assert!((value(&out, "det") - 80.0 / 3.0).abs() < 1e-12);
    assert!(out.contains("stability=Stable"));
}

#[test]
fn dispersion_csv() {
    let (code, out, _) = call(&["dispersion", "--config", &config("case_b.json")]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "k2,a,b,re_lambda");
    assert_eq!(lines.len(), 1001);
}

#[test]
fn bifurcate_small_grid() {
    let args = [
        "bifurcate",
        "--config",
        &config("case_a.json"),
        "--param1",
        "zeta",
        "--range1",
        "2:4:3",
        "--param2",
        "delta",
        "--range2",
        "1:3:3",
    ];
    let (code, out, _) = call(&args);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "zeta,delta,region");
    assert_eq!(lines.len(), 10);
    assert_eq!(lines[1], "2,1,None");
    assert!(lines[2].starts_with("2,2,"));
    assert!(lines[4].starts_with("3,1,"));
    assert_eq!(call(&args).1, out);

    let (code, _, err) = call(&["bifurcate", "--param1", "zeta", "--param2", "zeta"]);
    assert_eq!(code, EXIT_CONFIG, "{err}");
    let (code, _, _) = call(&["bifurcate", "--range1", "3:1:5"]);
    assert_eq!(code, EXIT_USAGE);
}

#[test]
fn simulate_writes_snapshot_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let od = out_dir.to_string_lossy().into_owned();
    let (code, out, err) = call(&[
        "simulate",
        "--config",
        &config("case_b.json"),
        "--t-final",
        "1",
        "--out-dir",
        &od,
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    assert!(out.contains("steps=100"));
    let mut files: Vec<String> = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    files.sort();
    assert_eq!(files, ["diagnostics.csv", "snapshot_00000.csv"]);
    let diag = std::fs::read_to_string(out_dir.join("diagnostics.csv")).unwrap();
    let lines: Vec<&str> = diag.lines().collect();
    assert_eq!(lines[0], phyllo::output::DIAGNOSTICS_HEADER);
    // Initial record plus one per step.
    assert_eq!(lines.len() - 1, 101);
    assert!(lines[1].starts_with("0,"));
    assert!(lines[101].starts_with("1,"));
    let snap = std::fs::read_to_string(out_dir.join("snapshot_00000.csv")).unwrap();
    assert!(snap.starts_with("# t=1\nx,y,n1,n2\n"));
    assert_eq!(snap.lines().count(), 2 + 3281);

    // Byte-identical rerun.
    let again = dir.path().join("again");
    let ag = again.to_string_lossy().into_owned();
    assert_eq!(
        call(&[
            "simulate",
            "--config",
            &config("case_b.json"),
            "--t-final",
            "1",
            "--out-dir",
            &ag
        ])
        .0,
        EXIT_OK
    );
    for f in &files {
        assert_eq!(
            std::fs::read(out_dir.join(f)).unwrap(),
            std::fs::read(again.join(f)).unwrap()
        );
    }
}

#[test]
fn solver_failure_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let od = dir.path().to_string_lossy().into_owned();
    let (code, _, err) = call(&[
        "simulate",
        "--t-final",
        "0.05",
        "--set",
        "mesh.nx=8",
        "--set",
        "mesh.ny=8",
        "--set",
        "solver.picard_tol=1e-300",
        "--set",
        "solver.picard_max_iters=2",
        "--out-dir",
        &od,
    ]);
    assert_eq!(code, EXIT_SOLVER);
    assert!(err.contains("Picard"), "{err}");
    assert!(dir.path().join("last_good.csv").exists());
    let diag = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    assert_eq!(diag.lines().count(), 2);
}

#[test]
fn config_errors() {
    let (code, _, err) = call(&[
        "stability",
        "--config",
        &config("case_b.json"),
        "--set",
        "model.delta=-1",
    ]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(err.contains("delta must be positive"), "{err}");

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.json");
    std::fs::write(&path, "{\n  \"model\": {}\n}\n").unwrap();
    let (code, _, err) = call(&["equilibrium", "--config", &path.to_string_lossy()]);
    assert_eq!(code, EXIT_CONFIG);
    assert!(
        err.contains("missing field `zeta`") && err.contains("line 2"),
        "{err}"
    );

    let (code, _, _) = call(&["equilibrium", "--config", "/nonexistent/phyllo.json"]);
    assert_eq!(code, EXIT_CONFIG);
}

#[test]
fn normalized_config_round_trips() {
    for name in ["case_a.json", "case_b.json", "case_c.json", "case_d.json"] {
        let (code, out, _) = call(&["config", "--config", &config(name)]);
        assert_eq!(code, EXIT_OK);
        let original = RunConfig::load(config(name).as_ref(), &[]).unwrap();
        let parsed = RunConfig::from_json(&out, &[]).unwrap();
        assert_eq!(parsed, original);
        assert_eq!(parsed.to_json(), out.trim_end());
    }
}

#[test]
fn kinetic_check_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.csv");
    let (code, out, err) = call(&[
        "kinetic-check",
        "--set",
        "kinetic.nx=50",
        "--set",
        "kinetic.nu_nodes=16",
        "--set",
        "kinetic.epsilon=0.1",
        "--out",
        &path.to_string_lossy(),
    ]);
    assert_eq!(code, EXIT_OK, "{err}");
    let d = value(&out, "D_est");
    assert!((d - 1.0 / 6.0).abs() < 0.05 / 6.0, "{out}");
    assert!(value(&out, "mass_drift") < 1e-12);
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("t,x,rho\n0,0.01,"));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_phyllo");
    let status = Command::new(bin).arg("no-such-command").output().unwrap();
    assert_eq!(status.status.code(), Some(EXIT_USAGE));
    let ok = Command::new(bin)
        .args(["stability", "--config", &config("case_b.json")])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(EXIT_OK));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("delta_bar=2.59868"));
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(EXIT_OK));
}
