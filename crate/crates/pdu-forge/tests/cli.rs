//! End-to-end checks of the `pdu-forge` binary: output formats, file
//! handling, exit codes, and the occupancy-cap environment override.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pdu-forge"))
}

fn calibration_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/calibration.cfg")
}

fn stdout_lines(output: &Output) -> Vec<String> {
    String::from_utf8(output.stdout.clone())
        .unwrap()
        .lines()
        .map(str::to_owned)
        .collect()
}

fn stderr_text(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

#[test]
fn design_summary_prints_headline_numbers() {
    let output = bin()
        .args(["design", "--config"])
        .arg(calibration_config())
        .arg("--summary")
        .output()
        .unwrap();
    assert!(output.status.success());
    let lines = stdout_lines(&output);
    assert_eq!(
        lines,
        vec![
            "q_slm_min 2.71e4",
            "q_required_dpdc 4.11e7",
            "p_required_dpuc 8.00e-3",
        ]
    );
}

#[test]
fn design_raw_summary_prints_full_precision() {
    let output = bin()
        .args(["design", "--config"])
        .arg(calibration_config())
        .args(["--summary", "--raw"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let lines = stdout_lines(&output);
    assert!(lines[0].starts_with("q_slm_min 27125."), "{:?}", lines[0]);
    assert_eq!(lines[1], "q_required_dpdc 41100000");
    assert_eq!(lines[2], "p_required_dpuc 0.008");
}

#[test]
fn eta_pdc_sweep_has_header_and_full_grid() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("eta.csv");
    let status = bin()
        .args(["design", "--config"])
        .arg(calibration_config())
        .args(["--sweep", "eta_pdc", "--qmin", "1e5", "--qmax", "1e8", "--out"])
        .arg(&csv)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "q,eta");
    assert_eq!(lines.len(), 501, "default 500 points plus header");
    for line in &lines[1..] {
        let eta: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&eta));
    }
}

#[test]
fn eta_puc_sweep_is_power_major() {
    let output = bin()
        .args(["design", "--config"])
        .arg(calibration_config())
        .args([
            "--sweep", "eta_puc", "--pmin", "1e-4", "--pmax", "0.016", "--lmin", "0.008",
            "--lmax", "0.02", "--points", "10", "--lpoints", "20",
        ])
        .output()
        .unwrap();
    assert!(output.status.success());
    let lines = stdout_lines(&output);
    assert_eq!(lines[0], "p_w,l_m,eta");
    assert_eq!(lines.len(), 1 + 10 * 20);
    let first_power = lines[1].split(',').next().unwrap().to_owned();
    for line in &lines[1..=20] {
        assert_eq!(line.split(',').next().unwrap(), first_power);
    }
    assert_ne!(lines[21].split(',').next().unwrap(), first_power);
}

#[test]
fn q_required_sweep_is_monotone() {
    let output = bin()
        .args(["design", "--config"])
        .arg(calibration_config())
        .args(["--sweep", "q_required", "--rmin", "20e-6", "--rmax", "200e-6", "--points", "50"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let lines = stdout_lines(&output);
    assert_eq!(lines[0], "radius_m,q_required");
    let q: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(q.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn generated_fock_netlist_has_expected_shape() {
    let output = bin()
        .args(["generate", "fock", "--stages", "2"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let lines = stdout_lines(&output);
    let count = |prefix: &str| lines.iter().filter(|l| l.starts_with(prefix)).count();
    assert_eq!(count("mode "), 7, "2 stages declare a 7-node binary tree");
    assert_eq!(count("source "), 1);
    assert_eq!(count("pdu "), 3);
}

#[test]
fn ghz_fidelity_reported_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let netlist = dir.path().join("ghz.net");
    let status = bin()
        .args(["generate", "ghz", "--stages", "2", "--phi", "1.25", "--out"])
        .arg(&netlist)
        .status()
        .unwrap();
    assert!(status.success());

    let output = bin()
        .arg("simulate")
        .arg(&netlist)
        .args(["--postselect", "--target", "ghz:4:1.25"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let lines = stdout_lines(&output);
    assert!(lines.contains(&"success_probability: 1.000000".to_owned()), "{lines:?}");
    assert!(lines.contains(&"leakage: 0.000000".to_owned()), "{lines:?}");
    assert!(lines.contains(&"fidelity: 1.000000".to_owned()), "{lines:?}");
}

#[test]
fn cluster4_simulation_reports_unit_fidelity() {
    let dir = tempfile::tempdir().unwrap();
    let netlist = dir.path().join("cluster.net");
    let status = bin()
        .args(["generate", "cluster4", "--out"])
        .arg(&netlist)
        .status()
        .unwrap();
    assert!(status.success());

    let output = bin()
        .arg("simulate")
        .arg(&netlist)
        .args(["--target", "cluster4"])
        .output()
        .unwrap();
    assert!(output.status.success());
    let lines = stdout_lines(&output);
    assert!(lines.contains(&"fidelity: 1.000000".to_owned()), "{lines:?}");
    assert!(lines.contains(&"photons: {4: 1.0}".to_owned()), "{lines:?}");
}

#[test]
fn terms_csv_has_header_and_one_row_per_term() {
    let dir = tempfile::tempdir().unwrap();
    let netlist = dir.path().join("chain.net");
    let terms = dir.path().join("terms.csv");
    bin()
        .args(["generate", "fock", "--stages", "1", "--out"])
        .arg(&netlist)
        .status()
        .unwrap();
    let status = bin()
        .arg("simulate")
        .arg(&netlist)
        .arg("--terms-out")
        .arg(&terms)
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&terms).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "occupation,re,im,probability");
    assert_eq!(lines.len(), 2, "unit-efficiency chain ends in a single term");
}

#[test]
fn occupancy_cap_env_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let netlist = dir.path().join("two.net");
    std::fs::write(&netlist, "mode 0 a pump\nsource 0\nsource 0\n").unwrap();

    // fits under the default cap
    let status = bin().arg("simulate").arg(&netlist).status().unwrap();
    assert!(status.success());

    // capped at one photon the second source must fail as a physics error
    let output = bin()
        .env("PDU_FORGE_NMAX", "1")
        .arg("simulate")
        .arg(&netlist)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
    assert!(stderr_text(&output).contains("netlist line 3"), "{}", stderr_text(&output));

    // a malformed cap is an input error
    let status = bin()
        .env("PDU_FORGE_NMAX", "abc")
        .arg("simulate")
        .arg(&netlist)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn input_errors_exit_two() {
    // sweep without its range flags
    let status = bin()
        .args(["design", "--config"])
        .arg(calibration_config())
        .args(["--sweep", "eta_pdc"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // missing netlist file
    let status = bin().args(["simulate", "/nonexistent.net"]).status().unwrap();
    assert_eq!(status.code(), Some(2));

    // unparseable --target
    let dir = tempfile::tempdir().unwrap();
    let netlist = dir.path().join("pair.net");
    std::fs::write(&netlist, "mode 0 a pump\nmode 1 b pump\nsource 0\n").unwrap();
    let output = bin()
        .arg("simulate")
        .arg(&netlist)
        .args(["--target", "w:4"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_text(&output).contains("ghz:<N>:<phi>"), "{}", stderr_text(&output));

    // structurally invalid netlist: beam splitter on an undeclared mode
    let bad = dir.path().join("bad.net");
    std::fs::write(&bad, "mode 0 a pump\nsource 0\nbs 0 5 0.7\n").unwrap();
    let output = bin().arg("simulate").arg(&bad).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(!stderr_text(&output).is_empty());
}

#[test]
fn outputs_are_protected_unless_forced() {
    let dir = tempfile::tempdir().unwrap();
    let netlist = dir.path().join("n.net");
    let run = |extra: &[&str]| {
        let mut cmd = bin();
        cmd.args(["generate", "fock", "--stages", "1", "--out"]).arg(&netlist);
        cmd.args(extra);
        cmd.output().unwrap()
    };

    assert!(run(&[]).status.success());
    let first = std::fs::read_to_string(&netlist).unwrap();

    let refused = run(&[]);
    assert_eq!(refused.status.code(), Some(2));
    assert!(stderr_text(&refused).contains("--force"), "{}", stderr_text(&refused));
    assert_eq!(std::fs::read_to_string(&netlist).unwrap(), first, "refusal must not touch the file");

    assert!(run(&["--force"]).status.success());
    assert_eq!(std::fs::read_to_string(&netlist).unwrap(), first);
}
