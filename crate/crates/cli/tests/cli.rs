//! End-to-end tests of the compiled binary: argument handling, config
//! validation, exit codes, and the layout of the emitted files.

use std::path::Path;
use std::process::{Command, Output};

fn starwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_starwave"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, body).expect("config write");
    path.to_str().expect("utf-8 path").to_string()
}

const BASIC_DYNAMICS: &str = "\
[physics]
hbar = 0.1
q = 2.0
p = -1.0

[times]
list = [0.5, 1.0]
";

#[test]
fn invalid_physics_exits_with_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[physics]\nhbar = 0.1\nq = -2.0\np = -1.0\n\n[times]\nlist = [0.5]\n",
    );
    let out = starwave(&["theorem-dynamics", "--config", &config]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("config error"), "stderr: {stderr}");
    assert!(stderr.contains("q"), "stderr: {stderr}");
}

#[test]
fn missing_config_file_exits_with_config_error() {
    let out = starwave(&["theorem-dynamics", "--config", "/nonexistent/run.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("config error"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[physics]\nhbar = 0.1\nq = 2.0\np = -1.0\nomega = 3.0\n\n[times]\nlist = [0.5]\n",
    );
    let out = starwave(&["theorem-dynamics", "--config", &config]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("config error"), "stderr: {stderr}");
}

#[test]
fn missing_times_is_rejected_when_the_experiment_needs_them() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[physics]\nhbar = 0.1\nq = 2.0\np = -1.0\n");
    let out = starwave(&["theorem-dynamics", "--config", &config]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("times"));
}

#[test]
fn passing_run_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), BASIC_DYNAMICS);
    let out_dir = dir.path().join("out");
    let out = starwave(&[
        "theorem-dynamics",
        "--config",
        &config,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let csv = std::fs::read_to_string(out_dir.join("theorem-dynamics.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "experiment,hbar,mass,sigma0,q,p,sign,n_edges,cutoff,eta,x_max,grid_n,t,lhs,rhs,pass,tail_mass,refine_delta"
    );
    assert_eq!(lines.len(), 3, "one data row per requested time");
    for line in &lines[1..] {
        assert!(line.starts_with("theorem-dynamics,"));
        assert!(line.contains(",true,"), "row should pass: {line}");
    }

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("results.json")).unwrap())
            .unwrap();
    assert_eq!(summary["experiment"], "theorem-dynamics");
    assert_eq!(summary["row_count"], 2);
    assert_eq!(summary["failure_count"], 0);
    assert_eq!(summary["all_pass"], true);
}

#[test]
fn hbar_flag_overrides_the_config_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), BASIC_DYNAMICS);
    let out_dir = dir.path().join("out");
    let out = starwave(&[
        "theorem-dynamics",
        "--config",
        &config,
        "--out",
        out_dir.to_str().unwrap(),
        "--hbar",
        "0.1",
        "--hbar",
        "0.05",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(out_dir.join("theorem-dynamics.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 4, "two hbar values, two times each");
    assert_eq!(rows.iter().filter(|r| r.contains(",5.0000000000000003e-2,")).count(), 2);
}

#[test]
fn grid_override_is_recorded_in_the_rows() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), BASIC_DYNAMICS);
    let out_dir = dir.path().join("out");
    let out = starwave(&[
        "theorem-dynamics",
        "--config",
        &config,
        "--out",
        out_dir.to_str().unwrap(),
        "--grid-n",
        "1024",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(out_dir.join("theorem-dynamics.csv")).unwrap();
    for row in csv.lines().skip(1) {
        let grid_n = row.split(',').nth(11).unwrap();
        assert_eq!(grid_n, "1024", "row: {row}");
    }
}

#[test]
fn geometric_time_range_resolves_to_the_expected_list() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[physics]\nhbar = 0.1\nq = 2.0\np = -1.0\n\n[times]\nstart = 0.5\nstop = 2.0\ncount = 3\nspacing = \"geometric\"\n",
    );
    let out_dir = dir.path().join("out");
    let out = starwave(&[
        "theorem-dynamics",
        "--config",
        &config,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(out_dir.join("theorem-dynamics.csv")).unwrap();
    let times: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|row| row.split(',').nth(12).unwrap().parse().unwrap())
        .collect();
    assert_eq!(times.len(), 3);
    assert!((times[0] - 0.5).abs() < 1e-15);
    assert!((times[1] - 1.0).abs() < 1e-15);
    assert!((times[2] - 2.0).abs() < 1e-15);
}

#[test]
fn scatter_emits_the_three_edge_matrix_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[physics]\nhbar = 0.05\nq = 18.0\np = -1.3\n\n[grid]\nx_max = 40.0\nn_points = 1024\n",
    );
    let out_dir = dir.path().join("out");
    let out = starwave(&[
        "scatter",
        "--config",
        &config,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let matrix = std::fs::read_to_string(out_dir.join("smatrix.csv")).unwrap();
    let rows: Vec<Vec<f64>> = matrix
        .lines()
        .map(|line| line.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 3);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), 3);
        for (j, &value) in row.iter().enumerate() {
            let expect = if i == j { 1.0 / 3.0 } else { -2.0 / 3.0 };
            assert_eq!(value, expect, "entry ({i},{j})");
        }
    }
}

#[test]
fn evolve_snapshots_conserve_the_total_mass() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[physics]\nhbar = 0.05\nq = 16.0\np = -1.3\n\n[grid]\nx_max = 40.0\nn_points = 512\n\n[times]\nlist = [0.0, 2.0, 5.0]\n",
    );
    let out_dir = dir.path().join("out");
    let out = starwave(&[
        "evolve",
        "--config",
        &config,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let dx = 40.0 / 512.0;
    let mut masses = Vec::new();
    for t_index in 0..3 {
        let snapshot =
            std::fs::read_to_string(out_dir.join(format!("evolve_h0_t{t_index}.csv"))).unwrap();
        let mut mass = 0.0;
        for row in snapshot.lines().skip(1) {
            let cols: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
            // Columns cycle re, im, abs2 per edge after the leading x.
            for edge in 0..3 {
                mass += cols[3 * edge + 3] * dx;
            }
        }
        masses.push(mass);
    }
    for mass in &masses[1..] {
        let drift = (mass / masses[0] - 1.0).abs();
        assert!(drift < 1e-10, "mass drift {drift:.3e} across snapshots");
    }
}

#[test]
fn nd_decay_reports_the_known_bound_failure_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[physics]\nhbar = 1.0\nmass = 0.5\nq = 4.0\np = 1.0\n\n[cutoff]\nvariant = \"smooth\"\neta = 0.25\n\n[grid]\nx_max = 256.0\nn_points = 2048\n\n[times]\nlist = [1.0, 2.0, 4.0]\n",
    );
    let out_dir = dir.path().join("out");
    let out = starwave(&[
        "nd-decay",
        "--config",
        &config,
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    // The t=2 defect sits above the t=1-pinned envelope, so the run reports
    // a bound failure.
    assert_eq!(out.status.code(), Some(1), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("results.json")).unwrap())
            .unwrap();
    assert_eq!(summary["all_pass"], false);
    let decay = summary["extras"]["decay"].as_array().unwrap();
    assert_eq!(decay.len(), 2, "one fit per flow direction");
    for fit in decay {
        assert!(fit["slope"].as_f64().unwrap() < 0.0);
        assert_eq!(fit["monotone_pass"], true);
    }
}
