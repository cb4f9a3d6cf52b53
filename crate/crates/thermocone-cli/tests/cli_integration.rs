//! End-to-end checks of the `thermocone` binary: documented example
//! invocations, output schemas, exit codes, and byte-level determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thermocone"))
        .args(args)
        .output()
        .expect("binary must spawn")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout must be valid JSON")
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("thermocone-cli-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn closed_form_example_prints_the_reference_volumes() {
    let out = run(&[
        "volume",
        "--state",
        "0.6,0.3,0.1",
        "--beta",
        "0",
        "--method",
        "closed-form",
    ]);
    let doc = stdout_json(&out);
    let r = &doc["results"];
    assert!((r["v_future"].as_f64().unwrap() - 0.37).abs() < 1e-12);
    assert!((r["v_past"].as_f64().unwrap() - 0.36).abs() < 1e-12);
    assert!((r["v_incomparable"].as_f64().unwrap() - 0.27).abs() < 1e-12);
    assert_eq!(doc["provenance"]["seed"], 0);
    assert!(doc["provenance"]["version"].is_string());
    assert_eq!(doc["config"]["method"], "closed-form");
}

#[test]
fn sharp_state_future_covers_the_simplex() {
    let out = run(&["cones", "--state", "1,0,0", "--beta", "0"]);
    let doc = stdout_json(&out);
    let verts = doc["results"]["future_vertices"].as_array().unwrap();
    assert_eq!(verts.len(), 3, "sharp source reaches the whole simplex");
    for corner in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] {
        assert!(
            verts.iter().any(|v| {
                v.as_array()
                    .unwrap()
                    .iter()
                    .zip(corner)
                    .all(|(a, b)| (a.as_f64().unwrap() - b).abs() < 1e-12)
            }),
            "missing simplex corner {corner:?}"
        );
    }
}

#[test]
fn cones_inventory_is_complete_and_projected_tangents_are_states() {
    let out = run(&[
        "cones",
        "--state",
        "0.4,0.36,0.24",
        "--energies",
        "0,1,2",
        "--beta",
        "0.5",
    ]);
    let doc = stdout_json(&out);
    let r = &doc["results"];
    assert!(!r["future_vertices"].as_array().unwrap().is_empty());
    assert_eq!(r["past_chambers"].as_array().unwrap().len(), 6);
    assert_eq!(r["incomparable_piece_count"], 12);
    let tangents = r["tangents"].as_array().unwrap();
    assert_eq!(tangents.len(), 18, "one tangent per chamber and level");
    for t in tangents {
        let sum: f64 = t["projected"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .sum();
        assert!((sum - 1.0).abs() < 1e-9, "projected tangent must normalize");
    }
}

#[test]
fn sweep_csv_is_versioned_and_deterministic() {
    let args = [
        "sweep",
        "--state",
        "0.52,0.12,0.36",
        "--energies",
        "0,1,2",
        "--betas",
        "0:3:0.5",
        "--format",
        "csv",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "reruns must be byte-identical");
    let text = String::from_utf8(first.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# thermocone-schema v1"));
    let header = lines.next().unwrap();
    assert!(header.ends_with("permutation,kink"));
    // 7 betas (0, 0.5, ..., 3) x 6 permutations
    assert_eq!(text.lines().count(), 2 + 7 * 6);
}

#[test]
fn beta_accepts_the_infinite_limit() {
    let out = run(&["volume", "--state", "0.6,0.3,0.1", "--beta", "inf"]);
    let doc = stdout_json(&out);
    let r = &doc["results"];
    // ground-collapsed limit: the order is total, nothing is incomparable
    assert!((r["v_future"].as_f64().unwrap() - 0.16).abs() < 1e-9);
    assert!((r["v_past"].as_f64().unwrap() - 0.84).abs() < 1e-9);
    assert_eq!(r["v_incomparable"].as_f64().unwrap(), 0.0);
}

#[test]
fn validation_failures_exit_2_and_leave_no_file() {
    let path = temp_path("invalid.json");
    let out = run(&[
        "volume",
        "--state",
        "0.5,0.6",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("sum"), "message must name the precondition: {stderr}");
    assert!(!path.exists(), "failed runs must not leave output files");
}

#[test]
fn io_failures_exit_3() {
    let out = run(&[
        "volume",
        "--state",
        "0.6,0.3,0.1",
        "--output",
        "/nonexistent-dir/deep/x.json",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn csv_requests_without_a_schema_exit_2() {
    let out = run(&["cones", "--state", "0.4,0.36,0.24", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn qubit_gp_writes_idempotent_files() {
    let path = temp_path("gp.json");
    let args = [
        "qubit",
        "--bloch",
        "0.2,0,0.5",
        "--zeta",
        "0.333333",
        "--mode",
        "gp",
        "--output",
        path.to_str().unwrap(),
    ];
    let first = run(&args);
    assert!(first.status.success(), "stderr: {}", String::from_utf8_lossy(&first.stderr));
    let bytes1 = std::fs::read(&path).unwrap();
    let second = run(&args);
    assert!(second.status.success());
    let bytes2 = std::fs::read(&path).unwrap();
    assert_eq!(bytes1, bytes2, "reruns must be byte-identical");
    assert!(!PathBuf::from(format!("{}.tmp", path.display())).exists());

    let doc: serde_json::Value = serde_json::from_slice(&bytes1).unwrap();
    let r = &doc["results"];
    assert!((r["r1"].as_f64().unwrap() - 0.220618791323).abs() < 1e-3);
    assert!((r["r2"].as_f64().unwrap() - 0.345618791323).abs() < 1e-3);
    assert_eq!(r["circle1"].as_array().unwrap().len(), 1024);
    std::fs::remove_file(&path).ok();
}

#[test]
fn qubit_to_emits_labelled_polylines_in_csv() {
    let out = run(&[
        "qubit",
        "--bloch",
        "0.2,0,0.5",
        "--zeta",
        "0.333333",
        "--mode",
        "to",
        "--format",
        "csv",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# curve=future_boundary"));
    assert!(text.contains("# curve=past_piece1"));
    assert!(text.contains("coherence,population"));
}

#[test]
fn entangle_csv_carries_sampling_metadata_and_follows_the_seed() {
    let args = [
        "entangle",
        "--n",
        "2",
        "--m",
        "2",
        "--samples",
        "2000",
        "--resolution",
        "10",
        "--format",
        "csv",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.contains("# n_sys=2 m_env=2 samples=2000 seed=0"));

    let mut reseeded_args = args.to_vec();
    reseeded_args.extend(["--seed", "1"]);
    let reseeded = run(&reseeded_args);
    assert!(reseeded.status.success());
    assert_ne!(
        String::from_utf8(reseeded.stdout).unwrap(),
        text,
        "a different seed must change the estimates"
    );
}

#[test]
fn entangle_orientation_flag_swaps_the_volume_labels() {
    let base = [
        "entangle", "--n", "2", "--m", "2", "--samples", "500", "--resolution", "4",
    ];
    let native = stdout_json(&run(&base));
    let mut swapped_args = base.to_vec();
    swapped_args.extend(["--orientation", "thermodynamic"]);
    let swapped = stdout_json(&run(&swapped_args));
    let n0 = &native["results"][0]["report"];
    let s0 = &swapped["results"][0]["report"];
    assert_eq!(n0["v_future"], s0["v_past"]);
    assert_eq!(n0["v_past"], s0["v_future"]);
}

#[test]
fn prob_grid_classifies_reference_points() {
    let out = run(&[
        "prob",
        "--state",
        "0.7,0.2,0.1",
        "--p",
        "1,0.75",
        "--resolution",
        "10",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# thermocone-schema v1"));
    assert!(text.contains("0.7,0.2,0.1,1,Interconvertible"));
    assert!(text.contains("1,0,0,1,Future"));
    // 2 probabilities x C(12,2) grid states + schema + header
    assert_eq!(text.lines().count(), 2 + 2 * 66);
}

#[test]
fn iso_grid_at_beta_zero_is_permutation_symmetric() {
    let out = run(&["iso", "--beta", "0", "--resolution", "6", "--format", "json"]);
    let doc = stdout_json(&out);
    let rows = doc["results"].as_array().unwrap();
    assert_eq!(rows.len(), 28, "C(8,2) grid states at resolution 6");
    // collect volumes keyed by sorted state; permuted states must agree
    let mut by_sorted: std::collections::HashMap<String, (f64, f64)> = std::collections::HashMap::new();
    for row in rows {
        let mut s: Vec<f64> = row["state"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap())
            .collect();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let key = format!("{s:?}");
        let vf = row["report"]["v_future"].as_f64().unwrap();
        let vp = row["report"]["v_past"].as_f64().unwrap();
        if let Some((f0, p0)) = by_sorted.get(&key) {
            assert!((vf - f0).abs() < 1e-9 && (vp - p0).abs() < 1e-9);
        } else {
            by_sorted.insert(key, (vf, vp));
        }
    }
}
