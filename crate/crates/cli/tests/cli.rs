use std::path::Path;
use std::process::{Command, Output};

fn mbplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mbplan")).args(args).output().unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn grid_lists_every_channel() {
    let dir = tempfile::tempdir().unwrap();
    let out = mbplan(&["grid", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let text = read(dir.path(), "grid.csv");
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("channel_idx,band,center_hz,center_thz,bandwidth_ghz"));
    assert_eq!(lines.count(), 266);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("grid: 266 channels"));
}

#[test]
fn hpo_span_writes_trace_and_profile() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = mbplan(&["hpo-span", "--mode", "flp", "--length-km", "70", "--out", d]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = read(dir.path(), "hpo_span_trace.csv");
    assert!(trace.starts_with("candidate_dbm,tc_bps\n"));
    assert!(trace.lines().count() >= 2);
    let profile = read(dir.path(), "hpo_span_profile.csv");
    assert!(profile.starts_with("channel_idx,band,center_hz,launch_dbm,received_dbm,osnr_db,gsnr_db\n"));
    assert_eq!(profile.lines().count(), 267);
    let json: serde_json::Value = serde_json::from_str(&read(dir.path(), "hpo_span.json")).unwrap();
    assert_eq!(json["mode"], "FLP");

    let nested = tempfile::tempdir().unwrap();
    let again = mbplan(&["hpo", "span", "--length-km", "70", "--out", nested.path().to_str().unwrap()]);
    assert!(again.status.success());
    assert_eq!(trace, read(nested.path(), "hpo_span_trace.csv"));
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        let out = mbplan(&[
            "simulate",
            "--band-plan",
            "c",
            "--step-m",
            "500",
            "--iterations",
            "2",
            "--demands",
            "200",
            "--seed",
            "5",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["sim_curve.csv", "events/seed_5.jsonl", "events/seed_6.jsonl"] {
        assert_eq!(read(dirs[0].path(), name), read(dirs[1].path(), name), "{name}");
    }
    let curve = read(dirs[0].path(), "sim_curve.csv");
    assert!(curve.starts_with("demands,load_gbps,bbp_mean,bbp_std,lci_count_mean,gsnr_mean_db\n"));
    assert_eq!(read(dirs[0].path(), "events/seed_5.jsonl").lines().count(), 200);
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let out_dir = dir.path().join("o");
    std::fs::write(
        &cfg,
        format!(r#"{{"band_plan":{{"start_hz":190.9e12,"bands":[{{"name":"C","width_hz":6e12}}],"inter_band_gap_hz":4e11,"channel_spacing_hz":75e9,"base_slot_hz":12.5e9}},"out":{:?}}}"#, out_dir),
    )
    .unwrap();
    let out = mbplan(&["grid", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read(&out_dir, "grid.csv").lines().count(), 81);
    let out = mbplan(&["grid", "--config", cfg.to_str().unwrap(), "--band-plan", "lc"]);
    assert!(out.status.success());
    assert_eq!(read(&out_dir, "grid.csv").lines().count(), 161);
}

#[test]
fn usage_and_config_errors_exit_2() {
    assert_eq!(mbplan(&["teleport"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"sim":{"iterations":0}}"#).unwrap();
    assert_eq!(mbplan(&["grid", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&cfg, r#"{"unknown":true}"#).unwrap();
    assert_eq!(mbplan(&["grid", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    let missing = dir.path().join("nowhere.json");
    assert_eq!(mbplan(&["ccr", "--topology", missing.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn computation_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = mbplan(&["hpo-span", "--p-max-dbm", "-30", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("launch cap"));
}
