//! Command-line behavior: flag parsing, config-file merging, units and
//! format handling, exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_blockfade")
}

fn tmpdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("blockfade-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn blockfade")
}

fn fast_closed_form(extra: &[&str]) -> Vec<String> {
    let mut args = vec![
        "bounds",
        "--snr-db",
        "25",
        "--coherence",
        "20",
        "--blocks",
        "10",
        "--bound",
        "na_highsnr_closed,capacity_lower",
    ];
    args.extend_from_slice(extra);
    let out = run(&args);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap().lines().map(str::to_string).collect()
}

#[test]
fn csv_header_is_stable() {
    let lines = fast_closed_form(&[]);
    assert_eq!(
        lines[0],
        "snr_db,t,l,epsilon,kind,rate_nats,rate_bits,ci_low,ci_high,samples,seed"
    );
    assert_eq!(lines.len(), 3);
}

#[test]
fn bits_are_nats_over_ln2_row_by_row() {
    let lines = fast_closed_form(&[]);
    for line in &lines[1..] {
        let cols: Vec<&str> = line.split(',').collect();
        let nats: f64 = cols[5].parse().unwrap();
        let bits: f64 = cols[6].parse().unwrap();
        assert!((bits - nats / std::f64::consts::LN_2).abs() < 1e-9 * nats.abs());
    }
}

#[test]
fn units_flag_switches_ci_columns() {
    let nats = fast_closed_form(&["--units", "nats"]);
    let bits = fast_closed_form(&["--units", "bits"]);
    let get = |lines: &Vec<String>, col: usize| -> f64 {
        lines[1].split(',').nth(col).unwrap().parse().unwrap()
    };
    // rate columns identical, ci columns converted
    assert_eq!(nats[1].split(',').nth(5), bits[1].split(',').nth(5));
    let ci_nats = get(&nats, 7);
    let ci_bits = get(&bits, 7);
    assert!((ci_bits - ci_nats / std::f64::consts::LN_2).abs() < 1e-9 * ci_nats.abs().max(1e-12));
}

#[test]
fn empty_blocks_list_is_a_usage_error() {
    let out = Command::new(bin())
        .args(["bounds", "--blocks", "", "--bound", "capacity_lower"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn unknown_bound_kind_is_rejected() {
    let out = run(&["bounds", "--bound", "nonsense"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nonsense"));
}

#[test]
fn unknown_figure_id_is_rejected() {
    let out = run(&["figure", "--fig", "9"]);
    assert!(!out.status.success());
}

#[test]
fn coherence_too_small_reports_offending_row() {
    let out = run(&["bounds", "--coherence", "2", "--bound", "capacity_lower"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("T = 2"));
}

#[test]
fn json_output_parses() {
    let out = run(&[
        "bounds",
        "--snr-db",
        "15",
        "--coherence",
        "20",
        "--blocks",
        "5",
        "--bound",
        "na_coherent",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["kind"], "na_coherent");
    assert_eq!(rows[0]["t"], 20);
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tmpdir("config");
    let cfg_path: &Path = &dir.join("run.cfg");
    std::fs::write(
        cfg_path,
        "# comment line\nsnr-db = 15\ncoherence = 20\nblocks = 7\nbound = capacity_lower\nepsilon = 1e-2\n",
    )
    .unwrap();
    let out = run(&["--config", cfg_path.to_str().unwrap(), "bounds"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().contains(",20,7,"), "{text}");

    // flag overrides the file value
    let out2 = run(&[
        "--config",
        cfg_path.to_str().unwrap(),
        "bounds",
        "--blocks",
        "9",
    ]);
    let text2 = String::from_utf8(out2.stdout).unwrap();
    assert!(text2.lines().nth(1).unwrap().contains(",20,9,"), "{text2}");
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn malformed_config_file_is_rejected() {
    let dir = tmpdir("badcfg");
    let cfg_path = dir.join("bad.cfg");
    std::fs::write(&cfg_path, "this is not a key value pair\n").unwrap();
    let out = run(&["--config", cfg_path.to_str().unwrap(), "bounds"]);
    assert!(!out.status.success());
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn out_flag_writes_the_file_and_stdout_stays_empty() {
    let dir = tmpdir("outfile");
    let path = dir.join("rates.csv");
    let out = run(&[
        "bounds",
        "--snr-db",
        "15",
        "--coherence",
        "20",
        "--blocks",
        "5",
        "--bound",
        "capacity_lower",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("snr_db,"));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn aloha_emits_full_grid() {
    let out = run(&["aloha"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // 4 models × 2 SNRs × 2 coherence intervals + comment + header
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 1 + 16);
    assert!(rows[0].starts_with("snr_db,t,model,"));
}

#[test]
fn figure_datasets_have_the_published_curve_families() {
    // tiny sample count keeps this a structural check
    let out = run(&[
        "figure", "--fig", "1", "--samples", "1000", "--blocks", "2,5",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    for kind in [
        "dt",
        "mc",
        "na_highsnr_closed",
        "na_highsnr_simplified",
        "na_coherent",
        "capacity_lower",
    ] {
        assert!(
            text.lines().any(|l| l.split(',').nth(4) == Some(kind)),
            "fig 1 missing {kind}"
        );
    }

    let out3 = run(&["figure", "--fig", "3", "--samples", "1000", "--coherence", "100,250"]);
    assert!(out3.status.success());
    let text3 = String::from_utf8(out3.stdout).unwrap();
    assert!(
        text3.lines().any(|l| l.split(',').nth(4) == Some("na_quasistatic")),
        "fig 3 missing the quasistatic curve"
    );
    // L·T = 500 is preserved
    for line in text3.lines().filter(|l| !l.starts_with('#') && !l.starts_with("snr_db")) {
        let cols: Vec<&str> = line.split(',').collect();
        let t: u32 = cols[1].parse().unwrap();
        let l: u32 = cols[2].parse().unwrap();
        assert_eq!(t * l, 500, "{line}");
    }

    let out6 = run(&["figure", "--fig", "6", "--samples", "1000", "--snr-db", "25"]);
    assert!(out6.status.success());
    let text6 = String::from_utf8(out6.stdout).unwrap();
    assert!(text6.contains("out of scope"), "fig 6 must note the omitted measured curve");
}
