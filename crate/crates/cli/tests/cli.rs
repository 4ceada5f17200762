//! End-to-end tests of the binary: artifact shapes, determinism, override
//! precedence, and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wgspdc"))
}

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

/// Minimal config pointing at the repo's synthetic dispersion file.
fn write_config(dir: &Path, fwhm_nm: f64, samples: usize) -> PathBuf {
    let disp = data_dir().join("synthetic_guide.disp");
    let text = format!(
        r#"
[dispersion]
file = "{disp}"

[waveguide]
length_mm = 1.3
qpm_period_um = 3.9872408293460717
qpm_order = 1

[pump]
center_nm = 418.0
fwhm_nm = {fwhm_nm}

[geometry]
width_um = 4.0
depth_um = 8.0

[[triplet]]
pump = "00"
signal = "00"
idler = "00"

[[triplet]]
pump = "00"
signal = "01"
idler = "01"

[grid]
signal_min_nm = 790.0
signal_max_nm = 880.0
signal_samples = {samples}
idler_min_nm = 790.0
idler_max_nm = 880.0
idler_samples = {samples}

[rates]
pair_rate_hz = 1.0e6

[design]
pump_nm = 418.0
signal_nm = 836.0
idler_nm = 836.0

[output]
dir = "out"
format = "both"
"#,
        disp = disp.display(),
    );
    let path = dir.join("config.toml");
    fs::write(&path, text).unwrap();
    path
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "command {:?} failed:\n{}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort_by(|a, b| a.0.cmp(&b.0));
    files
}

#[test]
fn jsa_outputs_are_byte_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), 5.0, 65);
    let out1 = tmp.path().join("run1");
    let out4 = tmp.path().join("run4");
    run_ok(&[
        "jsa", "-c", config.to_str().unwrap(),
        "--out", out1.to_str().unwrap(),
        "--threads", "1",
    ]);
    run_ok(&[
        "jsa", "-c", config.to_str().unwrap(),
        "--out", out4.to_str().unwrap(),
        "--threads", "4",
    ]);
    let a = dir_contents(&out1);
    let b = dir_contents(&out4);
    assert!(!a.is_empty());
    assert_eq!(a.len(), b.len());
    for ((name_a, bytes_a), (name_b, bytes_b)) in a.iter().zip(&b) {
        assert_eq!(name_a, name_b);
        assert_eq!(bytes_a, bytes_b, "file {name_a} differs across thread counts");
    }
}

#[test]
fn override_beats_config_file_value() {
    let tmp = tempfile::tempdir().unwrap();
    let config5 = write_config(&tmp.path().join_and_create("a"), 5.0, 33);
    let config4 = write_config(&tmp.path().join_and_create("b"), 4.0, 33);

    // File 4.0 overridden to 5.0 must equal a plain 5.0 run, and vice versa.
    let native5 = tmp.path().join("native5");
    let forced5 = tmp.path().join("forced5");
    let native4 = tmp.path().join("native4");
    let forced4 = tmp.path().join("forced4");
    run_ok(&["jsa", "-c", config5.to_str().unwrap(), "--out", native5.to_str().unwrap()]);
    run_ok(&[
        "jsa", "-c", config4.to_str().unwrap(),
        "--set", "pump.fwhm_nm=5.0",
        "--out", forced5.to_str().unwrap(),
    ]);
    run_ok(&["jsa", "-c", config4.to_str().unwrap(), "--out", native4.to_str().unwrap()]);
    run_ok(&[
        "jsa", "-c", config5.to_str().unwrap(),
        "--set", "pump.fwhm_nm=4.0",
        "--out", forced4.to_str().unwrap(),
    ]);

    assert_eq!(dir_contents(&native5), dir_contents(&forced5));
    assert_eq!(dir_contents(&native4), dir_contents(&forced4));
    assert_ne!(dir_contents(&native5), dir_contents(&native4));
}

trait JoinAndCreate {
    fn join_and_create(&self, name: &str) -> PathBuf;
}

impl JoinAndCreate for Path {
    fn join_and_create(&self, name: &str) -> PathBuf {
        let p = self.join(name);
        fs::create_dir_all(&p).unwrap();
        p
    }
}

#[test]
fn zero_weight_triplet_yields_all_zero_grid() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), 5.0, 17);
    let out = tmp.path().join("out");
    run_ok(&[
        "jsa", "-c", config.to_str().unwrap(),
        "--set", "triplet.0.weight_re=0.0",
        "--set", "triplet.1.weight_re=0.0",
        "--out", out.to_str().unwrap(),
    ]);
    let text = fs::read_to_string(out.join("jsi_total.csv")).unwrap();
    for line in text.lines().skip(3) {
        for field in line.split(',').skip(2) {
            assert_eq!(field.parse::<f64>().unwrap(), 0.0);
        }
    }
}

#[test]
fn reduce_matches_reference_percentages() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), 5.0, 17);
    let out = tmp.path().join("out");
    let rows = data_dir().join("measured_rates_sample.csv");
    run_ok(&[
        "reduce", "-c", config.to_str().unwrap(),
        "--rows", rows.to_str().unwrap(),
        "--out", out.to_str().unwrap(),
    ]);
    let text = fs::read_to_string(out.join("reduce.csv")).unwrap();
    let expected = [17.87, 17.66, 18.54, 18.31, 17.94, 17.29];
    let lines: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(lines.len(), 6);
    for (line, pct) in lines.iter().zip(expected) {
        let cols: Vec<&str> = line.split(',').collect();
        let raw_pct: f64 = cols[5].parse().unwrap();
        assert!((raw_pct - pct).abs() <= 0.01, "got {raw_pct}, expected {pct}");
    }
}

#[test]
fn design_period_matches_closed_form() {
    // Constant-index data: Λ = λp/(n_p − n_dc) = 0.418/0.2 μm = 2.09 μm.
    let tmp = tempfile::tempdir().unwrap();
    let disp = tmp.path().join("const.disp");
    fs::write(
        &disp,
        "mode = 00\nkind = constant\nrange_um = 0.3 1.3\nn = 2.0\n\
         mode = 01\nkind = constant\nrange_um = 0.3 1.3\nn = 1.8\n",
    )
    .unwrap();
    let config = tmp.path().join("config.toml");
    fs::write(
        &config,
        format!(
            "[dispersion]\nfile = \"{}\"\n\
             [waveguide]\nlength_mm = 1.3\nqpm_period_um = 1.0\n\
             [[triplet]]\npump = \"00\"\nsignal = \"01\"\nidler = \"01\"\nweight_re = 1.0\n\
             [design]\npump_nm = 418.0\nsignal_nm = 836.0\nidler_nm = 836.0\n\
             [output]\ndir = \"out\"\nformat = \"json\"\n",
            disp.display()
        ),
    )
    .unwrap();
    let out = tmp.path().join("out");
    run_ok(&[
        "design-period", "-c", config.to_str().unwrap(),
        "--out", out.to_str().unwrap(),
    ]);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("design_period.json")).unwrap()).unwrap();
    let period_um = json["period_um"].as_f64().unwrap();
    assert!((period_um - 2.09).abs() < 1e-9, "got {period_um}");
    assert!(json["residual_rad_m"].as_f64().unwrap().abs() <= 1e-6);
}

#[test]
fn missing_config_file_exits_with_io_code() {
    let out = bin().args(["jsa", "-c", "/nonexistent/config.toml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn bad_config_key_exits_with_config_code() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("bad.toml");
    fs::write(&config, "[pmup]\ncenter_nm = 418.0\n").unwrap();
    let out = bin().args(["jsa", "-c", config.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("pmup"), "stderr: {stderr}");
}

#[test]
fn malformed_dispersion_file_exits_with_data_code() {
    let tmp = tempfile::tempdir().unwrap();
    let disp = tmp.path().join("bad.disp");
    fs::write(&disp, "mode = 00\nkind = constant\nrange_um = 0.3 1.3\nn = oops\n").unwrap();
    let config = tmp.path().join("config.toml");
    fs::write(
        &config,
        format!(
            "[dispersion]\nfile = \"{}\"\n\
             [waveguide]\nlength_mm = 1.3\nqpm_period_um = 3.9\n\
             [pump]\ncenter_nm = 418.0\nfwhm_nm = 5.0\n\
             [[triplet]]\npump = \"00\"\nsignal = \"00\"\nidler = \"00\"\nweight_re = 1.0\n\
             [grid]\nsignal_min_nm = 790.0\nsignal_max_nm = 880.0\nsignal_samples = 9\n\
             idler_min_nm = 790.0\nidler_max_nm = 880.0\nidler_samples = 9\n",
            disp.display()
        ),
    )
    .unwrap();
    let out = bin().args(["jsa", "-c", config.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 4"), "stderr: {stderr}");
}

#[test]
fn repo_example_config_runs_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let config = data_dir().join("run.toml");
    let out = tmp.path().join("out");
    run_ok(&[
        "rates", "-c", config.to_str().unwrap(),
        "--set", "grid.signal_samples=65",
        "--set", "grid.idler_samples=65",
        "--out", out.to_str().unwrap(),
    ]);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("rates.json")).unwrap()).unwrap();
    let ratio = json["report"]["ratio_raw"].as_f64().unwrap();
    assert!(ratio > 0.0 && ratio < 1.0);
}
