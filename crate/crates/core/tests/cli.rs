// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

fn quatkern(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quatkern")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_ppm(path: &Path, width: usize, height: usize, pixels: &[[u8; 3]]) {
    let mut bytes = format!("P6\n{width} {height}\n255\n").into_bytes();
    for p in pixels {
        bytes.extend_from_slice(p);
    }
    std::fs::write(path, bytes).unwrap();
}

fn read_ppm_pixels(path: &Path) -> Vec<u8> {
    let bytes = std::fs::read(path).unwrap();
    // Header written by the tool is three newline-terminated lines.
    let mut newlines = 0;
    let start = bytes.iter().position(|&b| {
        newlines += usize::from(b == b'\n');
        newlines == 3
    });
    bytes[start.unwrap() + 1..].to_vec()
}

#[test]
fn verify_passes_and_is_deterministic() {
    let a = quatkern(&["verify", "--trials", "1000", "--seed", "0"]);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let text = stdout(&a);
    for kernel in ["sq", "qt", "sqt"] {
        assert!(text.lines().any(|l| l.starts_with(kernel) && l.ends_with("PASS")), "{text}");
    }
    assert_eq!(text, stdout(&quatkern(&["verify", "--trials", "1000", "--seed", "0"])));

    let json: serde_json::Value =
        serde_json::from_slice(&quatkern(&["verify", "--trials", "50", "--json"]).stdout).unwrap();
    assert_eq!(json["passed"], true);
    assert!(json["rows"].as_array().unwrap().iter().all(|r| r["rational_max_err"] == 0.0));
}

#[test]
fn verify_rejects_zero_trials() {
    assert_eq!(quatkern(&["verify", "--trials", "0"]).status.code(), Some(2));
}

#[test]
fn count_reports_matches() {
    let o = quatkern(&["count"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row = |k: &str| text.lines().find(|l| l.split_whitespace().next() == Some(k)).unwrap().to_string();
    assert!(row("direct").contains("16 / 12") && row("direct").ends_with("MATCH"));
    assert!(row("sq").ends_with("MATCH") && row("qt").ends_with("MATCH"));
    assert!(row("sqt").contains("{2:6,4:4}") && row("sqt").ends_with("MATCH"));
    assert!(row("sqt_shared").contains("{2:5,4:4}"));
    assert!(!text.contains("MISMATCH"));

    let json: serde_json::Value = serde_json::from_slice(&quatkern(&["count", "--json"]).stdout).unwrap();
    assert_eq!(json[3]["kernel"], "sqt");
    assert_eq!(json[3]["status"], "MATCH");
    assert_eq!(json[3]["two_input_equivalent"], 18);
}

#[test]
fn netlist_export() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sq.json");
    let o = quatkern(&["netlist", "--kernel", "sq", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["nodes"].as_array().unwrap().len(), 20);
    let again = quatkern(&["netlist", "--kernel", "sq", "--format", "json"]);
    assert_eq!(stdout(&again), text);

    let dot = stdout(&quatkern(&["netlist", "--kernel", "sq", "--format", "dot"]));
    assert!(dot.starts_with("digraph") && dot.trim_end().ends_with('}'));

    assert_eq!(quatkern(&["netlist", "--kernel", "nope"]).status.code(), Some(2));
    assert_eq!(quatkern(&["netlist", "--kernel", "sq", "--format", "svg"]).status.code(), Some(2));
    let missing = dir.path().join("no/such/dir/x.json");
    assert_eq!(quatkern(&["netlist", "--kernel", "sq", "--out", missing.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn fxp_sweep_csv() {
    let args = ["fxp", "--kernel", "sq", "--frac-min", "8", "--frac-max", "24", "--frac-step", "4", "--trials", "500"];
    let o = quatkern(&args);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    let lines: Vec<_> = csv.lines().collect();
    assert_eq!(lines[0], "fraction_bits,max_abs_err,rms_err,overflows");
    assert_eq!(lines.len(), 6);
    let max_err: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(max_err.windows(2).all(|w| w[1] < w[0]), "{max_err:?}");
    assert_eq!(csv, stdout(&quatkern(&args)));

    assert_eq!(quatkern(&["fxp", "--frac-min", "20", "--frac-max", "8"]).status.code(), Some(2));
    assert_eq!(quatkern(&["fxp", "--frac-step", "0"]).status.code(), Some(2));
}

#[test]
fn dqft_round_trip_within_one_level() {
    let dir = tempfile::tempdir().unwrap();
    let (w, h) = (7, 5);
    let pixels: Vec<[u8; 3]> =
        (0..w * h).map(|i| [(i * 37 % 256) as u8, (i * 91 % 256) as u8, (255 - i * 13 % 256) as u8]).collect();
    let input = dir.path().join("in.ppm");
    write_ppm(&input, w, h, &pixels);
    let original = std::fs::read(&input).unwrap();
    let spec = dir.path().join("spec.qspc");
    let back = dir.path().join("back.ppm");
    for method in ["naive", "rowcol"] {
        let o = quatkern(&[
            "dqft",
            "--input",
            input.to_str().unwrap(),
            "--output",
            spec.to_str().unwrap(),
            "--direction",
            "forward",
            "--method",
            method,
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(std::fs::metadata(&spec).unwrap().len(), 12 + (w * h * 32) as u64);
        let o = quatkern(&[
            "dqft",
            "--input",
            spec.to_str().unwrap(),
            "--output",
            back.to_str().unwrap(),
            "--direction",
            "inverse",
            "--method",
            method,
        ]);
        assert_eq!(o.status.code(), Some(0));
        let got = read_ppm_pixels(&back);
        let want: Vec<u8> = pixels.iter().flatten().copied().collect();
        assert_eq!(got.len(), want.len());
        assert!(got.iter().zip(&want).all(|(a, b)| a.abs_diff(*b) <= 1));
    }
    assert_eq!(std::fs::read(&input).unwrap(), original);
}

#[test]
fn dqft_white_pixel() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("white.ppm");
    write_ppm(&input, 1, 1, &[[255, 255, 255]]);
    let spec = dir.path().join("white.qspc");
    let o = quatkern(&["dqft", "--input", input.to_str().unwrap(), "--output", spec.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let bytes = std::fs::read(&spec).unwrap();
    let values: Vec<f64> = bytes[12..].chunks(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    assert_eq!(values, vec![0.0, 1.0, 1.0, 1.0]);
}

#[test]
fn dqft_rejects_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("short.ppm");
    std::fs::write(&input, b"P6\n4 4\n255\n\x01\x02\x03").unwrap();
    let out = dir.path().join("out.qspc");
    let o = quatkern(&["dqft", "--input", input.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
    let o = quatkern(&[
        "dqft",
        "--input",
        input.to_str().unwrap(),
        "--output",
        out.to_str().unwrap(),
        "--direction",
        "inverse",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let missing = dir.path().join("missing.ppm");
    assert_eq!(
        quatkern(&["dqft", "--input", missing.to_str().unwrap(), "--output", out.to_str().unwrap()]).status.code(),
        Some(1)
    );
}

#[test]
fn bench_rows_carry_budgets() {
    let o = quatkern(&["bench", "--sizes", "4,8", "--reps", "1", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    // Row-column 4x4: 128 calls of 6 multiplications against 16 each.
    assert_eq!(rows[0]["kernel_ops"]["mul_count"], 768);
    assert_eq!(rows[0]["baseline_ops"]["mul_count"], 2048);
    let again: serde_json::Value =
        serde_json::from_slice(&quatkern(&["bench", "--sizes", "4,8", "--reps", "2", "--json"]).stdout).unwrap();
    assert_eq!(rows[1]["kernel_ops"], again[1]["kernel_ops"]);
    assert_eq!(quatkern(&["bench", "--reps", "0"]).status.code(), Some(2));
    assert_eq!(quatkern(&["bench", "--sizes", ""]).status.code(), Some(2));
}

#[test]
fn no_subcommand_is_usage_error() {
    assert_eq!(quatkern(&[]).status.code(), Some(2));
    assert_eq!(quatkern(&["--help"]).status.code(), Some(0));
}
