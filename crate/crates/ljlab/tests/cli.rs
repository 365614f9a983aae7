//! End-to-end checks of the command-line interface.

use std::process::{Command, Output};

fn ljlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ljlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn list_kernels_prints_the_registry() {
    let out = ljlab(&["list-kernels"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert!(lines.len() >= 9, "{text}");
    for name in ["Oracle", "Sorted", "AoS4_V4", "SoA_V8_RLE", "AoS8_V8_RLE_SWP"] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
}

#[test]
fn verify_passes_for_a_vector_kernel() {
    let out = ljlab(&["verify", "--kernel", "SoA_V8_RLE", "--cells", "8"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("OK"), "{text}");
    assert!(text.contains("n=2048"), "{text}");
}

#[test]
fn verify_every_registry_kernel_is_reachable() {
    for name in [
        "Oracle",
        "Pair",
        "Sorted",
        "SortedSWP",
        "AoS4_V4",
        "AoS4_V4_SWP",
        "SoA_V8_RLE",
        "SoA_V8_RLE_SWP",
        "AoS8_V8_RLE_SWP",
        "AoS8_V4_SWP",
    ] {
        let out = ljlab(&["verify", "--kernel", name, "--cells", "4", "--portable"]);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn verify_fails_with_impossible_tolerance() {
    // The reference trivially matches itself, so force a failure with a
    // kernel whose accumulation order differs.
    let out = ljlab(&["verify", "--kernel", "Pair", "--cells", "4", "--tol", "1e-30"]);
    assert!(!out.status.success());
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("FAIL"));
}

#[test]
fn unknown_kernel_is_a_usage_error() {
    let out = ljlab(&["verify", "--kernel", "NoSuchKernel", "--cells", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_flags_exit_with_usage_error() {
    let out = ljlab(&["bench", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bench_csv_has_header_and_one_row_per_kernel() {
    let out = ljlab(&[
        "bench", "--kernels", "Sorted", "--repeats", "1", "--warmup", "0", "--cells", "8",
        "--format", "csv",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines.len(), 2, "{text}");
    assert_eq!(
        lines[0],
        "kernel,layout,path,n,min_s,mean_s,stddev_s,pairs_in_cutoff,checksum"
    );
    assert!(lines[1].starts_with("Sorted,SoA,scalar,2048,"), "{text}");
}

#[test]
fn bench_reaches_every_registry_kernel() {
    let out = ljlab(&[
        "bench", "--kernels", "all", "--repeats", "1", "--warmup", "0", "--cells", "4",
        "--format", "csv",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    // Header plus one row per registered kernel.
    assert_eq!(text.trim_end().lines().count(), 11, "{text}");
    assert!(text.contains("Oracle,"), "{text}");
    assert!(text.contains("AoS8_V4_SWP,"), "{text}");
}

#[test]
fn gen_then_bench_from_file() {
    let dir = std::env::temp_dir().join(format!("ljlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let dump = dir.join("system.xyz");

    let out = ljlab(&["gen", "--cells", "2", "--out", dump.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&dump).unwrap();
    assert_eq!(text.lines().next().unwrap().trim(), "32");

    let out = ljlab(&[
        "bench", "--kernels", "Pair,SoA_V8_RLE", "--repeats", "1", "--warmup", "0", "--file",
        dump.to_str().unwrap(), "--format", "json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0]["kernel"], "Pair");
    assert_eq!(rows[0]["n"], 32);

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn gen_writes_to_stdout_by_default() {
    let out = ljlab(&["gen", "--cells", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap().trim(), "4");
    // Count line, comment line, one line per atom.
    assert_eq!(text.trim_end().lines().count(), 6);
}
