//! One test per acceptance criterion. Each prints a `PASS`/`FAIL` line with its
//! measured runtime; a lock keeps timed sections from overlapping. Lines go straight to
//! the stderr handle so they appear even when the harness captures output.

use std::io::Write;
use std::process::Command;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use dirac_spectra::verify::{run_check, CHECKS};

static SERIAL: Mutex<()> = Mutex::new(());

fn report(line: String) {
    let _ = writeln!(std::io::stderr().lock(), "{line}");
}

fn criterion(id: u32) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let spec = CHECKS.iter().find(|c| c.id == id).unwrap();
    let start = Instant::now();
    let r = run_check(id);
    let elapsed = start.elapsed();
    let in_time = elapsed <= Duration::from_secs_f64(spec.budget);
    let ok = r.passed && in_time;
    report(format!(
        "{} criterion {:>2} {}: {} [{:.2}s, limit {}s]",
        if ok { "PASS" } else { "FAIL" },
        id,
        r.name,
        r.detail,
        elapsed.as_secs_f64(),
        spec.budget
    ));
    assert!(r.passed, "criterion {id} failed: {}", r.detail);
    assert!(in_time, "criterion {id} took {:.2}s, limit {}s", elapsed.as_secs_f64(), spec.budget);
}

#[test]
fn criterion_01_soliton_exactness() {
    criterion(1);
}

#[test]
fn criterion_02_quadrature_agreement() {
    criterion(2);
}

#[test]
fn criterion_03_explicit_eigenpairs() {
    criterion(3);
}

#[test]
fn criterion_04_evans_exact_zeros() {
    criterion(4);
}

#[test]
fn criterion_05_zero_free_rectangle() {
    criterion(5);
}

#[test]
fn criterion_06_stability_sweep() {
    criterion(6);
}

#[test]
fn criterion_07_gap_spectra() {
    criterion(7);
}

#[test]
fn criterion_08_wkb_toy() {
    criterion(8);
}

#[test]
fn criterion_09_resonance_crossings() {
    criterion(9);
}

#[test]
fn criterion_10_small_amplitude_formula() {
    criterion(10);
}

#[test]
fn criterion_11_deterministic_verify_report() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let dir = tempfile::tempdir().unwrap();
    let run_verify = |name: &str| {
        let path = dir.path().join(name);
        let out = Command::new(env!("CARGO_BIN_EXE_dirac-spectra"))
            .args(["--no-cache", "verify", "--out"])
            .arg(&path)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(path).unwrap()
    };
    let (a, b) = (run_verify("a.txt"), run_verify("b.txt"));
    let table = String::from_utf8_lossy(&a);
    let rows = table.lines().filter(|l| l.starts_with("PASS") || l.starts_with("FAIL")).count();
    let ok = a == b && rows == CHECKS.len();
    report(format!(
        "{} criterion 11 determinism: {} bytes, {rows} rows, identical = {}",
        if ok { "PASS" } else { "FAIL" },
        a.len(),
        a == b
    ));
    assert_eq!(rows, CHECKS.len());
    assert!(a == b, "verify reports differ");
}
