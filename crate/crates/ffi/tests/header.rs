use std::path::Path;
use std::process::Command;

fn header() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/dirac_spectra.h")
}

#[test]
fn header_declares_api() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in [
        "ds_profile_closed_form",
        "ds_profile_quadrature",
        "ds_profile_free",
        "ds_evans_pair",
        "ds_refine_zero",
        "ds_h_spectrum",
        "ds_threshold_phase",
        "ds_wkb_phase",
        "ds_last_error_message",
        "typedef struct DsProfile DsProfile;",
        "DS_STATUS_OK = 0",
    ] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = which_cc() else { return };
    let dir = tempfile_dir();
    let src = dir.join("use_header.c");
    std::fs::write(
        &src,
        "#include \"dirac_spectra.h\"\nint main(void) { DsProfile *p = 0; DsStatus s = ds_profile_closed_form(0.5, 20.0, 0.01, &p); ds_profile_free(p); return (int)s; }\n",
    )
    .unwrap();
    let out = Command::new(cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(header().parent().unwrap())
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn which_cc() -> Result<&'static str, ()> {
    ["cc", "gcc", "clang"]
        .into_iter()
        .find(|c| Command::new(c).arg("--version").output().is_ok())
        .ok_or(())
}

fn tempfile_dir() -> std::path::PathBuf {
    let d = std::env::temp_dir().join(format!("ds-header-{}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}
