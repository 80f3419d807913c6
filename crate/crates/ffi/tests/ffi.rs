use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use padelab_ffi::*;

fn last_error() -> String {
    let p = padelab_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn arcsine(ns: &[usize]) -> *mut PadelabConfig {
    let mut cfg = ptr::null_mut();
    let name = CString::new("markov_arcsine").unwrap();
    unsafe {
        assert_eq!(padelab_config_bundled(name.as_ptr(), &mut cfg), PadelabStatus::Ok);
        assert_eq!(padelab_config_set_orders(cfg, ns.as_ptr(), ns.len()), PadelabStatus::Ok);
    }
    cfg
}

#[test]
fn run_and_query() {
    let cfg = arcsine(&[1, 2, 5]);
    let mut run = ptr::null_mut();
    unsafe {
        assert_eq!(padelab_run(cfg, &mut run), PadelabStatus::Ok);
        let mut ok = false;
        assert_eq!(padelab_run_ok(run, &mut ok), PadelabStatus::Ok);
        assert!(ok);

        let (mut re, mut im, mut len) = ([0.0; 5], [0.0; 5], 0usize);
        assert_eq!(
            padelab_run_poles(run, 5, re.as_mut_ptr(), im.as_mut_ptr(), 5, &mut len),
            PadelabStatus::Ok
        );
        assert_eq!(len, 5);
        let mut xs: Vec<f64> = re.to_vec();
        xs.sort_by(f64::total_cmp);
        for (k, x) in xs.iter().enumerate() {
            let want = -((2 * k + 1) as f64 * std::f64::consts::PI / 10.0).cos();
            assert!((x - want).abs() < 1e-14);
        }
        assert!(im.iter().all(|v| v.abs() < 1e-14));
        assert_eq!(
            padelab_run_poles(run, 5, re.as_mut_ptr(), im.as_mut_ptr(), 2, &mut len),
            PadelabStatus::BufferTooSmall
        );
        assert_eq!(len, 5);
        assert_eq!(
            padelab_run_poles(run, 4, re.as_mut_ptr(), im.as_mut_ptr(), 5, &mut len),
            PadelabStatus::NotFound
        );
        assert!(last_error().contains("order 4"));

        let (mut vr, mut vi) = (0.0, 0.0);
        assert_eq!(padelab_run_eval(run, 2, 2.0, 0.0, &mut vr, &mut vi), PadelabStatus::Ok);
        assert!((vr - 2.0 / 3.5).abs() < 1e-15 && vi == 0.0);

        let mut json = ptr::null_mut();
        assert_eq!(padelab_run_report_json(run, &mut json), PadelabStatus::Ok);
        let report: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(report["n_range"], serde_json::json!([1, 2, 5]));
        padelab_string_free(json);

        let dir = tempfile::tempdir().unwrap();
        let d = CString::new(dir.path().to_str().unwrap()).unwrap();
        assert_eq!(padelab_run_write(run, d.as_ptr()), PadelabStatus::Ok);
        assert!(dir.path().join("approximant_n5.json").is_file());

        padelab_run_free(run);
        padelab_config_free(cfg);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let mut cfg = ptr::null_mut();
    unsafe {
        assert_eq!(
            padelab_config_from_json(ptr::null(), &mut cfg),
            PadelabStatus::NullArgument
        );
        let bad = CString::new("{\"measure\": []}").unwrap();
        assert_eq!(
            padelab_config_from_json(bad.as_ptr(), &mut cfg),
            PadelabStatus::InvalidConfig
        );
        assert!(cfg.is_null());
        let name = CString::new("nope").unwrap();
        assert_eq!(padelab_config_bundled(name.as_ptr(), &mut cfg), PadelabStatus::NotFound);
        assert!(last_error().contains("nope"));
        let invalid = [0xffu8, 0];
        assert_eq!(
            padelab_config_bundled(invalid.as_ptr().cast(), &mut cfg),
            PadelabStatus::InvalidUtf8
        );

        let cfg = arcsine(&[1]);
        assert_eq!(
            padelab_config_set_orders(cfg, [0usize].as_ptr(), 1),
            PadelabStatus::InvalidConfig
        );
        assert_eq!(
            padelab_config_set_orders(cfg, ptr::null(), 0),
            PadelabStatus::NullArgument
        );
        assert_eq!(padelab_config_set_precision(cfg, 64), PadelabStatus::InvalidConfig);
        assert_eq!(padelab_config_set_precision(cfg, 192), PadelabStatus::Ok);
        let mut run = ptr::null_mut();
        assert_eq!(padelab_run(cfg, &mut run), PadelabStatus::Ok);
        let (mut vr, mut vi) = (0.0, 0.0);
        assert_eq!(
            padelab_run_eval(run, 1, 1.0, 0.0, &mut vr, ptr::null_mut()),
            PadelabStatus::NullArgument
        );
        assert_eq!(padelab_run_eval(run, 1, 4.0, 0.0, &mut vr, &mut vi), PadelabStatus::Ok);
        assert!((vr - 0.25).abs() < 1e-16);
        padelab_run_free(run);
        padelab_config_free(cfg);
        padelab_run_free(ptr::null_mut());
        padelab_config_free(ptr::null_mut());
        padelab_string_free(ptr::null_mut());
    }
}

#[test]
fn oracle_text() {
    let name = CString::new("markov").unwrap();
    let (mut text, mut pass) = (ptr::null_mut(), false);
    unsafe {
        assert_eq!(
            padelab_oracle(name.as_ptr(), 256, &mut text, &mut pass),
            PadelabStatus::Ok
        );
        let s = CStr::from_ptr(text).to_str().unwrap().to_owned();
        padelab_string_free(text);
        assert!(pass);
        assert!(s.lines().all(|l| l.starts_with("PASS ")));
    }
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/padelab.h")).unwrap();
    for f in [
        "padelab_config_from_json",
        "padelab_run(",
        "padelab_run_poles",
        "padelab_run_eval",
        "padelab_last_error",
        "PADELAB_STATUS_BUFFER_TOO_SMALL",
        "typedef struct PadelabRun PadelabRun",
    ] {
        assert!(header.contains(f), "{f}");
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    // target/<profile>/deps/<this test> -> target/<profile>
    let profile_dir: PathBuf = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .into();
    let lib = profile_dir.join("libpadelab_ffi.a");
    assert!(lib.is_file(), "{} missing", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let manifest = env!("CARGO_MANIFEST_DIR");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(format!("{manifest}/include"))
        .arg(format!("{manifest}/tests/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("poles 3 pi1(2) 0.500000000000000"), "{text}");
}
