use std::ffi::{CStr, CString};
use std::ptr;

use fewbody_ffi::*;

const GAUSSIAN: &str = "[model]\nmasses = 1, 1, 1\n[model.pair12]\nkind = gaussian\ndepth = 1\nrange = 1\ncoupling_ratio = 0.8\n";

fn model(text: &str) -> *mut FbModel {
    let c = CString::new(text).unwrap();
    let mut m = ptr::null_mut();
    let st = unsafe { fb_model_from_config(c.as_ptr(), &mut m) };
    assert_eq!(st, FbStatus::Ok, "{}", last_error());
    m
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(fb_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn threshold_through_handle() {
    let m = model(GAUSSIAN);
    let mut l = 0.0;
    assert_eq!(unsafe { fb_two_body_threshold(m, 12, &mut l) }, FbStatus::Ok);
    assert!((l - 2.684).abs() < 1e-3, "{l}");
    assert_eq!(unsafe { fb_two_body_threshold(m, 13, &mut l) }, FbStatus::NumericError);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { fb_two_body_threshold(m, 7, &mut l) }, FbStatus::InvalidArgument);
    unsafe { fb_model_free(m) };
}

#[test]
fn config_errors_carry_the_key() {
    let c = CString::new(GAUSSIAN.replace("depth = 1", "depth = -1")).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { fb_model_from_config(c.as_ptr(), &mut m) }, FbStatus::ConfigError);
    assert!(m.is_null());
    assert!(last_error().contains("model.pair12.depth"), "{}", last_error());
}

#[test]
fn null_pointers_are_rejected() {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { fb_model_from_config(ptr::null(), &mut m) }, FbStatus::InvalidArgument);
    let mut x = 0.0;
    assert_eq!(unsafe { fb_bs_radius(ptr::null(), 1.0, &mut x) }, FbStatus::InvalidArgument);
    unsafe { fb_model_free(ptr::null_mut()) };
}

#[test]
fn hash_is_hex() {
    let m = model(GAUSSIAN);
    let mut buf = [0 as std::ffi::c_char; 65];
    assert_eq!(unsafe { fb_config_hash(m, buf.as_mut_ptr(), buf.len()) }, FbStatus::Ok);
    let h = unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap();
    assert_eq!(h.len(), 64);
    assert!(h.bytes().all(|b| b.is_ascii_hexdigit()));
    assert_eq!(unsafe { fb_config_hash(m, buf.as_mut_ptr(), 10) }, FbStatus::InvalidArgument);
    unsafe { fb_model_free(m) };
}

#[test]
fn single_pair_has_no_three_body_bound_state() {
    // one subcritical pair cannot bind three particles
    let m = model(GAUSSIAN);
    let (mut e, mut t) = (0.0, 0.0);
    assert_eq!(unsafe { fb_ground_energy(m, &mut e, &mut t) }, FbStatus::Ok, "{}", last_error());
    assert!(e >= t - 1e-8, "{e} {t}");
    let mut r = 0.0;
    assert_eq!(unsafe { fb_bs_radius(m, 1.0, &mut r) }, FbStatus::Ok, "{}", last_error());
    assert!(r < 1.0, "{r}");
    let mut p = 0.0;
    assert_eq!(unsafe { fb_probability_inside(m, 0.0, &mut p) }, FbStatus::Ok);
    assert_eq!(p, 0.0);
    assert_eq!(unsafe { fb_probability_inside(m, -1.0, &mut p) }, FbStatus::InvalidArgument);
    unsafe { fb_model_free(m) };
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/fewbody.h")).unwrap();
    for f in ["fb_model_from_config", "fb_model_free", "fb_config_hash", "fb_two_body_threshold", "fb_bs_radius", "fb_ground_energy", "fb_probability_inside", "fb_last_error_message", "fb_version", "typedef struct FbModel FbModel"] {
        assert!(header.contains(f), "missing {f}");
    }
    assert!(header.contains("FB_STATUS_CONFIG_ERROR = 2"));
}

#[test]
fn c_program_links_against_the_static_library() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().and_then(|p| p.parent()).unwrap().to_path_buf();
    let lib = lib_dir.join("libfewbody_ffi.a");
    if !lib.exists() || std::process::Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let out = std::env::temp_dir().join(format!("fewbody-smoke-{}", std::process::id()));
    let status = std::process::Command::new("cc")
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let run = std::process::Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "exit {:?}", run.status);
    let l: f64 = String::from_utf8(run.stdout).unwrap().trim().parse().unwrap();
    assert!((l - std::f64::consts::PI.powi(2) / 4.0).abs() < 1e-4, "{l}");
}
