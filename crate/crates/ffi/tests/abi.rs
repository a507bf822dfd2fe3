use std::ffi::{CStr, CString};
use std::ptr;

use ringfill_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn build(n: u32, rho: &str, eta: &str) -> (RfStatus, *mut RfFilling) {
    let mut h = ptr::null_mut();
    let (rho, eta) = (c(rho), c(eta));
    let status = unsafe { rf_build(n, rho.as_ptr(), eta.as_ptr(), &mut h) };
    (status, h)
}

fn last_error() -> String {
    let p = rf_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn build_query_and_free() {
    let (status, h) = build(64, "0.1", "0.25");
    assert_eq!(status, RfStatus::Ok);
    assert!(!h.is_null());
    assert!(rf_last_error_message().is_null());

    let (mut n, mut v, mut f, mut density) = (0u32, 0u64, 0u64, 0f64);
    unsafe {
        assert_eq!(rf_filling_boundary_length(h, &mut n), RfStatus::Ok);
        assert_eq!(rf_filling_vertex_count(h, &mut v), RfStatus::Ok);
        assert_eq!(rf_filling_triangle_count(h, &mut f), RfStatus::Ok);
        assert_eq!(rf_filling_density(h, &mut density), RfStatus::Ok);
    }
    let direct = ringfill::build_filling(&ringfill::Params::parse(64, "0.1", "0.25").unwrap()).unwrap();
    assert_eq!(n, 64);
    assert_eq!(v, direct.vertex_count() as u64);
    assert_eq!(f, direct.complex.triangles().len() as u64);
    assert_eq!(density, v as f64 / 4096.0);
    // Disk: V - E + F = 1 with E = (3F + n) / 2.
    assert_eq!(2 * v as i64 - (3 * f as i64 + 64) + 2 * f as i64, 2);
    unsafe { rf_filling_free(h) };
}

#[test]
fn triangles_are_copied_with_size_query() {
    let (_, h) = build(40, "0.1", "0.25");
    let mut needed = 0usize;
    let status = unsafe { rf_filling_copy_triangles(h, ptr::null_mut(), 0, &mut needed) };
    assert_eq!(status, RfStatus::BufferTooSmall);
    assert!(last_error().contains("needed"));

    let mut buf = vec![0u32; needed];
    let mut written = 0usize;
    let status = unsafe { rf_filling_copy_triangles(h, buf.as_mut_ptr(), buf.len(), &mut written) };
    assert_eq!(status, RfStatus::Ok);
    assert_eq!(written, needed);
    let direct = ringfill::build_filling(&ringfill::Params::parse(40, "0.1", "0.25").unwrap()).unwrap();
    let expected: Vec<u32> = direct.complex.triangles().iter().flat_map(|t| t.vertices()).collect();
    assert_eq!(buf, expected);
    unsafe { rf_filling_free(h) };
}

#[test]
fn verification_and_audit() {
    let (_, h) = build(48, "0.1", "0.25");
    let mut report = RfVerification::default();
    let mut audit = RfDriftSummary::default();
    let mut eps = -1.0;
    unsafe {
        assert_eq!(rf_filling_verify(h, &mut report), RfStatus::Ok);
        assert_eq!(rf_filling_drift_audit(h, &mut audit), RfStatus::Ok);
        assert_eq!(rf_filling_eps_n(h, &mut eps), RfStatus::Ok);
        rf_filling_free(h);
    }
    assert!(report.is_isometric);
    assert_eq!((report.delta_num, report.delta_den), (1, 1));
    assert_eq!(report.pairs_checked, 48 * 47 / 2);
    assert!(audit.annuli > 0 && audit.slanted_edges > 0);
    assert!(audit.equal_annuli_attain_bound);
    assert!(eps > 0.0 && eps < 1.0);
}

#[test]
fn schedule_rejection_names_the_bound() {
    let (status, h) = build(100, "0.01", "0.2");
    assert_eq!(status, RfStatus::ScheduleRejected);
    assert!(h.is_null());
    assert!(last_error().contains("eta^2 < rho"));

    let (status, _) = build(10, "0.1", "0.25");
    assert_eq!(status, RfStatus::ScheduleRejected);
    assert!(last_error().contains("L_b"));
}

#[test]
fn bad_arguments() {
    let (status, _) = build(64, "zero", "0.25");
    assert_eq!(status, RfStatus::InvalidArgument);

    let eta = c("0.25");
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { rf_build(64, ptr::null(), eta.as_ptr(), &mut h) }, RfStatus::NullPointer);
    assert!(last_error().contains("rho"));
    assert_eq!(unsafe { rf_build(64, eta.as_ptr(), eta.as_ptr(), ptr::null_mut()) }, RfStatus::NullPointer);

    let mut v = 0u64;
    assert_eq!(unsafe { rf_filling_vertex_count(ptr::null(), &mut v) }, RfStatus::NullPointer);
    unsafe {
        rf_filling_free(ptr::null_mut());
        rf_string_free(ptr::null_mut());
    }
}

#[test]
fn json_round_trip() {
    let (_, h) = build(32, "0.1", "0.25");
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { rf_filling_to_json(h, &mut text) }, RfStatus::Ok);
    let json = unsafe { CStr::from_ptr(text) }.to_str().unwrap().to_owned();
    assert!(json.starts_with(r#"{"n":32,"#));

    let mut back = ptr::null_mut();
    assert_eq!(unsafe { rf_filling_from_json(text, &mut back) }, RfStatus::Ok);
    let mut again = ptr::null_mut();
    assert_eq!(unsafe { rf_filling_to_json(back, &mut again) }, RfStatus::Ok);
    assert_eq!(unsafe { CStr::from_ptr(again) }.to_str().unwrap(), json);

    let broken = c("{\"n\":");
    let mut none = ptr::null_mut();
    assert_eq!(unsafe { rf_filling_from_json(broken.as_ptr(), &mut none) }, RfStatus::Malformed);
    assert!(none.is_null());
    unsafe {
        rf_string_free(text);
        rf_string_free(again);
        rf_filling_free(h);
        rf_filling_free(back);
    }
}

#[test]
fn analysis_helpers() {
    let (rho, eta) = (c("0.05"), c("0.2"));
    let mut bound = 0.0;
    assert_eq!(unsafe { rf_density_bound(rho.as_ptr(), eta.as_ptr(), &mut bound) }, RfStatus::Ok);
    assert!((bound - (0.05 + (1.0 - 0.008) / 6.0)).abs() < 1e-15);

    let mut lb = 0.0;
    assert_eq!(unsafe { rf_lower_bound(9, 1.0, &mut lb) }, RfStatus::Ok);
    assert_eq!(lb, 8.0 + 4.0);
    assert_eq!(unsafe { rf_lower_bound(9, 0.0, &mut lb) }, RfStatus::InvalidArgument);

    let version = unsafe { CStr::from_ptr(rf_version()) }.to_str().unwrap();
    assert_eq!(version, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_is_generated_and_compiles() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/ringfill.h")).unwrap();
    for symbol in [
        "rf_build",
        "rf_filling_free",
        "rf_filling_copy_triangles",
        "rf_filling_verify",
        "rf_filling_drift_audit",
        "rf_last_error_message",
        "typedef struct RfFilling RfFilling;",
        "RF_STATUS_SCHEDULE_REJECTED = 3",
    ] {
        assert!(header.contains(symbol), "header lacks {symbol}");
    }
    // Syntax-check with a C compiler when one is installed.
    let probe = std::process::Command::new("cc")
        .args(["-std=c99", "-fsyntax-only", "-x", "c", "-"])
        .arg("-I")
        .arg(dir.join("include"))
        .stdin(std::process::Stdio::piped())
        .spawn();
    if let Ok(mut child) = probe {
        use std::io::Write;
        child.stdin.take().unwrap().write_all(b"#include \"ringfill.h\"\nint main(void){RfFilling*h=0;return (int)rf_build(64,\"0.1\",\"0.25\",&h);}\n").unwrap();
        assert!(child.wait().unwrap().success());
    }
}
