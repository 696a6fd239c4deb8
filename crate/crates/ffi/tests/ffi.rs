use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use projshape_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    unsafe { ps_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn sample(m: usize, q: usize, axes: &[&[f64]]) -> *mut PsSample {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ps_sample_new(m, q, &mut s) }, PS_OK);
    for a in axes {
        assert_eq!(unsafe { ps_sample_push_axes(s, a.as_ptr()) }, PS_OK);
    }
    s
}

#[test]
fn frame_coordinate_of_cross_centre() {
    let pts = [69.0, 53.0, 591.0, 33.0, 626.0, 402.0, 69.0, 430.0];
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { ps_frame_new(pts.as_ptr(), 2, &mut f) }, PS_OK);
    let mut z = [0.0; 3];
    assert_eq!(unsafe { ps_frame_coordinate(f, [373.0, 243.0].as_ptr(), 2, z.as_mut_ptr()) }, PS_OK);
    // different image, same frame: just a valid unit vector
    assert!((z.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-12);
    assert_eq!(unsafe { ps_frame_coordinate(f, [344.0, 222.0].as_ptr(), 2, z.as_mut_ptr()) }, PS_OK);
    for (a, b) in z.iter().zip([0.7050, -0.0131, 0.7092]) {
        assert!((a - b).abs() < 5e-4, "{z:?}");
    }
    assert_eq!(unsafe { ps_frame_coordinate(f, [1.0].as_ptr(), 1, z.as_mut_ptr()) }, PS_E_ARGUMENT);
    unsafe { ps_frame_free(f) };
}

#[test]
fn degenerate_frame_reports_code_and_message() {
    let collinear = [0.0, 0.0, 1.0, 1.0, 2.0, 2.0, 0.0, 1.0];
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { ps_frame_new(collinear.as_ptr(), 2, &mut f) }, PS_E_DEGENERATE_FRAME);
    assert!(f.is_null());
    assert!(last_error().contains("degenerate"));
    assert_eq!(unsafe { ps_frame_new(ptr::null(), 2, &mut f) }, PS_E_NULL_POINTER);
    assert_eq!(unsafe { ps_frame_new(collinear.as_ptr(), 2, ptr::null_mut()) }, PS_E_NULL_POINTER);
}

#[test]
fn cross_ratio_values() {
    let mut c = 0.0;
    assert_eq!(unsafe { ps_cross_ratio(0.0, 1.0, 2.0, 3.0, &mut c) }, PS_OK);
    assert!((c - 4.0 / 3.0).abs() < 1e-15);
    assert_eq!(unsafe { ps_cross_ratio(0.0, 1.0, 2.0, 0.0, &mut c) }, PS_E_POINT_AT_INFINITY);
    assert_eq!(unsafe { ps_cross_ratio(0.0, 0.0, 2.0, 1.0, &mut c) }, PS_E_ARGUMENT);
}

#[test]
fn extrinsic_mean_of_two_images() {
    let s = sample(2, 1, &[&[0.7050, -0.0131, 0.7092], &[0.7074, -0.0060, 0.7067]]);
    assert_eq!(unsafe { ps_sample_len(s) }, 2);
    let mut mean = [0.0; 3];
    assert_eq!(unsafe { ps_extrinsic_mean(s, mean.as_mut_ptr()) }, PS_OK);
    for (a, b) in mean.iter().zip([0.7062, -0.0095, 0.7080]) {
        assert!((a - b).abs() < 5e-4, "{mean:?}");
    }
    unsafe { ps_sample_free(s) };
}

#[test]
fn landmarks_register_into_sample() {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ps_sample_new(1, 1, &mut s) }, PS_OK);
    for row in [[22.90, 35.7, 48.3, 61.10], [23.10, 29.1, 35.5, 42.50], [41.40, 44.3, 47.3, 50.70], [39.00, 47.0, 53.9, 60.00], [42.25, 46.9, 50.5, 53.85]] {
        assert_eq!(unsafe { ps_sample_push_landmarks(s, row.as_ptr()) }, PS_OK);
    }
    let phi0 = 0.75_f64.atan();
    let mu0 = [phi0.cos(), phi0.sin()];
    let (mut t, mut p) = (0.0, 0.0);
    assert_eq!(unsafe { ps_extrinsic_test(s, mu0.as_ptr(), &mut t, &mut p) }, PS_OK);
    assert!((t - 6.154623).abs() < 1e-5);
    assert!((p - 0.0131069).abs() < 1e-6);
    let (mut tb, mut pb) = (0.0, 0.0);
    assert_eq!(unsafe { ps_extrinsic_bootstrap_test(s, mu0.as_ptr(), 500, 3, &mut tb, &mut pb) }, PS_OK);
    assert_eq!(tb, t);
    assert!(pb > 0.05 && pb < 0.4, "{pb}");
    assert_eq!(unsafe { ps_extrinsic_bootstrap_test(s, mu0.as_ptr(), 0, 3, &mut tb, ptr::null_mut()) }, PS_E_ARGUMENT);
    unsafe { ps_sample_free(s) };
}

#[test]
fn two_sample_hotelling_on_buildings() {
    let edu = sample(2, 1, &[&[0.8142, 0.5547, 0.1718], &[0.8038, 0.5610, 0.1977], &[0.8067, 0.5591, 0.1917], &[0.8150, 0.5513, 0.1787], &[0.7773, 0.5890, 0.2211]]);
    let car = sample(2, 1, &[&[0.7859, 0.5768, 0.2228], &[0.8170, 0.5712, 0.0791], &[0.7639, 0.6041, 0.2268], &[0.7893, 0.5766, 0.2110]]);
    let (mut f, mut p, mut d1, mut d2) = (0.0, 0.0, 0.0, 0.0);
    assert_eq!(unsafe { ps_two_sample_hotelling(edu, car, &mut f, &mut p, &mut d1, &mut d2) }, PS_OK);
    assert!((f - 2.6075).abs() < 5e-3);
    assert_eq!((d1, d2), (2.0, 6.0));
    assert!(p > 0.0 && p < 1.0);
    let empty = sample(2, 1, &[]);
    assert_eq!(unsafe { ps_two_sample_hotelling(edu, empty, &mut f, ptr::null_mut(), ptr::null_mut(), ptr::null_mut()) }, PS_E_INSUFFICIENT_DATA);
    unsafe {
        ps_sample_free(edu);
        ps_sample_free(car);
        ps_sample_free(empty);
    }
}

#[test]
fn status_names_and_null_handles() {
    let name = unsafe { CStr::from_ptr(ps_status_name(PS_E_SINGULAR_COVARIANCE)) };
    assert_eq!(name.to_str().unwrap(), "singular covariance");
    assert_eq!(unsafe { CStr::from_ptr(ps_status_name(999)) }.to_str().unwrap(), "unknown status");
    assert_eq!(unsafe { ps_sample_len(ptr::null()) }, 0);
    assert_eq!(unsafe { ps_extrinsic_mean(ptr::null(), ptr::null_mut()) }, PS_E_NULL_POINTER);
    unsafe {
        ps_sample_free(ptr::null_mut());
        ps_frame_free(ptr::null_mut());
    }
    assert_eq!(unsafe { ps_last_error_message(ptr::null_mut(), 0) }, "null pointer argument".len());
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/projshape.h")).unwrap();
    for f in ["ps_frame_new", "ps_frame_coordinate", "ps_cross_ratio", "ps_sample_push_axes", "ps_extrinsic_mean", "ps_two_sample_hotelling", "ps_last_error_message", "typedef struct PsSample PsSample"] {
        assert!(header.contains(f), "{f}");
    }
}

#[test]
fn c_program_links_against_static_library() {
    let Ok(exe) = std::env::current_exe() else { return };
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf();
    let lib = profile_dir.join("libprojshape_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !lib.exists() || Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let status = Command::new(&cc)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let values = |tag: &str| -> Vec<f64> {
        let line = text.lines().find(|l| l.starts_with(tag)).unwrap_or_else(|| panic!("{text}"));
        line.split_whitespace().skip(1).map(|v| v.parse().unwrap()).collect()
    };
    for (tag, want) in [("z ", [0.7050, -0.0131, 0.7092]), ("mean ", [0.7062, -0.0095, 0.7080])] {
        for (a, b) in values(tag).iter().zip(want) {
            assert!((a - b).abs() < 5e-4, "{text}");
        }
    }
    assert!(text.contains("status 1 null pointer: null pointer argument"), "{text}");
}
