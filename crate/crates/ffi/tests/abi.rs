use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use rhokit_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(rho_last_error_message()) }.to_string_lossy().into_owned()
}

#[test]
fn matrix_round_trip() {
    let re = [1.0, 2.0, 3.0, 4.0];
    let im = [0.5, 0.0, -0.5, 0.25];
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(rho_matrix_new(2, re.as_ptr(), im.as_ptr(), &mut m), RhoStatus::Ok);
        assert_eq!(rho_matrix_dim(m), 2);
        let (mut r, mut i) = ([0.0; 4], [0.0; 4]);
        assert_eq!(rho_matrix_entries(m, r.as_mut_ptr(), i.as_mut_ptr(), 4), RhoStatus::Ok);
        assert_eq!((r, i), (re, im));
        assert_eq!(rho_matrix_entries(m, r.as_mut_ptr(), i.as_mut_ptr(), 3), RhoStatus::BufferTooSmall);
        rho_matrix_free(m);
        rho_matrix_free(ptr::null_mut());
        assert_eq!(rho_matrix_dim(ptr::null()), 0);
    }
}

#[test]
fn radius_values() {
    let mut w = 0.0;
    unsafe {
        assert_eq!(rho_shift_radius(2, 2.0, &mut w), RhoStatus::Ok);
        assert!((w - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert_eq!(rho_shift_radius(4, 6.0, &mut w), RhoStatus::Ok);
        assert!((w - 4.0 / 6.0).abs() < 1e-12);

        let mut s = ptr::null_mut();
        assert_eq!(rho_shift(2, 1.0, &mut s), RhoStatus::Ok);
        assert_eq!(rho_radius(s, 2.0, 1e-9, &mut w), RhoStatus::Ok);
        assert!((w - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-7);
        rho_matrix_free(s);
    }
}

#[test]
fn kernel_and_profile() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(rho_normalized_shift(3, 2.0, &mut s), RhoStatus::Ok);
        let mut eig = [0.0; 4];
        assert_eq!(rho_kernel_eigenvalues(s, 1.0, 0.0, 2.0, eig.as_mut_ptr(), 4), RhoStatus::Ok);
        assert!(eig[0].abs() < 1e-10 && eig[1] > 0.1);
        assert!(eig.windows(2).all(|p| p[0] <= p[1]));
        rho_matrix_free(s);

        let (mut re, mut im) = ([0.0; 3], [0.0; 3]);
        assert_eq!(rho_null_profile(2, 2.0, re.as_mut_ptr(), im.as_mut_ptr(), 3), RhoStatus::Ok);
        assert!(re[0] > 0.0 && re[1].abs() < 1e-12 && (re[0] + re[2]).abs() < 1e-12);
    }
}

#[test]
fn harnack_equivalence() {
    unsafe {
        let (mut s, mut t, mut small) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(rho_normalized_shift(2, 2.0, &mut s), RhoStatus::Ok);
        assert_eq!(rho_canonical_form_c2(2, 1.0, &mut t), RhoStatus::Ok);
        assert_eq!(rho_shift(2, 0.5, &mut small), RhoStatus::Ok);
        let mut eq = false;
        assert_eq!(rho_harnack_equivalent(t, s, 2.0, &mut eq), RhoStatus::Ok);
        assert!(eq);
        assert_eq!(rho_harnack_equivalent(small, s, 2.0, &mut eq), RhoStatus::Ok);
        assert!(!eq);
        for m in [s, t, small] {
            rho_matrix_free(m);
        }
    }
}

#[test]
fn error_codes_and_messages() {
    let mut w = 0.0;
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(rho_shift_radius(2, 0.5, &mut w), RhoStatus::InvalidInput);
        assert!(last_error().contains("rho"), "{}", last_error());
        assert_eq!(rho_shift_radius(2, 2.0, ptr::null_mut()), RhoStatus::NullPointer);
        assert_eq!(rho_radius(ptr::null(), 2.0, 1e-8, &mut w), RhoStatus::NullPointer);
        assert_eq!(rho_shift(2, -1.0, &mut m), RhoStatus::InvalidInput);
        // the identity has spectrum on the circle, so its kernel is undefined at z = 1
        let (re, im) = ([1.0, 0.0, 0.0, 1.0], [0.0; 4]);
        assert_eq!(rho_matrix_new(2, re.as_ptr(), im.as_ptr(), &mut m), RhoStatus::Ok);
        let mut eig = [0.0; 2];
        assert_eq!(rho_kernel_eigenvalues(m, 1.0, 0.0, 2.0, eig.as_mut_ptr(), 2), RhoStatus::Numeric);
        assert!(!last_error().is_empty());
        rho_matrix_free(m);
        assert_eq!(rho_shift_radius(2, 2.0, &mut w), RhoStatus::Ok);
        assert!(last_error().is_empty());
    }
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/rhokit.h");
    assert!(header.exists());
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["rho_matrix_new", "rho_radius", "rho_harnack_equivalent", "RHO_STATUS_NUMERIC"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    match Command::new("cc").args(["-fsyntax-only", "-x", "c"]).arg(&header).status() {
        Ok(status) => assert!(status.success()),
        Err(_) => eprintln!("no C compiler; skipped syntax check"),
    }
}
