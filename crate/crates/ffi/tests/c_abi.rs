use std::ffi::CStr;
use std::ptr;

use blowup_lab_ffi::*;

fn last_error() -> String {
    let mut needed = 0usize;
    unsafe {
        assert_eq!(bl_last_error(ptr::null_mut(), 0, &mut needed), BlStatus::Ok);
        let mut buf = vec![0 as std::ffi::c_char; needed];
        assert_eq!(
            bl_last_error(buf.as_mut_ptr(), buf.len(), ptr::null_mut()),
            BlStatus::Ok
        );
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn profile_handle_round_trip() {
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(bl_profile_new(9, &mut p), BlStatus::Ok);
        let (mut a, mut b) = (0.0, 0.0);
        assert_eq!(bl_profile_params(p, &mut a, &mut b), BlStatus::Ok);
        assert!((a * a - 9.0 / 148.0).abs() < 1e-15);
        assert!((b - 155.0 / 74.0).abs() < 1e-15);
        let (mut phi, mut dphi) = (0.0, 0.0);
        assert_eq!(bl_profile_eval(p, 0.5, &mut phi, &mut dphi), BlStatus::Ok);
        let closed = 3.0 * 0.5 / (2.0 * (155.0 - 74.0 * 0.25f64)).sqrt();
        assert!((phi - closed).abs() < 1e-15);
        assert_eq!(
            bl_profile_eval(p, 2.0, &mut phi, &mut dphi),
            BlStatus::Domain
        );
        assert!(last_error().contains("outside the domain"));
        let mut r = 1.0;
        assert_eq!(bl_profile_residual(p, 1000, &mut r), BlStatus::Ok);
        assert!(r < 1e-10);
        bl_profile_free(p);
    }
}

#[test]
fn null_and_bad_arguments_are_reported() {
    unsafe {
        assert_eq!(bl_profile_new(9, ptr::null_mut()), BlStatus::NullPointer);
        assert!(last_error().contains("null pointer"));
        let mut p = ptr::null_mut();
        assert_eq!(bl_profile_new(1, &mut p), BlStatus::InvalidInput);
        assert!(p.is_null());
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(
            bl_determinant(BlOperator::Eigen, f64::NAN, 0.0, &mut re, &mut im),
            BlStatus::InvalidInput
        );
        let mut t = 0.0;
        assert_eq!(
            bl_find_blowup_time(-1.0, 1.0, 32, &mut t),
            BlStatus::InvalidInput
        );
        bl_profile_free(ptr::null_mut());
        bl_certificate_free(ptr::null_mut());
        bl_spectrum_free(ptr::null_mut());
    }
}

#[test]
fn certificates_through_the_abi() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(bl_certify_curvature(0, &mut c), BlStatus::Ok);
        let mut passed = false;
        assert_eq!(bl_certificate_passed(c, &mut passed), BlStatus::Ok);
        assert!(passed);
        let mut needed = 0;
        assert_eq!(
            bl_certificate_json(c, ptr::null_mut(), 0, &mut needed),
            BlStatus::Ok
        );
        let mut small = vec![0 as std::ffi::c_char; 4];
        assert_eq!(
            bl_certificate_json(c, small.as_mut_ptr(), small.len(), &mut needed),
            BlStatus::BufferTooSmall
        );
        let mut buf = vec![0 as std::ffi::c_char; needed];
        assert_eq!(
            bl_certificate_json(c, buf.as_mut_ptr(), buf.len(), ptr::null_mut()),
            BlStatus::Ok
        );
        let json = CStr::from_ptr(buf.as_ptr()).to_str().unwrap();
        let v: serde_json::Value = serde_json::from_str(json).unwrap();
        assert_eq!(v["verdict"], "pass");
        bl_certificate_free(c);

        assert_eq!(bl_certify_curvature(7, &mut c), BlStatus::Ok);
        assert_eq!(bl_certificate_passed(c, &mut passed), BlStatus::Ok);
        assert!(!passed);
        bl_certificate_free(c);
    }
}

#[test]
fn spectrum_through_the_abi() {
    unsafe {
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(
            bl_determinant(BlOperator::Eigen, 1.0, 0.0, &mut re, &mut im),
            BlStatus::Ok
        );
        let (mut re2, mut im2) = (0.0, 0.0);
        assert_eq!(
            bl_determinant(BlOperator::Eigen, 1.1, 0.0, &mut re2, &mut im2),
            BlStatus::Ok
        );
        assert!(re.hypot(im) < 1e-6 * re2.hypot(im2));

        let mut s = ptr::null_mut();
        assert_eq!(
            bl_spectrum_search(BlOperator::Eigen, 0.5, 1.5, -0.5, 0.5, 1e-12, &mut s),
            BlStatus::Ok
        );
        let mut len = 0;
        assert_eq!(bl_spectrum_len(s, &mut len), BlStatus::Ok);
        assert_eq!(len, 1);
        let (mut r, mut i, mut res) = (0.0, 0.0, 0.0);
        assert_eq!(
            bl_spectrum_get(s, 0, &mut r, &mut i, &mut res),
            BlStatus::Ok
        );
        assert!((r - 1.0).abs() < 1e-10 && i.abs() < 1e-10 && res < 1e-8);
        assert_eq!(
            bl_spectrum_get(s, 1, &mut r, &mut i, &mut res),
            BlStatus::InvalidInput
        );
        bl_spectrum_free(s);
    }
}

#[test]
fn blowup_time_through_the_abi() {
    let mut t = 0.0;
    unsafe {
        assert_eq!(bl_find_blowup_time(1.03, 1.0, 32, &mut t), BlStatus::Ok);
    }
    assert!((t - 1.03).abs() < 1e-6, "{t}");
}

#[test]
fn header_declares_every_entry_point() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/blowup_lab.h"))
            .unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exported: Vec<&str> = src
        .split("extern \"C\" fn ")
        .skip(1)
        .map(|s| s.split('(').next().unwrap())
        .collect();
    assert!(exported.len() >= 15);
    for name in exported {
        assert!(
            header.contains(&format!("{name}(")),
            "{name} missing from header"
        );
    }
    for ty in [
        "typedef struct BlProfile BlProfile;",
        "BL_STATUS_NO_CONVERGENCE = 4",
        "BL_OPERATOR_SUSY = 1",
    ] {
        assert!(header.contains(ty), "{ty}");
    }
}

#[test]
fn header_compiles_as_c() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let include = concat!(env!("CARGO_MANIFEST_DIR"), "/include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        "#include \"blowup_lab.h\"\nint main(void) { BlProfile *p = 0; double a, b;\n\
         return bl_profile_new(9, &p) == BL_STATUS_OK && bl_profile_params(p, &a, &b) == BL_STATUS_OK ? 0 : 1; }\n",
    )
    .unwrap();
    match std::process::Command::new(&cc)
        .args([
            "-std=c99",
            "-Wall",
            "-Werror",
            "-fsyntax-only",
            "-I",
            include,
        ])
        .arg(&src)
        .output()
    {
        Ok(out) => assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        ),
        Err(e) => eprintln!("skipping: no C compiler ({e})"),
    }
}
