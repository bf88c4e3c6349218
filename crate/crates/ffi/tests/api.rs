use std::ffi::{CStr, CString};
use std::ptr;

use udlab_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let mut needed = 0usize;
    let mut buf = vec![0 as std::ffi::c_char; 256];
    unsafe {
        assert_eq!(udlab_last_error(buf.as_mut_ptr(), buf.len(), &mut needed), UdlabStatus::Ok);
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

unsafe fn config(pairs: &[(&str, &str)]) -> *mut UdlabRunConfig {
    let mut cfg = ptr::null_mut();
    assert_eq!(udlab_config_new(&mut cfg), UdlabStatus::Ok);
    for (k, v) in pairs {
        assert_eq!(udlab_config_set(cfg, c(k).as_ptr(), c(v).as_ptr()), UdlabStatus::Ok, "{k}");
    }
    cfg
}

#[test]
fn runs_the_split_attack_and_reads_the_report() {
    unsafe {
        let cfg = config(&[
            ("game", "flip_qcp"),
            ("backend", "split_pair"),
            ("adversary", "split_flip:q=2"),
            ("trials", "3000"),
            ("seed", "21"),
        ]);
        let mut report = ptr::null_mut();
        assert_eq!(udlab_run(cfg, &mut report), UdlabStatus::Ok);
        let (mut mean, mut hw, mut verdict) = (0.0, 0.0, UdlabVerdict::Inconclusive);
        assert_eq!(udlab_report_summary(report, &mut mean, &mut hw, &mut verdict), UdlabStatus::Ok);
        assert!((1.65..1.85).contains(&mean), "{mean}");
        assert_eq!(verdict, UdlabVerdict::ExceedsBound);
        let mut seed = 0;
        assert_eq!(udlab_report_seed(report, &mut seed), UdlabStatus::Ok);
        assert_eq!(seed, 21);

        let mut needed = 0;
        assert_eq!(udlab_report_json(report, ptr::null_mut(), 0, &mut needed), UdlabStatus::BufferTooSmall);
        let mut buf = vec![0 as std::ffi::c_char; needed];
        assert_eq!(udlab_report_json(report, buf.as_mut_ptr(), buf.len(), &mut needed), UdlabStatus::Ok);
        let json: serde_json::Value =
            serde_json::from_str(CStr::from_ptr(buf.as_ptr()).to_str().unwrap()).unwrap();
        assert_eq!(json["game"], "flip_qcp");
        udlab_report_free(report);
        udlab_config_free(cfg);
    }
}

#[test]
fn errors_carry_status_and_message() {
    unsafe {
        let cfg = config(&[("game", "nonesuch"), ("trials", "3")]);
        let mut report = ptr::null_mut();
        assert_eq!(udlab_run(cfg, &mut report), UdlabStatus::UnknownName);
        assert!(report.is_null());
        assert!(last_error().contains("nonesuch"));
        assert_eq!(udlab_config_set(cfg, c("trials").as_ptr(), c("many").as_ptr()), UdlabStatus::InvalidParams);
        assert_eq!(udlab_config_set(cfg, c("colour").as_ptr(), c("red").as_ptr()), UdlabStatus::UnknownName);
        assert_eq!(udlab_config_set(cfg, ptr::null(), c("x").as_ptr()), UdlabStatus::NullPointer);
        assert_eq!(udlab_run(ptr::null(), &mut report), UdlabStatus::NullPointer);
        udlab_config_free(cfg);
        udlab_config_free(ptr::null_mut());
    }
}

#[test]
fn invalid_utf8_is_reported() {
    unsafe {
        let cfg = config(&[]);
        let bad = [0xffu8, 0];
        assert_eq!(udlab_config_set(cfg, bad.as_ptr().cast(), c("1").as_ptr()), UdlabStatus::InvalidUtf8);
        udlab_config_free(cfg);
    }
}

#[test]
fn encrypts_and_decrypts_through_opaque_handles() {
    unsafe {
        let mut scheme = ptr::null_mut();
        assert_eq!(
            udlab_scheme_new(c("wrap_cca2_full(ud1_cpa,lamport_merkle)").as_ptr(), c("ideal_token").as_ptr(), &mut scheme),
            UdlabStatus::Ok
        );
        let mut key = ptr::null_mut();
        assert_eq!(udlab_key_gen(scheme, 32, 7, &mut key), UdlabStatus::Ok);

        let mut needed = 0;
        assert_eq!(
            udlab_encrypt(scheme, key, c("10110").as_ptr(), 3, ptr::null_mut(), 0, &mut needed),
            UdlabStatus::BufferTooSmall
        );
        let mut ct = vec![0u8; needed];
        assert_eq!(
            udlab_encrypt(scheme, key, c("10110").as_ptr(), 3, ct.as_mut_ptr(), ct.len(), &mut needed),
            UdlabStatus::Ok
        );

        let mut out = vec![0 as std::ffi::c_char; 64];
        let mut rejected = 9u8;
        let status = udlab_decrypt(scheme, key, ct.as_ptr(), ct.len(), out.as_mut_ptr(), out.len(), &mut needed, &mut rejected);
        assert_eq!(status, UdlabStatus::Ok);
        assert_eq!(rejected, 0);
        assert_eq!(CStr::from_ptr(out.as_ptr()).to_str().unwrap(), "10110");

        let last = ct.len() - 1;
        ct[last] ^= 1;
        let status = udlab_decrypt(scheme, key, ct.as_ptr(), ct.len(), out.as_mut_ptr(), out.len(), &mut needed, &mut rejected);
        assert_eq!(status, UdlabStatus::Ok);
        assert_eq!(rejected, 1);

        assert_eq!(
            udlab_encrypt(scheme, key, c("10x").as_ptr(), 3, ct.as_mut_ptr(), ct.len(), &mut needed),
            UdlabStatus::InvalidParams
        );
        udlab_key_free(key);
        udlab_scheme_free(scheme);

        let mut other = ptr::null_mut();
        assert_eq!(
            udlab_scheme_new(c("ud1_cpa").as_ptr(), c("cloud").as_ptr(), &mut other),
            UdlabStatus::UnknownName
        );
    }
}

#[test]
fn version_is_the_crate_version() {
    let v = unsafe { CStr::from_ptr(udlab_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
