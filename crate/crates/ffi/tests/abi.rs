use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use hopfq_core::fixtures;
use hopfq_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

/// Take ownership of a library string.
unsafe fn take(p: *mut c_char) -> String {
    assert!(!p.is_null());
    let s = CStr::from_ptr(p).to_str().unwrap().to_owned();
    hopfq_string_free(p);
    s
}

unsafe fn last_error() -> String {
    CStr::from_ptr(hopfq_last_error()).to_str().unwrap().to_owned()
}

unsafe fn session(name: &str) -> *mut HopfqSession {
    let files = fixtures::find(name).unwrap().files();
    let (q, a) = (c(&files["quiver.json"]), c(&files["action.json"]));
    let mut s = ptr::null_mut();
    assert_eq!(hopfq_session_new(q.as_ptr(), a.as_ptr(), &mut s), HOPFQ_OK, "{}", last_error());
    s
}

#[test]
fn fixtures_round_trip_through_the_abi() {
    unsafe {
        for name in ["sweedler-III", "ex-7.8", "z4-K2"] {
            let s = session(name);
            let mut out = ptr::null_mut();
            assert_eq!(hopfq_decompose(s, &mut out), HOPFQ_OK);
            let d: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
            assert_eq!(d["n"].as_u64().unwrap(), u64::from(hopfq_session_order(s)));

            assert_eq!(hopfq_parametrize(s, &mut out), HOPFQ_OK);
            let r: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
            assert!(r["free"].is_array());

            assert_eq!(hopfq_sample(s, 3, 32, &mut out), HOPFQ_OK);
            let params = take(out);
            assert_eq!(hopfq_sample(s, 3, 32, &mut out), HOPFQ_OK);
            assert_eq!(take(out), params);

            let mut spec = ptr::null_mut();
            assert_eq!(hopfq_spec_new(s, c(&params).as_ptr(), 1, &mut spec), HOPFQ_OK, "{}", last_error());
            let mut pass = -1;
            assert_eq!(hopfq_verify(spec, 3, &mut pass, &mut out), HOPFQ_OK);
            assert_eq!(pass, 1, "{name}: {}", take(out));
            hopfq_spec_free(spec);
            hopfq_session_free(s);
        }
    }
}

#[test]
fn act_matches_the_cli_example() {
    unsafe {
        let s = session("sweedler-I");
        let files = fixtures::find("sweedler-I").unwrap().files();
        let mut spec = ptr::null_mut();
        assert_eq!(hopfq_spec_new(s, c(&files["params.json"]).as_ptr(), 1, &mut spec), HOPFQ_OK);
        let mut out = ptr::null_mut();
        assert_eq!(hopfq_act(spec, c("g").as_ptr(), c("e[1]").as_ptr(), &mut out), HOPFQ_OK, "{}", last_error());
        assert_eq!(take(out), "e[2]");
        assert_eq!(hopfq_act(spec, c("y").as_ptr(), c("e[1]").as_ptr(), &mut out), HOPFQ_ERR_INPUT);
        assert!(last_error().contains("unknown generator"));
        hopfq_spec_free(spec);
        hopfq_session_free(s);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut s = ptr::null_mut();
        let a = c("{}");
        assert_eq!(hopfq_session_new(ptr::null(), a.as_ptr(), &mut s), HOPFQ_ERR_NULL);
        assert_eq!(hopfq_session_new(c("[").as_ptr(), a.as_ptr(), &mut s), HOPFQ_ERR_INPUT);
        assert!(!last_error().is_empty());
        let bad = [0xffu8, 0];
        assert_eq!(hopfq_session_new(bad.as_ptr().cast(), a.as_ptr(), &mut s), HOPFQ_ERR_UTF8);
        assert!(s.is_null());

        // a vertex swap that does not carry the arrow to an arrow
        let q = c(r#"{"vertices":["1","2"],"arrows":[{"id":"a","src":"1","tgt":"2"}]}"#);
        let act = c(r#"{"n":2,"vertex_perm":{"1":"2","2":"1"},"arrows":{"a":{"image":"a","scale":"1"}}}"#);
        assert_eq!(hopfq_session_new(q.as_ptr(), act.as_ptr(), &mut s), HOPFQ_ERR_INVALID);

        let mut out = ptr::null_mut();
        assert_eq!(hopfq_scalar_normalize(2, c("1/(1-z)").as_ptr(), &mut out), HOPFQ_OK);
        assert_eq!(take(out), "1/2 + 1/2*z");
        assert_eq!(hopfq_scalar_normalize(3, c("z/0").as_ptr(), &mut out), HOPFQ_ERR_INPUT);
        assert_eq!(hopfq_scalar_normalize(1, c("1").as_ptr(), &mut out), HOPFQ_ERR_INPUT);
        assert_eq!(hopfq_decompose(ptr::null(), &mut out), HOPFQ_ERR_NULL);
        assert_eq!(hopfq_session_order(ptr::null()), 0);

        hopfq_string_free(ptr::null_mut());
        hopfq_session_free(ptr::null_mut());
        hopfq_spec_free(ptr::null_mut());
    }
}

#[test]
fn violating_parameters_are_rejected_by_the_checked_builder() {
    unsafe {
        // every vertex is fixed, so gamma must vanish
        let s = session("ex-3.7");
        let params = c(r#"{"gamma":{"orbit-of:1":"1"}}"#);
        let mut spec = ptr::null_mut();
        assert_eq!(hopfq_spec_new(s, params.as_ptr(), 1, &mut spec), HOPFQ_ERR_CONSTRAINT, "{}", last_error());
        assert!(spec.is_null());
        assert_eq!(hopfq_spec_new(s, params.as_ptr(), 0, &mut spec), HOPFQ_OK);
        let (mut pass, mut out) = (-1, ptr::null_mut());
        assert_eq!(hopfq_verify(spec, 2, &mut pass, &mut out), HOPFQ_OK);
        assert_eq!(pass, 0);
        assert!(take(out).contains("witness"));
        hopfq_spec_free(spec);
        hopfq_session_free(s);
    }
}

fn target_dir() -> PathBuf {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_static_library() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libhopfq_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let tmp = tempfile::tempdir().unwrap();
    let exe = tmp.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(dir.join("include"))
        .arg(dir.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status();
    let Ok(status) = status else {
        eprintln!("skipping: no C compiler ({cc})");
        return;
    };
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}
