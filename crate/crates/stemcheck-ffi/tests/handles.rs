use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use stemcheck::{fixtures, io};
use stemcheck_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = stem_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

struct Fig1 {
    model: *mut StemModel,
    obs: *mut StemObligations,
}

impl Fig1 {
    fn load() -> Self {
        let m = cstr(&io::print_model(&fixtures::fig1()));
        let o = cstr(&io::print_obligations(&[fixtures::fig1_obligation()]));
        let (mut model, mut obs) = (ptr::null_mut(), ptr::null_mut());
        unsafe {
            assert_eq!(stem_model_parse(m.as_ptr(), &mut model), StemStatus::Ok);
            assert_eq!(stem_obligations_parse(o.as_ptr(), &mut obs), StemStatus::Ok);
        }
        Fig1 { model, obs }
    }
}

impl Drop for Fig1 {
    fn drop(&mut self) {
        unsafe {
            stem_model_free(self.model);
            stem_obligations_free(self.obs);
        }
    }
}

#[test]
fn check_and_oracle_agree() {
    let f = Fig1::load();
    unsafe {
        assert_eq!(stem_model_task_count(f.model), 6);
        assert_eq!(stem_obligations_len(f.obs), 1);
        for early_exit in [true, false] {
            let mut r = ptr::null_mut();
            assert_eq!(
                stem_check(f.model, f.obs, early_exit, &mut r),
                StemStatus::Ok
            );
            assert_eq!(stem_report_fully_compliant(r), 0);
            let json = stem_report_json(r);
            let doc =
                io::ReportDocument::from_json(CStr::from_ptr(json).to_str().unwrap()).unwrap();
            assert_eq!(doc.obligations[0].witness.as_ref().unwrap().trigger, "t3");
            stem_string_free(json);
            stem_report_free(r);
        }
        let mut r = ptr::null_mut();
        assert_eq!(stem_oracle(f.model, f.obs, 100, &mut r), StemStatus::Ok);
        assert_eq!(stem_report_fully_compliant(r), 0);
        stem_report_free(r);
    }
}

#[test]
fn error_codes() {
    let f = Fig1::load();
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(
            stem_model_parse(cstr("{\"atoms\": [").as_ptr(), &mut m),
            StemStatus::Syntax
        );
        assert!(m.is_null());
        assert!(last_error().contains("line"));
        let dup = r#"{"atoms":[],"tasks":{"s":[],"s":[],"e":[]},
            "root":{"kind":"seq","children":[{"kind":"task","id":"s"},{"kind":"task","id":"e"}]},
            "start":"s","end":"e"}"#;
        assert_eq!(
            stem_model_parse(cstr(dup).as_ptr(), &mut m),
            StemStatus::InvalidModel
        );
        assert_eq!(
            stem_model_parse(ptr::null(), &mut m),
            StemStatus::NullPointer
        );
        let json = cstr("[]");
        assert_eq!(
            stem_obligations_parse(json.as_ptr(), ptr::null_mut()),
            StemStatus::NullPointer
        );
        let mut r = ptr::null_mut();
        assert_eq!(
            stem_check(ptr::null(), f.obs, true, &mut r),
            StemStatus::NullPointer
        );
        assert!(last_error().contains("model"));
        assert_eq!(
            stem_oracle(f.model, f.obs, 1, &mut r),
            StemStatus::BudgetExceeded
        );
        assert!(r.is_null());
        assert_eq!(stem_report_fully_compliant(ptr::null()), -1);
        assert!(stem_report_json(ptr::null()).is_null());
        stem_model_free(ptr::null_mut());
        stem_report_free(ptr::null_mut());
        stem_string_free(ptr::null_mut());
    }
}

#[test]
fn c_program_links_against_header() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let lib = exe.parent().unwrap().join("libstemcheck_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("smoke");
    let status = Command::new("cc")
        .arg(crate_dir.join("tests/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
