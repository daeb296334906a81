use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use hgctrl_ffi::*;

const H1: &str = r#"{"n":3,"k":4,"edges":[{"head":[2],"tail":[1,1,1]},{"head":[3],"tail":[1,2,2]}]}"#;

fn load(json: &str) -> *mut HgHypergraph {
    let text = CString::new(json).unwrap();
    let mut h = ptr::null_mut();
    let st = unsafe { hg_hypergraph_from_json(text.as_ptr(), &mut h) };
    assert_eq!(st, HgStatus::Ok, "{}", last_error());
    assert!(!h.is_null());
    h
}

fn last_error() -> String {
    let p = hg_last_error();
    if p.is_null() {
        String::new()
    } else {
        unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
    }
}

#[test]
fn counts_and_round_trip() {
    let h = load(H1);
    unsafe {
        assert_eq!(hg_hypergraph_num_nodes(h), 3);
        assert_eq!(hg_hypergraph_num_edges(h), 2);
        let mut s: *mut c_char = ptr::null_mut();
        assert_eq!(hg_hypergraph_to_json(h, &mut s), HgStatus::Ok);
        let text = CStr::from_ptr(s).to_str().unwrap().to_owned();
        hg_string_free(s);
        let back = load(&text);
        assert_eq!(hg_hypergraph_num_edges(back), 2);
        hg_hypergraph_free(back);
        hg_hypergraph_free(h);
    }
}

#[test]
fn verify_h1() {
    let h = load(H1);
    let mut ok = false;
    unsafe {
        assert_eq!(hg_verify(h, [1u32].as_ptr(), 1, &mut ok), HgStatus::Ok);
        assert!(ok);
        assert_eq!(hg_verify(h, [2u32].as_ptr(), 1, &mut ok), HgStatus::Ok);
        assert!(!ok);
        assert_eq!(hg_verify(h, ptr::null(), 0, &mut ok), HgStatus::Ok);
        assert!(!ok);
        let mut lb = 0usize;
        assert_eq!(hg_lower_bound(h, &mut lb), HgStatus::Ok);
        assert_eq!(lb, 1);
        hg_hypergraph_free(h);
    }
}

#[test]
fn select_every_method() {
    let h = load(H1);
    for m in [HgMethod::Matching, HgMethod::Greedy, HgMethod::Mag, HgMethod::Optimal] {
        unsafe {
            let mut s = ptr::null_mut();
            assert_eq!(hg_select(h, m, &mut s), HgStatus::Ok, "{m:?}");
            let mut len = 0usize;
            let d = hg_selection_drivers(s, &mut len);
            assert_eq!(std::slice::from_raw_parts(d, len), &[1]);
            assert!(hg_selection_controllable(s));
            assert_eq!(hg_selection_lower_bound(s), 1);
            assert!(hg_selection_runtime_ms(s) >= 0.0);
            hg_selection_free(s);
        }
    }
    unsafe { hg_hypergraph_free(h) };
}

#[test]
fn generated_graph_is_selectable() {
    let mut h = ptr::null_mut();
    unsafe {
        assert_eq!(hg_generate(HgTopology::ScaleFree, 40, 3, 1.0, 7, &mut h), HgStatus::Ok);
        assert_eq!(hg_hypergraph_num_nodes(h), 40);
        assert_eq!(hg_hypergraph_num_edges(h), 40);
        let mut s = ptr::null_mut();
        assert_eq!(hg_select(h, HgMethod::Mag, &mut s), HgStatus::Ok);
        assert!(hg_selection_controllable(s));
        hg_selection_free(s);
        hg_hypergraph_free(h);
    }
}

#[test]
fn oracle_fraction() {
    let h = load(H1);
    let mut f = 0.0;
    unsafe {
        assert_eq!(hg_oracle_fraction(h, [1u32].as_ptr(), 1, 5, 3, &mut f), HgStatus::Ok);
        assert_eq!(f, 1.0);
        assert_eq!(hg_oracle_fraction(h, [2u32].as_ptr(), 1, 5, 3, &mut f), HgStatus::Ok);
        assert_eq!(f, 0.0);
        assert_eq!(hg_oracle_fraction(h, [1u32].as_ptr(), 1, 0, 3, &mut f), HgStatus::Ok);
        assert!(f.is_nan());
        hg_hypergraph_free(h);
    }
}

#[test]
fn error_codes() {
    let mut h = ptr::null_mut();
    let mut ok = false;
    unsafe {
        assert_eq!(hg_hypergraph_from_json(ptr::null(), &mut h), HgStatus::NullArgument);
        assert!(last_error().contains("null"));

        let bad = CString::new("{not json").unwrap();
        assert_eq!(hg_hypergraph_from_json(bad.as_ptr(), &mut h), HgStatus::Parse);
        assert!(!last_error().is_empty());
        assert!(h.is_null());

        let invalid = [0xffu8, 0xfe, 0];
        assert_eq!(
            hg_hypergraph_from_json(invalid.as_ptr() as *const c_char, &mut h),
            HgStatus::InvalidUtf8
        );

        let missing = CString::new("/nonexistent/graph.json").unwrap();
        assert_eq!(hg_hypergraph_read(missing.as_ptr(), &mut h), HgStatus::Io);

        let g = load(H1);
        assert!(hg_last_error().is_null());
        assert_eq!(hg_verify(g, [4u32].as_ptr(), 1, &mut ok), HgStatus::Validation);
        assert_eq!(hg_verify(g, [0u32].as_ptr(), 1, &mut ok), HgStatus::Validation);
        assert_eq!(hg_verify(g, ptr::null(), 2, &mut ok), HgStatus::NullArgument);
        assert_eq!(
            hg_verify(g, [1u32].as_ptr(), 1, ptr::null_mut()),
            HgStatus::NullArgument
        );
        assert_eq!(
            hg_verify(ptr::null(), [1u32].as_ptr(), 1, &mut ok),
            HgStatus::NullArgument
        );
        assert_eq!(
            hg_generate(HgTopology::Uniform, 0, 3, 1.0, 0, &mut h),
            HgStatus::Validation
        );
        hg_hypergraph_free(g);

        let big = load(r#"{"n":30,"k":3,"edges":[]}"#);
        let mut s = ptr::null_mut();
        assert_eq!(hg_select(big, HgMethod::Optimal, &mut s), HgStatus::Capacity);
        assert_eq!(
            hg_oracle_fraction(big, [1u32].as_ptr(), 1, 1, 0, &mut 0.0),
            HgStatus::Capacity
        );
        hg_hypergraph_free(big);
    }
}

#[test]
fn null_handles_are_harmless() {
    unsafe {
        hg_hypergraph_free(ptr::null_mut());
        hg_selection_free(ptr::null_mut());
        hg_string_free(ptr::null_mut());
        assert_eq!(hg_hypergraph_num_nodes(ptr::null()), 0);
        assert!(!hg_selection_controllable(ptr::null()));
        assert!(hg_selection_drivers(ptr::null(), &mut 0).is_null());
    }
}

fn target_dir() -> PathBuf {
    // tests/<exe> lives in target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

fn have_cc() -> bool {
    Command::new("cc")
        .arg("--version")
        .output()
        .is_ok_and(|o| o.status.success())
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "hgctrl.h"

int main(void) {
    const char *json = "{\"n\":3,\"k\":4,\"edges\":[{\"head\":[2],\"tail\":[1,1,1]},{\"head\":[3],\"tail\":[1,2,2]}]}";
    HgHypergraph *h = NULL;
    if (hg_hypergraph_from_json(json, &h) != HG_STATUS_OK) return 10;
    HgSelection *s = NULL;
    if (hg_select(h, HG_METHOD_MAG, &s) != HG_STATUS_OK) return 11;
    size_t len = 0;
    const uint32_t *d = hg_selection_drivers(s, &len);
    if (len != 1 || d[0] != 1) return 12;
    uint32_t bad = 9;
    bool ok;
    if (hg_verify(h, &bad, 1, &ok) != HG_STATUS_VALIDATION) return 13;
    if (hg_last_error() == NULL) return 14;
    printf("drivers=%u\n", d[0]);
    hg_selection_free(s);
    hg_hypergraph_free(h);
    return 0;
}
"#;

#[test]
fn header_compiles_and_links_from_c() {
    if !have_cc() {
        eprintln!("cc not found, skipping");
        return;
    }
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, C_PROGRAM).unwrap();

    let syntax = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"])
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .output()
        .unwrap();
    assert!(syntax.status.success(), "{}", String::from_utf8_lossy(&syntax.stderr));

    let lib = target_dir().join("libhgctrl_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping link step", lib.display());
        return;
    }
    let exe = dir.path().join("main");
    let link = Command::new("cc")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(link.status.success(), "{}", String::from_utf8_lossy(&link.stderr));
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "drivers=1");
}
