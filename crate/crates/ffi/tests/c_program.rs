//! Compiles a C program against the generated header and links it with the static library.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <stdio.h>
#include <string.h>
#include "udlab.h"

int main(void) {
    UdlabRunConfig *cfg = NULL;
    UdlabReport *report = NULL;
    double mean = 0, hw = 0;
    enum UdlabVerdict verdict;
    if (udlab_config_new(&cfg) != UdlabStatus_Ok) return 10;
    udlab_config_set(cfg, "game", "weak_qcp");
    udlab_config_set(cfg, "n", "2");
    udlab_config_set(cfg, "k", "0");
    udlab_config_set(cfg, "trials", "100");
    udlab_config_set(cfg, "seed", "1");
    if (udlab_run(cfg, &report) != UdlabStatus_Ok) return 11;
    if (udlab_report_summary(report, &mean, &hw, &verdict) != UdlabStatus_Ok) return 12;
    printf("mean=%.3f version=%s\n", mean, udlab_version());
    udlab_report_free(report);
    udlab_config_set(cfg, "game", "bogus");
    if (udlab_run(cfg, &report) != UdlabStatus_UnknownName) return 13;
    udlab_config_free(cfg);
    return mean == 2.0 ? 0 : 14;
}
"#;

fn crate_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

/// The profile directory holding this test binary's dependencies.
fn profile_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().to_path_buf()
}

#[test]
fn header_parses_as_c_and_cxx() {
    let header = crate_dir().join("include/udlab.h");
    for lang in ["c", "c++"] {
        let status = Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang]).arg(&header).status().unwrap();
        assert!(status.success(), "header does not compile as {lang}");
    }
}

#[test]
fn c_program_links_and_runs() {
    let lib = ["libudlab_ffi.a", "deps/libudlab_ffi.a"]
        .iter()
        .map(|p| profile_dir().join(p))
        .find(|p| p.exists())
        .expect("static library built alongside the tests");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let exe = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "compiling the C program failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("mean=2.000"));
}
