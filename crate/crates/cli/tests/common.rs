#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

pub fn qfisize(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfisize"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn stdout(args: &[&str]) -> String {
    let out = qfisize(args);
    assert!(
        out.status.success(),
        "qfisize {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

pub fn code(args: &[&str]) -> i32 {
    qfisize(args).status.code().expect("exit code")
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}
