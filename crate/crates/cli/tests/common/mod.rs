//! Helpers shared by the CLI integration tests: spawn the built binary in a
//! scratch directory and collect its output.

#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

/// Runs the binary with the given arguments, cwd set to `dir`, and the
/// output-directory override unset so relative paths land in `dir`.
pub fn valtomo(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_valtomo"))
        .args(args)
        .current_dir(dir)
        .env_remove("VALTOMO_OUT_DIR")
        .output()
        .expect("failed to spawn the valtomo binary")
}

pub fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("process exited without a code")
}

pub fn stdout_text(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

pub fn stderr_text(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

/// Parses a two-column CSV written by the binary into (first, second) columns.
pub fn read_two_column_csv(path: &Path) -> (Vec<f64>, Vec<f64>) {
    let text = std::fs::read_to_string(path).expect("reading csv");
    let mut rows = text.lines();
    rows.next().expect("header");
    let mut first = Vec::new();
    let mut second = Vec::new();
    for line in rows {
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        first.push(fields.next().unwrap().parse().unwrap());
        second.push(fields.next().unwrap().parse().unwrap());
    }
    (first, second)
}

/// Parses a JSON file into a dynamic value.
pub fn read_json(path: &Path) -> serde_json::Value {
    let text = std::fs::read_to_string(path).expect("reading json");
    serde_json::from_str(&text).expect("parsing json")
}
