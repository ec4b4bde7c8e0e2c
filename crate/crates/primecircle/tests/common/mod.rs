#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

pub const Z2_MINUS_1: &str = "num=-1,0,1;den=1";
pub const Z2_MINUS_2: &str = "num=-2,0,1;den=1";
pub const Z2: &str = "num=0,0,1;den=1";
pub const Z3: &str = "num=0,0,0,1;den=1";
pub const SHIFTED: &str = "num=2,-2,1;den=1";
/// Conjugate of `i z^2` by `z -> 2(z-1)/(z+2)`; critical points 1 and -2.
pub const CONJUGATED_POWER: &str = "num=4+4i,4-8i,1+4i;den=4-2i,4+4i,1-2i";

pub struct Run {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_slice(&self.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&self.stdout)))
    }
}

pub fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_primecircle")).args(args).output().expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: out.stdout,
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn schema_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas")
}

fn load(name: &str) -> Value {
    let path = schema_dir().join(format!("{name}.schema.json"));
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

/// Validates `doc` against `docs/schemas/<name>.schema.json`; returns the errors.
pub fn schema_errors(name: &str, doc: &Value) -> Vec<String> {
    let config = load("config");
    let registry = jsonschema::Registry::new()
        .add("urn:primecircle:schema:config", config)
        .unwrap()
        .prepare()
        .unwrap();
    let validator = jsonschema::options().with_registry(&registry).build(&load(name)).unwrap();
    validator.iter_errors(doc).map(|e| e.to_string()).collect()
}

pub fn assert_schema(name: &str, doc: &Value) {
    let errors = schema_errors(name, doc);
    assert!(errors.is_empty(), "{name} schema: {errors:?}");
}
