#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

pub const FIXTURES: [&str; 3] = ["tetrahedron", "z2_c05", "z3_c09"];
pub const COMMANDS: [&str; 5] = ["analyze", "povm", "certify", "oracle", "canonical"];

pub fn repo() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn fixture(name: &str) -> PathBuf {
    repo().join("fixtures").join(format!("{name}.json"))
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout).expect("report is JSON")
    }
}

pub fn qse(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_qse"))
        .args(args)
        .env_remove("QSE_LOG")
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn qse_on(command: &str, spec: &Path, extra: &[&str]) -> Run {
    let mut args = vec![command, spec.to_str().unwrap()];
    args.extend_from_slice(extra);
    qse(&args)
}

fn load_schema(name: &str) -> Value {
    let text = std::fs::read_to_string(repo().join("schema").join(name)).unwrap();
    serde_json::from_str(&text).unwrap()
}

fn validator(main: &str) -> jsonschema::Validator {
    let job = load_schema("job-spec.v1.json");
    let id = job["$id"].as_str().unwrap().to_owned();
    jsonschema::options()
        .with_resource(id, jsonschema::Resource::from_contents(job).unwrap())
        .build(&load_schema(main))
        .unwrap()
}

pub fn report_validator() -> jsonschema::Validator {
    validator("report.v1.json")
}

pub fn job_validator() -> jsonschema::Validator {
    validator("job-spec.v1.json")
}

/// Collected schema errors, empty when valid.
pub fn schema_errors(v: &jsonschema::Validator, doc: &Value) -> Vec<String> {
    v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path)).collect()
}
