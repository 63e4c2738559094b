//! Output plumbing: atomic file writes, the per-run manifest, and CSV
//! serialization.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

/// Write through a temp file + rename so readers never see partial output.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

pub fn csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[derive(Debug)]
pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Assertion {
    pub fn check(name: &str, pass: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            pass,
            detail,
        }
    }
}

/// Collects artifacts and embedded assertions for one run, then writes the
/// manifest echoing the full configuration.
pub struct RunOutput {
    out_dir: PathBuf,
    name: String,
    config: Value,
    artifacts: Vec<String>,
    pub assertions: Vec<Assertion>,
}

impl RunOutput {
    pub fn new(out_dir: &Path, name: &str, config: Value) -> Self {
        Self {
            out_dir: out_dir.to_path_buf(),
            name: name.to_string(),
            config,
            artifacts: Vec::new(),
            assertions: Vec::new(),
        }
    }

    fn path(&self, ext: &str) -> PathBuf {
        self.out_dir.join(format!("{}.{ext}", self.name))
    }

    pub fn write(&mut self, ext: &str, contents: &str) -> io::Result<()> {
        let path = self.path(ext);
        write_atomic(&path, contents)?;
        self.artifacts.push(path.display().to_string());
        Ok(())
    }

    pub fn write_json(&mut self, value: &Value) -> io::Result<()> {
        self.write("json", &format!("{:#}\n", value))
    }

    pub fn assert(&mut self, name: &str, pass: bool, detail: String) {
        self.assertions.push(Assertion::check(name, pass, detail));
    }

    pub fn all_passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    /// Writes `{name}.manifest.json`; call last.
    pub fn finish(&mut self) -> io::Result<bool> {
        let assertions: Vec<Value> = self
            .assertions
            .iter()
            .map(|a| json!({"name": a.name, "pass": a.pass, "detail": a.detail}))
            .collect();
        let manifest = json!({
            "library_version": env!("CARGO_PKG_VERSION"),
            "config": self.config,
            "artifacts": self.artifacts,
            "assertions": assertions,
        });
        write_atomic(&self.path("manifest.json"), &format!("{:#}\n", manifest))?;
        Ok(self.all_passed())
    }
}
