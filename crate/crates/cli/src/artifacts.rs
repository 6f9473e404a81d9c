//! Output directory handling: artifact files, verdict JSON and the manifest.

use std::fs;
use std::path::{Path, PathBuf};

use nongauss_core::config::RunConfig;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::Failure;

pub struct Artifacts {
    dir: PathBuf,
    csv: bool,
    json: bool,
    listed: Vec<Value>,
}

fn io_fail(path: &Path, e: std::io::Error) -> Failure {
    Failure::Runtime(format!("{}: {e}", path.display()))
}

impl Artifacts {
    pub fn open(dir: PathBuf, cfg: &RunConfig) -> Result<Self, Failure> {
        let (mut csv, mut json) = (true, true);
        if let Some(f) = cfg.get("output.formats") {
            csv = false;
            json = false;
            for item in f.split(',').map(str::trim) {
                match item {
                    "csv" => csv = true,
                    "json" => json = true,
                    other => {
                        return Err(Failure::Validation(format!(
                            "config error at `output.formats`: unknown format `{other}`"
                        )))
                    }
                }
            }
        }
        Ok(Artifacts { dir, csv, json, listed: Vec::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), Failure> {
        fs::create_dir_all(&self.dir).map_err(|e| io_fail(&self.dir, e))?;
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| io_fail(&path, e))?;
        let digest = Sha256::digest(bytes);
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.listed.push(json!({ "file": name, "sha256": hex, "bytes": bytes.len() }));
        Ok(())
    }

    pub fn csv(&mut self, name: &str, text: &str) -> Result<(), Failure> {
        if self.csv {
            self.write(name, text.as_bytes())?;
        }
        Ok(())
    }

    /// Writes `{verdict, evidence, policy}`.
    pub fn verdict(&mut self, verdict: &str, evidence: Vec<Value>, policy: Value) -> Result<(), Failure> {
        if self.json {
            let doc = json!({ "verdict": verdict, "evidence": evidence, "policy": policy });
            let mut text = serde_json::to_string_pretty(&doc).expect("verdict serialises");
            text.push('\n');
            self.write("verdict.json", text.as_bytes())?;
        }
        Ok(())
    }

    /// Writes manifest.json listing the resolved config and every artifact.
    pub fn finish(self, subcommand: &str, cfg: &RunConfig, exit_code: i32) -> Result<(), Failure> {
        let config: Map<String, Value> =
            cfg.entries().iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        let doc = json!({
            "tool": "nongauss",
            "version": env!("CARGO_PKG_VERSION"),
            "subcommand": subcommand,
            "config": config,
            "exit_code": exit_code,
            "artifacts": self.listed,
        });
        fs::create_dir_all(&self.dir).map_err(|e| io_fail(&self.dir, e))?;
        let path = self.dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&doc).expect("manifest serialises");
        text.push('\n');
        fs::write(&path, text).map_err(|e| io_fail(&path, e))
    }
}
