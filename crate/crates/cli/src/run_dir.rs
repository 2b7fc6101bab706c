//! Per-run output directory and manifest.

use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, Utc};
use serde::Serialize;

use crate::exit::CliError;

pub const MANIFEST: &str = "manifest.json";
pub const CONFIG_ECHO: &str = "config.toml";

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub arguments: Vec<String>,
    pub started: String,
    pub finished: String,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub status: String,
    pub exit_code: i32,
    pub files: Vec<String>,
}

pub struct RunDir {
    path: PathBuf,
    subcommand: String,
    started: DateTime<Utc>,
    files: Vec<String>,
}

impl RunDir {
    /// Creates `<base>/<UTC timestamp>-<subcommand>`, adding a numeric suffix on collision.
    pub fn create(base: &Path, subcommand: &str) -> Result<Self, CliError> {
        let started = Utc::now();
        let stem = format!("{}-{subcommand}", started.format("%Y%m%dT%H%M%S%.3fZ"));
        std::fs::create_dir_all(base).map_err(|e| CliError::io(format!("cannot create {}: {e}", base.display())))?;
        let mut path = base.join(&stem);
        let mut k = 1;
        while path.exists() {
            path = base.join(format!("{stem}-{k}"));
            k += 1;
        }
        std::fs::create_dir(&path).map_err(|e| CliError::io(format!("cannot create {}: {e}", path.display())))?;
        Ok(Self { path, subcommand: subcommand.into(), started, files: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Path of a new output file, recorded in the manifest.
    pub fn file(&mut self, name: &str) -> PathBuf {
        self.files.push(name.to_string());
        self.path.join(name)
    }

    pub fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
        let path = self.file(name);
        std::fs::write(&path, contents).map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
    }

    pub fn finish(mut self, seed: Option<u64>, threads: Option<usize>, outcome: &Result<(), CliError>) -> Result<(), CliError> {
        let (status, exit_code) = match outcome {
            Ok(()) => ("ok".to_string(), 0),
            Err(e) => (e.report_line(), e.code),
        };
        self.files.push(MANIFEST.to_string());
        let manifest = Manifest {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            subcommand: self.subcommand.clone(),
            arguments: std::env::args().skip(1).collect(),
            started: self.started.to_rfc3339_opts(SecondsFormat::Millis, true),
            finished: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
            seed,
            threads,
            status,
            exit_code,
            files: self.files.clone(),
        };
        let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::io(e.to_string()))?;
        let path = self.path.join(MANIFEST);
        std::fs::write(&path, text).map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))
    }
}
