//! Machine-readable reports and atomic file output.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use fwlab::diagnostics::{all_pass, Check};
use serde::Serialize;

use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub results: serde_json::Value,
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(
        command: &str,
        config: BTreeMap<String, String>,
        checks: Vec<Check>,
        results: serde_json::Value,
    ) -> Self {
        let pass = all_pass(&checks);
        Self {
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config,
            checks,
            pass,
            results,
            notes: Vec::new(),
        }
    }

    pub fn with_notes(mut self, notes: Vec<String>) -> Self {
        self.notes = notes;
        self
    }

    /// One line per check, then the notes.
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!(
                "{:<4} {:<28} value {:>12.5e}  threshold {:>12.5e}\n",
                if c.pass { "ok" } else { "FAIL" },
                c.check_name,
                c.value,
                c.threshold
            ));
        }
        for n in &self.notes {
            s.push_str(&format!("note: {n}\n"));
        }
        s.push_str(if self.pass { "all checks passed\n" } else { "some checks failed\n" });
        s
    }
}

/// Output directory whose files are written to a temporary name and renamed
/// into place.
#[derive(Debug, Clone)]
pub struct OutDir {
    root: PathBuf,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(root).map_err(|e| CliError::Failed(format!("cannot create {}: {e}", root.display())))?;
        Ok(Self { root: root.to_path_buf() })
    }

    pub fn write(&self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let target = self.root.join(name);
        if let Some(parent) = target.parent() {
            fs::create_dir_all(parent)?;
        }
        let file_name = target.file_name().and_then(|s| s.to_str()).unwrap_or("out");
        let tmp = target.with_file_name(format!(".{file_name}.tmp"));
        fs::write(&tmp, bytes)?;
        fs::rename(&tmp, &target)?;
        Ok(target)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Failed(e.to_string()))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Renders CSV through a writer callback, then writes it atomically.
    pub fn write_csv<F>(&self, name: &str, render: F) -> Result<PathBuf, CliError>
    where
        F: FnOnce(&mut Vec<u8>) -> fwlab::Result<()>,
    {
        let mut buf = Vec::new();
        render(&mut buf)?;
        self.write(name, &buf)
    }
}
