use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

/// Everything a command produces; nothing touches the disk until it finishes.
#[derive(Debug, Default)]
pub struct Run {
    pub files: Vec<(String, Vec<u8>)>,
    /// Derived quantities echoed into the manifest.
    pub derived: Value,
    pub stdout: String,
}

impl Run {
    pub fn file(&mut self, name: &str, bytes: impl Into<Vec<u8>>) {
        self.files.push((name.to_string(), bytes.into()));
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a, S: Serialize> {
    pub command: &'a str,
    pub version: &'a str,
    pub threads: usize,
    pub settings: &'a S,
    pub derived: &'a Value,
    pub outputs: Vec<&'a str>,
}

/// Writes `bytes` to a sibling temp file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Config(format!("not a file path: {}", path.display())))?;
    let tmp: PathBuf = path.with_file_name(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(CliError::io(path, e));
    }
    Ok(())
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("output directory {}: {e}", dir.display())))
}
