use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

/// Written next to a command's primary output as `<output>.manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    /// Fully resolved parameters, in the command's flag names.
    pub params: serde_json::Value,
    /// sha256 of every input file.
    pub inputs: BTreeMap<String, String>,
    /// sha256 of every output file, excluding the manifest itself.
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn path_for(primary_output: &Path) -> PathBuf {
        let mut name = primary_output.as_os_str().to_os_string();
        name.push(".manifest.json");
        PathBuf::from(name)
    }

    pub fn read(path: &Path) -> Result<RunManifest, CliError> {
        let bytes = read_input(path)?;
        serde_json::from_slice(&bytes)
            .map_err(|e| CliError::input(format!("{}: not a run manifest: {e}", path.display())))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn read_input(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

/// `.txt` files directly inside `dir`, sorted by name.
pub fn text_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let entries = fs::read_dir(dir).map_err(|e| CliError::input(format!("cannot list {}: {e}", dir.display())))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| CliError::input(format!("cannot list {}: {e}", dir.display())))?.path();
        if path.is_file() && path.extension().is_some_and(|x| x == "txt") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Digest of each input; directories contribute each of their `.txt` files.
pub fn digest_inputs(paths: &[PathBuf]) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for p in paths {
        let files = if p.is_dir() { text_files(p)? } else { vec![p.clone()] };
        for f in files {
            out.insert(f.display().to_string(), sha256_hex(&read_input(&f)?));
        }
    }
    Ok(out)
}

/// Writes `bytes` to a temporary file in the target directory, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let fail = |e: &dyn std::fmt::Display| CliError::internal(format!("cannot write {}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| fail(&e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| fail(&e))?;
    tmp.write_all(bytes).map_err(|e| fail(&e))?;
    tmp.persist(path).map_err(|e| fail(&e.error))?;
    Ok(())
}
