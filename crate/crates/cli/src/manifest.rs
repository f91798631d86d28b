//! Run manifests: everything needed to re-execute a command and check that it
//! reproduces its outputs byte for byte.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Every option after defaults and config files are resolved.
    pub parameters: serde_json::Value,
    /// Arguments as given, without the program name.
    pub args: Vec<String>,
    pub seed: u64,
    /// Directory the run was started from; relative paths resolve against it.
    pub working_dir: PathBuf,
    /// SHA-256 of each input file, keyed by path as given.
    pub input_hashes: BTreeMap<String, String>,
    pub output_paths: Vec<PathBuf>,
    pub version: String,
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = std::fs::read(path).map_err(|e| graphcoreset::Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Writes through a temporary file in the destination directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Core(graphcoreset::Error::io(path, e));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.flush().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Collects outputs and input digests while a command runs.
#[derive(Debug)]
pub struct Recorder {
    command: String,
    args: Vec<String>,
    inputs: BTreeMap<String, String>,
    outputs: Vec<PathBuf>,
}

impl Recorder {
    pub fn new(command: &str, args: Vec<String>) -> Self {
        Recorder {
            command: command.to_string(),
            args,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<(), CliError> {
        let digest = sha256_file(path)?;
        self.inputs.insert(path.display().to_string(), digest);
        Ok(())
    }

    pub fn write(&mut self, path: &Path, contents: &str) -> Result<(), CliError> {
        write_atomic(path, contents.as_bytes())?;
        self.outputs.push(path.to_path_buf());
        Ok(())
    }

    /// Writes the manifest to `path`, listing itself among the outputs.
    pub fn finish(mut self, path: &Path, parameters: serde_json::Value, seed: u64) -> Result<RunManifest, CliError> {
        self.outputs.push(path.to_path_buf());
        let working_dir = std::env::current_dir().map_err(|e| graphcoreset::Error::io(".", e))?;
        let manifest = RunManifest {
            command: self.command,
            parameters,
            args: self.args,
            seed,
            working_dir,
            input_hashes: self.inputs,
            output_paths: self.outputs,
            version: env!("CARGO_PKG_VERSION").to_string(),
        };
        let mut text = serde_json::to_string_pretty(&manifest).map_err(graphcoreset::Error::from)?;
        text.push('\n');
        write_atomic(path, text.as_bytes())?;
        Ok(manifest)
    }
}

pub fn manifest_path_for(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    output.with_file_name(name)
}

pub fn load(path: &Path) -> Result<RunManifest, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| graphcoreset::Error::io(path, e))?;
    Ok(serde_json::from_str(&text).map_err(graphcoreset::Error::from)?)
}
