//! Run manifests: enough to rerun a command and get the same bytes.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::args::Command;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    /// Subcommand and its resolved options, seed included.
    #[serde(flatten)]
    pub command: Command,
    pub seed: Option<u64>,
    pub inputs: Vec<InputDigest>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Reads an input file and records its digest.
pub fn read_input(path: &Path, inputs: &mut Vec<InputDigest>) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    inputs.push(InputDigest {
        path: path.display().to_string(),
        sha256: sha256_hex(&bytes),
    });
    String::from_utf8(bytes).map_err(|_| CliError::Validation(format!("{} is not UTF-8 text", path.display())))
}

impl RunManifest {
    pub fn new(command: Command, seed: Option<u64>, inputs: Vec<InputDigest>) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command,
            seed,
            inputs,
        }
    }

    /// Extracts the manifest from any output of the tool: JSON documents
    /// carry it under `manifest`, text and CSV outputs on a leading
    /// `# manifest: ` line.
    pub fn from_output(text: &str) -> Result<Self> {
        let json = match text.lines().next().and_then(|l| l.strip_prefix(MANIFEST_PREFIX)) {
            Some(line) => serde_json::from_str::<serde_json::Value>(line),
            None => serde_json::from_str::<serde_json::Value>(text).map(|mut v| v["manifest"].take()),
        }
        .map_err(|e| CliError::Validation(format!("unreadable manifest: {e}")))?;
        serde_json::from_value(json).map_err(|e| CliError::Validation(format!("invalid manifest: {e}")))
    }

    /// Checks that the recorded inputs are unchanged.
    pub fn verify_inputs(&self) -> Result<()> {
        for input in &self.inputs {
            let bytes = std::fs::read(&input.path).map_err(|e| CliError::io(Path::new(&input.path), e))?;
            if sha256_hex(&bytes) != input.sha256 {
                return Err(CliError::Validation(format!("input {} changed since the recorded run", input.path)));
            }
        }
        Ok(())
    }
}

pub const MANIFEST_PREFIX: &str = "# manifest: ";
