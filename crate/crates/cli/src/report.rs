use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use alloyrep::io::JsonFormat;
use alloyrep::{Error, ToleranceConfig};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// The JSON document printed on standard output by every subcommand.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub ok: bool,
    pub inputs: BTreeMap<String, InputDigest>,
    pub seed: u64,
    pub tolerances: ToleranceConfig,
    pub results: Value,
    /// Scaled residuals, each compared against `tolerances.residual_tol`.
    pub residuals: BTreeMap<String, f64>,
    pub outputs: Vec<String>,
}

impl RunReport {
    pub fn new(command: &str, seed: u64, tolerances: ToleranceConfig) -> Self {
        Self {
            command: command.into(),
            ok: true,
            inputs: BTreeMap::new(),
            seed,
            tolerances,
            results: Value::Null,
            residuals: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    /// Reads a file and records its digest under `name`.
    pub fn read_input(&mut self, name: &str, path: &Path) -> Result<String, CliError> {
        let bytes =
            fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let digest = Sha256::digest(&bytes);
        self.inputs.insert(
            name.into(),
            InputDigest {
                path: path.display().to_string(),
                sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
            },
        );
        String::from_utf8(bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    pub fn load<T: JsonFormat>(&mut self, name: &str, path: &Path) -> Result<T, CliError> {
        let text = self.read_input(name, path)?;
        T::from_json(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    pub fn write(&mut self, path: &Path, contents: &str) -> Result<(), CliError> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)
                .map_err(|e| CliError::Input(format!("{}: {e}", dir.display())))?;
        }
        fs::write(path, contents)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }

    pub fn write_json<T: JsonFormat>(&mut self, path: &Path, value: &T) -> Result<(), CliError> {
        self.write(path, &value.to_json())
    }

    /// Records a gated residual and folds it into `ok`.
    pub fn residual(&mut self, name: &str, value: f64) {
        self.ok &= value <= self.tolerances.residual_tol;
        self.residuals.insert(name.into(), value);
    }
}

/// Failures that end a run with exit code 2, or 1 for [`CliError::Failed`].
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    /// A computation gave up (exit code 1).
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Failed(m) => write!(f, "failed: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::DecompositionFailed(_) | Error::NoConvergence => CliError::Failed(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}
