//! CSV tables with `#` metadata, run manifests and the JSON error channel.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::commands::Command;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Full round-trip precision: 17 significant digits.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.16e}")
    }
}

pub struct Table {
    meta: Vec<(String, String)>,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            meta: Vec::new(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.into(), value.to_string()));
        self
    }

    pub fn row(&mut self, values: Vec<f64>) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(values);
    }

    pub fn render(&self, command: &str) -> String {
        let mut s = format!("# clmap {VERSION} {command}\n");
        for (k, v) in &self.meta {
            let _ = writeln!(s, "# {k} = {v}");
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| num(v)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridSpec {
    pub n_points: usize,
    pub r_max: f64,
    pub r_max_over_rs: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// Resolved parameters; replaying runs exactly this.
    pub command: Command,
    pub grid: Option<GridSpec>,
    pub diagnostics: Value,
    pub outputs: Vec<String>,
    pub wall_time_s: f64,
}

/// What a subcommand produced, before it is written out.
pub struct RunOutput {
    pub files: Vec<(String, String)>,
    pub grid: Option<GridSpec>,
    pub diagnostics: Value,
    /// Printed to stdout after the files are written.
    pub summary: String,
}

pub fn write_run(out_dir: &Path, command: &Command, output: RunOutput, wall_time_s: f64) -> Result<PathBuf, CliError> {
    fs::create_dir_all(out_dir).map_err(|e| CliError::io(out_dir, e))?;
    let mut names = Vec::new();
    for (name, body) in &output.files {
        let path = out_dir.join(name);
        fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
        names.push(name.clone());
    }
    let manifest = RunManifest {
        tool: "clmap".into(),
        version: VERSION.into(),
        subcommand: command.name().into(),
        command: command.clone(),
        grid: output.grid,
        diagnostics: output.diagnostics,
        outputs: names,
        wall_time_s,
    };
    let path = out_dir.join(format!("{}.manifest.json", command.name()));
    let body = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    fs::write(&path, body).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}

pub fn read_manifest(path: &Path) -> Result<RunManifest, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::validation(format!("bad manifest {}: {e}", path.display())))
}

/// Failure reported as JSON on stderr.
#[derive(Debug, Serialize)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    pub exit_code: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<Value>,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            kind: "validation",
            message: message.into(),
            exit_code: 2,
            details: None,
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self {
            kind: "io",
            message: format!("{}: {e}", path.display()),
            exit_code: 3,
            details: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&serde_json::json!({ "error": self })).expect("error serializes")
    }
}

impl From<clmap::Error> for CliError {
    fn from(e: clmap::Error) -> Self {
        let validation = e.is_validation();
        let details = match &e {
            clmap::Error::CouplingSweep { lambda, partial, .. } => {
                Some(serde_json::json!({ "lambda": lambda, "partial": partial }))
            }
            clmap::Error::NotConverged {
                iterations,
                residual,
                pair,
            }
            | clmap::Error::Diverged {
                iterations,
                residual,
                pair,
            } => Some(serde_json::json!({ "iterations": iterations, "residual": residual, "pair": pair })),
            _ => None,
        };
        Self {
            kind: if validation { "validation" } else { "numerical" },
            message: e.to_string(),
            exit_code: if validation { 2 } else { 3 },
            details,
        }
    }
}
