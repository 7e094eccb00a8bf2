//! Experiment runner behind the `nmc` binary: JSON configs in, JSON/CSV
//! reports out.

pub mod config;
pub mod run;

use std::io::Write;
use std::path::{Path, PathBuf};

use nmc_core::code::CodeError;
use nmc_core::harness::HarnessError;
use thiserror::Error;

pub use config::ExperimentConfig;
pub use run::{run_experiment, RunReport};

use config::OutputFormat;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("code construction failed: {0}")]
    Build(CodeError),
    #[error("evaluation failed: {0}")]
    Eval(HarnessError),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Validation(_) => 2,
            RunError::Build(_) => 3,
            RunError::Io { .. } => 4,
            RunError::Eval(_) => 1,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        RunError::Io { path: path.to_path_buf(), source }
    }
}

/// Replaces `path` in one rename so readers never see a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| RunError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| RunError::io(path, e))?;
    tmp.persist(path).map_err(|e| RunError::io(path, e.error))?;
    Ok(())
}

/// Writes the report where the config says; returns the files written.
pub fn write_report(report: &RunReport, path: &Path) -> Result<Vec<PathBuf>, RunError> {
    let csv_path = path.with_extension("csv");
    match report.config.output.format {
        OutputFormat::Json => {
            write_atomic(path, &report.to_json())?;
            Ok(vec![path.to_path_buf()])
        }
        OutputFormat::Csv => {
            write_atomic(path, &report.to_csv())?;
            Ok(vec![path.to_path_buf()])
        }
        OutputFormat::Both => {
            write_atomic(path, &report.to_json())?;
            write_atomic(&csv_path, &report.to_csv())?;
            Ok(vec![path.to_path_buf(), csv_path])
        }
    }
}
