//! Files, threads and the command line around `eddyeq-core`.
//!
//! - [`scenario`]: TOML scenario files with units in the key names.
//! - [`spectrum_file`]: CSV spectra with `#` metadata lines.
//! - [`parallel`]: multi-threaded sweeps with deterministic ordering.
//! - [`cli`]: the `eddyeq` command.

pub mod cli;
pub mod parallel;
pub mod scenario;
pub mod spectrum_file;

use std::path::{Path, PathBuf};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input: arguments, scenario content, file contents.
    #[error("{0}")]
    Invalid(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Solver(#[from] eddyeq_core::Error),
    /// The iteration ran out; partial results were still written.
    #[error("{0}")]
    NotConverged(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 1 for input and validation problems, 2 when a solver did not converge.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Solver(e) if matches!(e.root(), eddyeq_core::Error::NonConvergence { .. }) => 2,
            CliError::NotConverged(_) => 2,
            _ => 1,
        }
    }
}
