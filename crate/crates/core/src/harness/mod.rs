//! Batch front end: JSON experiment configs, parameter sweeps, table emission
//! and the self-verification suite.

pub mod config;
pub mod emit;
pub mod sweep;
pub mod verify;

pub use config::{ExperimentConfig, Spacing, SweepAxis, SweepParam};
pub use emit::{emit, Cell, Format, Metadata, ParsedTable, Record};
pub use sweep::{mc_row, run_idp, run_sweep, IdpRow, McRow, ResultRow};
pub use verify::{run_verify, Fault, VerifyOptions, VerifyReport};

/// Version string written into every output's metadata.
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("invariant failure: {0}")]
    Invariant(String),
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e.to_string())
    }
}

impl HarnessError {
    pub fn io_at(path: &std::path::Path, e: std::io::Error) -> Self {
        HarnessError::Io(format!("{}: {e}", path.display()))
    }

    /// Process exit status: 1 invariant, 2 config, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Invariant(_) => 1,
            HarnessError::Config(_) => 2,
            HarnessError::Io(_) => 3,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(HarnessError::Invariant("x".into()).exit_code(), 1);
        assert_eq!(HarnessError::Config("x".into()).exit_code(), 2);
        assert_eq!(HarnessError::Io("x".into()).exit_code(), 3);
        let e = HarnessError::io_at(
            std::path::Path::new("/nowhere/a.csv"),
            std::io::Error::from(std::io::ErrorKind::NotFound),
        );
        assert!(e.to_string().contains("/nowhere/a.csv"));
    }
}
