//! Batch front end for the `lightlike` kernel: read a JSON job, run the
//! named verification, and write a canonical JSON report.

pub mod commands;
pub mod config;
pub mod report;

use std::collections::BTreeMap;

pub use config::RunConfig;
pub use report::{emit, Metadata, Stage, VerificationReport};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Kernel(#[from] lightlike::Error),
}

impl CliError {
    /// 2 for invalid input, 3 for a numerical domain error, 1 when the
    /// kernel reports a check that cannot hold over the samples.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Kernel(lightlike::Error::Domain { .. }) => 3,
            CliError::Kernel(lightlike::Error::MixedSign) => 1,
            CliError::Kernel(_) => 2,
        }
    }
}

pub fn versions() -> BTreeMap<String, String> {
    BTreeMap::from([
        ("lightlike".to_string(), lightlike::VERSION.to_string()),
        ("lightlike-cli".to_string(), env!("CARGO_PKG_VERSION").to_string()),
    ])
}

/// Run one job. Deterministic in the config, including the seed.
pub fn run(cfg: &RunConfig) -> Result<VerificationReport, CliError> {
    cfg.validate()?;
    let (stages, result) = commands::dispatch(cfg)?;
    let bx = cfg.sample_box()?;
    let metadata = Metadata {
        seed: cfg.seed,
        bounds: bx.lo.iter().zip(&bx.hi).map(|(&a, &b)| [a, b]).collect(),
        versions: versions(),
    };
    let mut report = VerificationReport::new(&cfg.command, stages, metadata);
    report.result = result;
    Ok(report)
}
