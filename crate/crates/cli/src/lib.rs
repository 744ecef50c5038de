//! Batch verification campaigns over the model spaces of `ucw`.

pub mod config;
pub mod report;
pub mod suites;

use std::time::Instant;

use thiserror::Error;

pub use config::{CampaignConfig, Format, Overrides, Suite};
pub use report::{RunReport, Status};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// Runs a campaign.
pub fn run(config: CampaignConfig) -> RunReport {
    let start = Instant::now();
    let suites = suites::run_suites(&config);
    RunReport::new(config, suites, start.elapsed().as_secs_f64())
}

/// Renders `report` in the configured format and writes it to the
/// configured destination, standard output when there is none.
pub fn emit(report: &RunReport) -> Result<Option<std::path::PathBuf>, CliError> {
    let text = match report.body.config.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv()?,
    };
    match report.body.config.output_path() {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
            }
            std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            Ok(Some(path))
        }
        None => {
            print!("{text}");
            Ok(None)
        }
    }
}
