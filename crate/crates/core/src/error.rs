//! Top-level error: every module error, tagged with its module.

use std::path::PathBuf;

use thiserror::Error;

use crate::config::ConfigError;
use crate::driving::DrivingError;
use crate::dynamics::DynamicsError;
use crate::pattern::PatternError;
use crate::rescale::RescaleError;
use crate::skorokhod::SkorokhodError;
use crate::stats::StatsError;
use crate::warren::WarrenError;

#[derive(Debug, Error)]
pub enum Error {
    #[error("pattern: {0}")]
    Pattern(#[from] PatternError),
    #[error("driving: {0}")]
    Driving(#[from] DrivingError),
    #[error("dynamics: {0}")]
    Dynamics(#[from] DynamicsError),
    #[error("skorokhod: {0}")]
    Skorokhod(#[from] SkorokhodError),
    #[error("warren: {0}")]
    Warren(#[from] WarrenError),
    #[error("rescale: {0}")]
    Rescale(#[from] RescaleError),
    #[error("stats: {0}")]
    Stats(#[from] StatsError),
    #[error("config: {0}")]
    Config(#[from] ConfigError),
    #[error("io: {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(#[from] clap::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
