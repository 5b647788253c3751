use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NON_VIABLE: i32 = 3;
pub const EXIT_SINGULAR: i32 = 4;
pub const EXIT_INFEASIBLE: i32 = 5;
pub const EXIT_IO: i32 = 6;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("unknown project {0:?}")]
    UnknownProject(String),
    #[error("{0}")]
    Usage(String),
    #[error("project {project:?}: {source}")]
    Project {
        project: String,
        #[source]
        source: treslev::Error,
    },
    #[error(transparent)]
    Core(#[from] treslev::Error),
    #[error("cannot fit the cost model: {0}")]
    Fit(treslev::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn project(project: &str, source: treslev::Error) -> Self {
        CliError::Project {
            project: project.to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::UnknownProject(_) | CliError::Usage(_) => EXIT_CONFIG,
            CliError::Project { source, .. } | CliError::Core(source) => core_exit_code(source),
            CliError::Fit(_) => EXIT_INFEASIBLE,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

fn core_exit_code(e: &treslev::Error) -> i32 {
    use treslev::Error::*;
    match e {
        NonViable { .. } | NonPositiveMargin { .. } | MarginZero => EXIT_NON_VIABLE,
        AtThreshold => EXIT_SINGULAR,
        InfeasibleDrop { .. }
        | InfeasiblePath { .. }
        | DegeneratePoints
        | NonNegativeSlope { .. }
        | NonPositiveIntercept { .. } => EXIT_INFEASIBLE,
        _ => EXIT_CONFIG,
    }
}
