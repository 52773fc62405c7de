use std::fmt;

use landskew::Error as CoreError;

/// Exit status classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Usage,
    Data,
    Numerical,
}

impl Kind {
    pub fn exit_code(self) -> i32 {
        match self {
            Kind::Usage => 2,
            Kind::Data => 3,
            Kind::Numerical => 4,
        }
    }
}

/// A failure tagged with the stage that raised it.
#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub stage: String,
    pub source: anyhow::Error,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage `{}` failed: {:#}", self.stage, self.source)
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(stage: &str, msg: impl fmt::Display) -> CliError {
    CliError { kind: Kind::Usage, stage: stage.into(), source: anyhow::anyhow!("{msg}") }
}

pub fn data(stage: &str, err: impl Into<anyhow::Error>) -> CliError {
    CliError { kind: Kind::Data, stage: stage.into(), source: err.into() }
}

/// Classifies a core error: numerical failures exit with 4, the rest with 3.
pub fn core(stage: &str, err: CoreError) -> CliError {
    let kind = match err {
        CoreError::Numerical(_) | CoreError::NonMonotoneWarp { .. } => Kind::Numerical,
        _ => Kind::Data,
    };
    CliError { kind, stage: stage.into(), source: err.into() }
}

/// Attaches a stage to core results.
pub trait StageExt<T> {
    fn stage(self, stage: &str) -> CliResult<T>;
}

impl<T> StageExt<T> for landskew::Result<T> {
    fn stage(self, stage: &str) -> CliResult<T> {
        self.map_err(|e| core(stage, e))
    }
}

impl<T> StageExt<T> for std::io::Result<T> {
    fn stage(self, stage: &str) -> CliResult<T> {
        self.map_err(|e| data(stage, e))
    }
}
