use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// One problem found while reading a scenario file.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigIssue {
    /// Dotted key, e.g. `run.length`.
    pub key: String,
    /// 1-based line of the key in the source, when it appears there.
    pub line: Option<usize>,
    pub kind: IssueKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum IssueKind {
    Unknown,
    Missing,
    WrongType { expected: &'static str },
    OutOfRange(String),
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        match &self.kind {
            IssueKind::Unknown => write!(f, "unknown key `{}`", self.key),
            IssueKind::Missing => write!(f, "missing required key `{}`", self.key),
            IssueKind::WrongType { expected } => write!(f, "`{}` must be {expected}", self.key),
            IssueKind::OutOfRange(why) => write!(f, "`{}` out of range: {why}", self.key),
        }
    }
}

fn list(issues: &[ConfigIssue]) -> String {
    issues.iter().map(|i| format!("\n  {i}")).collect()
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("invalid scenario:{}", list(.0))]
    Invalid(Vec<ConfigIssue>),
    #[error("unknown preset `{0}` (see `wslattice presets`)")]
    UnknownPreset(String),
    #[error("cannot override `{key}`: {reason}")]
    Override { key: String, reason: String },
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot serialize config: {0}")]
    Serialize(String),
}

impl ConfigError {
    pub fn issues(&self) -> &[ConfigIssue] {
        match self {
            ConfigError::Invalid(v) => v,
            _ => &[],
        }
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("lattice: {0}")]
    Lattice(#[from] ws_lattice::LatticeError),
    #[error("basis: {0}")]
    Basis(#[from] ws_basis::BasisError),
    #[error("full propagation: {0}")]
    Propagator(#[from] ws_propagator::PropagatorError),
    #[error("reduced model: {0}")]
    TightBinding(#[from] ws_tightbinding::TightBindingError),
    #[error("observables: {0}")]
    Observables(#[from] ws_observables::ObservablesError),
    #[error("analysis `{analysis}`: {reason}")]
    Analysis { analysis: &'static str, reason: String },
}

impl ScenarioError {
    /// Process exit status for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config(_) => 2,
            _ => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> ScenarioError {
        let path = path.into();
        move |source| ScenarioError::Io { path, source }
    }
}
