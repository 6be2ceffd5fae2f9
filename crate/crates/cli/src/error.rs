use std::fmt;
use std::path::PathBuf;

/// Failures after argument parsing. Each maps to a stable code on stderr.
#[derive(Debug)]
pub enum CliError {
    Core(mfvmd::Error),
    MissingFile(PathBuf),
    Io { path: PathBuf, source: std::io::Error },
    BadConfig(String),
    PathConflict(PathBuf),
    EmptySeries(&'static str),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::MissingFile(_) => "E_MISSING_FILE",
            CliError::Io { .. } => "E_IO",
            CliError::BadConfig(_) => "E_BAD_CONFIG",
            CliError::PathConflict(_) => "E_PATH_CONFLICT",
            CliError::EmptySeries(_) => "E_EMPTY_SERIES",
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            CliError::MissingFile(path)
        } else {
            CliError::Io { path, source }
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::MissingFile(p) => write!(f, "no such file: {}", p.display()),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::BadConfig(msg) => write!(f, "invalid config: {msg}"),
            CliError::PathConflict(p) => {
                write!(f, "output would overwrite the input {}", p.display())
            }
            CliError::EmptySeries(what) => write!(f, "nothing to plot: {what} is empty"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<mfvmd::Error> for CliError {
    fn from(e: mfvmd::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
