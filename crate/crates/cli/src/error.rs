use std::fmt;

/// Process exit status for each failure family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Failure {
    /// I/O and anything not covered below.
    Runtime = 1,
    /// Bad flags, config files or missing dataset inputs.
    Config = 2,
    Generation = 3,
    /// Unreadable or degenerate mask.
    Mask = 4,
    /// Unreadable model or a model that does not fit the features.
    Model = 5,
    /// Scene file schema violation.
    Scene = 6,
}

impl Failure {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug)]
pub struct CliError {
    pub failure: Failure,
    pub error: anyhow::Error,
}

impl CliError {
    pub fn new(failure: Failure, error: impl Into<anyhow::Error>) -> Self {
        Self {
            failure,
            error: error.into(),
        }
    }

    pub fn msg(failure: Failure, msg: impl fmt::Display) -> Self {
        Self::new(failure, anyhow::anyhow!("{msg}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub trait OrFail<T> {
    fn or_fail(self, failure: Failure) -> CliResult<T>;
    fn or_fail_with(self, failure: Failure, context: impl FnOnce() -> String) -> CliResult<T>;
}

impl<T, E> OrFail<T> for Result<T, E>
where
    E: std::error::Error + Send + Sync + 'static,
{
    fn or_fail(self, failure: Failure) -> CliResult<T> {
        self.map_err(|e| CliError::new(failure, e))
    }

    fn or_fail_with(self, failure: Failure, context: impl FnOnce() -> String) -> CliResult<T> {
        self.map_err(|e| CliError::new(failure, anyhow::Error::new(e).context(context())))
    }
}
