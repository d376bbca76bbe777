use std::fmt;
use std::process::ExitCode;

/// A failed invocation, classified by exit code.
#[derive(Debug)]
pub enum CliError {
    /// 1: local I/O.
    Io(String),
    /// 2: malformed arguments or input files.
    Usage(String),
    /// 3: input that parsed but could not be used: silent or unsupported
    /// audio, or a request the server rejected as invalid.
    Input(String),
    /// 4: the server refused the request: login refused, unauthorized,
    /// unknown challenge, conflict.
    Rejected(String),
    /// 5: the server could not be reached or failed.
    Transport(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::Rejected(_) => 4,
            CliError::Transport(_) => 5,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m)
            | CliError::Usage(m)
            | CliError::Input(m)
            | CliError::Rejected(m)
            | CliError::Transport(m) => f.write_str(m),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
