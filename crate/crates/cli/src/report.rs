use std::fmt;
use std::process::ExitCode;

/// A command failure and the exit status it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Bad invocation: exit 2.
    Usage(String),
    /// The program, query or trace could not be processed: exit 1.
    Program(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            Failure::Usage(_) => ExitCode::from(2),
            Failure::Program(_) => ExitCode::from(1),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => f.write_str(m),
            Failure::Program(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Program(e)
    }
}

fn styled(color: bool, code: &str, text: &str) -> String {
    if color {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

pub fn error(color: bool, failure: &Failure) {
    eprintln!("{} {failure}", styled(color, "1;31", "error:"));
}

pub fn warning(color: bool, message: &str) {
    eprintln!("{} {message}", styled(color, "1;33", "warning:"));
}
