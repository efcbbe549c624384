use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {value} is outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("{0}")]
    Range(String),

    #[error("quadrature did not converge on [{lo}, {hi}]: estimate {estimate}, achieved error {achieved_error}")]
    Quadrature {
        lo: f64,
        hi: f64,
        estimate: f64,
        achieved_error: f64,
    },

    #[error("event cap of {cap} exceeded on path {path_index}")]
    EventCap { cap: u64, path_index: u64 },

    #[error("insufficient signal: {passed} pairs passed the noise gate, {required} required")]
    InsufficientSignal { passed: usize, required: usize },

    #[error("config error{}: {message}", location(.line, .key))]
    Config {
        line: Option<usize>,
        key: Option<String>,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn location(line: &Option<usize>, key: &Option<String>) -> String {
    match (line, key) {
        (Some(l), Some(k)) => format!(" (line {l}, key `{k}`)"),
        (Some(l), None) => format!(" (line {l})"),
        (None, Some(k)) => format!(" (key `{k}`)"),
        (None, None) => String::new(),
    }
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            what,
            value,
            domain,
        }
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            line: None,
            key: Some(key.into()),
            message: message.into(),
        }
    }

    /// Process exit status used by the command line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Io(_) => 2,
            Error::EventCap { .. } => 4,
            _ => 3,
        }
    }
}
