use thiserror::Error;

/// Errors produced by the library. Every public operation that can reject
/// its input returns one of these instead of panicking.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the supported range of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A state vector is not normalized to the required tolerance.
    #[error("state is not normalized: |norm^2 - 1| = {deviation:e}")]
    NotNormalized { deviation: f64 },

    /// A family constructor needs more Fock levels than the configured cap.
    #[error(
        "truncation needs n_max = {required} but the cap is {cap} \
         (raise it with WEYL_UNCERT_MAX_NMAX)"
    )]
    TruncationCap { required: usize, cap: usize },

    /// A closed-form characteristic set is not available for this
    /// configuration.
    #[error("closed form unavailable: {0}")]
    Unavailable(String),

    /// A family specification string could not be parsed.
    #[error("invalid family spec at byte {position}: {message}")]
    Parse { position: usize, message: String },

    /// An unknown sweep parameter or functional name.
    #[error("unknown {kind} '{name}'")]
    Unknown { kind: &'static str, name: String },

    /// A scan grid point failed to build.
    #[error("scan aborted at {param} = {value}: {source}")]
    ScanPoint {
        param: String,
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
