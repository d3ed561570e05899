use crate::exprlang;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A user-supplied data field produced a non-finite value.
    #[error("field `{field}` evaluated to a non-finite value at (x={x}, t={t})")]
    DataEval { field: String, x: f64, t: f64 },

    /// Invalid argument to a mesh or solver routine.
    #[error("invalid argument: {0}")]
    BadArgument(String),

    /// Numeric failure inside the linear algebra (zero pivot etc.).
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// Error raised while marching, annotated with the offending time level.
    #[error("at time level k={level} (t={t}): {source}")]
    AtTimeLevel {
        level: usize,
        t: f64,
        #[source]
        source: Box<Error>,
    },

    /// Query outside the solution domain.
    #[error("query (x={x}, t={t}) outside the solution domain")]
    OutOfDomain { x: f64, t: f64 },

    #[error("expression parse error: {0}")]
    Parse(#[from] exprlang::ParseError),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn at_level(self, level: usize, t: f64) -> Error {
        Error::AtTimeLevel {
            level,
            t,
            source: Box::new(self),
        }
    }
}
