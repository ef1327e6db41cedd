use thiserror::Error;

/// Where an inadmissible state was encountered.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Location {
    pub element: usize,
    pub node: usize,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("inadmissible state (rho = {rho:.6e}, rho*e = {internal_energy:.6e}){}", fmt_location(.location))]
    Inadmissible {
        rho: f64,
        internal_energy: f64,
        location: Option<Location>,
    },

    #[error("time integration failed at t = {t:.6e}: {reason}")]
    IntegrationFailure { t: f64, reason: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn fmt_location(loc: &Option<Location>) -> String {
    match loc {
        Some(l) => format!(" at element {}, node {}", l.element, l.node),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Attach an element/node location to an admissibility error that does not have one yet.
    pub fn at(self, element: usize, node: usize) -> Self {
        match self {
            Error::Inadmissible {
                rho,
                internal_energy,
                location: None,
            } => Error::Inadmissible {
                rho,
                internal_energy,
                location: Some(Location { element, node }),
            },
            other => other,
        }
    }

    pub fn is_admissibility(&self) -> bool {
        matches!(self, Error::Inadmissible { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
