use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller broke a documented precondition (size mismatch, negative count, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("{what} = {value} is outside the admissible domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: String,
    },

    /// The collocation matrix could not be factored as positive definite.
    #[error("collocation matrix lost positive definiteness (condition estimate {condition:e})")]
    Conditioning { condition: f64 },

    #[error("interpolation residual {residual:e} exceeds the allowed {allowed:e} (condition estimate {condition:e})")]
    Accuracy {
        residual: f64,
        allowed: f64,
        condition: f64,
    },

    #[error("band {band}: {source}")]
    Band {
        band: i64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn in_band(self, band: i64) -> Self {
        Error::Band {
            band,
            source: Box::new(self),
        }
    }

    /// Condition estimate carried by a solver failure, looking through band annotations.
    pub fn condition(&self) -> Option<f64> {
        match self {
            Error::Conditioning { condition } | Error::Accuracy { condition, .. } => {
                Some(*condition)
            }
            Error::Band { source, .. } => source.condition(),
            _ => None,
        }
    }
}
