use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("assumption {assumption} violated: {witness}")]
    AssumptionViolated {
        assumption: &'static str,
        witness: String,
    },

    #[error(
        "grid half-length {half_length} does not confine the fiber at xi = {xi} \
         (edge potential {edge_potential:.4}, required {required:.4} with the well inside the box); \
         try L >= {suggested:.3}"
    )]
    Confinement {
        xi: f64,
        half_length: f64,
        edge_potential: f64,
        required: f64,
        suggested: f64,
    },

    #[error("{what} did not converge: {detail}")]
    Convergence { what: &'static str, detail: String },

    #[error("no sign change found while bracketing {what} on [{lo}, {hi}]")]
    Bracketing { what: &'static str, lo: f64, hi: f64 },

    #[error("at xi = {xi}: {source}")]
    AtMomentum {
        xi: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub fn at_xi(self, xi: f64) -> Self {
        Error::AtMomentum {
            xi,
            source: Box::new(self),
        }
    }

    /// True for failures caused by the inputs rather than by a numerical routine.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::InvalidParameter(_)
            | Error::AssumptionViolated { .. }
            | Error::Confinement { .. } => true,
            Error::AtMomentum { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}
