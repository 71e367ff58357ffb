use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{function}: pole at {at}")]
    Pole { function: &'static str, at: f64 },

    #[error("{function}: argument outside domain ({detail})")]
    Domain {
        function: &'static str,
        detail: String,
    },

    #[error("{function}: series did not converge within {terms} terms")]
    NonConvergence {
        function: &'static str,
        terms: usize,
    },

    #[error("invalid lattice spec: {0}")]
    InvalidSpec(String),

    #[error("{what} of size {requested} exceeds the configured cap {cap}")]
    Resource {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("energy {energy} lies within {distance:e} of a pole of the secular function")]
    PoleProximity { energy: f64, distance: f64 },

    #[error("secular equation produced {found} roots, expected {expected}")]
    RootCount { expected: usize, found: usize },

    #[error("|A(t)|^2 still rising at the scan horizon t = {horizon}")]
    NoMaximum { horizon: f64 },

    #[error("alpha = {alpha} is outside the regime required here for d = {d} ({detail})")]
    OutOfRegime {
        d: usize,
        alpha: f64,
        detail: &'static str,
    },

    #[error("only {found} points in the fit window, need at least {required}")]
    InsufficientPoints { found: usize, required: usize },

    #[error("amplitudes are not normalised: |a|^2 = {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("eigensolver failed to converge for eigenvalue {index}")]
    EigenConvergence { index: usize },
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }
}
