use std::fmt;

use thiserror::Error;

/// Pipeline stage attached to errors raised inside [`crate::run_manifest`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Split,
    Scale,
    Kernel,
    Normalize,
    Geometry,
    Score,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Split => "class split",
            Stage::Scale => "scale selection",
            Stage::Kernel => "kernel construction",
            Stage::Normalize => "kernel normalization",
            Stage::Geometry => "manifold composition",
            Stage::Score => "spectral score",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not positive definite: eigenvalue {eigenvalue:e} is at or below threshold {threshold:e}")]
    NotPositiveDefinite { eigenvalue: f64, threshold: f64 },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("Grassmann geodesic undefined: principal angle {angle} exceeds pi/2")]
    GeodesicDomain { angle: f64 },

    #[error("vector is not a shared eigenvector (residual {residual:e} > {tolerance:e})")]
    NotSharedEigenvector { residual: f64, tolerance: f64 },

    #[error("parse error at row {row}, column {column}: {message}")]
    Parse { row: usize, column: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::DegenerateData(msg.into())
    }

    /// The underlying error with any stage tags peeled off.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }

    /// The innermost stage tag, if any.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, source } => source.stage().or(Some(*stage)),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) trait StageExt<T> {
    fn at(self, stage: Stage) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn at(self, stage: Stage) -> Result<T> {
        self.map_err(|e| Error::Stage {
            stage,
            source: Box::new(e),
        })
    }
}
