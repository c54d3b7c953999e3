use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    Parameter(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("mesh validation failed: {0}")]
    MeshValidation(String),

    #[error("mesh generation failed: {0}")]
    MeshGeneration(String),

    #[error("edge reduction precondition violated: {0}")]
    DegreePrecondition(String),

    #[error("cell {cell}: singular projection matrix")]
    SingularProjection { cell: usize },

    #[error("cell {cell}: {source}")]
    InCell {
        cell: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("non-positive pivot {value:e} at index {index}")]
    NonPositivePivot { index: usize, value: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Report(String),
}

impl Error {
    pub fn in_cell(self, cell: usize) -> Error {
        match self {
            Error::SingularProjection { .. } => Error::SingularProjection { cell },
            e @ Error::InCell { .. } => e,
            e => Error::InCell {
                cell,
                source: Box::new(e),
            },
        }
    }
}
