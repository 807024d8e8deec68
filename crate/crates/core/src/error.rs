//! Error type shared by every module of the crate.

use std::path::PathBuf;

/// Convenience alias used throughout the crate.
pub type Result<T, E = GlasError> = std::result::Result<T, E>;

/// Errors raised while building, evaluating, ranking or serializing label maps.
#[derive(Debug, thiserror::Error)]
pub enum GlasError {
    /// Grid dimensions are inconsistent (ragged rows, mismatched pairs).
    #[error("shape error: {0}")]
    Shape(String),

    /// A pixel or cell value is outside the accepted range.
    #[error("value error: {0}")]
    Value(String),

    /// A label that is not present in the map was requested.
    #[error("label {label} not found in label map")]
    NotFound { label: u32 },

    /// The metric is undefined for the supplied input (empty sets, too few pixels).
    #[error("undefined input: {0}")]
    UndefinedInput(String),

    /// Input file is not in a supported format.
    #[error("format error: {0}")]
    Format(String),

    /// Structured input failed validation (manifests, score tables, configs).
    #[error("validation error: {0}")]
    Validation(String),

    /// Synthetic gland placement could not satisfy the requested spec.
    #[error("placement error: {0}")]
    Placement(String),

    /// A per-image failure during dataset evaluation.
    #[error("image `{id}`: {source}")]
    Image {
        id: String,
        #[source]
        source: Box<GlasError>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl GlasError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        GlasError::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable machine-readable name of the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            GlasError::Shape(_) => "shape",
            GlasError::Value(_) => "value",
            GlasError::NotFound { .. } => "not_found",
            GlasError::UndefinedInput(_) => "undefined_input",
            GlasError::Format(_) => "format",
            GlasError::Validation(_) => "validation",
            GlasError::Placement(_) => "placement",
            GlasError::Image { source, .. } => source.kind(),
            GlasError::Io { .. } => "io",
            GlasError::Json(_) => "json",
            GlasError::Csv(_) => "csv",
        }
    }

    /// True for errors caused by bad input rather than by a failed computation.
    pub fn is_validation(&self) -> bool {
        match self {
            GlasError::UndefinedInput(_) | GlasError::Placement(_) => false,
            GlasError::Image { source, .. } => source.is_validation(),
            _ => true,
        }
    }
}
