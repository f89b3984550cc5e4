use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({x}, {y}) lies outside the grid bounding box")]
    OutOfGrid { x: f64, y: f64 },

    #[error("invalid particle half-length {lp} for grid spacing {h} (need 0 < lp <= h/2)")]
    InvalidHalfLength { lp: f64, h: f64 },

    #[error("porosity constraint violated: J = {j} must exceed 1 - n0 = {bound}")]
    PorosityViolation { j: f64, bound: f64 },

    #[error("porosity {0} outside the open interval (0, 1)")]
    PorosityDomain(f64),

    #[error("deformation gradient is not invertible (det = {0})")]
    NonInvertibleF(f64),

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("linear solve failed: {0}")]
    LinearSolveFailure(String),

    #[error("matrix is numerically singular (smallest eigenvalue estimate {0:e})")]
    SingularMatrix(f64),

    #[error("boundary surface `{0}` does not intersect any boundary segment")]
    EmptySurface(String),

    #[error("configuration parse error: {0}")]
    Parse(String),

    #[error("configuration is invalid:\n{}", format_validation(.0))]
    Validation(Vec<ValidationIssue>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// One failed validation rule, keyed by the dotted path of the offending field.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationIssue {
    pub field: String,
    pub message: String,
}

impl ValidationIssue {
    pub fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { field: field.into(), message: message.into() }
    }
}

fn format_validation(issues: &[ValidationIssue]) -> String {
    issues.iter().map(|i| format!("  {}: {}", i.field, i.message)).collect::<Vec<_>>().join("\n")
}
