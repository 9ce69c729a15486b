use thiserror::Error;

/// Errors raised while building meshes, elements, systems, or solving them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh parameter: {0}")]
    MeshParameter(String),

    #[error("unsupported quadrature degree {degree} on {shape} (max {max})")]
    UnsupportedQuadrature {
        shape: &'static str,
        degree: usize,
        max: usize,
    },

    #[error("element construction failed on element {element}: {reason}")]
    Element { element: usize, reason: String },

    #[error("overlay geometry failure: covered area {area:.12} differs from interface area 1")]
    OverlayArea { area: f64 },

    #[error("point ({x}, {y}) lies outside the parents of overlay cell")]
    PointOutsideCell { x: f64, y: f64 },

    #[error("configuration requires matching interface meshes: {0}")]
    NonMatching(String),

    #[error("singular factorization in block `{block}`: {detail}")]
    SingularFactorization { block: String, detail: String },

    #[error("matrix is not symmetric positive definite: {0}")]
    NotSpd(String),

    #[error("solver residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    Residual { residual: f64, tolerance: f64 },

    #[error("conjugate gradient did not converge in {iterations} iterations (last relative residual {last:.3e})")]
    NoConvergence {
        iterations: usize,
        last: f64,
        history: Vec<f64>,
    },

    #[error("unknown field `{0}`")]
    UnknownField(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("level {level}: {source}")]
    AtLevel {
        level: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
