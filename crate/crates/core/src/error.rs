use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("wave number must be positive and finite, got {0}")]
    NonPositiveWaveNumber(f64),

    #[error("mode j={j} is within the Wood-anomaly guard: |k^2 - alpha_j^2| = {gap:e} < {tol:e}")]
    WoodAnomalyProximity { j: i64, gap: f64, tol: f64 },

    #[error("bad geometry: {0}")]
    BadGeometry(String),

    #[error("points too close vertically for the modal series: |x2 - y2| = {separation:e} < {switch:e}")]
    TooCloseVertically { separation: f64, switch: f64 },

    #[error("evaluation point coincides with image j={image} of the source point")]
    SingularPoint { image: i64 },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error: {message}")]
    Validation {
        message: String,
        #[source]
        cause: Option<Box<Error>>,
    },

    #[error("point source at x2={x2} lies inside the slab |x2| <= {h}")]
    SourceInsideSlab { x2: f64, h: f64 },

    #[error("plane-wave incidence requires a propagating j=0 mode")]
    EvanescentPlaneWave,

    #[error("solver did not converge in {iterations} iterations (best relative residual {residual:e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("discretization is resonant at (j={j}, m={m}); perturb R (e.g. R = {suggested_r})")]
    ResonantDiscretization { j: i64, m: i64, suggested_r: f64 },

    #[error("propagating mode j={j} exceeds the Nyquist band of a {points}-point trace")]
    AliasedMode { j: i64, points: usize },

    #[error("energy balance requires a lossless scene (real contrast)")]
    LossyScene,

    #[error("energy balance requires plane-wave incidence from above")]
    NotPlaneWave,

    #[error("scene has no scatterer support")]
    EmptyScene,

    #[error("noise level must lie in [0, 1), got {0}")]
    InvalidNoiseLevel(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed data file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
