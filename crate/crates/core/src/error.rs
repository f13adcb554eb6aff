use thiserror::Error;

/// Unified error type for the library.
///
/// Every fallible operation reports through this enum so callers (the CLI in
/// particular) can render a single, stable error surface.
#[derive(Debug, Error)]
pub enum Error {
    #[error("argument ({x}, {y}) lies outside the unit square")]
    OutOfDomain { x: f64, y: f64 },

    #[error("invalid potential spec: {0}")]
    InvalidSpec(String),

    #[error("n_cells must be at least 1")]
    EmptyGrid,

    #[error("matrix sizes do not match: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("power trace of {count} matrices of dimension {dim} needs {bytes} bytes, budget is {budget}")]
    TraceBudget {
        count: usize,
        dim: usize,
        bytes: usize,
        budget: usize,
    },

    #[error("value iteration did not converge after {iterations} sweeps (last residual {residual:e})")]
    NonConvergent { iterations: usize, residual: f64 },

    #[error("reweighted edge ({from}, {to}) is negative ({value:e}); the subaction is stale")]
    NegativeReweight { from: usize, to: usize, value: f64 },

    #[error("Aubry set is empty at tolerance {tol:e}")]
    EmptyAubry { tol: f64 },

    #[error("Aubry characterizations disagree at letter {letter}: |D| = {d_diag:e}, |H| = {h_diag:e}")]
    AubryMismatch {
        letter: usize,
        d_diag: f64,
        h_diag: f64,
    },

    #[error("barrier relation is not transitive on letters ({a}, {b}, {c})")]
    NotTransitive { a: usize, b: usize, c: usize },

    #[error("witness cycle leaves the Aubry set at node {node}")]
    WitnessEscapes { node: usize },

    #[error("support letters and diagonal minimizers disagree: {0}")]
    SupportMismatch(String),

    #[error("twist certificate failed: max mixed partial {max:e} is not negative")]
    NotTwist { max: f64 },

    #[error("orbit period must be at least 1")]
    EmptyOrbit,

    #[error("orbit vectors have different lengths: {left} vs {right}")]
    OrbitLengthMismatch { left: usize, right: usize },

    #[error("point word is not on the current grid: index {index} exceeds {max}")]
    PointOffGrid { index: usize, max: usize },

    #[error("period of an eventually periodic point must be nonempty")]
    EmptyPeriod,

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
