use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is rank deficient: |R[{column},{column}]| = {value:e}")]
    RankDeficient { column: usize, value: f64 },

    #[error("matrix is not symmetric positive definite (pivot {pivot} = {value:e})")]
    NotSpd { pivot: usize, value: f64 },

    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("triangular matrix is singular (diagonal ratio {0:e})")]
    SingularTriangular(f64),

    #[error("matrix is singular (zero pivot in column {0})")]
    Singular(usize),

    #[error("SVD did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("columns are not orthonormal (defect {0:e})")]
    NotOrthonormal(f64),

    #[error("tangent lift is not horizontal (defect {0:e})")]
    NotHorizontal(f64),

    #[error("sample left the chart: cond2(U1) = {0:e}")]
    ChartSingular(f64),

    #[error("degree {degree} exceeds the maximum {max} supported by the nodes")]
    DegreeTooHigh { degree: usize, max: usize },

    #[error("nodes collide (minimum gap {0:e})")]
    NodeCollision(f64),

    #[error("Arnoldi breakdown at step {step} (subdiagonal {value:e})")]
    Breakdown { step: usize, value: f64 },

    #[error("node range is degenerate")]
    DegenerateRange,

    #[error("subspace is outside the normal-coordinate chart (largest principal angle {0})")]
    OutOfChart(f64),

    #[error("wavenumber is too close to a resonance (|Y|/|F| = {0:e})")]
    NearResonance(f64),

    #[error("model mode mismatch: {0}")]
    ModeMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed model file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerical pipeline, as opposed to bad input
    /// or configuration.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::RankDeficient { .. }
                | Error::NotSpd { .. }
                | Error::SingularTriangular(_)
                | Error::Singular(_)
                | Error::NoConvergence(_)
                | Error::ChartSingular(_)
                | Error::Breakdown { .. }
                | Error::OutOfChart(_)
                | Error::NearResonance(_)
                | Error::NotOrthonormal(_)
                | Error::NotHorizontal(_)
                | Error::NodeCollision(_)
        )
    }
}
