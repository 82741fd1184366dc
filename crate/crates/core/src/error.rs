use thiserror::Error;

/// Errors shared by all toruslab modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid of {g} points cannot hold {required} modes: need G >= {required}, G a power of two")]
    GridTooSmall { g: usize, required: usize },

    #[error("grid size {g} is not a power of two")]
    GridNotPowerOfTwo { g: usize },

    #[error("field is not real-symmetric: {detail}")]
    NotRealSymmetric { detail: String },

    #[error("coefficient storage has {got} entries, expected {expected} (2N+1 with N={n})")]
    BadCoefficientCount { got: usize, expected: usize, n: usize },

    #[error("non-finite coefficient at mode n={n}")]
    NonFiniteCoefficient { n: i64 },

    #[error("invalid parameter {name}: {detail}")]
    InvalidParameter { name: &'static str, detail: String },

    #[error("integration failed at t={t}: field became non-finite")]
    IntegrationBlowUp { t: f64 },

    #[error("nonlinear substep failed to converge at t={t} after {iters} iterations")]
    SubstepDiverged { t: f64, iters: usize },

    #[error("cutoff never satisfied: all {count} importance weights are -inf (acceptance fraction 0)")]
    CutoffNeverSatisfied { count: usize },

    #[error("ensemble is degenerate: {detail}")]
    DegenerateEnsemble { detail: String },

    #[error("soliton resolution guard: delta={delta} requires N >= {suggested_n}, got N={n}")]
    SolitonResolution { delta: f64, n: usize, suggested_n: usize },

    #[error("shooting bracket failure: {detail}")]
    ShootingBracket { detail: String },

    #[error("conjugate bound requires y >= y_threshold = {threshold}, got y = {y}")]
    BelowConjugateThreshold { y: f64, threshold: f64 },

    #[error("snapshot format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
