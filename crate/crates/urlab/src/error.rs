//! Error type shared by all modules of the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while validating states, measuring, or evaluating
/// bounds. Variants carry the offending numbers so callers can render actionable
/// diagnostics.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("matrix is not Hermitian: max |m - m†| = {defect:.3e} exceeds {tol:.3e}")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("trace is not 1: |trace - 1| = {defect:.3e} exceeds {tol:.3e}")]
    TraceNotOne { defect: f64, tol: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("bipartite split {dim_a}x{dim_c} does not factor dimension {dim}")]
    BadSplit {
        dim_a: usize,
        dim_c: usize,
        dim: usize,
    },

    #[error("state carries no bipartite split but the operation needs one")]
    NoSplit,

    #[error("rank {rank} out of range 1..={dim}")]
    RankOutOfRange { rank: usize, dim: usize },

    #[error("expectation of a Hermitian observable has imaginary residue {residue:.3e} (tolerance {tol:.3e})")]
    ImaginaryResidue { residue: f64, tol: f64 },

    #[error("reference observable is degenerate on this state: <B†B> = {norm:.3e} is below {tol:.3e}")]
    DegenerateReference { norm: f64, tol: f64 },

    #[error("variance product {value:.3e} is below {tol:.3e}; the ratio bound is undefined")]
    ZeroVariance { value: f64, tol: f64 },

    #[error("ratio-bound denominator is singular: 1 - |cov|/(ΔA·ΔB) = {value:.3e} is below {tol:.3e}")]
    SingularDenominator { value: f64, tol: f64 },

    #[error("negative radicand {value:.3e} in the estimated-overlap correction")]
    NegativeRadicand { value: f64 },

    #[error("phase vector has length {got}, observable list has length {expected}")]
    PhaseLength { expected: usize, got: usize },

    #[error("observable list is empty")]
    NoObservables,

    #[error("pairwise bound mode needs a positive even observable count, got {got}")]
    OddPairCount { got: usize },

    #[error("phase grid too large: {evaluations} evaluations exceed the budget of {budget}")]
    GridBudget { evaluations: u128, budget: u128 },

    #[error("temperature must be positive and finite, got {got}")]
    BadTemperature { got: f64 },

    #[error("model parameter {name} must be finite, got {got}")]
    BadParameter { name: &'static str, got: f64 },

    #[error("internal consistency check '{what}' failed: residual {residual:.3e} exceeds {tol:.3e}")]
    Inconsistent {
        what: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    NoConvergence { sweeps: usize, off: f64 },
}
