use std::fmt;

use thiserror::Error;

/// One of the four margins of a 2x2 confusion table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Margin {
    /// Objects whose true class is 1 (`n11 + n10`).
    Row1,
    /// Objects whose true class is 0 (`n01 + n00`).
    Row0,
    /// Objects predicted as class 1 (`n11 + n01`).
    Col1,
    /// Objects predicted as class 0 (`n10 + n00`).
    Col0,
}

impl fmt::Display for Margin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Margin::Row1 => "n1+",
            Margin::Row0 => "n0+",
            Margin::Col1 => "n+1",
            Margin::Col0 => "n+0",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability {name} = {value} is outside [0, 1]")]
    ProbabilityOutOfRange { name: &'static str, value: f64 },

    #[error("base rate alpha = {alpha} must lie strictly between 0 and 1")]
    AlphaOutOfRange { alpha: f64 },

    #[error("drift delta = {delta} puts alpha' = {alpha_prime} outside (0, 1) (alpha = {alpha})")]
    DeltaOutOfRange {
        alpha: f64,
        delta: f64,
        alpha_prime: f64,
    },

    #[error("test-set size n must be positive")]
    NonPositiveN,

    #[error("confusion counts sum to zero")]
    EmptyCounts,

    #[error("predicted-positive count {count} exceeds population size {population}")]
    CountExceedsPopulation { count: u64, population: u64 },

    #[error("degenerate margin: {0} is zero")]
    DegenerateMargin(Margin),

    #[error("estimated confusion matrix is singular: |p00_hat + p11_hat - 1| = {det_abs:e} <= {tolerance:e}")]
    SingularMatrix { det_abs: f64, tolerance: f64 },

    #[error("error model is singular: |p00 + p11 - 1| = {det_abs:e} <= {tolerance:e}")]
    SingularModel { det_abs: f64, tolerance: f64 },

    #[error(
        "analytic variance evaluated to {value:e}; the first-order approximation is invalid here"
    )]
    NegativeVariance { value: f64 },

    #[error("classification probability bound p = {p} must lie in [0.5, 1]")]
    PCapOutOfRange { p: f64 },

    #[error("population size {population} must be at least 10 * n = {required}")]
    PopulationTooSmall { population: u64, required: u64 },

    #[error("replication count must be positive")]
    ZeroReplications,

    #[error("all {replications} replications were degenerate")]
    AllDegenerate { replications: u64 },

    #[error("replication {index} was degenerate ({reason})")]
    DegenerateReplication { index: u64, reason: Degeneracy },

    #[error("n = {n} exceeds the enumeration limit {max_n}")]
    NTooLarge { n: u64, max_n: u64 },

    #[error("D(delta) changes sign {sign_changes} times on (0, 1 - alpha); expected at most one")]
    MultipleRoots { sign_changes: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// Why a sampled test set cannot produce both estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Degeneracy {
    Margin(Margin),
    SingularRates,
}

impl fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degeneracy::Margin(m) => write!(f, "margin {m} is zero"),
            Degeneracy::SingularRates => f.write_str("estimated rates are singular"),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
