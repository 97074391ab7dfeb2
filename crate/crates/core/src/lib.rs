//! Bias-corrected base-rate estimation from classifier output under prior
//! probability shift.
//!
//! A classifier is evaluated on a labelled test set drawn in one period and
//! then applied to a population in a later period whose base rate may have
//! drifted. This crate provides
//!
//! * the misclassification and calibration point estimators ([`estimators`]),
//! * their first-order bias, variance and MSE under drift ([`moments`]),
//! * a seeded Monte Carlo oracle and a small-sample exact enumeration
//!   that check those expressions ([`simulator`]),
//! * the decision boundary between the two estimators ([`boundary`]).

pub mod boundary;
pub mod error;
pub mod estimators;
pub mod model;
pub mod moments;
pub mod simulator;

pub use boundary::{
    boundary_curve, find_delta_star, linspace, mse_diff_curve, slope_curve, BoundaryCurve,
    BoundaryPoint, CurveKind, CurveSeries, DeltaStar, IntervalSign, RootOptions,
};
pub use error::{Degeneracy, Error, Margin, Result};
pub use estimators::{
    calibration_estimate, estimate_rates, misclassification_estimate, naive_estimate,
    ConfusionCounts, CorrectedEstimate, EstimatedRates,
};
pub use model::{
    derive_scalars, validate_scenario, DerivedScalars, ErrorModel, Scenario,
    DEFAULT_SINGULARITY_TOL,
};
pub use moments::{
    abs_bias_bounds, bias_calibration, bias_misclassification, mse, mse_difference, slope_abs_bias,
    slope_partials, variance_calibration, variance_misclassification, EstimatorKind, MomentSet,
    MomentSource,
};
pub use simulator::{
    enumerate_small_exact, oracle_grid, simulate_moments, simulate_once, verify_grid,
    verify_scenario, CheckOutcome, DegeneracyPolicy, EstimatorSummary, ExactEstimator,
    ExactMoments, Moment, OracleCell, Replication, SimConfig, SimResult, StandardErrors,
    VerifyOptions,
};

/// Crate version, recorded in emitted artifacts.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
