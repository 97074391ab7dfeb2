//! First-order bias, variance and MSE of the misclassification and calibration
//! estimators under prior probability shift.
//!
//! Every expression drops terms of order `1/n^2`. Both biases are measured
//! against the production-period base rate `alpha' = alpha + delta`, the
//! quantity the estimators target. The variance of the naive aggregate over
//! the production population is neglected (the population is assumed much
//! larger than the test set).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{derive_scalars, t_term, ErrorModel, Scenario};

/// Values within this distance below zero are clamped to a zero variance.
pub const NEGATIVE_VARIANCE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Misclassification,
    Calibration,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 2] =
        [EstimatorKind::Misclassification, EstimatorKind::Calibration];

    pub fn name(&self) -> &'static str {
        match self {
            EstimatorKind::Misclassification => "misclassification",
            EstimatorKind::Calibration => "calibration",
        }
    }
}

/// Where a [`MomentSet`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentSource {
    /// Closed form, accurate to first order in `1/n`.
    FirstOrder,
    /// Closed form using the rate variances with their `1/n` correction brackets.
    SecondOrderRates,
    MonteCarlo,
    ExactEnumeration,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSet {
    pub bias: f64,
    pub variance: f64,
    /// Always `bias^2 + variance`.
    pub mse: f64,
    pub source: MomentSource,
}

impl MomentSet {
    pub fn new(bias: f64, variance: f64, source: MomentSource) -> Self {
        Self {
            bias,
            variance,
            mse: bias * bias + variance,
            source,
        }
    }
}

fn drift_weight(model: &ErrorModel, alpha: f64) -> f64 {
    let (p00, p11) = (model.p00(), model.p11());
    p11 * (1.0 - p11) / alpha + p00 * (1.0 - p00) / (1.0 - alpha)
}

/// Bias of the misclassification estimator.
pub fn bias_misclassification(model: &ErrorModel, scenario: &Scenario) -> Result<f64> {
    let d = model.checked_determinant()?;
    let n = scenario.n() as f64;
    let delta = scenario.delta();
    Ok((model.p00() - model.p11()) / (n * d)
        + delta / (n * d * d) * drift_weight(model, scenario.alpha()))
}

/// Variance of the misclassification estimator.
///
/// With `second_order_rates` set, the variances of `p11_hat` and `p00_hat`
/// keep their `[1 + (1 - alpha)/(n alpha)]` and `[1 + alpha/(n (1 - alpha))]`
/// factors before being combined.
pub fn variance_misclassification(
    model: &ErrorModel,
    scenario: &Scenario,
    second_order_rates: bool,
) -> Result<f64> {
    let d = model.checked_determinant()?;
    let (p00, p11) = (model.p00(), model.p11());
    let (alpha, delta) = (scenario.alpha(), scenario.delta());
    let n = scenario.n() as f64;

    let value = if second_order_rates {
        let alpha_prime = scenario.alpha_prime();
        let var_p11 = p11 * (1.0 - p11) / (n * alpha) * (1.0 + (1.0 - alpha) / (n * alpha));
        let var_p00 = p00 * (1.0 - p00) / (n * (1.0 - alpha)) * (1.0 + alpha / (n * (1.0 - alpha)));
        ((1.0 - alpha_prime).powi(2) * var_p00 + alpha_prime.powi(2) * var_p11) / (d * d)
    } else {
        let t = t_term(p00, p11, alpha);
        (t + 2.0 * delta * (p00 - p11) * d + delta * delta * drift_weight(model, alpha))
            / (n * d * d)
    };
    checked_variance(value)
}

/// Bias of the calibration estimator as an estimator of `alpha'`.
///
/// Does not depend on `n`; vanishes without drift.
pub fn bias_calibration(model: &ErrorModel, scenario: &Scenario) -> f64 {
    -scenario.delta() * slope_abs_bias(model, scenario.alpha())
}

pub fn variance_calibration(model: &ErrorModel, scenario: &Scenario) -> Result<f64> {
    let s = derive_scalars(model, scenario);
    let (p00, p11) = (model.p00(), model.p11());
    let (alpha, delta) = (scenario.alpha(), scenario.delta());
    let n = scenario.n() as f64;
    let (b, nb) = (s.beta, 1.0 - s.beta);
    let (a, c) = (p11 * (1.0 - p00), p00 * (1.0 - p11));

    let zeroth = slope_h(p00, p11, alpha);
    let first = 2.0 * delta * s.d * (ratio(a, b * b) - ratio(c, nb * nb));
    let second = delta * delta * s.d * s.d * (ratio(a, b.powi(3)) + ratio(c, nb.powi(3)));
    checked_variance(alpha * (1.0 - alpha) / n * (zeroth + first + second))
}

fn checked_variance(value: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -NEGATIVE_VARIANCE_TOL {
        Ok(0.0)
    } else {
        Err(Error::NegativeVariance { value })
    }
}

/// First-order moments of one estimator.
pub fn mse(model: &ErrorModel, scenario: &Scenario, kind: EstimatorKind) -> Result<MomentSet> {
    let (bias, variance) = match kind {
        EstimatorKind::Misclassification => (
            bias_misclassification(model, scenario)?,
            variance_misclassification(model, scenario, false)?,
        ),
        EstimatorKind::Calibration => (
            bias_calibration(model, scenario),
            variance_calibration(model, scenario)?,
        ),
    };
    Ok(MomentSet::new(bias, variance, MomentSource::FirstOrder))
}

/// `MSE(misclassification) - MSE(calibration)`; positive values favour calibration.
pub fn mse_difference(model: &ErrorModel, scenario: &Scenario) -> Result<f64> {
    let p = mse(model, scenario, EstimatorKind::Misclassification)?;
    let c = mse(model, scenario, EstimatorKind::Calibration)?;
    Ok(p.mse - c.mse)
}

/// Absolute slope of the calibration bias as a function of the drift,
/// `T / (beta (1 - beta))`.
///
/// Evaluated as `(1 - p00) p11 / beta + p00 (1 - p11) / (1 - beta)`, which is
/// the same quantity written without the cancellation at `beta` near 0 or 1.
pub fn slope_abs_bias(model: &ErrorModel, alpha: f64) -> f64 {
    slope_h(model.p00(), model.p11(), alpha)
}

fn slope_h(x: f64, y: f64, alpha: f64) -> f64 {
    let beta = (1.0 - alpha) * (1.0 - x) + alpha * y;
    ratio((1.0 - x) * y, beta) + ratio(x * (1.0 - y), 1.0 - beta)
}

/// `num / den`, taking a zero numerator to mean a vanishing term.
fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else {
        num / den
    }
}

fn slope_h_x(x: f64, y: f64, alpha: f64) -> f64 {
    let beta = (1.0 - alpha) * (1.0 - x) + alpha * y;
    let nb = 1.0 - beta;
    alpha * (((1.0 - y) * beta).powi(2) - (y * nb).powi(2)) / (beta * beta * nb * nb)
}

/// Partial derivatives of the slope with respect to `p00` and `p11`.
///
/// Swapping the classes maps `h(x, y, alpha)` to `h(y, x, 1 - alpha)`, so
/// the `p11` derivative reuses the `p00` expression with swapped arguments.
pub fn slope_partials(model: &ErrorModel, alpha: f64) -> (f64, f64) {
    let (x, y) = (model.p00(), model.p11());
    (slope_h_x(x, y, alpha), slope_h_x(y, x, 1.0 - alpha))
}

/// Lower and upper bounds on `|bias_calibration|` when both `p00` and `p11` are at most `p_cap`.
pub fn abs_bias_bounds(p_cap: f64, delta: f64) -> Result<(f64, f64)> {
    if !(0.5..=1.0).contains(&p_cap) {
        return Err(Error::PCapOutOfRange { p: p_cap });
    }
    Ok((4.0 * p_cap * (1.0 - p_cap) * delta.abs(), delta.abs()))
}
