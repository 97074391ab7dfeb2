//! Point estimators of the base rate computed from a labelled test set and the
//! fraction of predicted positives in the production population.
//!
//! Margins follow the usual row/column convention: `n1+ = n11 + n10` and
//! `n+1 = n11 + n01`, where `n_ab` counts test objects with true class `a`
//! that were predicted as `b`.

use serde::Serialize;

use crate::error::{Error, Margin, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ConfusionCounts {
    pub n11: u64,
    pub n10: u64,
    pub n01: u64,
    pub n00: u64,
}

impl ConfusionCounts {
    pub fn new(n11: u64, n10: u64, n01: u64, n00: u64) -> Result<Self> {
        let counts = Self { n11, n10, n01, n00 };
        if counts.total() == 0 {
            return Err(Error::EmptyCounts);
        }
        Ok(counts)
    }

    pub fn total(&self) -> u64 {
        self.n11 + self.n10 + self.n01 + self.n00
    }

    pub fn margin(&self, margin: Margin) -> u64 {
        match margin {
            Margin::Row1 => self.n11 + self.n10,
            Margin::Row0 => self.n01 + self.n00,
            Margin::Col1 => self.n11 + self.n01,
            Margin::Col0 => self.n10 + self.n00,
        }
    }

    /// First zero margin in the order `n1+, n0+, n+1, n+0`.
    pub fn zero_margin(&self) -> Option<Margin> {
        [Margin::Row1, Margin::Row0, Margin::Col1, Margin::Col0]
            .into_iter()
            .find(|&m| self.margin(m) == 0)
    }
}

/// Row- and column-normalised rates estimated from a test set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimatedRates {
    pub p11_hat: f64,
    pub p00_hat: f64,
    pub c11_hat: f64,
    pub c10_hat: f64,
}

impl EstimatedRates {
    pub fn determinant(&self) -> f64 {
        self.p00_hat + self.p11_hat - 1.0
    }
}

/// Fraction of predicted positives in a population, uncorrected.
pub fn naive_estimate(predicted_positive_count: u64, population_size: u64) -> Result<f64> {
    if population_size == 0 {
        return Err(Error::NonPositiveN);
    }
    if predicted_positive_count > population_size {
        return Err(Error::CountExceedsPopulation {
            count: predicted_positive_count,
            population: population_size,
        });
    }
    Ok(predicted_positive_count as f64 / population_size as f64)
}

pub fn estimate_rates(counts: &ConfusionCounts) -> Result<EstimatedRates> {
    if let Some(m) = counts.zero_margin() {
        return Err(Error::DegenerateMargin(m));
    }
    let (p11_hat, p00_hat) = row_rates(counts)?;
    let (c11_hat, c10_hat) = column_rates(counts)?;
    Ok(EstimatedRates {
        p11_hat,
        p00_hat,
        c11_hat,
        c10_hat,
    })
}

/// `(p11_hat, p00_hat)`; needs only the row margins.
pub fn row_rates(counts: &ConfusionCounts) -> Result<(f64, f64)> {
    Ok((
        ratio(counts.n11, counts, Margin::Row1)?,
        ratio(counts.n00, counts, Margin::Row0)?,
    ))
}

/// `(c11_hat, c10_hat)`; needs only the column margins.
pub fn column_rates(counts: &ConfusionCounts) -> Result<(f64, f64)> {
    Ok((
        ratio(counts.n11, counts, Margin::Col1)?,
        ratio(counts.n10, counts, Margin::Col0)?,
    ))
}

fn ratio(num: u64, counts: &ConfusionCounts, margin: Margin) -> Result<f64> {
    match counts.margin(margin) {
        0 => Err(Error::DegenerateMargin(margin)),
        den => Ok(num as f64 / den as f64),
    }
}

/// A misclassification-corrected estimate. The value is not clipped to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrectedEstimate {
    pub value: f64,
    pub out_of_range: bool,
}

/// Inverts the estimated confusion matrix and applies it to `(alpha_star, 1 - alpha_star)`.
pub fn misclassification_estimate(
    alpha_star: f64,
    rates: &EstimatedRates,
    tolerance: f64,
) -> Result<CorrectedEstimate> {
    invert_rates(alpha_star, rates.p00_hat, rates.p11_hat, tolerance)
}

pub(crate) fn invert_rates(
    alpha_star: f64,
    p00_hat: f64,
    p11_hat: f64,
    tolerance: f64,
) -> Result<CorrectedEstimate> {
    let d = p00_hat + p11_hat - 1.0;
    if d.abs() <= tolerance {
        return Err(Error::SingularMatrix {
            det_abs: d.abs(),
            tolerance,
        });
    }
    let value = (alpha_star - (1.0 - p00_hat)) / d;
    Ok(CorrectedEstimate {
        value,
        out_of_range: !(0.0..=1.0).contains(&value),
    })
}

/// Weights the column-normalised rates by the fraction of predicted positives.
pub fn calibration_estimate(alpha_star: f64, rates: &EstimatedRates) -> f64 {
    weigh_columns(alpha_star, rates.c11_hat, rates.c10_hat)
}

pub(crate) fn weigh_columns(alpha_star: f64, c11_hat: f64, c10_hat: f64) -> f64 {
    alpha_star * c11_hat + (1.0 - alpha_star) * c10_hat
}
