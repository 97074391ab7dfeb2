use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ErrorModel, Scenario};
use crate::moments::{EstimatorKind, MomentSet, MomentSource};

use super::{evaluate_draw, ReplicationDraw};
use crate::estimators::ConfusionCounts;

/// Largest test-set size accepted by [`enumerate_small_exact`]. The cost grows as `n^3 / 6`.
pub const ENUMERATION_LIMIT: u64 = 1000;

/// Exact moments of one estimator, conditional on the test set leaving it defined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactEstimator {
    pub moments: MomentSet,
    /// Probability that the estimator is undefined (excluded from the moments).
    pub degenerate_probability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactMoments {
    pub misclassification: ExactEstimator,
    pub calibration: ExactEstimator,
    /// Probability that at least one estimator is undefined.
    pub degenerate_probability: f64,
}

impl ExactMoments {
    pub fn estimator(&self, kind: EstimatorKind) -> &ExactEstimator {
        match kind {
            EstimatorKind::Misclassification => &self.misclassification,
            EstimatorKind::Calibration => &self.calibration,
        }
    }
}

#[derive(Default)]
struct Accumulator {
    kept: f64,
    sum: f64,
    sq: f64,
}

impl Accumulator {
    fn add(&mut self, w: f64, value: Option<f64>) {
        if let Some(e) = value {
            self.kept += w;
            self.sum += w * e;
            self.sq += w * e * e;
        }
    }

    fn finish(&self) -> Result<ExactEstimator> {
        if self.kept == 0.0 {
            return Err(Error::AllDegenerate { replications: 0 });
        }
        let bias = self.sum / self.kept;
        let variance = (self.sq / self.kept - bias * bias).max(0.0);
        Ok(ExactEstimator {
            moments: MomentSet::new(bias, variance, MomentSource::ExactEnumeration),
            degenerate_probability: (1.0 - self.kept).max(0.0),
        })
    }
}

/// Enumerates every test-set outcome `(n1+, n11, n00)` with its exact probability.
///
/// The naive aggregate is fixed at its expectation `beta'`, i.e. the
/// production population is treated as infinite. Biases are measured
/// against `alpha'`.
pub fn enumerate_small_exact(
    model: &ErrorModel,
    scenario: &Scenario,
    max_n: u64,
) -> Result<ExactMoments> {
    let n = scenario.n();
    let limit = max_n.min(ENUMERATION_LIMIT);
    if n > limit {
        return Err(Error::NTooLarge { n, max_n: limit });
    }
    let (p00, p11) = (model.p00(), model.p11());
    let alpha_star = model.predicted_positive_rate(scenario.alpha_prime());
    let target = scenario.alpha_prime();
    let tol = model.singularity_tol();

    let rows = binomial_pmf(n, scenario.alpha());
    let (mut acc_p, mut acc_c) = (Accumulator::default(), Accumulator::default());
    let mut both = 0.0;
    for (row1, &w_row) in rows.iter().enumerate() {
        if w_row == 0.0 {
            continue;
        }
        let row1 = row1 as u64;
        let row0 = n - row1;
        let hits1 = binomial_pmf(row1, p11);
        let hits0 = binomial_pmf(row0, p00);
        for (n11, &w11) in hits1.iter().enumerate() {
            if w11 == 0.0 {
                continue;
            }
            for (n00, &w00) in hits0.iter().enumerate() {
                let w = w_row * w11 * w00;
                if w == 0.0 {
                    continue;
                }
                let draw = ReplicationDraw {
                    counts: ConfusionCounts {
                        n11: n11 as u64,
                        n10: row1 - n11 as u64,
                        n01: row0 - n00 as u64,
                        n00: n00 as u64,
                    },
                    alpha_star,
                };
                let rep = evaluate_draw(&draw, tol);
                acc_p.add(w, rep.misclassification.ok().map(|v| v - target));
                acc_c.add(w, rep.calibration.ok().map(|v| v - target));
                if !rep.is_degenerate() {
                    both += w;
                }
            }
        }
    }
    Ok(ExactMoments {
        misclassification: acc_p.finish()?,
        calibration: acc_c.finish()?,
        degenerate_probability: (1.0 - both).max(0.0),
    })
}

/// Probability mass function of Binomial(`trials`, `p`) at `0..=trials`.
pub(crate) fn binomial_pmf(trials: u64, p: f64) -> Vec<f64> {
    let len = trials as usize + 1;
    let mut pmf = vec![0.0; len];
    if p <= 0.0 {
        pmf[0] = 1.0;
        return pmf;
    }
    if p >= 1.0 {
        pmf[len - 1] = 1.0;
        return pmf;
    }
    let (ln_p, ln_q) = (p.ln(), (1.0 - p).ln());
    let mut ln_choose = 0.0;
    for (k, mass) in pmf.iter_mut().enumerate() {
        let k = k as u64;
        if k > 0 {
            ln_choose += ((trials - k + 1) as f64).ln() - (k as f64).ln();
        }
        *mass = (ln_choose + k as f64 * ln_p + (trials - k) as f64 * ln_q).exp();
    }
    pmf
}
