//! Monte Carlo double-sampling oracle.
//!
//! Each replication draws a labelled test set of size `n` from the first
//! period (base rate `alpha`), classifies a second-period population of size
//! `N'` whose true-positive count is fixed at `round(alpha' N')`, and applies
//! both estimators. Replication `i` draws from the ChaCha8 stream `i` keyed by
//! the configured seed, so results do not depend on how replications are
//! scheduled across threads.

mod enumerate;
mod verify;

pub use enumerate::{enumerate_small_exact, ExactEstimator, ExactMoments, ENUMERATION_LIMIT};
pub use verify::{
    oracle_grid, verify_grid, verify_scenario, CheckOutcome, Moment, OracleCell, VerifyOptions,
    ORACLE_SE_MULTIPLIER, SECOND_ORDER_ALLOWANCE,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Degeneracy, Error, Result};
use crate::estimators::{column_rates, invert_rates, row_rates, weigh_columns, ConfusionCounts};
use crate::model::{ErrorModel, Scenario};
use crate::moments::{EstimatorKind, MomentSet, MomentSource};

pub const DEFAULT_POPULATION: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DegeneracyPolicy {
    /// Drop degenerate replications and report how many there were.
    Exclude,
    /// Fail on the first degenerate replication (in replication order).
    Abort,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimConfig {
    pub model: ErrorModel,
    pub scenario: Scenario,
    pub population_size: u64,
    pub replications: u64,
    pub seed: u64,
    pub degeneracy_policy: DegeneracyPolicy,
}

impl SimConfig {
    pub fn new(
        model: ErrorModel,
        scenario: Scenario,
        population_size: u64,
        replications: u64,
        seed: u64,
    ) -> Result<Self> {
        let config = Self {
            model,
            scenario,
            population_size,
            replications,
            seed,
            degeneracy_policy: DegeneracyPolicy::Exclude,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn with_policy(mut self, policy: DegeneracyPolicy) -> Self {
        self.degeneracy_policy = policy;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let required = self.scenario.n().saturating_mul(10);
        if self.population_size < required {
            return Err(Error::PopulationTooSmall {
                population: self.population_size,
                required,
            });
        }
        if self.replications == 0 {
            return Err(Error::ZeroReplications);
        }
        Ok(())
    }

    /// Number of true positives in the second-period population.
    pub fn population_positives(&self) -> u64 {
        (self.scenario.alpha_prime() * self.population_size as f64).round() as u64
    }

    /// The base rate actually realised in the second-period population,
    /// `round(alpha' N') / N'`. Equal to `alpha'` whenever `alpha' N'` is an integer.
    pub fn target_rate(&self) -> f64 {
        self.population_positives() as f64 / self.population_size as f64
    }
}

/// The random stream used by replication `index`.
pub fn replication_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReplicationDraw {
    pub counts: ConfusionCounts,
    pub alpha_star: f64,
}

/// Outcome of one replication. Each estimator is excluded only when its own
/// inputs are undefined: the misclassification estimator needs both row
/// margins and a non-singular rate matrix, the calibration estimator needs
/// both column margins.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Replication {
    pub misclassification: std::result::Result<f64, Degeneracy>,
    pub calibration: std::result::Result<f64, Degeneracy>,
}

impl Replication {
    pub fn estimate(&self, kind: EstimatorKind) -> std::result::Result<f64, Degeneracy> {
        match kind {
            EstimatorKind::Misclassification => self.misclassification,
            EstimatorKind::Calibration => self.calibration,
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.misclassification.is_err() || self.calibration.is_err()
    }
}

fn binomial<R: rand::Rng>(trials: u64, p: f64, rng: &mut R) -> u64 {
    Binomial::new(trials, p)
        .expect("probabilities are validated by ErrorModel and Scenario")
        .sample(rng)
}

/// Draws one test set and the second-period naive aggregate.
pub fn draw_replication<R: rand::Rng>(config: &SimConfig, rng: &mut R) -> ReplicationDraw {
    let (p00, p11) = (config.model.p00(), config.model.p11());
    let n = config.scenario.n();

    let row1 = binomial(n, config.scenario.alpha(), rng);
    let row0 = n - row1;
    let n11 = binomial(row1, p11, rng);
    let n00 = binomial(row0, p00, rng);

    let pos = config.population_positives();
    let neg = config.population_size - pos;
    let predicted = binomial(pos, p11, rng) + binomial(neg, 1.0 - p00, rng);

    ReplicationDraw {
        counts: ConfusionCounts {
            n11,
            n10: row1 - n11,
            n01: row0 - n00,
            n00,
        },
        alpha_star: predicted as f64 / config.population_size as f64,
    }
}

/// Applies both estimators to sampled counts.
pub fn evaluate_draw(draw: &ReplicationDraw, singularity_tol: f64) -> Replication {
    let misclassification = match row_rates(&draw.counts) {
        Ok((p11_hat, p00_hat)) => invert_rates(draw.alpha_star, p00_hat, p11_hat, singularity_tol)
            .map(|e| e.value)
            .map_err(|_| Degeneracy::SingularRates),
        Err(e) => Err(margin_of(e)),
    };
    let calibration = match column_rates(&draw.counts) {
        Ok((c11, c10)) => Ok(weigh_columns(draw.alpha_star, c11, c10)),
        Err(e) => Err(margin_of(e)),
    };
    Replication {
        misclassification,
        calibration,
    }
}

fn margin_of(err: Error) -> Degeneracy {
    match err {
        Error::DegenerateMargin(m) => Degeneracy::Margin(m),
        other => unreachable!("rate extraction only fails on margins: {other}"),
    }
}

pub fn simulate_once<R: rand::Rng>(config: &SimConfig, rng: &mut R) -> Replication {
    let draw = draw_replication(config, rng);
    evaluate_draw(&draw, config.model.singularity_tol())
}

/// Monte Carlo standard errors of the empirical bias and variance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StandardErrors {
    pub bias: f64,
    pub variance: f64,
}

/// Empirical summary of one estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimatorSummary {
    pub moments: MomentSet,
    pub standard_errors: StandardErrors,
    pub degenerate_count: u64,
    pub effective_replications: u64,
}

impl EstimatorSummary {
    pub fn degenerate_rate(&self) -> f64 {
        self.degenerate_count as f64 / (self.degenerate_count + self.effective_replications) as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimResult {
    pub misclassification: EstimatorSummary,
    pub calibration: EstimatorSummary,
    /// Replications in which at least one estimator was undefined.
    pub degenerate_count: u64,
    pub replications: u64,
    /// The population base rate the biases are measured against.
    pub target: f64,
}

impl SimResult {
    pub fn summary(&self, kind: EstimatorKind) -> &EstimatorSummary {
        match kind {
            EstimatorKind::Misclassification => &self.misclassification,
            EstimatorKind::Calibration => &self.calibration,
        }
    }

    pub fn degenerate_rate(&self) -> f64 {
        self.degenerate_count as f64 / self.replications as f64
    }
}

/// Runs all replications and summarises them.
///
/// The empirical variance is the unbiased sample variance (divisor `R - 1`),
/// and `mse` is reported as `bias^2 + variance`, which exceeds the plain mean
/// squared deviation by `variance / R`.
pub fn simulate_moments(config: &SimConfig) -> Result<SimResult> {
    config.validate()?;
    let outcomes: Vec<Replication> = (0..config.replications)
        .into_par_iter()
        .map(|i| simulate_once(config, &mut replication_rng(config.seed, i)))
        .collect();

    if config.degeneracy_policy == DegeneracyPolicy::Abort {
        if let Some((index, rep)) = outcomes.iter().enumerate().find(|(_, r)| r.is_degenerate()) {
            let reason = rep
                .misclassification
                .err()
                .or(rep.calibration.err())
                .expect("replication is degenerate");
            return Err(Error::DegenerateReplication {
                index: index as u64,
                reason,
            });
        }
    }

    let target = config.target_rate();
    let summarise_kind = |kind: EstimatorKind| -> Result<EstimatorSummary> {
        let values: Vec<f64> = outcomes
            .iter()
            .filter_map(|r| r.estimate(kind).ok())
            .collect();
        if values.is_empty() {
            return Err(Error::AllDegenerate {
                replications: config.replications,
            });
        }
        let (moments, standard_errors) = summarise(&values, target);
        Ok(EstimatorSummary {
            moments,
            standard_errors,
            degenerate_count: config.replications - values.len() as u64,
            effective_replications: values.len() as u64,
        })
    };
    let misclassification = summarise_kind(EstimatorKind::Misclassification)?;
    let calibration = summarise_kind(EstimatorKind::Calibration)?;
    Ok(SimResult {
        misclassification,
        calibration,
        degenerate_count: outcomes.iter().filter(|r| r.is_degenerate()).count() as u64,
        replications: config.replications,
        target,
    })
}

/// Sample moments of `values` about `target`, with standard errors.
pub(crate) fn summarise(values: &[f64], target: f64) -> (MomentSet, StandardErrors) {
    let r = values.len() as f64;
    // Shifting by the first value keeps constant samples exact.
    let shift = values[0];
    let mean_dev = values.iter().map(|v| v - shift).sum::<f64>() / r;
    let (mut m2, mut m4) = (0.0, 0.0);
    for &v in values {
        let dev2 = (v - shift - mean_dev) * (v - shift - mean_dev);
        m2 += dev2;
        m4 += dev2 * dev2;
    }
    let (m2, m4) = (m2 / r, m4 / r);
    let variance = if values.len() > 1 {
        m2 * r / (r - 1.0)
    } else {
        0.0
    };
    // Large-sample standard error of the sample variance: sqrt((mu4 - sigma^4) / R).
    let se_variance = ((m4 - m2 * m2).max(0.0) / r).sqrt();
    (
        MomentSet::new(
            shift - target + mean_dev,
            variance,
            MomentSource::MonteCarlo,
        ),
        StandardErrors {
            bias: (variance / r).sqrt(),
            variance: se_variance,
        },
    )
}
