//! Cross-check of the analytic moments against the Monte Carlo oracle.
//!
//! A check passes when `|analytic - empirical| <= k * SE + C / n^2`.

use serde::Serialize;

use crate::error::Result;
use crate::model::{ErrorModel, Scenario};
use crate::moments::{mse, EstimatorKind};

use super::{simulate_moments, SimConfig, DEFAULT_POPULATION};

/// Number of Monte Carlo standard errors allowed.
pub const ORACLE_SE_MULTIPLIER: f64 = 4.0;

/// Coefficient `C` of the `C / n^2` allowance.
///
/// Fit once with the exact enumeration oracle at `alpha = 0.3`,
/// `p00 = p11 = 0.7`, `delta in {0, 0.1}`, `n = 1000`: the largest
/// `n^2 |analytic - exact|` over both estimators and both moments is 37.9
/// (misclassification variance at `delta = 0.1`), rounded up.
pub const SECOND_ORDER_ALLOWANCE: f64 = 38.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleCell {
    pub alpha: f64,
    pub n: u64,
    pub p00: f64,
    pub p11: f64,
    pub delta: f64,
}

impl OracleCell {
    pub fn model(&self) -> Result<ErrorModel> {
        ErrorModel::new(self.p00, self.p11)
    }

    pub fn scenario(&self) -> Result<Scenario> {
        Scenario::new(self.alpha, self.delta, self.n)
    }
}

/// The acceptance grid: `alpha in {0.05, 0.3}`, `n in {50, 1000}`,
/// `p00, p11 in {0.6, 0.7}`, `delta in {0, 0.1}`.
pub fn oracle_grid() -> Vec<OracleCell> {
    let mut cells = Vec::with_capacity(32);
    for alpha in [0.05, 0.3] {
        for n in [50, 1000] {
            for p00 in [0.6, 0.7] {
                for p11 in [0.6, 0.7] {
                    for delta in [0.0, 0.1] {
                        cells.push(OracleCell {
                            alpha,
                            n,
                            p00,
                            p11,
                            delta,
                        });
                    }
                }
            }
        }
    }
    cells
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    pub replications: u64,
    pub population_size: u64,
    pub seed: u64,
    pub se_multiplier: f64,
    pub allowance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            replications: 200_000,
            population_size: DEFAULT_POPULATION,
            seed: 42,
            se_multiplier: ORACLE_SE_MULTIPLIER,
            allowance: SECOND_ORDER_ALLOWANCE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Moment {
    Bias,
    Variance,
}

impl Moment {
    pub fn name(self) -> &'static str {
        match self {
            Moment::Bias => "bias",
            Moment::Variance => "variance",
        }
    }
}

/// One analytic-versus-empirical comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub cell: OracleCell,
    pub estimator: EstimatorKind,
    pub moment: Moment,
    pub analytic: f64,
    pub empirical: f64,
    pub standard_error: f64,
    pub tolerance: f64,
    pub degenerate_rate: f64,
    pub passed: bool,
}

impl CheckOutcome {
    pub fn deviation(&self) -> f64 {
        (self.analytic - self.empirical).abs()
    }
}

/// Simulates one cell and compares bias and variance of both estimators.
pub fn verify_scenario(cell: &OracleCell, opts: &VerifyOptions) -> Result<Vec<CheckOutcome>> {
    let model = cell.model()?;
    let scenario = cell.scenario()?;
    let config = SimConfig::new(
        model,
        scenario,
        opts.population_size,
        opts.replications,
        opts.seed,
    )?;
    let sim = simulate_moments(&config)?;
    let slack = opts.allowance / (cell.n as f64 * cell.n as f64);

    let mut out = Vec::with_capacity(4);
    for kind in EstimatorKind::ALL {
        let analytic = mse(&model, &scenario, kind)?;
        let summary = sim.summary(kind);
        for (moment, a, e, se) in [
            (
                Moment::Bias,
                analytic.bias,
                summary.moments.bias,
                summary.standard_errors.bias,
            ),
            (
                Moment::Variance,
                analytic.variance,
                summary.moments.variance,
                summary.standard_errors.variance,
            ),
        ] {
            let tolerance = opts.se_multiplier * se + slack;
            out.push(CheckOutcome {
                cell: *cell,
                estimator: kind,
                moment,
                analytic: a,
                empirical: e,
                standard_error: se,
                tolerance,
                degenerate_rate: summary.degenerate_rate(),
                passed: (a - e).abs() <= tolerance,
            });
        }
    }
    Ok(out)
}

pub fn verify_grid(cells: &[OracleCell], opts: &VerifyOptions) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::with_capacity(cells.len() * 4);
    for cell in cells {
        out.extend(verify_scenario(cell, opts)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        let g = oracle_grid();
        assert_eq!(g.len(), 32);
        assert!(g.iter().all(|c| c.model().is_ok() && c.scenario().is_ok()));
        assert_eq!(g.iter().filter(|c| c.n == 50).count(), 16);
    }

    #[test]
    fn perfect_classifier_passes_with_zero_tolerance() {
        let cell = OracleCell {
            alpha: 0.3,
            n: 200,
            p00: 1.0,
            p11: 1.0,
            delta: 0.1,
        };
        let opts = VerifyOptions {
            replications: 50,
            allowance: 0.0,
            ..VerifyOptions::default()
        };
        let checks = verify_scenario(&cell, &opts).unwrap();
        assert_eq!(checks.len(), 4);
        assert!(checks.iter().all(|c| c.passed && c.tolerance == 0.0));
    }

    #[test]
    fn calibration_agrees_at_reference_design() {
        let cell = OracleCell {
            alpha: 0.3,
            n: 1000,
            p00: 0.7,
            p11: 0.7,
            delta: 0.1,
        };
        let opts = VerifyOptions {
            replications: 20_000,
            ..VerifyOptions::default()
        };
        let checks = verify_scenario(&cell, &opts).unwrap();
        for c in checks
            .iter()
            .filter(|c| c.estimator == EstimatorKind::Calibration)
        {
            assert!(c.passed, "{c:?}");
        }
    }
}
