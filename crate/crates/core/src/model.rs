//! Classification error model and the drift scenario.
//!
//! The error model holds the correct-classification probabilities `p00` and
//! `p11`; the off-diagonal probabilities are `p01 = 1 - p00` and
//! `p10 = 1 - p11`. A [`Scenario`] fixes the base rate `alpha` of the period
//! in which the test set was drawn, the drift `delta = alpha' - alpha` to the
//! production period, and the test-set size `n`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Default threshold below which `|p00 + p11 - 1|` is treated as zero.
pub const DEFAULT_SINGULARITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorModel {
    p00: f64,
    p11: f64,
    singularity_tol: f64,
}

impl ErrorModel {
    pub fn new(p00: f64, p11: f64) -> Result<Self> {
        check_probability("p00", p00)?;
        check_probability("p11", p11)?;
        Ok(Self {
            p00,
            p11,
            singularity_tol: DEFAULT_SINGULARITY_TOL,
        })
    }

    /// Both classes classified correctly with probability `p`.
    pub fn symmetric(p: f64) -> Result<Self> {
        Self::new(p, p)
    }

    pub fn with_singularity_tol(mut self, tol: f64) -> Self {
        self.singularity_tol = tol.abs();
        self
    }

    pub fn p00(&self) -> f64 {
        self.p00
    }

    pub fn p11(&self) -> f64 {
        self.p11
    }

    pub fn singularity_tol(&self) -> f64 {
        self.singularity_tol
    }

    /// Determinant of the confusion matrix, `p00 + p11 - 1`.
    pub fn determinant(&self) -> f64 {
        self.p00 + self.p11 - 1.0
    }

    pub fn is_invertible(&self) -> bool {
        self.determinant().abs() > self.singularity_tol
    }

    /// Returns the determinant, or `SingularModel` when it is within tolerance of zero.
    pub fn checked_determinant(&self) -> Result<f64> {
        let d = self.determinant();
        if d.abs() <= self.singularity_tol {
            Err(Error::SingularModel {
                det_abs: d.abs(),
                tolerance: self.singularity_tol,
            })
        } else {
            Ok(d)
        }
    }

    /// Probability that an object with base rate `alpha` is predicted positive.
    pub fn predicted_positive_rate(&self, alpha: f64) -> f64 {
        (1.0 - alpha) * (1.0 - self.p00) + alpha * self.p11
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Scenario {
    alpha: f64,
    delta: f64,
    n: u64,
}

impl Scenario {
    pub fn new(alpha: f64, delta: f64, n: u64) -> Result<Self> {
        validate_scenario(alpha, delta, n)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Base rate in the production period.
    pub fn alpha_prime(&self) -> f64 {
        self.alpha + self.delta
    }

    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        validate_scenario(self.alpha, delta, self.n)
    }

    pub fn with_n(&self, n: u64) -> Result<Self> {
        validate_scenario(self.alpha, self.delta, n)
    }
}

/// Checks the raw inputs and builds a [`Scenario`].
///
/// `alpha` must lie in the open unit interval, as must `alpha + delta`.
pub fn validate_scenario(alpha: f64, delta: f64, n: u64) -> Result<Scenario> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange { alpha });
    }
    let alpha_prime = alpha + delta;
    if !(alpha_prime > 0.0 && alpha_prime < 1.0) {
        return Err(Error::DeltaOutOfRange {
            alpha,
            delta,
            alpha_prime,
        });
    }
    if n == 0 {
        return Err(Error::NonPositiveN);
    }
    Ok(Scenario { alpha, delta, n })
}

/// Quantities shared by the moment expressions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedScalars {
    /// Expected fraction of predicted positives at base rate `alpha`.
    pub beta: f64,
    /// Expected fraction of predicted positives at base rate `alpha'`.
    pub beta_prime: f64,
    /// `(1 - alpha) p00 (1 - p00) + alpha p11 (1 - p11)`.
    pub t_term: f64,
    /// `p00 + p11 - 1`.
    pub d: f64,
}

pub fn derive_scalars(model: &ErrorModel, scenario: &Scenario) -> DerivedScalars {
    let (p00, p11) = (model.p00, model.p11);
    let alpha = scenario.alpha;
    DerivedScalars {
        beta: model.predicted_positive_rate(alpha),
        beta_prime: model.predicted_positive_rate(scenario.alpha_prime()),
        t_term: t_term(p00, p11, alpha),
        d: model.determinant(),
    }
}

pub(crate) fn t_term(p00: f64, p11: f64, alpha: f64) -> f64 {
    (1.0 - alpha) * p00 * (1.0 - p00) + alpha * p11 * (1.0 - p11)
}

fn check_probability(name: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::ProbabilityOutOfRange { name, value })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    #[test]
    fn derived_scalars_at_reference_point() {
        let m = ErrorModel::symmetric(0.7).unwrap();
        let s = Scenario::new(0.3, 0.1, 1000).unwrap();
        let ds = derive_scalars(&m, &s);
        assert!(close(ds.beta, 0.42));
        assert!(close(ds.beta_prime, 0.46));
        assert!(close(ds.t_term, 0.21));
        assert!(close(ds.d, 0.4));
    }

    #[test]
    fn perfect_and_coin_flip_classifiers() {
        let s = Scenario::new(0.5, 0.0, 10).unwrap();
        let ds = derive_scalars(&ErrorModel::symmetric(1.0).unwrap(), &s);
        assert_eq!((ds.beta, ds.t_term, ds.d), (0.5, 0.0, 1.0));

        for alpha in [0.05, 0.3, 0.77] {
            let s = Scenario::new(alpha, 0.0, 10).unwrap();
            let m = ErrorModel::symmetric(0.5).unwrap();
            let ds = derive_scalars(&m, &s);
            assert_eq!((ds.beta, ds.t_term, ds.d), (0.5, 0.25, 0.0));
            assert!(!m.is_invertible());
            assert!(matches!(
                m.checked_determinant(),
                Err(Error::SingularModel { .. })
            ));
        }
    }

    #[test]
    fn scenario_validation() {
        assert!(matches!(
            validate_scenario(0.3, 0.8, 100),
            Err(Error::DeltaOutOfRange { .. })
        ));
        assert!(matches!(
            validate_scenario(0.05, -0.05, 50),
            Err(Error::DeltaOutOfRange { .. })
        ));
        assert!(matches!(
            validate_scenario(0.0, 0.1, 50),
            Err(Error::AlphaOutOfRange { .. })
        ));
        assert!(matches!(
            validate_scenario(f64::NAN, 0.1, 50),
            Err(Error::AlphaOutOfRange { .. })
        ));
        assert_eq!(validate_scenario(0.3, 0.1, 0), Err(Error::NonPositiveN));
        let s = validate_scenario(0.3, 0.1, 1000).unwrap();
        assert_eq!((s.alpha(), s.delta(), s.n()), (0.3, 0.1, 1000));
    }

    #[test]
    fn probabilities_are_checked() {
        assert!(ErrorModel::new(1.1, 0.5).is_err());
        assert!(ErrorModel::new(0.5, -0.1).is_err());
        assert!(ErrorModel::new(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn singularity_tolerance_is_configurable() {
        let m = ErrorModel::new(0.5, 0.5 + 1e-6).unwrap();
        assert!(m.is_invertible());
        assert!(!m.with_singularity_tol(1e-5).is_invertible());
    }

    proptest! {
        #[test]
        fn beta_and_t_stay_in_range(
            p00 in 0.0..=1.0f64,
            p11 in 0.0..=1.0f64,
            alpha in 1e-6..(1.0 - 1e-6),
        ) {
            let m = ErrorModel::new(p00, p11).unwrap();
            let s = Scenario::new(alpha, 0.0, 1).unwrap();
            let ds = derive_scalars(&m, &s);
            prop_assert!((0.0..=1.0).contains(&ds.beta));
            prop_assert!(ds.t_term >= 0.0 && ds.t_term <= 0.25);
            let lhs = ds.beta * (1.0 - ds.beta) - alpha * (1.0 - alpha) * ds.d * ds.d;
            prop_assert!((lhs - ds.t_term).abs() <= 1e-12);
        }

        #[test]
        fn beta_between_complement_and_p_on_diagonal(
            p in 0.5f64..=1.0,
            alpha in 1e-6..(1.0 - 1e-6),
        ) {
            prop_assume!(p > 0.5);
            let beta = ErrorModel::symmetric(p).unwrap().predicted_positive_rate(alpha);
            prop_assert!(1.0 - p < beta && beta < p);
        }
    }
}
