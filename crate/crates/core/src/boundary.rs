//! Decision boundary between the two estimators and the curve data behind it.
//!
//! For a symmetric classifier (`p00 = p11 = p`) and fixed `(alpha, n)` the
//! boundary is the positive drift `delta*` at which both estimators have the
//! same first-order MSE. Below it the calibration estimator is preferred,
//! above it the misclassification estimator. Only positive drifts are
//! searched.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{ErrorModel, Scenario};
use crate::moments::{abs_bias_bounds, mse_difference, slope_abs_bias};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Number of intervals scanned for sign changes.
    pub scan_points: usize,
    /// Stop once `|D(delta)|` is at most this.
    pub value_tol: f64,
    /// Stop once the bracket is at most this wide.
    pub delta_tol: f64,
    pub max_iterations: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            scan_points: 1000,
            value_tol: 1e-12,
            delta_tol: 1e-9,
            max_iterations: 200,
        }
    }
}

/// Sign of `D` over the scanned interval when it has no root there.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalSign {
    /// Calibration preferred everywhere.
    Positive,
    /// Misclassification preferred everywhere.
    Negative,
    /// Both MSEs vanish (within tolerance) everywhere.
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaStar {
    Found(f64),
    NotFound(IntervalSign),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub p: f64,
    pub delta_star: DeltaStar,
    pub alpha: f64,
    pub n: u64,
}

impl BoundaryPoint {
    pub fn found(&self) -> Option<f64> {
        match self.delta_star {
            DeltaStar::Found(d) => Some(d),
            DeltaStar::NotFound(_) => None,
        }
    }
}

fn diff_at(model: &ErrorModel, alpha: f64, n: u64, delta: f64) -> Result<f64> {
    mse_difference(model, &Scenario::new(alpha, delta, n)?)
}

fn sign_of(value: f64, tol: f64) -> i8 {
    if value > tol {
        1
    } else if value < -tol {
        -1
    } else {
        0
    }
}

/// Scan grid over `[0, 1 - alpha)`: equally spaced, with the right end pulled
/// just inside the interval.
fn scan_grid(alpha: f64, points: usize) -> Vec<f64> {
    let width = 1.0 - alpha;
    let upper = width - width * 1e-9;
    (0..=points)
        .map(|k| (width * k as f64 / points as f64).min(upper))
        .collect()
}

/// Locates the positive drift where both first-order MSEs coincide.
pub fn find_delta_star(p: f64, alpha: f64, n: u64, opts: &RootOptions) -> Result<BoundaryPoint> {
    if !(0.5..=1.0).contains(&p) {
        return Err(Error::PCapOutOfRange { p });
    }
    let model = ErrorModel::symmetric(p)?;
    model.checked_determinant()?;
    Scenario::new(alpha, 0.0, n)?;
    let point = |delta_star| BoundaryPoint {
        p,
        delta_star,
        alpha,
        n,
    };

    let grid = scan_grid(alpha, opts.scan_points.max(2));
    let values = grid
        .iter()
        .map(|&delta| diff_at(&model, alpha, n, delta))
        .collect::<Result<Vec<_>>>()?;

    // Consecutive nonzero signs; zeros inside tolerance do not count as crossings.
    let mut brackets = Vec::new();
    let mut last: Option<(usize, i8)> = None;
    for (i, &v) in values.iter().enumerate() {
        let s = sign_of(v, opts.value_tol);
        if s == 0 {
            continue;
        }
        if let Some((j, prev)) = last {
            if prev != s {
                brackets.push((j, i));
            }
        }
        last = Some((i, s));
    }

    match brackets.len() {
        0 => {
            let sign = match last {
                None => IntervalSign::Zero,
                Some((_, s)) if s > 0 => IntervalSign::Positive,
                Some(_) => IntervalSign::Negative,
            };
            Ok(point(DeltaStar::NotFound(sign)))
        }
        1 => {
            let (i, j) = brackets[0];
            let root = bisect(
                |delta| diff_at(&model, alpha, n, delta),
                grid[i],
                grid[j],
                values[i],
                opts,
            )?;
            Ok(point(DeltaStar::Found(root)))
        }
        sign_changes => Err(Error::MultipleRoots { sign_changes }),
    }
}

fn bisect<F>(f: F, mut lo: f64, mut hi: f64, f_lo: f64, opts: &RootOptions) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let lo_positive = f_lo > 0.0;
    let mut best = (f64::INFINITY, lo);
    for _ in 0..opts.max_iterations {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid)?;
        if v.abs() < best.0 {
            best = (v.abs(), mid);
        }
        if v.abs() <= opts.value_tol && hi - lo <= opts.delta_tol {
            return Ok(mid);
        }
        if (v > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best.1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    SlopeCurve,
    MseDiffCurve,
    BoundaryCurve,
}

/// One plotted line: ordered `(x, y)` pairs plus the fixed parameters that produced them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSeries {
    pub kind: CurveKind,
    pub label: String,
    pub parameters: BTreeMap<String, f64>,
    pub points: Vec<(f64, f64)>,
}

fn check_ascending(grid: &[f64], name: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid(format!("{name} grid is empty")));
    }
    if grid
        .windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
    {
        return Err(Error::InvalidGrid(format!(
            "{name} grid must be strictly increasing"
        )));
    }
    Ok(())
}

/// `|slope|` of the calibration bias against `p` (with `p00 = p11 = p`), one
/// series per base rate, followed by the lower bound `4 p (1 - p)`.
pub fn slope_curve(alphas: &[f64], p_grid: &[f64]) -> Result<Vec<CurveSeries>> {
    check_ascending(p_grid, "p")?;
    if let Some(&p) = p_grid.iter().find(|p| !(0.5..=1.0).contains(*p)) {
        return Err(Error::PCapOutOfRange { p });
    }
    let mut out = Vec::with_capacity(alphas.len() + 1);
    for &alpha in alphas {
        Scenario::new(alpha, 0.0, 1)?;
        let points = p_grid
            .iter()
            .map(|&p| Ok((p, slope_abs_bias(&ErrorModel::symmetric(p)?, alpha))))
            .collect::<Result<Vec<_>>>()?;
        out.push(CurveSeries {
            kind: CurveKind::SlopeCurve,
            label: format!("slope_alpha_{alpha}"),
            parameters: BTreeMap::from([("alpha".to_string(), alpha)]),
            points,
        });
    }
    let points = p_grid
        .iter()
        .map(|&p| Ok((p, abs_bias_bounds(p, 1.0)?.0)))
        .collect::<Result<Vec<_>>>()?;
    out.push(CurveSeries {
        kind: CurveKind::SlopeCurve,
        label: "lower_bound".to_string(),
        parameters: BTreeMap::new(),
        points,
    });
    Ok(out)
}

/// `D(delta)` along a drift grid for one `(alpha, n, p00, p11)` combination.
pub fn mse_diff_curve(
    alpha: f64,
    n: u64,
    p00: f64,
    p11: f64,
    delta_grid: &[f64],
) -> Result<CurveSeries> {
    check_ascending(delta_grid, "delta")?;
    let model = ErrorModel::new(p00, p11)?;
    model.checked_determinant()?;
    let points = delta_grid
        .iter()
        .map(|&delta| Ok((delta, diff_at(&model, alpha, n, delta)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveSeries {
        kind: CurveKind::MseDiffCurve,
        label: "D".to_string(),
        parameters: BTreeMap::from([
            ("alpha".to_string(), alpha),
            ("n".to_string(), n as f64),
            ("p00".to_string(), p00),
            ("p11".to_string(), p11),
        ]),
        points,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryCurve {
    /// Found points only.
    pub series: CurveSeries,
    /// Every grid point, found or not.
    pub points: Vec<BoundaryPoint>,
}

impl BoundaryCurve {
    pub fn not_found(&self) -> impl Iterator<Item = &BoundaryPoint> {
        self.points.iter().filter(|p| p.found().is_none())
    }
}

pub fn boundary_curve(
    alpha: f64,
    n: u64,
    p_grid: &[f64],
    opts: &RootOptions,
) -> Result<BoundaryCurve> {
    check_ascending(p_grid, "p")?;
    let points = p_grid
        .iter()
        .map(|&p| find_delta_star(p, alpha, n, opts))
        .collect::<Result<Vec<_>>>()?;
    let series = CurveSeries {
        kind: CurveKind::BoundaryCurve,
        label: "delta_star".to_string(),
        parameters: BTreeMap::from([("alpha".to_string(), alpha), ("n".to_string(), n as f64)]),
        points: points
            .iter()
            .filter_map(|bp| bp.found().map(|d| (bp.p, d)))
            .collect(),
    };
    Ok(BoundaryCurve { series, points })
}

/// `count + 1` equally spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    (0..=count)
        .map(|k| {
            if k == count {
                hi
            } else {
                lo + (hi - lo) * k as f64 / count as f64
            }
        })
        .collect()
}
