use clap::{Args, ValueEnum};
use driftcorrect_core::simulator::{
    verify_grid, Moment, ORACLE_SE_MULTIPLIER, SECOND_ORDER_ALLOWANCE,
};
use driftcorrect_core::{
    boundary_curve, calibration_estimate, estimate_rates, linspace, misclassification_estimate,
    mse, mse_diff_curve, oracle_grid, simulate_moments, slope_curve, variance_misclassification,
    ConfusionCounts, DegeneracyPolicy, DeltaStar, ErrorModel, EstimatorKind, IntervalSign,
    RootOptions, Scenario, SimConfig, VerifyOptions,
};

use crate::output::{join, Cell, Meta, Table};

pub enum Failure {
    Validation(String),
    Io(std::io::Error),
}

impl From<driftcorrect_core::Error> for Failure {
    fn from(e: driftcorrect_core::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

pub struct Report {
    pub meta: Meta,
    pub table: Table,
    /// Set when an oracle check did not pass.
    pub checks_failed: bool,
}

impl Report {
    fn new(meta: Meta, table: Table) -> Self {
        Self {
            meta,
            table,
            checks_failed: false,
        }
    }
}

#[derive(Debug, Args)]
pub struct SlopeCurveArgs {
    /// Base rates, one series each.
    #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.1, 0.2, 0.3])]
    pub alpha: Vec<f64>,
    #[arg(long, default_value_t = 0.5)]
    pub p_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub p_max: f64,
    /// Number of intervals; the grid has steps + 1 points.
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
}

pub fn slope_curve_cmd(args: &SlopeCurveArgs) -> Result<Report, Failure> {
    if args.steps == 0 || args.p_min.partial_cmp(&args.p_max) != Some(std::cmp::Ordering::Less) {
        return Err(invalid("need --steps >= 1 and --p-min < --p-max"));
    }
    let grid = linspace(args.p_min, args.p_max, args.steps);
    let series = slope_curve(&args.alpha, &grid)?;

    let mut table =
        Table::new(std::iter::once("p".to_string()).chain(series.iter().map(|s| s.label.clone())));
    for (i, &p) in grid.iter().enumerate() {
        let mut row = vec![Cell::from(p)];
        row.extend(series.iter().map(|s| Cell::from(s.points[i].1)));
        table.push(row);
    }
    let mut meta = Meta::new("slope-curve", None);
    meta.param("alpha", join(&args.alpha))
        .param("p_min", args.p_min)
        .param("p_max", args.p_max)
        .param("steps", args.steps);
    Ok(Report::new(meta, table))
}

#[derive(Debug, Args)]
pub struct MseDiffArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.3])]
    pub alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [50, 1000])]
    pub n: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.6, 0.7])]
    pub p00: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.6, 0.7])]
    pub p11: Vec<f64>,
    /// The drift grid is -alpha + k / steps for k = 1 .. steps - 1.
    #[arg(long, default_value_t = 400)]
    pub delta_steps: usize,
}

pub fn mse_diff_cmd(args: &MseDiffArgs) -> Result<Report, Failure> {
    if args.delta_steps < 2 {
        return Err(invalid("need --delta-steps >= 2"));
    }
    let single = args.alpha.len() * args.n.len() * args.p00.len() * args.p11.len() == 1;
    let mut table = if single {
        Table::new(["delta", "D"])
    } else {
        Table::new(["alpha", "n", "p00", "p11", "delta", "D"])
    };
    for &alpha in &args.alpha {
        let grid: Vec<f64> = (1..args.delta_steps)
            .map(|k| -alpha + k as f64 / args.delta_steps as f64)
            .collect();
        for &n in &args.n {
            for &p00 in &args.p00 {
                for &p11 in &args.p11 {
                    let series = mse_diff_curve(alpha, n, p00, p11, &grid)?;
                    for (delta, d) in series.points {
                        let mut row = Vec::with_capacity(6);
                        if !single {
                            row.extend([alpha.into(), n.into(), p00.into(), p11.into()]);
                        }
                        row.extend([delta.into(), d.into()]);
                        table.push(row);
                    }
                }
            }
        }
    }
    let mut meta = Meta::new("mse-diff-curve", None);
    meta.param("alpha", join(&args.alpha))
        .param("n", join(&args.n))
        .param("p00", join(&args.p00))
        .param("p11", join(&args.p11))
        .param("delta_steps", args.delta_steps);
    Ok(Report::new(meta, table))
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [0.05, 0.1, 0.2, 0.3])]
    pub alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [50, 1000])]
    pub n: Vec<u64>,
    /// The p grid is 0.5 + 0.5 k / steps for k = 1 .. steps - 1.
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
}

pub fn boundary_cmd(args: &BoundaryArgs) -> Result<Report, Failure> {
    if args.steps < 2 {
        return Err(invalid("need --steps >= 2"));
    }
    let grid: Vec<f64> = (1..args.steps)
        .map(|k| 0.5 + 0.5 * k as f64 / args.steps as f64)
        .collect();
    let opts = RootOptions::default();
    let single = args.alpha.len() * args.n.len() == 1;
    let mut table = if single {
        Table::new(["p", "delta_star", "found_flag"])
    } else {
        Table::new(["alpha", "n", "p", "delta_star", "found_flag"])
    };
    let (mut positive, mut negative, mut zero) = (0, 0, 0);
    for &alpha in &args.alpha {
        for &n in &args.n {
            let curve = boundary_curve(alpha, n, &grid, &opts)?;
            for point in &curve.points {
                let (delta_star, found) = match point.delta_star {
                    DeltaStar::Found(d) => (d, 1u64),
                    DeltaStar::NotFound(sign) => {
                        match sign {
                            IntervalSign::Positive => positive += 1,
                            IntervalSign::Negative => negative += 1,
                            IntervalSign::Zero => zero += 1,
                        }
                        (f64::NAN, 0)
                    }
                };
                let mut row = Vec::with_capacity(5);
                if !single {
                    row.extend([alpha.into(), n.into()]);
                }
                row.extend([point.p.into(), delta_star.into(), found.into()]);
                table.push(row);
            }
        }
    }
    let mut meta = Meta::new("boundary-curve", None);
    meta.param("alpha", join(&args.alpha))
        .param("n", join(&args.n))
        .param("steps", args.steps)
        .note("scan_points", opts.scan_points)
        .note("value_tol", opts.value_tol)
        .note("delta_tol", opts.delta_tol)
        .note(
            "not_found",
            format!("D > 0 throughout: {positive}; D < 0 throughout: {negative}; D = 0 throughout: {zero}"),
        );
    Ok(Report::new(meta, table))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    Exclude,
    Abort,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub p00: f64,
    #[arg(long)]
    pub p11: f64,
    /// Size of the second-period population.
    #[arg(long, default_value_t = 1_000_000)]
    pub population: u64,
    #[arg(long, default_value_t = 200_000)]
    pub reps: u64,
    #[arg(long, env = "DRIFTCORRECT_SEED", default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Policy::Exclude)]
    pub policy: Policy,
    /// Use the finite-sample rate variances in the analytic misclassification variance.
    #[arg(long)]
    pub second_order_rates: bool,
}

pub fn simulate_cmd(args: &SimulateArgs) -> Result<Report, Failure> {
    let model = ErrorModel::new(args.p00, args.p11)?;
    let scenario = Scenario::new(args.alpha, args.delta, args.n)?;
    let policy = match args.policy {
        Policy::Exclude => DegeneracyPolicy::Exclude,
        Policy::Abort => DegeneracyPolicy::Abort,
    };
    let config =
        SimConfig::new(model, scenario, args.population, args.reps, args.seed)?.with_policy(policy);
    let sim = simulate_moments(&config)?;

    let mut table = Table::new([
        "estimator",
        "analytic_bias",
        "empirical_bias",
        "se_bias",
        "analytic_variance",
        "empirical_variance",
        "se_variance",
        "analytic_mse",
        "empirical_mse",
        "degenerate_rate",
        "effective_replications",
    ]);
    for kind in EstimatorKind::ALL {
        let mut analytic = mse(&model, &scenario, kind)?;
        if args.second_order_rates && kind == EstimatorKind::Misclassification {
            analytic.variance = variance_misclassification(&model, &scenario, true)?;
            analytic.mse = analytic.bias * analytic.bias + analytic.variance;
        }
        let s = sim.summary(kind);
        table.push(vec![
            kind.name().into(),
            analytic.bias.into(),
            s.moments.bias.into(),
            s.standard_errors.bias.into(),
            analytic.variance.into(),
            s.moments.variance.into(),
            s.standard_errors.variance.into(),
            analytic.mse.into(),
            s.moments.mse.into(),
            s.degenerate_rate().into(),
            s.effective_replications.into(),
        ]);
    }
    let mut meta = Meta::new("simulate", Some(args.seed));
    meta.param("alpha", args.alpha)
        .param("delta", args.delta)
        .param("n", args.n)
        .param("p00", args.p00)
        .param("p11", args.p11)
        .param("population", args.population)
        .param("reps", args.reps)
        .param("policy", format!("{:?}", args.policy).to_lowercase())
        .param("second_order_rates", args.second_order_rates)
        .note("target", format!("{:.16e}", sim.target))
        .note(
            "degenerate_rate_any",
            format!("{:.16e}", sim.degenerate_rate()),
        );
    Ok(Report::new(meta, table))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Grid {
    /// alpha in {0.05, 0.3}, n in {50, 1000}, p00, p11 in {0.6, 0.7}, delta in {0, 0.1}.
    Default,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Grid::Default)]
    pub grid: Grid,
    #[arg(long, default_value_t = 200_000)]
    pub reps: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub population: u64,
    #[arg(long, env = "DRIFTCORRECT_SEED", default_value_t = 42)]
    pub seed: u64,
}

pub fn verify_cmd(args: &VerifyArgs) -> Result<Report, Failure> {
    let cells = match args.grid {
        Grid::Default => oracle_grid(),
    };
    let opts = VerifyOptions {
        replications: args.reps,
        population_size: args.population,
        seed: args.seed,
        ..VerifyOptions::default()
    };
    let checks = verify_grid(&cells, &opts)?;

    let mut table = Table::new([
        "alpha",
        "n",
        "p00",
        "p11",
        "delta",
        "estimator",
        "moment",
        "analytic",
        "empirical",
        "se",
        "tolerance",
        "deviation",
        "passed",
    ]);
    for c in &checks {
        table.push(vec![
            c.cell.alpha.into(),
            c.cell.n.into(),
            c.cell.p00.into(),
            c.cell.p11.into(),
            c.cell.delta.into(),
            c.estimator.name().into(),
            match c.moment {
                Moment::Bias => "bias",
                Moment::Variance => "variance",
            }
            .into(),
            c.analytic.into(),
            c.empirical.into(),
            c.standard_error.into(),
            c.tolerance.into(),
            c.deviation().into(),
            c.passed.into(),
        ]);
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    let mut meta = Meta::new("verify", Some(args.seed));
    meta.param("grid", "default")
        .param("reps", args.reps)
        .param("population", args.population)
        .note("se_multiplier", ORACLE_SE_MULTIPLIER)
        .note("allowance_c", SECOND_ORDER_ALLOWANCE)
        .note("checks_passed", format!("{passed}/{}", checks.len()));
    Ok(Report {
        meta,
        table,
        checks_failed: passed != checks.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Misclassification,
    Calibration,
    Both,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Confusion counts n11,n10,n01,n00 (row = true class, column = predicted).
    #[arg(long, value_delimiter = ',', required = true)]
    pub counts: Vec<u64>,
    /// Fraction of predicted positives in the population.
    #[arg(long)]
    pub alpha_star: f64,
    #[arg(long, value_enum, default_value_t = Method::Both)]
    pub method: Method,
    #[arg(long, default_value_t = driftcorrect_core::DEFAULT_SINGULARITY_TOL)]
    pub singularity_tol: f64,
}

pub fn estimate_cmd(args: &EstimateArgs) -> Result<Report, Failure> {
    let [n11, n10, n01, n00] = args.counts[..] else {
        return Err(invalid(format!(
            "--counts takes exactly four values n11,n10,n01,n00, got {}",
            args.counts.len()
        )));
    };
    if !(0.0..=1.0).contains(&args.alpha_star) {
        return Err(driftcorrect_core::Error::ProbabilityOutOfRange {
            name: "alpha_star",
            value: args.alpha_star,
        }
        .into());
    }
    let rates = estimate_rates(&ConfusionCounts::new(n11, n10, n01, n00)?)?;

    let mut table = Table::new(["method", "estimate", "out_of_range"]);
    if args.method != Method::Calibration {
        let e = misclassification_estimate(args.alpha_star, &rates, args.singularity_tol)?;
        table.push(vec![
            "misclassification".into(),
            e.value.into(),
            e.out_of_range.into(),
        ]);
    }
    if args.method != Method::Misclassification {
        let v = calibration_estimate(args.alpha_star, &rates);
        table.push(vec![
            "calibration".into(),
            v.into(),
            (!(0.0..=1.0).contains(&v)).into(),
        ]);
    }
    let mut meta = Meta::new("estimate", None);
    meta.param("counts", join(&args.counts))
        .param("alpha_star", args.alpha_star)
        .param("method", format!("{:?}", args.method).to_lowercase())
        .param("singularity_tol", args.singularity_tol);
    Ok(Report::new(meta, table))
}
