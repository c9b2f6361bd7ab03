use crate::covariance::{CorrelationEstimator, CorrelationMatrix, Partitions};
use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::robust_stats::RobustSummary;

use super::cv::{cross_validate, CvCurve, SelectionRule};
use super::lasso::{fit_path, lambda_grid, support_of, weighted_lasso_cd, LassoPath, SolverOptions};
use super::weights::{
    adaptive_weights, initial_estimate_direct, initial_estimate_ridge, AdaptiveWeights, WeightSource,
};

/// How the initial estimate behind the adaptive weights is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightMode {
    /// Direct solve when `p < n / 2`, ridge otherwise (and as a fallback when
    /// the direct system is ill-conditioned).
    #[default]
    Auto,
    Direct,
    Ridge,
    /// No adaptive weighting: the plain Lasso.
    Unit,
}

impl std::str::FromStr for WeightMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Self::Auto),
            "direct" => Ok(Self::Direct),
            "ridge" => Ok(Self::Ridge),
            "unit" => Ok(Self::Unit),
            other => Err(Error::InvalidOption(format!("unknown weight mode '{other}'"))),
        }
    }
}

/// Ridge values tried when `select_kappa` is on.
pub const KAPPA_GRID: [f64; 5] = [1e-3, 1e-2, 1e-1, 1.0, 10.0];

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub estimator: CorrelationEstimator,
    pub weights: WeightMode,
    /// Ridge shift on the correlation scale.
    pub kappa: f64,
    /// Choose `kappa` from [`KAPPA_GRID`] by the same cross-validation.
    pub select_kappa: bool,
    pub exclusion_eps: f64,
    pub n_lambda: usize,
    /// Defaults to `1e-3` when `p < n` and `1e-2` otherwise.
    pub lambda_ratio: Option<f64>,
    pub folds: usize,
    pub seed: u64,
    pub rule: SelectionRule,
    /// Fit at this λ instead of cross-validating. Fixed-λ solves use a
    /// tolerance of at most `1e-10`.
    pub lambda: Option<f64>,
    pub solver: SolverOptions,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            estimator: CorrelationEstimator::GaussianRank,
            weights: WeightMode::Auto,
            kappa: 0.1,
            select_kappa: false,
            exclusion_eps: 1e-10,
            n_lambda: 100,
            lambda_ratio: None,
            folds: 5,
            seed: 0,
            rule: SelectionRule::OneStandardError,
            lambda: None,
            solver: SolverOptions::default(),
        }
    }
}

/// A fitted model. Coefficients are in the units of the input data.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionFit {
    pub names: Vec<String>,
    pub beta: Vec<f64>,
    pub intercept: f64,
    /// Zero-based predictor indices with nonzero coefficients.
    pub support: Vec<usize>,
    pub lambda: f64,
    pub lambda_index: Option<usize>,
    pub rule: SelectionRule,
    /// Coefficients on the correlation (standardized) scale.
    pub beta_standardized: Vec<f64>,
    pub initial_estimate: Vec<f64>,
    pub weights: AdaptiveWeights,
    pub correlation: CorrelationMatrix,
    pub path: LassoPath,
    pub cv: Option<CvCurve>,
    pub summaries: Vec<RobustSummary>,
    pub converged: bool,
}

impl SelectionFit {
    pub fn predictor_names(&self) -> &[String] {
        &self.names[1..]
    }

    pub fn selected_names(&self) -> Vec<&str> {
        self.support.iter().map(|&j| self.names[j + 1].as_str()).collect()
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        self.intercept + self.beta.iter().zip(x).map(|(b, v)| b * v).sum::<f64>()
    }
}

/// Maps correlation-scale coefficients back to data units:
/// `β_j = β̌_j σ_y / σ_xj` and `β_0 = μ_y − Σ μ_xj β_j`.
pub fn destandardize(beta_std: &[f64], summaries: &[RobustSummary]) -> Result<(Vec<f64>, f64)> {
    if summaries.len() != beta_std.len() + 1 {
        return Err(Error::DimensionMismatch(format!(
            "{} coefficients with {} column summaries",
            beta_std.len(),
            summaries.len()
        )));
    }
    let y = summaries[0];
    let mut beta = Vec::with_capacity(beta_std.len());
    for (j, (b, s)) in beta_std.iter().zip(&summaries[1..]).enumerate() {
        if !(s.scale > 0.0) {
            return Err(Error::NonPositiveScale(format!("predictor {j}")));
        }
        beta.push(b * y.scale / s.scale);
    }
    let intercept = y.location
        - summaries[1..]
            .iter()
            .zip(&beta)
            .map(|(s, b)| s.location * b)
            .sum::<f64>();
    Ok((beta, intercept))
}

struct Weighting {
    initial: Vec<f64>,
    weights: AdaptiveWeights,
}

fn weighting(parts: &Partitions, mode: WeightMode, kappa: f64, eps: f64, n: usize) -> Result<Weighting> {
    let p = parts.p();
    let ridge = |kappa| -> Result<Weighting> {
        let initial = initial_estimate_ridge(parts, kappa)?;
        let weights = adaptive_weights(&initial, eps, WeightSource::Ridge { kappa });
        Ok(Weighting { initial, weights })
    };
    let direct = || -> Result<Weighting> {
        let initial = initial_estimate_direct(parts)?;
        let weights = adaptive_weights(&initial, eps, WeightSource::Direct);
        Ok(Weighting { initial, weights })
    };
    match mode {
        WeightMode::Unit => Ok(Weighting {
            initial: vec![1.0; p],
            weights: AdaptiveWeights::unit(p),
        }),
        WeightMode::Direct => direct(),
        WeightMode::Ridge => ridge(kappa),
        WeightMode::Auto => {
            if 2 * p < n {
                match direct() {
                    Err(Error::IllConditioned(_)) => ridge(kappa),
                    other => other,
                }
            } else {
                ridge(kappa)
            }
        }
    }
}

/// Full selection pipeline: column summaries, correlation of the working
/// (pseudo) dataset, adaptive weights, λ grid, cross-validated choice of λ
/// and back-transformation to data units.
pub fn fit_gr_alasso(z: &DataMatrix, opts: &FitOptions) -> Result<SelectionFit> {
    let n = z.n();
    let p = z.p();
    if n < 10 {
        return Err(Error::InvalidOption(format!("need at least 10 rows, got {n}")));
    }
    if p == 0 {
        return Err(Error::NoAdmissiblePredictors);
    }
    let summaries = opts.estimator.summaries(z)?;
    let working = opts.estimator.transform(z)?;
    let correlation = CorrelationMatrix {
        names: z.names().to_vec(),
        matrix: crate::covariance::pearson_of_columns(working.names(), working.columns())?,
        estimator: opts.estimator,
    };
    let parts = correlation.partitions();
    let ratio = opts.lambda_ratio.unwrap_or(if p < n { 1e-3 } else { 1e-2 });

    let uses_kappa =
        matches!(opts.weights, WeightMode::Ridge) || (matches!(opts.weights, WeightMode::Auto) && 2 * p >= n);
    let kappa = if opts.select_kappa && uses_kappa && opts.lambda.is_none() {
        select_kappa(&working, &parts, opts, ratio)?
    } else {
        opts.kappa
    };

    let Weighting { initial, weights } = weighting(&parts, opts.weights, kappa, opts.exclusion_eps, n)?;
    let grid = lambda_grid(&parts.xy, &weights, n, opts.n_lambda, ratio)?;
    let path = fit_path(&parts.xx, &parts.xy, &weights, &grid.lambdas, n, opts.solver)?;

    let (beta_std, lambda, lambda_index, cv, converged) = match opts.lambda {
        Some(lambda) => {
            if !(lambda >= 0.0) {
                return Err(Error::InvalidOption(format!(
                    "lambda must be nonnegative, got {lambda}"
                )));
            }
            let solver = SolverOptions {
                tol: opts.solver.tol.min(1e-10),
                max_iter: opts.solver.max_iter.max(100_000),
            };
            let start = vec![0.0; p];
            let sol = weighted_lasso_cd(&parts.xx, &parts.xy, &weights, lambda, n, &start, solver)?;
            (sol.beta, lambda, None, None, sol.converged)
        }
        None => {
            let cv = cross_validate(&working, &weights, &grid.lambdas, n, opts.folds, opts.seed, opts.solver)?;
            let k = cv.chosen(opts.rule);
            (
                path.coefficients[k].clone(),
                grid.lambdas[k],
                Some(k),
                Some(cv),
                path.converged[k],
            )
        }
    };
    let (beta, intercept) = destandardize(&beta_std, &summaries)?;
    Ok(SelectionFit {
        names: z.names().to_vec(),
        support: support_of(&beta_std),
        beta,
        intercept,
        lambda,
        lambda_index,
        rule: opts.rule,
        beta_standardized: beta_std,
        initial_estimate: initial,
        weights,
        correlation,
        path,
        cv,
        summaries,
        converged,
    })
}

fn select_kappa(working: &DataMatrix, parts: &Partitions, opts: &FitOptions, ratio: f64) -> Result<f64> {
    let n = working.n();
    let mut best = (f64::INFINITY, opts.kappa);
    for &kappa in &KAPPA_GRID {
        let w = weighting(parts, WeightMode::Ridge, kappa, opts.exclusion_eps, n)?;
        let grid = lambda_grid(&parts.xy, &w.weights, n, opts.n_lambda, ratio)?;
        let cv = cross_validate(
            working,
            &w.weights,
            &grid.lambdas,
            n,
            opts.folds,
            opts.seed,
            opts.solver,
        )?;
        let err = cv.mean_error[cv.chosen_min];
        if err < best.0 {
            best = (err, kappa);
        }
    }
    Ok(best.1)
}
