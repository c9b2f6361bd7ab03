//! Weighted Lasso in covariance form, solved by cyclic coordinate descent:
//!
//! ```text
//! minimise  n bᵀ G b − 2n bᵀ c + λ Σ ω_j |b_j|
//! ```
//!
//! with `G = Σ_xx` and `c = Σ_xy`. Up to the constant `n Σ_yy` this is
//! `n ‖v − W b‖² + λ Σ ω_j |b_j|` for the square-root factors `(v, W)`.

use crate::error::{Error, Result};
use crate::linalg::Matrix;

use super::weights::AdaptiveWeights;

/// Solver tolerances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Stop when the largest coordinate change in a sweep is below this.
    pub tol: f64,
    /// Maximum number of full sweeps.
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_iter: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CdSolution {
    pub beta: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

fn check_dims(gram: &Matrix, c: &[f64], w: &AdaptiveWeights) -> Result<()> {
    let p = c.len();
    if gram.rows() != p || gram.cols() != p || w.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "gram {}x{}, c of length {p}, {} weights",
            gram.rows(),
            gram.cols(),
            w.len()
        )));
    }
    Ok(())
}

/// The objective value. Excluded predictors must be zero and contribute
/// nothing to the penalty.
pub fn objective(gram: &Matrix, c: &[f64], w: &AdaptiveWeights, lambda: f64, n: usize, b: &[f64]) -> f64 {
    let n = n as f64;
    let gb = gram.matvec(b).expect("dimensions checked by caller");
    let quad: f64 = b.iter().zip(&gb).map(|(x, y)| x * y).sum();
    let lin: f64 = b.iter().zip(c).map(|(x, y)| x * y).sum();
    let pen: f64 = b
        .iter()
        .zip(&w.weights)
        .filter(|(bj, _)| **bj != 0.0)
        .map(|(bj, wj)| wj * bj.abs())
        .sum();
    n * quad - 2.0 * n * lin + lambda * pen
}

/// Largest violation of the optimality conditions, in objective units:
/// `|2n(Gb − c)_j + λω_j sign(b_j)|` on the support and
/// `max(0, |2n(Gb − c)_j| − λω_j)` off it. Excluded predictors are skipped.
pub fn kkt_violation(gram: &Matrix, c: &[f64], w: &AdaptiveWeights, lambda: f64, n: usize, b: &[f64]) -> f64 {
    let n = n as f64;
    let gb = gram.matvec(b).expect("dimensions checked by caller");
    let mut worst = 0.0_f64;
    for j in 0..c.len() {
        if !w.is_admissible(j) {
            continue;
        }
        let grad = 2.0 * n * (gb[j] - c[j]);
        let pen = lambda * w.weights[j];
        let v = if b[j] != 0.0 {
            (grad + pen * b[j].signum()).abs()
        } else {
            (grad.abs() - pen).max(0.0)
        };
        worst = worst.max(v);
    }
    worst
}

/// Cyclic coordinate descent from a warm start.
///
/// Each update is `b_j ← S(c_j − Σ_{k≠j} G_jk b_k, λω_j / 2n) / G_jj`. The
/// loop ends once a full sweep moves no coordinate by more than `tol` and the
/// KKT violation is within `10 · tol · n`; hitting `max_iter` returns the
/// last iterate with `converged = false`.
pub fn weighted_lasso_cd(
    gram: &Matrix,
    c: &[f64],
    w: &AdaptiveWeights,
    lambda: f64,
    n: usize,
    warm: &[f64],
    opts: SolverOptions,
) -> Result<CdSolution> {
    check_dims(gram, c, w)?;
    if warm.len() != c.len() {
        return Err(Error::DimensionMismatch("warm start length".into()));
    }
    let p = c.len();
    for j in 0..p {
        if w.is_admissible(j) && !(gram[(j, j)] > 0.0) {
            return Err(Error::DegeneratePredictor(j));
        }
    }
    let two_n = 2.0 * n as f64;
    let mut b: Vec<f64> = warm
        .iter()
        .enumerate()
        .map(|(j, &v)| if w.is_admissible(j) { v } else { 0.0 })
        .collect();
    // r = c − G b
    let gb = gram.matvec(&b)?;
    let mut r: Vec<f64> = c.iter().zip(&gb).map(|(ci, gi)| ci - gi).collect();
    let thresholds: Vec<f64> = w.weights.iter().map(|wj| lambda * wj / two_n).collect();
    let kkt_tol = 10.0 * opts.tol * n as f64;

    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut max_change = 0.0_f64;
        for j in 0..p {
            if !w.is_admissible(j) {
                continue;
            }
            let gjj = gram[(j, j)];
            let old = b[j];
            let z = r[j] + gjj * old;
            let new = soft_threshold(z, thresholds[j]) / gjj;
            let delta = new - old;
            if delta != 0.0 {
                b[j] = new;
                let row = gram.row(j);
                for (rk, gk) in r.iter_mut().zip(row) {
                    *rk -= gk * delta;
                }
                max_change = max_change.max(delta.abs());
            }
        }
        if max_change < opts.tol && kkt_violation(gram, c, w, lambda, n, &b) <= kkt_tol {
            return Ok(CdSolution {
                beta: b,
                iterations,
                converged: true,
            });
        }
    }
    Ok(CdSolution {
        beta: b,
        iterations,
        converged: false,
    })
}

/// A descending grid of penalty values.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaGrid {
    pub lambdas: Vec<f64>,
    /// `λ_max = 0`: every coefficient is zero for all λ.
    pub degenerate: bool,
}

/// Smallest λ with an all-zero solution: `max_j 2n |c_j| / ω_j` over the
/// admissible predictors.
pub fn lambda_max(c: &[f64], w: &AdaptiveWeights, n: usize) -> Result<f64> {
    if w.admissible_count() == 0 {
        return Err(Error::NoAdmissiblePredictors);
    }
    Ok(c.iter()
        .zip(&w.weights)
        .filter(|(_, wj)| wj.is_finite())
        .map(|(cj, wj)| 2.0 * n as f64 * cj.abs() / wj)
        .fold(0.0, f64::max))
}

/// `n_lambda` log-spaced values from `λ_max` down to `λ_max · ratio`.
pub fn lambda_grid(c: &[f64], w: &AdaptiveWeights, n: usize, n_lambda: usize, ratio: f64) -> Result<LambdaGrid> {
    if n_lambda < 2 {
        return Err(Error::InvalidOption("lambda grid needs at least 2 points".into()));
    }
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::InvalidOption(format!(
            "lambda ratio must be in (0, 1), got {ratio}"
        )));
    }
    let max = lambda_max(c, w, n)?;
    if max == 0.0 {
        return Ok(LambdaGrid {
            lambdas: vec![0.0; n_lambda],
            degenerate: true,
        });
    }
    let step = ratio.ln() / (n_lambda - 1) as f64;
    let lambdas = (0..n_lambda)
        .map(|k| if k == 0 { max } else { max * (step * k as f64).exp() })
        .collect();
    Ok(LambdaGrid {
        lambdas,
        degenerate: false,
    })
}

/// Solutions along a grid, on the scale of the problem that was solved.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoPath {
    pub lambdas: Vec<f64>,
    pub coefficients: Vec<Vec<f64>>,
    pub supports: Vec<Vec<usize>>,
    pub iterations: Vec<usize>,
    pub converged: Vec<bool>,
}

impl LassoPath {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }
}

pub fn support_of(b: &[f64]) -> Vec<usize> {
    b.iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(j, _)| j)
        .collect()
}

/// Sweeps the grid from the largest λ down, warm-starting each solve from
/// the previous solution.
pub fn fit_path(
    gram: &Matrix,
    c: &[f64],
    w: &AdaptiveWeights,
    lambdas: &[f64],
    n: usize,
    opts: SolverOptions,
) -> Result<LassoPath> {
    if lambdas.windows(2).any(|p| p[1] > p[0]) {
        return Err(Error::InvalidOption("lambda grid must be descending".into()));
    }
    let mut warm = vec![0.0; c.len()];
    let mut path = LassoPath {
        lambdas: lambdas.to_vec(),
        coefficients: Vec::with_capacity(lambdas.len()),
        supports: Vec::with_capacity(lambdas.len()),
        iterations: Vec::with_capacity(lambdas.len()),
        converged: Vec::with_capacity(lambdas.len()),
    };
    for &lambda in lambdas {
        let sol = weighted_lasso_cd(gram, c, w, lambda, n, &warm, opts)?;
        path.supports.push(support_of(&sol.beta));
        path.iterations.push(sol.iterations);
        path.converged.push(sol.converged);
        warm.clone_from(&sol.beta);
        path.coefficients.push(sol.beta);
    }
    Ok(path)
}
