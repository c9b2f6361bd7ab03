//! K-fold cross-validation on a working dataset (the normal-scores pseudo
//! dataset for rank estimators, the raw data for Pearson).
//!
//! Each fold re-estimates the correlation matrix from its training rows and
//! scores held-out rows on the standardized scale, so the error never sees
//! the rows it is evaluated on.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::covariance::{pearson_of_columns, Partitions};
use crate::data::DataMatrix;
use crate::error::{Error, Result};

use super::lasso::{fit_path, SolverOptions};
use super::weights::AdaptiveWeights;

/// How λ is picked from the CV curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionRule {
    /// Smallest mean CV error.
    Min,
    /// Largest λ whose mean error is within one standard error of the minimum.
    #[default]
    OneStandardError,
}

impl SelectionRule {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Min => "min",
            Self::OneStandardError => "1se",
        }
    }
}

impl std::str::FromStr for SelectionRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(Self::Min),
            "1se" => Ok(Self::OneStandardError),
            other => Err(Error::InvalidOption(format!("unknown rule '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvCurve {
    pub lambdas: Vec<f64>,
    pub mean_error: Vec<f64>,
    pub std_error: Vec<f64>,
    /// Held-out error of each fold at each λ, `fold_errors[fold][k]`.
    pub fold_errors: Vec<Vec<f64>>,
    pub chosen_min: usize,
    pub chosen_1se: usize,
    pub warnings: Vec<String>,
}

impl CvCurve {
    pub fn chosen(&self, rule: SelectionRule) -> usize {
        match rule {
            SelectionRule::Min => self.chosen_min,
            SelectionRule::OneStandardError => self.chosen_1se,
        }
    }
}

/// Seeded shuffle of `0..n` cut into `folds` contiguous blocks whose sizes
/// differ by at most one.
pub fn fold_assignment(n: usize, folds: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let base = n / folds;
    let extra = n % folds;
    let mut out = Vec::with_capacity(folds);
    let mut start = 0;
    for f in 0..folds {
        let len = base + usize::from(f < extra);
        out.push(idx[start..start + len].to_vec());
        start += len;
    }
    out
}

/// Picks the two rule indices from a mean/SE curve over a descending grid.
pub fn select_indices(mean: &[f64], se: &[f64]) -> (usize, usize) {
    let mut chosen_min = 0;
    for (k, &m) in mean.iter().enumerate() {
        if m < mean[chosen_min] {
            chosen_min = k;
        }
    }
    let bound = mean[chosen_min] + se[chosen_min];
    // grid is descending, so the first qualifying index is the largest λ
    let chosen_1se = mean.iter().position(|&m| m <= bound).unwrap_or(chosen_min);
    (chosen_min, chosen_1se)
}

/// `n_scale` is the row count whose penalty scale the grid was built for;
/// each fold solves with that same `n` so `λ / n` is shared across folds.
pub fn cross_validate(
    working: &DataMatrix,
    weights: &AdaptiveWeights,
    lambdas: &[f64],
    n_scale: usize,
    folds: usize,
    seed: u64,
    solver: SolverOptions,
) -> Result<CvCurve> {
    let n = working.n();
    let p = working.p();
    if folds < 2 {
        return Err(Error::InvalidOption("cross-validation needs at least 2 folds".into()));
    }
    if n < folds {
        return Err(Error::InvalidOption(format!(
            "{n} rows cannot be split into {folds} folds"
        )));
    }
    let assignment = fold_assignment(n, folds, seed);
    let mut warnings = Vec::new();
    if p < n {
        for (f, held) in assignment.iter().enumerate() {
            let train = n - held.len();
            if train < p + 2 {
                warnings.push(format!("fold {f}: {train} training rows for {p} predictors"));
            }
        }
    }

    let fold_errors: Vec<Vec<f64>> = assignment
        .par_iter()
        .map(|held| fold_error(working, held, weights, lambdas, n_scale, solver))
        .collect::<Result<_>>()?;

    let k = folds as f64;
    let mean_error: Vec<f64> = (0..lambdas.len())
        .map(|l| fold_errors.iter().map(|e| e[l]).sum::<f64>() / k)
        .collect();
    let std_error: Vec<f64> = (0..lambdas.len())
        .map(|l| {
            let m = mean_error[l];
            let var = fold_errors.iter().map(|e| (e[l] - m).powi(2)).sum::<f64>() / (k - 1.0);
            (var / k).sqrt()
        })
        .collect();
    let (chosen_min, chosen_1se) = select_indices(&mean_error, &std_error);
    Ok(CvCurve {
        lambdas: lambdas.to_vec(),
        mean_error,
        std_error,
        fold_errors,
        chosen_min,
        chosen_1se,
        warnings,
    })
}

fn fold_error(
    working: &DataMatrix,
    held: &[usize],
    weights: &AdaptiveWeights,
    lambdas: &[f64],
    n_scale: usize,
    solver: SolverOptions,
) -> Result<Vec<f64>> {
    let n = working.n();
    let mut is_held = vec![false; n];
    for &i in held {
        is_held[i] = true;
    }
    let train_rows: Vec<usize> = (0..n).filter(|&i| !is_held[i]).collect();
    let train = working.select_rows(&train_rows);
    let corr = pearson_of_columns(train.names(), train.columns())?;
    let parts = Partitions::of(&corr);
    let path = fit_path(&parts.xx, &parts.xy, weights, lambdas, n_scale, solver)?;

    // held-out rows standardized with the training moments
    let moments: Vec<(f64, f64)> = train
        .columns()
        .iter()
        .map(|c| {
            let m = c.len() as f64;
            let mean = c.iter().sum::<f64>() / m;
            let sd = (c.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / m).sqrt();
            (mean, sd)
        })
        .collect();
    let std_rows: Vec<Vec<f64>> = held
        .iter()
        .map(|&i| {
            working
                .columns()
                .iter()
                .zip(&moments)
                .map(|(c, (mean, sd))| (c[i] - mean) / sd)
                .collect()
        })
        .collect();
    Ok(path
        .coefficients
        .iter()
        .map(|b| {
            std_rows
                .iter()
                .map(|row| {
                    let fitted: f64 = b.iter().zip(&row[1..]).map(|(bj, xj)| bj * xj).sum();
                    (row[0] - fitted).powi(2)
                })
                .sum::<f64>()
                / held.len() as f64
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_partition_rows() {
        let f = fold_assignment(23, 5, 1);
        let sizes: Vec<usize> = f.iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![5, 5, 5, 4, 4]);
        let mut all: Vec<usize> = f.concat();
        all.sort_unstable();
        assert_eq!(all, (0..23).collect::<Vec<_>>());
        assert_eq!(f, fold_assignment(23, 5, 1));
        assert_ne!(f, fold_assignment(23, 5, 2));
    }

    #[test]
    fn one_se_picks_largest_qualifying_lambda() {
        let mean = [5.0, 3.0, 2.2, 2.0, 2.1];
        let se = [0.1, 0.1, 0.1, 0.3, 0.1];
        assert_eq!(select_indices(&mean, &se), (3, 2));
        // ties at the minimum resolve to the larger λ
        assert_eq!(select_indices(&[1.0, 1.0], &[0.0, 0.0]), (0, 0));
    }
}
