use crate::covariance::Partitions;
use crate::error::{Error, Result};
use crate::linalg::{solve_spd, symmetric_eigen, Matrix};

/// Condition number above which the unpenalised initial estimate is refused.
pub const MAX_CONDITION: f64 = 1e12;

/// Where the adaptive weights came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightSource {
    /// All weights one: the plain Lasso.
    Unit,
    /// `ω = 1 / |Σ_xx⁻¹ Σ_xy|`.
    Direct,
    /// `ω = 1 / |(Σ_xx + κI)⁻¹ Σ_xy|`.
    Ridge { kappa: f64 },
}

/// Per-predictor penalty weights. `f64::INFINITY` marks a predictor that is
/// excluded from every model.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveWeights {
    pub weights: Vec<f64>,
    pub source: WeightSource,
}

impl AdaptiveWeights {
    pub fn unit(p: usize) -> Self {
        Self {
            weights: vec![1.0; p],
            source: WeightSource::Unit,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_admissible(&self, j: usize) -> bool {
        self.weights[j].is_finite()
    }

    pub fn admissible_count(&self) -> usize {
        self.weights.iter().filter(|w| w.is_finite()).count()
    }
}

/// `Σ_xx⁻¹ Σ_xy` by a Cholesky solve, refusing singular or badly
/// conditioned systems.
pub fn initial_estimate_direct(parts: &Partitions) -> Result<Vec<f64>> {
    let eig = symmetric_eigen(&parts.xx)?;
    let max = eig.eigenvalues.first().copied().unwrap_or(0.0);
    let min = eig.min_eigenvalue();
    let cond = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(cond <= MAX_CONDITION) {
        return Err(Error::IllConditioned(cond));
    }
    solve_spd(&parts.xx, &parts.xy).map_err(|_| Error::IllConditioned(cond))
}

/// `(Σ_xx + κI)⁻¹ Σ_xy`.
pub fn initial_estimate_ridge(parts: &Partitions, kappa: f64) -> Result<Vec<f64>> {
    if !(kappa > 0.0) {
        return Err(Error::InvalidOption(format!(
            "ridge kappa must be positive, got {kappa}"
        )));
    }
    let p = parts.p();
    let shifted = Matrix::from_fn(p, p, |i, j| parts.xx[(i, j)] + if i == j { kappa } else { 0.0 });
    solve_spd(&shifted, &parts.xy)
}

/// `ω_j = 1 / |β̃_j|`, or infinity when `|β̃_j| <= exclusion_eps`.
pub fn adaptive_weights(beta_init: &[f64], exclusion_eps: f64, source: WeightSource) -> AdaptiveWeights {
    let weights = beta_init
        .iter()
        .map(|b| {
            if b.abs() > exclusion_eps {
                1.0 / b.abs()
            } else {
                f64::INFINITY
            }
        })
        .collect();
    AdaptiveWeights { weights, source }
}
