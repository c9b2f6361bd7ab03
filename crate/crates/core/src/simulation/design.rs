use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, Matrix};

/// A Gaussian linear-model design with AR(1) predictor correlation
/// `ρ^|i−j|`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimDesign {
    pub n: usize,
    pub p: usize,
    pub beta_true: Vec<f64>,
    pub ar1_rho: f64,
    pub noise_sd: f64,
    pub seed: u64,
}

impl SimDesign {
    /// `n` rows, `p` predictors, five unit coefficients followed by zeros.
    pub fn standard(n: usize, p: usize) -> Self {
        let beta_true = (0..p).map(|j| if j < 5 { 1.0 } else { 0.0 }).collect();
        Self {
            n,
            p,
            beta_true,
            ar1_rho: 0.5,
            noise_sd: 1.0,
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn active_set(&self) -> Vec<usize> {
        self.beta_true
            .iter()
            .enumerate()
            .filter(|(_, b)| **b != 0.0)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.p == 0 {
            return Err(Error::Simulation("design needs n >= 1 and p >= 1".into()));
        }
        if self.beta_true.len() != self.p {
            return Err(Error::Simulation(format!(
                "beta_true has length {} for p = {}",
                self.beta_true.len(),
                self.p
            )));
        }
        if !(self.noise_sd >= 0.0) {
            return Err(Error::Simulation("noise_sd must be nonnegative".into()));
        }
        if !(self.ar1_rho.abs() < 1.0) {
            return Err(Error::Simulation(format!(
                "AR(1) rho must lie in (-1, 1), got {}",
                self.ar1_rho
            )));
        }
        Ok(())
    }
}

/// `Σ_ij = ρ^|i−j|`.
pub fn ar1_covariance(p: usize, rho: f64) -> Matrix {
    Matrix::from_fn(p, p, |i, j| rho.powi((i as i32 - j as i32).abs()))
}

/// Column-major `n × p` matrix of i.i.d. rows from `N(0, Σ)`.
pub fn gaussian_columns(n: usize, cov: &Matrix, seed: u64) -> Result<Vec<Vec<f64>>> {
    let l = cholesky(cov).map_err(|_| Error::Simulation("covariance is not positive definite".into()))?;
    let p = cov.rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols = vec![Vec::with_capacity(n); p];
    let mut z = vec![0.0; p];
    for _ in 0..n {
        for v in z.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        for (j, col) in cols.iter_mut().enumerate() {
            let row = l.row(j);
            col.push(row[..=j].iter().zip(&z).map(|(a, b)| a * b).sum());
        }
    }
    Ok(cols)
}

/// Predictors for the design, drawn with its own seed.
pub fn gen_design(d: &SimDesign) -> Result<Vec<Vec<f64>>> {
    d.validate()?;
    gaussian_columns(d.n, &ar1_covariance(d.p, d.ar1_rho), d.seed)
}

/// `y = X β + ε` with `ε ~ N(0, noise_sd²)`.
pub fn gen_response(x: &[Vec<f64>], beta: &[f64], noise_sd: f64, seed: u64) -> Result<Vec<f64>> {
    if x.len() != beta.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} predictor columns for {} coefficients",
            x.len(),
            beta.len()
        )));
    }
    let n = x.first().map_or(0, Vec::len);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|i| {
            let signal: f64 = x.iter().zip(beta).map(|(c, b)| c[i] * b).sum();
            let eps: f64 = StandardNormal.sample(&mut rng);
            signal + noise_sd * eps
        })
        .collect())
}
