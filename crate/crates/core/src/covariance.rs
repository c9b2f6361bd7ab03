//! Robust correlation and covariance matrices of the joint `(y, x)` table and
//! the square-root factors that turn the covariance-form loss into a least
//! squares problem.
//!
//! Everything here treats column 0 as the response.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, Matrix};
use crate::robust_stats::{normal_scores, ranks, RobustSummary, TiePolicy};

pub use crate::linalg::SymmetricEigen;

/// Which correlation estimator produced a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorrelationEstimator {
    /// Pearson correlation of the normal scores `Φ⁻¹(rank / (n + 1))`.
    #[default]
    GaussianRank,
    /// Pearson correlation of the ranks.
    Spearman,
    /// Product-moment correlation of the raw values.
    Pearson,
}

impl CorrelationEstimator {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::GaussianRank => "gr",
            Self::Spearman => "spearman",
            Self::Pearson => "pearson",
        }
    }

    /// Whether location/scale should be the robust pair (median, Qn) or the
    /// classical pair (mean, standard deviation).
    pub fn is_robust(self) -> bool {
        !matches!(self, Self::Pearson)
    }

    /// The per-column transform whose Pearson correlation defines the
    /// estimator; also the pseudo-dataset used for cross-validation.
    pub fn transform(self, z: &DataMatrix) -> Result<DataMatrix> {
        match self {
            Self::Pearson => Ok(z.clone()),
            Self::GaussianRank => {
                check_not_constant(z)?;
                let cols = z
                    .columns()
                    .iter()
                    .map(|c| normal_scores(c))
                    .collect::<Result<Vec<_>>>()?;
                z.with_columns(cols)
            }
            Self::Spearman => {
                check_not_constant(z)?;
                let cols = z
                    .columns()
                    .iter()
                    .map(|c| ranks(c, TiePolicy::MidRank))
                    .collect::<Result<Vec<_>>>()?;
                z.with_columns(cols)
            }
        }
    }

    /// Location/scale summaries matching the estimator.
    pub fn summaries(self, z: &DataMatrix) -> Result<Vec<RobustSummary>> {
        z.columns()
            .iter()
            .map(|c| {
                if self.is_robust() {
                    RobustSummary::robust(c)
                } else {
                    RobustSummary::classical(c)
                }
            })
            .collect()
    }
}

impl fmt::Display for CorrelationEstimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CorrelationEstimator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gr" | "gaussian-rank" => Ok(Self::GaussianRank),
            "spearman" => Ok(Self::Spearman),
            "pearson" => Ok(Self::Pearson),
            other => Err(Error::InvalidOption(format!("unknown estimator '{other}'"))),
        }
    }
}

fn check_not_constant(z: &DataMatrix) -> Result<()> {
    if z.n() < 3 {
        return Err(Error::Data(format!(
            "rank correlations need at least 3 rows, got {}",
            z.n()
        )));
    }
    for (name, col) in z.names().iter().zip(z.columns()) {
        if col.iter().all(|&v| v == col[0]) {
            return Err(Error::DegenerateColumn(name.clone()));
        }
    }
    Ok(())
}

/// A symmetric correlation matrix with unit diagonal, labelled by column.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    pub names: Vec<String>,
    pub matrix: Matrix,
    pub estimator: CorrelationEstimator,
}

impl CorrelationMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    pub fn partitions(&self) -> Partitions {
        Partitions::of(&self.matrix)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_labelled_matrix(w, &self.names, &self.matrix)
    }
}

/// Column-wise centred, unit-norm copies of the inputs. A column with zero
/// spread is reported by name.
fn unit_columns(names: &[String], columns: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    columns
        .iter()
        .zip(names)
        .map(|(c, name)| {
            let n = c.len() as f64;
            let mean = c.iter().sum::<f64>() / n;
            let centred: Vec<f64> = c.iter().map(|v| v - mean).collect();
            let norm = centred.iter().map(|v| v * v).sum::<f64>().sqrt();
            if !(norm > 0.0) || norm <= 1e-14 * c.iter().fold(0.0_f64, |m, v| m.max(v.abs())) {
                return Err(Error::ZeroVariance(name.clone()));
            }
            Ok(centred.into_iter().map(|v| v / norm).collect())
        })
        .collect()
}

/// Pearson correlation matrix of arbitrary labelled columns. Each entry is a
/// single fixed-order dot product, so the result does not depend on how rows
/// of the matrix are distributed across threads.
pub fn pearson_of_columns(names: &[String], columns: &[Vec<f64>]) -> Result<Matrix> {
    if columns.first().map_or(0, Vec::len) < 2 {
        return Err(Error::TooFewObservations);
    }
    let units = unit_columns(names, columns)?;
    let d = units.len();
    let rows: Vec<Vec<f64>> = (0..d)
        .into_par_iter()
        .map(|i| {
            (0..d)
                .map(|j| {
                    if i == j {
                        1.0
                    } else {
                        let (a, b) = if i < j { (i, j) } else { (j, i) };
                        crate::linalg::dot(&units[a], &units[b]).clamp(-1.0, 1.0)
                    }
                })
                .collect()
        })
        .collect();
    Matrix::from_rows(&rows)
}

pub fn pearson_corr_matrix(z: &DataMatrix) -> Result<CorrelationMatrix> {
    Ok(CorrelationMatrix {
        names: z.names().to_vec(),
        matrix: pearson_of_columns(z.names(), z.columns())?,
        estimator: CorrelationEstimator::Pearson,
    })
}

pub fn gaussian_rank_corr_matrix(z: &DataMatrix) -> Result<CorrelationMatrix> {
    correlation_matrix(z, CorrelationEstimator::GaussianRank)
}

pub fn spearman_corr_matrix(z: &DataMatrix) -> Result<CorrelationMatrix> {
    correlation_matrix(z, CorrelationEstimator::Spearman)
}

pub fn correlation_matrix(z: &DataMatrix, estimator: CorrelationEstimator) -> Result<CorrelationMatrix> {
    let t = estimator.transform(z)?;
    Ok(CorrelationMatrix {
        names: z.names().to_vec(),
        matrix: pearson_of_columns(t.names(), t.columns())?,
        estimator,
    })
}

/// The blocks of a joint matrix with the response at index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Partitions {
    pub yy: f64,
    pub xy: Vec<f64>,
    pub xx: Matrix,
}

impl Partitions {
    pub fn of(joint: &Matrix) -> Self {
        let d = joint.rows();
        let rest: Vec<usize> = (1..d).collect();
        Self {
            yy: joint[(0, 0)],
            xy: rest.iter().map(|&j| joint[(j, 0)]).collect(),
            xx: joint.submatrix(&rest, &rest),
        }
    }

    pub fn p(&self) -> usize {
        self.xy.len()
    }

    /// Restriction to a subset of predictors.
    pub fn select(&self, predictors: &[usize]) -> Self {
        Self {
            yy: self.yy,
            xy: predictors.iter().map(|&j| self.xy[j]).collect(),
            xx: self.xx.submatrix(predictors, predictors),
        }
    }
}

/// `Σ̂ = Ŝ R̂ Ŝ`, its blocks and square-root factors.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceModel {
    pub names: Vec<String>,
    pub sigma: Matrix,
    pub scales: Vec<f64>,
    pub partitions: Partitions,
    /// First column of the symmetric square root of `Σ̂`.
    pub sqrt_v: Vec<f64>,
    /// Remaining columns of the symmetric square root.
    pub sqrt_w: Matrix,
}

impl CovarianceModel {
    /// `n ‖v − W b‖²`, the least-squares form of the covariance loss.
    pub fn sqrt_loss(&self, b: &[f64], n: usize) -> Result<f64> {
        let wb = self.sqrt_w.matvec(b)?;
        let ss: f64 = self.sqrt_v.iter().zip(&wb).map(|(v, w)| (v - w).powi(2)).sum();
        Ok(n as f64 * ss)
    }

    /// `n Σ_yy + n bᵀ Σ_xx b − 2n bᵀ Σ_xy`, the covariance form of the same loss.
    pub fn covariance_loss(&self, b: &[f64], n: usize) -> Result<f64> {
        let p = &self.partitions;
        let gb = p.xx.matvec(b)?;
        let n = n as f64;
        Ok(n * p.yy + n * crate::linalg::dot(b, &gb) - 2.0 * n * crate::linalg::dot(b, &p.xy))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_labelled_matrix(w, &self.names, &self.sigma)
    }
}

pub fn assemble_covariance(r: &CorrelationMatrix, summaries: &[RobustSummary]) -> Result<CovarianceModel> {
    let d = r.dim();
    if summaries.len() != d {
        return Err(Error::DimensionMismatch(format!(
            "{} summaries for a {d}x{d} correlation matrix",
            summaries.len()
        )));
    }
    if let Some(j) = summaries.iter().position(|s| !(s.scale > 0.0)) {
        return Err(Error::NonPositiveScale(r.names[j].clone()));
    }
    let scales: Vec<f64> = summaries.iter().map(|s| s.scale).collect();
    let sigma = Matrix::from_fn(d, d, |i, j| scales[i] * r.matrix[(i, j)] * scales[j]);
    let (sqrt_v, sqrt_w) = sqrt_factorize(&sigma)?;
    Ok(CovarianceModel {
        names: r.names.clone(),
        partitions: Partitions::of(&sigma),
        sigma,
        scales,
        sqrt_v,
        sqrt_w,
    })
}

/// Splits the symmetric square root `V diag(√λ) Vᵀ` of a positive
/// semi-definite matrix into its first column `v` and the rest `W`.
///
/// Eigenvalues in `[−1e-8 ‖Σ‖, 0)` are rounding noise and clipped to zero;
/// anything more negative is rejected.
pub fn sqrt_factorize(sigma: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let eig = symmetric_eigen(sigma)?;
    let min = eig.min_eigenvalue();
    if min < -1e-8 * sigma.norm_inf() {
        return Err(Error::NotPositiveSemiDefinite(min));
    }
    let root = eig.map_spectrum(|l| l.max(0.0).sqrt());
    let d = root.rows();
    let v = root.column(0);
    let rest: Vec<usize> = (1..d).collect();
    let all: Vec<usize> = (0..d).collect();
    Ok((v, root.submatrix(&all, &rest)))
}

fn write_labelled_matrix<W: Write>(w: W, names: &[String], m: &Matrix) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    let mut header = vec![String::new()];
    header.extend(names.iter().cloned());
    wtr.write_record(&header)?;
    for (i, name) in names.iter().enumerate() {
        let mut rec = vec![name.clone()];
        rec.extend(m.row(i).iter().map(|v| format!("{v:.16e}")));
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}
