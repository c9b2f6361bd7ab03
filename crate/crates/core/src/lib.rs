//! Robust variable selection for linear regression under cellwise
//! contamination.
//!
//! The estimator (GR-ALasso) never looks at rows as a whole. It builds the
//! joint correlation matrix of the response and predictors from Gaussian
//! rank correlations, takes per-column robust scales from Qn, and solves an
//! adaptive-Lasso problem written entirely in terms of that matrix. Because
//! every ingredient is computed one column or one column pair at a time, a
//! few outlying cells per row do not spoil the fit even when most rows carry
//! at least one of them.
//!
//! ```
//! use gralasso::{fit_gr_alasso, DataMatrix, FitOptions};
//!
//! // y depends on x1 only
//! let x1: Vec<f64> = (0..60).map(|i| ((i * 37) % 60) as f64 / 10.0).collect();
//! let x2: Vec<f64> = (0..60).map(|i| ((i * 11) % 60) as f64 / 10.0).collect();
//! let y: Vec<f64> = x1.iter().enumerate().map(|(i, v)| 2.0 * v + 0.01 * ((i % 7) as f64 - 3.0)).collect();
//! let z = DataMatrix::from_parts(y, vec![x1, x2])?;
//!
//! let fit = fit_gr_alasso(&z, &FitOptions::default())?;
//! assert_eq!(fit.support, vec![0]);
//! # Ok::<(), gralasso::Error>(())
//! ```
//!
//! Modules:
//!
//! - [`robust_stats`]: median, Qn, ranks, normal scores, `Φ⁻¹`
//! - [`covariance`]: correlation estimators, `Σ̂ = Ŝ R̂ Ŝ`, square-root factors
//! - [`regression`]: adaptive weights, coordinate-descent path, pseudo-data
//!   cross-validation, screening and the full pipeline
//! - [`simulation`]: synthetic designs, cellwise contamination, metrics and
//!   benchmark grids

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod covariance;
pub mod data;
pub mod error;
pub mod linalg;
pub mod regression;
pub mod robust_stats;
pub mod simulation;

pub use covariance::{CorrelationEstimator, CorrelationMatrix, CovarianceModel};
pub use data::DataMatrix;
pub use error::{Error, Result};
pub use regression::{fit_gr_alasso, FitOptions, SelectionFit};
pub use robust_stats::RobustSummary;
