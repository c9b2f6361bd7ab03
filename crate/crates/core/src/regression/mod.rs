//! GR-ALasso fitting.
//!
//! The solver works on the correlation scale: with `R̂` split into
//! `(R_yy, R_xy, R_xx)` the adaptive-Lasso problem is
//!
//! ```text
//! minimise  n bᵀ R_xx b − 2n bᵀ R_xy + λ Σ ω_j |b_j|,   ω_j = 1 / |β̃_j|
//! ```
//!
//! and the coefficients are rescaled to data units by the per-column scales
//! afterwards. λ is chosen by K-fold cross-validation on the working
//! dataset, by default with the one-standard-error rule.

pub mod cv;
pub mod fit;
pub mod lasso;
pub mod screen;
pub mod weights;

pub use cv::{cross_validate, CvCurve, SelectionRule};
pub use fit::{destandardize, fit_gr_alasso, FitOptions, SelectionFit, WeightMode};
pub use lasso::{fit_path, lambda_grid, weighted_lasso_cd, LambdaGrid, LassoPath, SolverOptions};
pub use screen::{screen_top_k, ScreenedPredictor};
pub use weights::{adaptive_weights, initial_estimate_direct, initial_estimate_ridge, AdaptiveWeights, WeightSource};
