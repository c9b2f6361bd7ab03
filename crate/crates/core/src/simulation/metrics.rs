use crate::error::{Error, Result};

/// Selection and estimation quality of one fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    /// `|Â ∩ A| / |A|`
    pub tpr: f64,
    /// `|Â ∩ Aᶜ| / |Aᶜ|`, zero when every predictor is active.
    pub fpr: f64,
    /// `p⁻¹ Σ (β̂_j − β_j)²`
    pub mse_beta: f64,
    /// `n⁻¹ Σ (ŷ_i − y_i)²` on the test set.
    pub mspe: f64,
}

/// `test_x` is column-major; predictions include the intercept.
pub fn compute_metrics(
    support: &[usize],
    beta_hat: &[f64],
    intercept: f64,
    beta_true: &[f64],
    test_x: &[Vec<f64>],
    test_y: &[f64],
) -> Result<Metrics> {
    let p = beta_true.len();
    if beta_hat.len() != p || test_x.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "{} estimates, {} test columns, {p} true coefficients",
            beta_hat.len(),
            test_x.len()
        )));
    }
    let active: Vec<bool> = beta_true.iter().map(|b| *b != 0.0).collect();
    let n_active = active.iter().filter(|a| **a).count();
    if n_active == 0 {
        return Err(Error::Simulation("true active set is empty".into()));
    }
    let n_inactive = p - n_active;
    let tp = support.iter().filter(|&&j| active[j]).count();
    let fp = support.len() - tp;
    let mse_beta = beta_hat
        .iter()
        .zip(beta_true)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        / p as f64;
    let n = test_y.len();
    let mspe = (0..n)
        .map(|i| {
            let fitted = intercept + (0..p).map(|j| beta_hat[j] * test_x[j][i]).sum::<f64>();
            (fitted - test_y[i]).powi(2)
        })
        .sum::<f64>()
        / n.max(1) as f64;
    Ok(Metrics {
        tpr: tp as f64 / n_active as f64,
        fpr: if n_inactive == 0 {
            0.0
        } else {
            fp as f64 / n_inactive as f64
        },
        mse_beta,
        mspe,
    })
}
