use crate::covariance::CorrelationEstimator;
use crate::data::DataMatrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ScreenedPredictor {
    /// Zero-based predictor index.
    pub index: usize,
    pub name: String,
    pub correlation: f64,
}

/// Correlation of every predictor with the response under `estimator`.
/// Costs `O(n p)`; the full matrix is never formed.
pub fn marginal_correlations(z: &DataMatrix, estimator: CorrelationEstimator) -> Result<Vec<f64>> {
    let t = estimator.transform(z)?;
    let unit = |c: &[f64], name: &str| -> Result<Vec<f64>> {
        let m = c.len() as f64;
        let mean = c.iter().sum::<f64>() / m;
        let centred: Vec<f64> = c.iter().map(|v| v - mean).collect();
        let norm = centred.iter().map(|v| v * v).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::ZeroVariance(name.to_string()));
        }
        Ok(centred.into_iter().map(|v| v / norm).collect())
    };
    let y = unit(t.response(), &t.names()[0])?;
    (0..t.p())
        .map(|j| {
            let x = unit(t.predictor(j), &t.predictor_names()[j])?;
            Ok(crate::linalg::dot(&y, &x).clamp(-1.0, 1.0))
        })
        .collect()
}

/// The `k` predictors with the largest absolute Gaussian-rank correlation
/// with the response, strongest first; ties keep column order.
pub fn screen_top_k(z: &DataMatrix, k: usize) -> Result<Vec<ScreenedPredictor>> {
    screen_top_k_with(z, k, CorrelationEstimator::GaussianRank)
}

pub fn screen_top_k_with(z: &DataMatrix, k: usize, estimator: CorrelationEstimator) -> Result<Vec<ScreenedPredictor>> {
    if k == 0 || k > z.p() {
        return Err(Error::InvalidOption(format!(
            "screen size {k} must be in 1..={}",
            z.p()
        )));
    }
    let corr = marginal_correlations(z, estimator)?;
    let mut order: Vec<usize> = (0..z.p()).collect();
    order.sort_by(|&a, &b| corr[b].abs().total_cmp(&corr[a].abs()).then(a.cmp(&b)));
    Ok(order
        .into_iter()
        .take(k)
        .map(|j| ScreenedPredictor {
            index: j,
            name: z.predictor_names()[j].clone(),
            correlation: corr[j],
        })
        .collect())
}
