use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Independent cellwise contamination of the predictors: each cell is
/// replaced, with probability `rate`, by a draw from `N(+γ, 1)` or
/// `N(−γ, 1)` with equal probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContaminationSpec {
    pub rate: f64,
    pub gamma: f64,
}

impl ContaminationSpec {
    pub fn new(rate: f64, gamma: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rate) {
            return Err(Error::Simulation(format!(
                "contamination rate must be in [0, 1), got {rate}"
            )));
        }
        if !(gamma >= 0.0) {
            return Err(Error::Simulation(format!(
                "outlier magnitude must be nonnegative, got {gamma}"
            )));
        }
        Ok(Self { rate, gamma })
    }

    /// Expected fraction of rows with at least one contaminated cell among
    /// `p` independently contaminated columns: `1 − (1 − e)^p`.
    pub fn expected_row_fraction(&self, p: usize) -> f64 {
        1.0 - (1.0 - self.rate).powi(p as i32)
    }
}

/// Column-major cell mask; `true` marks a replaced cell.
pub type CellMask = Vec<Vec<bool>>;

/// Returns the contaminated copy of `x` (column-major) and its mask. The
/// input is left untouched; row count and column count are preserved.
pub fn contaminate_cells(x: &[Vec<f64>], spec: ContaminationSpec, seed: u64) -> (Vec<Vec<f64>>, CellMask) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = x.to_vec();
    let mut mask: CellMask = x.iter().map(|c| vec![false; c.len()]).collect();
    if spec.rate == 0.0 {
        return (out, mask);
    }
    for (col, m) in out.iter_mut().zip(mask.iter_mut()) {
        for (v, flag) in col.iter_mut().zip(m.iter_mut()) {
            if rng.random::<f64>() < spec.rate {
                let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
                let noise: f64 = StandardNormal.sample(&mut rng);
                *v = sign * spec.gamma + noise;
                *flag = true;
            }
        }
    }
    (out, mask)
}

/// Fraction of rows holding at least one flagged cell.
pub fn contaminated_row_fraction(mask: &CellMask) -> f64 {
    let n = mask.first().map_or(0, Vec::len);
    if n == 0 {
        return 0.0;
    }
    let hit = (0..n).filter(|&i| mask.iter().any(|c| c[i])).count();
    hit as f64 / n as f64
}

pub fn mask_density(mask: &CellMask) -> f64 {
    let cells: usize = mask.iter().map(Vec::len).sum();
    if cells == 0 {
        return 0.0;
    }
    mask.iter().flatten().filter(|&&b| b).count() as f64 / cells as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeros(n: usize, p: usize) -> Vec<Vec<f64>> {
        vec![vec![0.0; n]; p]
    }

    #[test]
    fn zero_rate_is_identity() {
        let x = vec![vec![1.0, 2.0], vec![3.0, 4.0]];
        let (y, mask) = contaminate_cells(&x, ContaminationSpec::new(0.0, 10.0).unwrap(), 1);
        assert_eq!(x, y);
        assert!(mask.iter().flatten().all(|b| !b));
    }

    #[test]
    fn mask_density_concentrates() {
        let x = zeros(50_000, 20);
        let (_, mask) = contaminate_cells(&x, ContaminationSpec::new(0.05, 6.0).unwrap(), 2);
        assert!((mask_density(&mask) - 0.05).abs() < 0.005);
    }

    #[test]
    fn replaced_cells_centre_on_plus_minus_gamma() {
        let x = zeros(20_000, 5);
        let (y, mask) = contaminate_cells(&x, ContaminationSpec::new(0.1, 8.0).unwrap(), 3);
        let vals: Vec<f64> = y
            .iter()
            .flatten()
            .zip(mask.iter().flatten())
            .filter(|(_, &m)| m)
            .map(|(v, _)| *v)
            .collect();
        let pos = vals.iter().filter(|v| **v > 0.0).count() as f64 / vals.len() as f64;
        assert!((pos - 0.5).abs() < 0.03);
        let mean_abs = vals.iter().map(|v| v.abs()).sum::<f64>() / vals.len() as f64;
        assert!((mean_abs - 8.0).abs() < 0.1);
        // untouched cells keep their value
        assert!(y
            .iter()
            .flatten()
            .zip(mask.iter().flatten())
            .all(|(v, m)| *m || *v == 0.0));
    }

    #[test]
    fn row_fraction_follows_propagation_formula() {
        let spec = ContaminationSpec::new(0.05, 6.0).unwrap();
        let x = zeros(20_000, 20);
        let (_, mask) = contaminate_cells(&x, spec, 4);
        let want = spec.expected_row_fraction(20);
        assert!((want - 0.6415).abs() < 1e-4);
        assert!((contaminated_row_fraction(&mask) - want).abs() < 0.02);
    }

    #[test]
    fn invalid_spec() {
        assert!(ContaminationSpec::new(1.0, 1.0).is_err());
        assert!(ContaminationSpec::new(-0.1, 1.0).is_err());
        assert!(ContaminationSpec::new(0.1, -1.0).is_err());
    }
}
