//! Selection-rate study on a fixed dataset: robust standardisation, redundant
//! AR(1) noise predictors, cellwise contamination, repeated fits.

use std::io::Write;

use rayon::prelude::*;

use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::regression::{fit_gr_alasso, FitOptions};
use crate::robust_stats::RobustSummary;

use super::contamination::{contaminate_cells, ContaminationSpec};
use super::design::{ar1_covariance, gaussian_columns, gen_design, gen_response, SimDesign};
use super::mix_seed;

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    pub redundant: usize,
    pub redundant_rho: f64,
    pub contamination: ContaminationSpec,
    pub replicates: usize,
    pub seed0: u64,
    pub fit: FitOptions,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            redundant: 10,
            redundant_rho: 0.5,
            contamination: ContaminationSpec {
                rate: 0.05,
                gamma: 10.0,
            },
            replicates: 200,
            seed0: 0,
            fit: FitOptions::default(),
        }
    }
}

/// How often each predictor was selected, clean and contaminated.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionRates {
    /// Original predictors followed by `noise1..noiseK`.
    pub names: Vec<String>,
    pub n_original: usize,
    pub clean: Vec<f64>,
    pub contaminated: Vec<f64>,
    pub clean_failures: usize,
    pub contaminated_failures: usize,
}

impl SelectionRates {
    /// Largest `|contaminated − clean|` over the original predictors.
    pub fn max_gap(&self) -> f64 {
        (0..self.n_original)
            .map(|j| (self.contaminated[j] - self.clean[j]).abs())
            .fold(0.0, f64::max)
    }

    /// Mean selection rate of the redundant predictors, `(clean, contaminated)`.
    pub fn redundant_rate(&self) -> (f64, f64) {
        let k = self.names.len() - self.n_original;
        if k == 0 {
            return (0.0, 0.0);
        }
        let mean = |v: &[f64]| v[self.n_original..].iter().sum::<f64>() / k as f64;
        (mean(&self.clean), mean(&self.contaminated))
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["variable", "redundant", "clean", "contaminated"])?;
        for (j, name) in self.names.iter().enumerate() {
            wtr.write_record([
                name.clone(),
                (j >= self.n_original).to_string(),
                self.clean[j].to_string(),
                self.contaminated[j].to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }
}

/// Stand-in dataset for the protocol when no real data is supplied: `n` rows,
/// `p` AR(1) predictors, coefficients `3, 1.5, 0, 0, 2, 0, …`.
pub fn synthetic_dataset(n: usize, p: usize, seed: u64) -> Result<DataMatrix> {
    let pattern = [3.0, 1.5, 0.0, 0.0, 2.0];
    let mut d = SimDesign::standard(n, p).with_seed(mix_seed(seed, 1));
    d.beta_true = (0..p).map(|j| pattern.get(j).copied().unwrap_or(0.0)).collect();
    let x = gen_design(&d)?;
    let y = gen_response(&x, &d.beta_true, 1.0, mix_seed(seed, 2))?;
    DataMatrix::from_parts(y, x)
}

/// Centres every predictor at its median and scales by its Qn.
pub fn robust_standardize(data: &DataMatrix) -> Result<DataMatrix> {
    let mut cols = Vec::with_capacity(data.p() + 1);
    cols.push(data.response().to_vec());
    for j in 0..data.p() {
        let x = data.predictor(j);
        let s = RobustSummary::robust(x)
            .map_err(|e| Error::Data(format!("predictor '{}': {e}", data.predictor_names()[j])))?;
        cols.push(x.iter().map(|v| (v - s.location) / s.scale).collect());
    }
    data.with_columns(cols)
}

type Supports = (Option<Vec<usize>>, Option<Vec<usize>>);

fn selected(data: &DataMatrix, opts: &FitOptions) -> Option<Vec<usize>> {
    fit_gr_alasso(data, opts).ok().map(|f| f.support)
}

/// Runs the clean and contaminated fits of every replicate.
pub fn run_protocol(data: &DataMatrix, cfg: &ProtocolConfig) -> Result<SelectionRates> {
    if cfg.replicates == 0 {
        return Err(Error::Simulation("need at least one replicate".into()));
    }
    let base = robust_standardize(data)?;
    let n = base.n();
    let cov = ar1_covariance(cfg.redundant.max(1), cfg.redundant_rho);
    let extra_names: Vec<String> = (1..=cfg.redundant).map(|k| format!("noise{k}")).collect();
    let outcomes: Vec<Result<Supports>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| {
            let seed = mix_seed(cfg.seed0, r as u64);
            let augmented = if cfg.redundant > 0 {
                let extra = gaussian_columns(n, &cov, mix_seed(seed, 1))?;
                let mut a = base.clone();
                a.append_predictors(extra_names.clone(), extra)?;
                a
            } else {
                base.clone()
            };
            let mut opts = cfg.fit.clone();
            opts.seed = mix_seed(seed, 2);
            let clean = selected(&augmented, &opts);
            let x: Vec<Vec<f64>> = (0..augmented.p()).map(|j| augmented.predictor(j).to_vec()).collect();
            let (mut xc, _) = contaminate_cells(&x, cfg.contamination, mix_seed(seed, 3));
            xc.insert(0, augmented.response().to_vec());
            let dirty = augmented.with_columns(xc)?;
            Ok((clean, selected(&dirty, &opts)))
        })
        .collect();
    let mut names = base.predictor_names().to_vec();
    names.extend(extra_names);
    let p = names.len();
    let mut clean = vec![0usize; p];
    let mut dirty = vec![0usize; p];
    let (mut clean_fail, mut dirty_fail) = (0, 0);
    for o in outcomes {
        let (c, d) = o?;
        match c {
            Some(s) => s.iter().for_each(|&j| clean[j] += 1),
            None => clean_fail += 1,
        }
        match d {
            Some(s) => s.iter().for_each(|&j| dirty[j] += 1),
            None => dirty_fail += 1,
        }
    }
    let rate = |counts: &[usize], fails: usize| {
        let ok = (cfg.replicates - fails).max(1) as f64;
        counts.iter().map(|&c| c as f64 / ok).collect()
    };
    Ok(SelectionRates {
        n_original: base.p(),
        clean: rate(&clean, clean_fail),
        contaminated: rate(&dirty, dirty_fail),
        names,
        clean_failures: clean_fail,
        contaminated_failures: dirty_fail,
    })
}
