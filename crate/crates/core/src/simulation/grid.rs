//! Benchmark grids over contamination rate and outlier magnitude.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::time::Instant;

use rayon::prelude::*;

use crate::covariance::CorrelationEstimator;
use crate::data::DataMatrix;
use crate::error::{Error, Result};
use crate::regression::{fit_gr_alasso, FitOptions, WeightMode};

use super::contamination::{contaminate_cells, ContaminationSpec};
use super::design::{gen_design, gen_response, SimDesign};
use super::metrics::compute_metrics;
use super::{mix_seed, replicate_seed};

/// Header of the per-replicate record CSV.
pub const RECORD_HEADER: [&str; 10] = [
    "e",
    "gamma",
    "replicate",
    "method",
    "tpr",
    "fpr",
    "mse_beta",
    "mspe",
    "runtime_ms",
    "status",
];

/// Header of the aggregate CSV.
pub const AGGREGATE_HEADER: [&str; 13] = [
    "e",
    "gamma",
    "method",
    "n_ok",
    "n_failed",
    "tpr_mean",
    "tpr_se",
    "fpr_mean",
    "fpr_se",
    "mse_beta_mean",
    "mse_beta_se",
    "mspe_mean",
    "mspe_se",
];

/// Methods that run in-process.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Gaussian-rank correlations, Qn scales, adaptive weights.
    GrAlasso,
    /// Sample correlations and standard deviations, adaptive weights.
    Alasso,
    /// Sample correlations and standard deviations, unit weights.
    Lasso,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::GrAlasso => "gr-alasso",
            Self::Alasso => "alasso",
            Self::Lasso => "lasso",
        }
    }

    /// `base` with the estimator and weighting this method prescribes.
    pub fn options(self, base: &FitOptions) -> FitOptions {
        let mut opts = base.clone();
        match self {
            Self::GrAlasso => opts.estimator = CorrelationEstimator::GaussianRank,
            Self::Alasso => opts.estimator = CorrelationEstimator::Pearson,
            Self::Lasso => {
                opts.estimator = CorrelationEstimator::Pearson;
                opts.weights = WeightMode::Unit;
            }
        }
        opts
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gr-alasso" | "gr" => Ok(Self::GrAlasso),
            "alasso" => Ok(Self::Alasso),
            "lasso" => Ok(Self::Lasso),
            other => Err(Error::InvalidOption(format!("unknown method '{other}'"))),
        }
    }
}

/// One fit in one replicate of one grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRecord {
    pub e: f64,
    pub gamma: f64,
    pub replicate: usize,
    pub method: String,
    pub tpr: f64,
    pub fpr: f64,
    pub mse_beta: f64,
    pub mspe: f64,
    pub runtime_ms: f64,
    /// `ok`, or `failed: <reason>`.
    pub status: String,
}

impl BenchmarkRecord {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    /// `n`, `p`, coefficients, AR(1) ρ and noise level; its seed is unused.
    pub design: SimDesign,
    pub rates: Vec<f64>,
    pub gammas: Vec<f64>,
    pub replicates: usize,
    pub methods: Vec<Method>,
    pub seed0: u64,
    pub fit: FitOptions,
    /// Contaminate the test set too (off: MSPE is measured on clean data).
    pub contaminate_test: bool,
    /// Record wall-clock time per fit; off writes 0 so reruns are byte-identical.
    pub record_timing: bool,
}

impl GridConfig {
    pub fn new(design: SimDesign, rates: Vec<f64>, gammas: Vec<f64>, replicates: usize) -> Self {
        Self {
            design,
            rates,
            gammas,
            replicates,
            methods: vec![Method::GrAlasso, Method::Alasso, Method::Lasso],
            seed0: 0,
            fit: FitOptions::default(),
            contaminate_test: false,
            record_timing: true,
        }
    }
}

/// Data of one replicate: contaminated training set and a fresh test set.
#[derive(Debug, Clone, PartialEq)]
pub struct Replicate {
    pub train: DataMatrix,
    pub clean_train_x: Vec<Vec<f64>>,
    pub mask: Vec<Vec<bool>>,
    pub test_x: Vec<Vec<f64>>,
    pub test_y: Vec<f64>,
    pub seed: u64,
}

/// Regenerates everything for one replicate from its seed alone.
pub fn make_replicate(
    design: &SimDesign,
    spec: ContaminationSpec,
    seed: u64,
    contaminate_test: bool,
) -> Result<Replicate> {
    let train_design = SimDesign {
        seed: mix_seed(seed, 1),
        ..design.clone()
    };
    let x = gen_design(&train_design)?;
    let y = gen_response(&x, &design.beta_true, design.noise_sd, mix_seed(seed, 2))?;
    let (xc, mask) = contaminate_cells(&x, spec, mix_seed(seed, 3));
    let test_design = SimDesign {
        seed: mix_seed(seed, 4),
        ..design.clone()
    };
    let tx = gen_design(&test_design)?;
    let ty = gen_response(&tx, &design.beta_true, design.noise_sd, mix_seed(seed, 5))?;
    let tx = if contaminate_test {
        contaminate_cells(&tx, spec, mix_seed(seed, 6)).0
    } else {
        tx
    };
    Ok(Replicate {
        train: DataMatrix::from_parts(y, xc)?,
        clean_train_x: x,
        mask,
        test_x: tx,
        test_y: ty,
        seed,
    })
}

fn failed(e: f64, gamma: f64, replicate: usize, method: &str, reason: &str) -> BenchmarkRecord {
    BenchmarkRecord {
        e,
        gamma,
        replicate,
        method: method.to_string(),
        tpr: f64::NAN,
        fpr: f64::NAN,
        mse_beta: f64::NAN,
        mspe: f64::NAN,
        runtime_ms: 0.0,
        status: format!("failed: {}", reason.replace([',', '\n'], ";")),
    }
}

/// Runs one replicate of one cell for every configured method.
pub fn run_replicate(cfg: &GridConfig, e: f64, gamma: f64, r: usize) -> Vec<BenchmarkRecord> {
    let seed = replicate_seed(cfg.seed0, e, gamma, r);
    let data =
        ContaminationSpec::new(e, gamma).and_then(|spec| make_replicate(&cfg.design, spec, seed, cfg.contaminate_test));
    let data = match data {
        Ok(d) => d,
        Err(err) => {
            return cfg
                .methods
                .iter()
                .map(|m| failed(e, gamma, r, m.as_str(), &err.to_string()))
                .collect()
        }
    };
    cfg.methods
        .iter()
        .map(|&m| {
            let mut opts = m.options(&cfg.fit);
            opts.seed = mix_seed(seed, 7);
            let start = Instant::now();
            let result = fit_gr_alasso(&data.train, &opts).and_then(|fit| {
                compute_metrics(
                    &fit.support,
                    &fit.beta,
                    fit.intercept,
                    &cfg.design.beta_true,
                    &data.test_x,
                    &data.test_y,
                )
            });
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            match result {
                Ok(metrics) => BenchmarkRecord {
                    e,
                    gamma,
                    replicate: r,
                    method: m.as_str().to_string(),
                    tpr: metrics.tpr,
                    fpr: metrics.fpr,
                    mse_beta: metrics.mse_beta,
                    mspe: metrics.mspe,
                    runtime_ms: if cfg.record_timing { elapsed } else { 0.0 },
                    status: "ok".into(),
                },
                Err(err) => failed(e, gamma, r, m.as_str(), &err.to_string()),
            }
        })
        .collect()
}

/// Every (rate, magnitude, replicate) cell, run in parallel. Records come
/// back sorted by rate, magnitude, replicate and method order, whatever the
/// execution order was.
pub fn run_grid(cfg: &GridConfig) -> Result<Vec<BenchmarkRecord>> {
    if cfg.methods.is_empty() {
        return Err(Error::Simulation("no methods configured".into()));
    }
    cfg.design.validate()?;
    let mut tasks = Vec::new();
    for &e in &cfg.rates {
        for &g in &cfg.gammas {
            for r in 0..cfg.replicates {
                tasks.push((e, g, r));
            }
        }
    }
    let mut records: Vec<BenchmarkRecord> = tasks
        .par_iter()
        .flat_map_iter(|&(e, g, r)| run_replicate(cfg, e, g, r))
        .collect();
    let method_rank = |name: &str| {
        cfg.methods
            .iter()
            .position(|m| m.as_str() == name)
            .unwrap_or(usize::MAX)
    };
    records.sort_by(|a, b| {
        a.e.total_cmp(&b.e)
            .then(a.gamma.total_cmp(&b.gamma))
            .then(a.replicate.cmp(&b.replicate))
            .then(method_rank(&a.method).cmp(&method_rank(&b.method)))
    });
    Ok(records)
}

/// Per (rate, magnitude, method) means and standard errors over the
/// successful replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub e: f64,
    pub gamma: f64,
    pub method: String,
    pub n_ok: usize,
    pub n_failed: usize,
    pub tpr: (f64, f64),
    pub fpr: (f64, f64),
    pub mse_beta: (f64, f64),
    pub mspe: (f64, f64),
}

fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Groups by `(e, γ, method)`; the reduction runs over records in replicate
/// order so the result is independent of how they were produced.
pub fn aggregate(records: &[BenchmarkRecord]) -> Vec<AggregateRow> {
    type Key = (u64, u64, String);
    let mut groups: BTreeMap<Key, Vec<&BenchmarkRecord>> = BTreeMap::new();
    let key = |r: &BenchmarkRecord| -> Key {
        // total order on finite nonnegative floats via their bit patterns
        (r.e.to_bits(), r.gamma.to_bits(), r.method.clone())
    };
    for r in records {
        groups.entry(key(r)).or_default().push(r);
    }
    let mut rows: Vec<AggregateRow> = groups
        .into_values()
        .map(|mut recs| {
            recs.sort_by_key(|r| r.replicate);
            let ok: Vec<&&BenchmarkRecord> = recs.iter().filter(|r| r.is_ok()).collect();
            let col = |f: fn(&BenchmarkRecord) -> f64| mean_se(&ok.iter().map(|r| f(r)).collect::<Vec<_>>());
            AggregateRow {
                e: recs[0].e,
                gamma: recs[0].gamma,
                method: recs[0].method.clone(),
                n_ok: ok.len(),
                n_failed: recs.len() - ok.len(),
                tpr: col(|r| r.tpr),
                fpr: col(|r| r.fpr),
                mse_beta: col(|r| r.mse_beta),
                mspe: col(|r| r.mspe),
            }
        })
        .collect();
    rows.sort_by(|a, b| {
        a.e.total_cmp(&b.e)
            .then(a.gamma.total_cmp(&b.gamma))
            .then(a.method.cmp(&b.method))
    });
    rows
}

/// Looks up one aggregate row.
pub fn find_row<'a>(rows: &'a [AggregateRow], e: f64, gamma: f64, method: &str) -> Option<&'a AggregateRow> {
    rows.iter().find(|r| r.e == e && r.gamma == gamma && r.method == method)
}

fn write_metadata<W: Write>(w: &mut W, metadata: &[(String, String)]) -> Result<()> {
    for (k, v) in metadata {
        writeln!(w, "# {k}={v}")?;
    }
    Ok(())
}

/// Writes records, preceded by `# key=value` metadata lines.
pub fn write_records<W: Write>(mut w: W, records: &[BenchmarkRecord], metadata: &[(String, String)]) -> Result<()> {
    write_metadata(&mut w, metadata)?;
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(RECORD_HEADER)?;
    for r in records {
        wtr.write_record([
            r.e.to_string(),
            r.gamma.to_string(),
            r.replicate.to_string(),
            r.method.clone(),
            r.tpr.to_string(),
            r.fpr.to_string(),
            r.mse_beta.to_string(),
            r.mspe.to_string(),
            format!("{:.3}", r.runtime_ms),
            r.status.clone(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads the record schema, e.g. results of external methods.
pub fn read_records<R: Read>(r: R) -> Result<Vec<BenchmarkRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(r);
    let headers = rdr.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != RECORD_HEADER {
        return Err(Error::Data(format!(
            "record CSV header must be '{}'",
            RECORD_HEADER.join(",")
        )));
    }
    let mut out = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec[i].parse().map_err(|_| {
                Error::Data(format!(
                    "row {}, column '{}': cannot parse '{}'",
                    line + 1,
                    RECORD_HEADER[i],
                    &rec[i]
                ))
            })
        };
        out.push(BenchmarkRecord {
            e: num(0)?,
            gamma: num(1)?,
            replicate: rec[2]
                .parse()
                .map_err(|_| Error::Data(format!("row {}: bad replicate '{}'", line + 1, &rec[2])))?,
            method: rec[3].to_string(),
            tpr: num(4)?,
            fpr: num(5)?,
            mse_beta: num(6)?,
            mspe: num(7)?,
            runtime_ms: num(8)?,
            status: rec[9].to_string(),
        });
    }
    Ok(out)
}

pub fn write_aggregate<W: Write>(mut w: W, rows: &[AggregateRow], metadata: &[(String, String)]) -> Result<()> {
    write_metadata(&mut w, metadata)?;
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(AGGREGATE_HEADER)?;
    for r in rows {
        wtr.write_record([
            r.e.to_string(),
            r.gamma.to_string(),
            r.method.clone(),
            r.n_ok.to_string(),
            r.n_failed.to_string(),
            r.tpr.0.to_string(),
            r.tpr.1.to_string(),
            r.fpr.0.to_string(),
            r.fpr.1.to_string(),
            r.mse_beta.0.to_string(),
            r.mse_beta.1.to_string(),
            r.mspe.0.to_string(),
            r.mspe.1.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> GridConfig {
        let mut cfg = GridConfig::new(SimDesign::standard(60, 8), vec![0.0, 0.05], vec![6.0], 3);
        cfg.fit.n_lambda = 30;
        cfg.record_timing = false;
        cfg
    }

    #[test]
    fn records_are_sorted_and_complete() {
        let cfg = small_config();
        let recs = run_grid(&cfg).unwrap();
        assert_eq!(recs.len(), 2 * 3 * 3);
        assert!(recs.iter().all(BenchmarkRecord::is_ok));
        assert_eq!(recs[0].method, "gr-alasso");
        assert_eq!(recs[1].method, "alasso");
        assert_eq!(recs[3].replicate, 1);
        let agg = aggregate(&recs);
        assert_eq!(agg.len(), 2 * 3);
        assert!(agg.iter().all(|r| r.n_ok == 3));
    }

    #[test]
    fn deterministic_csv() {
        let cfg = small_config();
        let render = || {
            let recs = run_grid(&cfg).unwrap();
            let mut a = Vec::new();
            write_records(&mut a, &recs, &[("seed".into(), "0".into())]).unwrap();
            let mut b = Vec::new();
            write_aggregate(&mut b, &aggregate(&recs), &[]).unwrap();
            (a, b)
        };
        assert_eq!(render(), render());
    }

    #[test]
    fn replicate_reproducible_in_isolation() {
        let cfg = small_config();
        let all = run_grid(&cfg).unwrap();
        let one = run_replicate(&cfg, 0.05, 6.0, 2);
        let from_grid: Vec<_> = all
            .iter()
            .filter(|r| r.e == 0.05 && r.replicate == 2)
            .cloned()
            .collect();
        assert_eq!(one, from_grid);
    }

    #[test]
    fn contamination_leaves_response_and_shape() {
        let d = SimDesign::standard(50, 6);
        let clean = make_replicate(&d, ContaminationSpec::new(0.0, 6.0).unwrap(), 11, false).unwrap();
        let dirty = make_replicate(&d, ContaminationSpec::new(0.2, 6.0).unwrap(), 11, false).unwrap();
        assert_eq!(clean.train.response(), dirty.train.response());
        assert_eq!(clean.train.n(), dirty.train.n());
        assert_eq!(clean.clean_train_x, dirty.clean_train_x);
        assert_ne!(clean.train, dirty.train);
        assert_eq!(clean.test_y, dirty.test_y);
    }

    #[test]
    fn records_roundtrip_through_csv() {
        let recs = vec![
            BenchmarkRecord {
                e: 0.05,
                gamma: 6.0,
                replicate: 0,
                method: "rlars".into(),
                tpr: 0.8,
                fpr: 0.1,
                mse_beta: 0.01,
                mspe: 1.2,
                runtime_ms: 3.5,
                status: "ok".into(),
            },
            failed(0.05, 6.0, 1, "rlars", "did not converge, twice"),
        ];
        let mut buf = Vec::new();
        write_records(&mut buf, &recs, &[("source".into(), "external".into())]).unwrap();
        let back = read_records(buf.as_slice()).unwrap();
        assert_eq!(back[0], recs[0]);
        assert_eq!(back[1].status, "failed: did not converge; twice");
        assert!(back[1].tpr.is_nan());
        let agg = aggregate(&back);
        assert_eq!((agg[0].n_ok, agg[0].n_failed), (1, 1));
        assert!(read_records("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn failures_are_recorded_not_raised() {
        let mut cfg = small_config();
        cfg.rates = vec![1.5];
        let recs = run_grid(&cfg).unwrap();
        assert!(recs.iter().all(|r| r.status.starts_with("failed")));
    }
}
