use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use gralasso::covariance::assemble_covariance;
use gralasso::regression::screen::screen_top_k_with;
use gralasso::simulation::{
    aggregate, make_replicate, read_records, run_grid, run_protocol, synthetic_dataset, write_aggregate, write_records,
    ContaminationSpec, GridConfig, ProtocolConfig, SimDesign,
};
use gralasso::{fit_gr_alasso, DataMatrix, SelectionFit};

use crate::args::{BenchmarkCmd, DataArgs, DesignArgs, FitCmd, ProtocolCmd, ScreenCmd, SimulateCmd};

/// Exit status when fewer than this share of benchmark fits succeed.
const MIN_SUCCESS: f64 = 0.9;

pub const EXIT_DEGRADED: u8 = 3;

/// 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn read_data(args: &DataArgs) -> Result<DataMatrix> {
    let f = File::open(&args.input).with_context(|| format!("cannot open {}", args.input.display()))?;
    DataMatrix::from_csv(f, &args.response).with_context(|| format!("reading {}", args.input.display()))
}

fn metadata(pairs: &[(&str, String)]) -> Vec<(String, String)> {
    let mut out = vec![(
        "software".to_string(),
        format!("gralasso {}", env!("CARGO_PKG_VERSION")),
    )];
    out.extend(pairs.iter().map(|(k, v)| (k.to_string(), v.clone())));
    out
}

fn write_kv(mut w: impl Write, pairs: &[(String, String)]) -> Result<()> {
    for (k, v) in pairs {
        writeln!(w, "{k}={v}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn fit(cmd: &FitCmd) -> Result<ExitCode> {
    let data = read_data(&cmd.data)?;
    let mut opts = cmd.solver.options(cmd.estimator);
    opts.lambda = cmd.lambda;
    let fit = fit_gr_alasso(&data, &opts)?;
    fs::create_dir_all(&cmd.output_dir)?;
    let dir = &cmd.output_dir;

    write_kv(create(dir, "report.kv")?, &report_pairs(&fit, cmd, &data))?;
    write_report_text(create(dir, "report.txt")?, &fit, cmd)?;
    write_coefficients(create(dir, "coefficients.csv")?, &fit)?;
    if let Some(cv) = &fit.cv {
        let mut w = create(dir, "cv.csv")?;
        writeln!(w, "lambda,mean_error,std_error,n_selected")?;
        for (k, lambda) in cv.lambdas.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{}",
                num(*lambda),
                num(cv.mean_error[k]),
                num(cv.std_error[k]),
                fit.path.supports[k].len()
            )?;
        }
        w.flush()?;
    }
    if cmd.write_matrices {
        fit.correlation.write_csv(create(dir, "correlation.csv")?)?;
        assemble_covariance(&fit.correlation, &fit.summaries)?.write_csv(create(dir, "covariance.csv")?)?;
    }
    for w in fit.cv.iter().flat_map(|c| &c.warnings) {
        eprintln!("warning: {w}");
    }
    println!("selected: {}", fit.selected_names().join(","));
    Ok(ExitCode::SUCCESS)
}

fn report_pairs(fit: &SelectionFit, cmd: &FitCmd, data: &DataMatrix) -> Vec<(String, String)> {
    let mut pairs = metadata(&[
        ("input", cmd.data.input.display().to_string()),
        ("response", cmd.data.response.clone()),
        ("estimator", cmd.estimator.as_str().to_string()),
        ("weights", format!("{:?}", fit.weights.source)),
        ("seed", cmd.solver.seed.to_string()),
        ("folds", cmd.solver.folds.to_string()),
        ("n", data.n().to_string()),
        ("p", data.p().to_string()),
        ("rule", fit.rule.as_str().to_string()),
        ("lambda", num(fit.lambda)),
    ]);
    if let Some(cv) = &fit.cv {
        pairs.push(("lambda_min".into(), num(cv.lambdas[cv.chosen_min])));
        pairs.push(("lambda_1se".into(), num(cv.lambdas[cv.chosen_1se])));
    }
    pairs.push(("converged".into(), fit.converged.to_string()));
    pairs.push(("selected".into(), fit.selected_names().join(",")));
    pairs.push(("intercept".into(), num(fit.intercept)));
    for (name, b) in fit.predictor_names().iter().zip(&fit.beta) {
        pairs.push((format!("coef.{name}"), num(*b)));
    }
    for (name, s) in fit.names.iter().zip(&fit.summaries) {
        pairs.push((format!("location.{name}"), num(s.location)));
        pairs.push((format!("scale.{name}"), num(s.scale)));
    }
    pairs
}

fn write_report_text(mut w: impl Write, fit: &SelectionFit, cmd: &FitCmd) -> Result<()> {
    writeln!(w, "gralasso {} fit", env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "estimator: {}   seed: {}", cmd.estimator, cmd.solver.seed)?;
    writeln!(w, "lambda ({}): {}", fit.rule.as_str(), num(fit.lambda))?;
    writeln!(
        w,
        "selected ({}): {}",
        fit.support.len(),
        fit.selected_names().join(", ")
    )?;
    writeln!(w)?;
    writeln!(w, "{:<20} {:>24}", "variable", "coefficient")?;
    writeln!(w, "{:<20} {:>24}", "(intercept)", num(fit.intercept))?;
    for &j in &fit.support {
        writeln!(w, "{:<20} {:>24}", fit.predictor_names()[j], num(fit.beta[j]))?;
    }
    w.flush()?;
    Ok(())
}

fn write_coefficients(mut w: impl Write, fit: &SelectionFit) -> Result<()> {
    writeln!(
        w,
        "variable,coefficient,standardized,initial,weight,location,scale,selected"
    )?;
    let y = fit.summaries[0];
    writeln!(
        w,
        "(intercept),{},,,,{},{},true",
        num(fit.intercept),
        num(y.location),
        num(y.scale)
    )?;
    for (j, name) in fit.predictor_names().iter().enumerate() {
        let s = fit.summaries[j + 1];
        writeln!(
            w,
            "{name},{},{},{},{},{},{},{}",
            num(fit.beta[j]),
            num(fit.beta_standardized[j]),
            num(fit.initial_estimate[j]),
            num(fit.weights.weights[j]),
            num(s.location),
            num(s.scale),
            fit.support.contains(&j)
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn screen(cmd: &ScreenCmd) -> Result<ExitCode> {
    let data = read_data(&cmd.data)?;
    let top = screen_top_k_with(&data, cmd.screen_k, cmd.estimator)?;
    fs::create_dir_all(&cmd.output_dir)?;
    let mut w = create(&cmd.output_dir, "screen.csv")?;
    writeln!(w, "rank,variable,correlation")?;
    for (rank, s) in top.iter().enumerate() {
        writeln!(w, "{},{},{}", rank + 1, s.name, num(s.correlation))?;
    }
    w.flush()?;
    let keep: Vec<usize> = top.iter().map(|s| s.index).collect();
    data.select_predictors(&keep)
        .write_csv(create(&cmd.output_dir, "screened.csv")?)?;
    println!("kept {} of {} predictors", top.len(), data.p());
    Ok(ExitCode::SUCCESS)
}

fn design(args: &DesignArgs) -> SimDesign {
    let mut d = SimDesign::standard(args.n, args.p);
    d.ar1_rho = args.rho;
    d.noise_sd = args.noise_sd;
    d
}

pub fn simulate(cmd: &SimulateCmd) -> Result<ExitCode> {
    let d = design(&cmd.design);
    d.validate()?;
    let spec = ContaminationSpec::new(cmd.e, cmd.gamma)?;
    let rep = make_replicate(&d, spec, cmd.seed, false)?;
    fs::create_dir_all(&cmd.output_dir)?;
    let dir = &cmd.output_dir;
    rep.train.write_csv(create(dir, "train.csv")?)?;
    DataMatrix::from_parts(rep.test_y.clone(), rep.test_x.clone())?.write_csv(create(dir, "test.csv")?)?;

    let mut w = create(dir, "mask.csv")?;
    writeln!(w, "row,column")?;
    let names = rep.train.predictor_names();
    for i in 0..rep.train.n() {
        for (j, col) in rep.mask.iter().enumerate() {
            if col[i] {
                writeln!(w, "{i},{}", names[j])?;
            }
        }
    }
    w.flush()?;

    let beta: Vec<String> = d.beta_true.iter().map(|b| b.to_string()).collect();
    let active: Vec<&str> = d.active_set().iter().map(|&j| names[j].as_str()).collect();
    let truth = metadata(&[
        ("seed", cmd.seed.to_string()),
        ("n", d.n.to_string()),
        ("p", d.p.to_string()),
        ("rho", d.ar1_rho.to_string()),
        ("noise_sd", d.noise_sd.to_string()),
        ("e", cmd.e.to_string()),
        ("gamma", cmd.gamma.to_string()),
        ("beta_true", beta.join(",")),
        ("active_set", active.join(",")),
        ("test_n", d.n.to_string()),
    ]);
    write_kv(create(dir, "truth.kv")?, &truth)?;
    Ok(ExitCode::SUCCESS)
}

fn list(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

pub fn benchmark(cmd: &BenchmarkCmd) -> Result<ExitCode> {
    if cmd.replicates == 0 {
        bail!("--replicates must be at least 1");
    }
    for &e in &cmd.e_list {
        ContaminationSpec::new(e, 0.0)?;
    }
    for &g in &cmd.gamma_list {
        ContaminationSpec::new(0.0, g)?;
    }
    let mut cfg = GridConfig::new(
        design(&cmd.design),
        cmd.e_list.clone(),
        cmd.gamma_list.clone(),
        cmd.replicates,
    );
    cfg.methods = cmd.methods.clone();
    cfg.seed0 = cmd.solver.seed;
    cfg.fit = cmd.solver.options(Default::default());
    cfg.contaminate_test = cmd.contaminate_test;
    cfg.record_timing = !cmd.no_timing;
    let records = run_grid(&cfg)?;

    let mut all = records.clone();
    for path in &cmd.external {
        let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
        all.extend(read_records(f).with_context(|| format!("reading {}", path.display()))?);
    }

    let methods: Vec<&str> = cmd.methods.iter().map(|m| m.as_str()).collect();
    let meta = metadata(&[
        ("seed", cmd.solver.seed.to_string()),
        ("n", cfg.design.n.to_string()),
        ("p", cfg.design.p.to_string()),
        ("rho", cfg.design.ar1_rho.to_string()),
        ("noise_sd", cfg.design.noise_sd.to_string()),
        ("e_list", list(&cmd.e_list)),
        ("gamma_list", list(&cmd.gamma_list)),
        ("replicates", cmd.replicates.to_string()),
        ("methods", methods.join(";")),
        ("folds", cmd.solver.folds.to_string()),
        ("rule", cmd.solver.rule.as_str().to_string()),
        ("test_n", cfg.design.n.to_string()),
        ("contaminate_test", cmd.contaminate_test.to_string()),
    ]);
    fs::create_dir_all(&cmd.output_dir)?;
    write_records(create(&cmd.output_dir, "records.csv")?, &all, &meta)?;
    write_aggregate(create(&cmd.output_dir, "aggregate.csv")?, &aggregate(&all), &meta)?;

    let ok = records.iter().filter(|r| r.is_ok()).count();
    let share = ok as f64 / records.len() as f64;
    println!("{ok} of {} fits succeeded", records.len());
    if share < MIN_SUCCESS {
        eprintln!("benchmark degraded: success share {share:.3} below {MIN_SUCCESS}");
        return Ok(ExitCode::from(EXIT_DEGRADED));
    }
    Ok(ExitCode::SUCCESS)
}

pub fn protocol(cmd: &ProtocolCmd) -> Result<ExitCode> {
    let data = match &cmd.input {
        Some(path) => read_data(&DataArgs {
            input: path.clone(),
            response: cmd.response.clone(),
        })?,
        None => synthetic_dataset(506, 13, cmd.solver.seed)?,
    };
    let cfg = ProtocolConfig {
        redundant: cmd.redundant,
        contamination: ContaminationSpec::new(cmd.e, cmd.gamma)?,
        replicates: cmd.replicates,
        seed0: cmd.solver.seed,
        fit: cmd.solver.options(cmd.estimator),
        ..ProtocolConfig::default()
    };
    let rates = run_protocol(&data, &cfg)?;
    fs::create_dir_all(&cmd.output_dir)?;
    rates.write_csv(create(&cmd.output_dir, "selection_rates.csv")?)?;
    let (rc, rd) = rates.redundant_rate();
    let source = cmd
        .input
        .as_ref()
        .map_or_else(|| "synthetic".to_string(), |p| p.display().to_string());
    let meta = metadata(&[
        ("input", source),
        ("seed", cmd.solver.seed.to_string()),
        ("replicates", cmd.replicates.to_string()),
        ("redundant", cmd.redundant.to_string()),
        ("e", cmd.e.to_string()),
        ("gamma", cmd.gamma.to_string()),
        ("estimator", cmd.estimator.as_str().to_string()),
        ("max_gap", num(rates.max_gap())),
        ("redundant_rate_clean", num(rc)),
        ("redundant_rate_contaminated", num(rd)),
        ("clean_failures", rates.clean_failures.to_string()),
        ("contaminated_failures", rates.contaminated_failures.to_string()),
    ]);
    write_kv(create(&cmd.output_dir, "protocol.kv")?, &meta)?;
    println!("max selection-rate gap: {:.4}", rates.max_gap());
    Ok(ExitCode::SUCCESS)
}
