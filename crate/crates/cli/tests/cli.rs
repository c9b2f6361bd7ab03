#![allow(clippy::needless_range_loop)]

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_gralasso"));
    for (k, _) in std::env::vars() {
        if k.starts_with("GRALASSO_") {
            c.env_remove(k);
        }
    }
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/tiny.csv")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn kv(path: &Path) -> Vec<(String, String)> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter_map(|l| l.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
        .collect()
}

fn lookup<'a>(pairs: &'a [(String, String)], key: &str) -> &'a str {
    &pairs
        .iter()
        .find(|(k, _)| k == key)
        .unwrap_or_else(|| panic!("missing {key}"))
        .1
}

fn data_lines(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

#[test]
fn tiny_fixture_selects_x1() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["fit", "--input", s(&fixture()), "--output-dir", s(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = kv(&dir.path().join("report.kv"));
    assert_eq!(lookup(&report, "selected"), "x1");
    assert_eq!(lookup(&report, "seed"), "0");
    let coef: f64 = lookup(&report, "coef.x1").parse().unwrap();
    assert!(coef > 0.3 && coef < 1.3, "{coef}");
    for f in ["report.txt", "coefficients.csv", "cv.csv"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        a.swap(k, piv);
        b.swap(k, piv);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            for j in k..n {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    x
}

#[test]
fn pearson_at_zero_lambda_is_ols() {
    let dir = tempfile::tempdir().unwrap();
    let sim = dir.path().join("sim");
    let out = run(&[
        "simulate",
        "--n",
        "100",
        "--p",
        "5",
        "--e",
        "0",
        "--seed",
        "3",
        "--output-dir",
        s(&sim),
    ]);
    assert!(out.status.success());
    let train = sim.join("train.csv");
    let fit = dir.path().join("fit");
    let out = run(&[
        "fit",
        "--input",
        s(&train),
        "--estimator",
        "pearson",
        "--lambda",
        "0",
        "--output-dir",
        s(&fit),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let rows: Vec<Vec<f64>> = data_lines(&train)[1..]
        .iter()
        .map(|r| r.iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    // normal equations for [1, X]
    let q = 6;
    let mut xtx = vec![vec![0.0; q]; q];
    let mut xty = vec![0.0; q];
    for r in &rows {
        let mut d = vec![1.0];
        d.extend_from_slice(&r[1..]);
        for i in 0..q {
            xty[i] += d[i] * r[0];
            for j in 0..q {
                xtx[i][j] += d[i] * d[j];
            }
        }
    }
    let ols = gauss_solve(xtx, xty);
    let coef: Vec<f64> = data_lines(&fit.join("coefficients.csv"))[1..]
        .iter()
        .map(|r| r[1].parse().unwrap())
        .collect();
    for (a, b) in coef.iter().zip(&ols) {
        assert!((a - b).abs() < 1e-6, "{coef:?} vs {ols:?}");
    }
}

#[test]
fn fit_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for d in [&a, &b] {
        let out = run(&[
            "fit",
            "--input",
            s(&fixture()),
            "--seed",
            "9",
            "--write-matrices",
            "--output-dir",
            s(d),
        ]);
        assert!(out.status.success());
    }
    let (ra, rb) = (read_dir_bytes(&a), read_dir_bytes(&b));
    assert_eq!(ra.len(), 6);
    assert_eq!(ra, rb);
}

#[test]
fn report_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run(&["fit", "--input", s(&fixture()), "--output-dir", s(dir.path())])
        .status
        .success());
    let report = kv(&dir.path().join("report.kv"));
    let table = data_lines(&dir.path().join("coefficients.csv"));
    assert_eq!(table[1][0], "(intercept)");
    assert_eq!(lookup(&report, "intercept"), table[1][1]);
    for row in &table[2..] {
        let from_report: f64 = lookup(&report, &format!("coef.{}", row[0])).parse().unwrap();
        let from_table: f64 = row[1].parse().unwrap();
        assert_eq!(from_report.to_bits(), from_table.to_bits());
        // 17 significant digits
        assert_eq!(row[1].split('e').next().unwrap().trim_start_matches('-').len(), 18);
    }
}

#[test]
fn data_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "fit",
        "--input",
        s(&fixture()),
        "--response",
        "nope",
        "--output-dir",
        s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));

    let bad = dir.path().join("bad.csv");
    let mut text = fs::read_to_string(fixture()).unwrap();
    text = text.replacen('\n', "\n0.1,abc,0.2,0.3\n", 1);
    fs::write(&bad, text).unwrap();
    let out = run(&["fit", "--input", s(&bad), "--output-dir", s(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("x1") && err.contains("abc"), "{err}");

    let out = run(&["fit", "--input", s(&dir.path().join("missing.csv"))]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["fit", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        run(&["simulate", "--rho", "1.5", "--output-dir", s(dir.path())])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn simulate_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    assert!(run(&["simulate", "--output-dir", s(&a)]).status.success());
    let train = data_lines(&a.join("train.csv"));
    assert_eq!(train.len(), 101);
    assert!(train.iter().all(|r| r.len() == 21));
    let mask = data_lines(&a.join("mask.csv"));
    let density = (mask.len() - 1) as f64 / 2000.0;
    assert!((density - 0.05).abs() < 0.02, "{density}");
    let truth = kv(&a.join("truth.kv"));
    assert_eq!(lookup(&truth, "active_set"), "x1,x2,x3,x4,x5");
    assert_eq!(lookup(&truth, "seed"), "0");

    let b = dir.path().join("b");
    assert!(run(&["simulate", "--output-dir", s(&b)]).status.success());
    assert_eq!(read_dir_bytes(&a), read_dir_bytes(&b));

    let clean = dir.path().join("clean");
    assert!(run(&["simulate", "--e", "0", "--output-dir", s(&clean)])
        .status
        .success());
    assert_eq!(fs::read_to_string(clean.join("mask.csv")).unwrap(), "row,column\n");
}

#[test]
fn benchmark_bookkeeping_and_rerun() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &Path| -> Vec<String> {
        [
            "benchmark",
            "--e-list",
            "0.05",
            "--gamma-list",
            "6",
            "--replicates",
            "5",
            "--methods",
            "gr-alasso",
            "--no-timing",
            "--n-lambda",
            "40",
            "--output-dir",
            s(out),
        ]
        .iter()
        .map(|v| v.to_string())
        .collect()
    };
    let a = dir.path().join("a");
    let out = bin().args(args(&a)).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let records = data_lines(&a.join("records.csv"));
    assert_eq!(records.len(), 1 + 5);
    assert!(records[1..].iter().all(|r| r[9] == "ok"));
    let agg = data_lines(&a.join("aggregate.csv"));
    assert_eq!(agg.len(), 1 + 1);
    assert_eq!(agg[1][3], "5");
    let raw = fs::read_to_string(a.join("records.csv")).unwrap();
    assert!(raw.starts_with("# software=gralasso"));
    assert!(raw.contains("# seed=0\n"));

    let b = dir.path().join("b");
    assert!(bin().args(args(&b)).output().unwrap().status.success());
    assert_eq!(read_dir_bytes(&a), read_dir_bytes(&b));

    // external results merge into the aggregate
    let ext = dir.path().join("ext.csv");
    fs::write(
        &ext,
        "e,gamma,replicate,method,tpr,fpr,mse_beta,mspe,runtime_ms,status\n\
         0.05,6,0,rlars,0.8,0.1,0.02,1.5,12,ok\n\
         0.05,6,1,rlars,1,0,0.01,1.3,11,ok\n",
    )
    .unwrap();
    let c = dir.path().join("c");
    let mut with_ext = args(&c);
    with_ext.extend(["--external".to_string(), s(&ext).to_string()]);
    assert!(bin().args(with_ext).output().unwrap().status.success());
    let agg = data_lines(&c.join("aggregate.csv"));
    let rlars = agg.iter().find(|r| r[2] == "rlars").unwrap();
    assert_eq!(rlars[3], "2");
    assert_eq!(rlars[5].parse::<f64>().unwrap(), 0.9);
}

#[test]
fn benchmark_with_failing_fits_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "benchmark",
        "--n",
        "6",
        "--p",
        "3",
        "--e-list",
        "0",
        "--gamma-list",
        "0",
        "--replicates",
        "2",
        "--output-dir",
        s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let records = data_lines(&dir.path().join("records.csv"));
    assert!(records[1..].iter().all(|r| r[9].starts_with("failed")));
}

#[test]
fn screen_ranks_and_feeds_fit() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("dup.csv");
    let text = fs::read_to_string(fixture()).unwrap();
    let mut lines = text.lines();
    let mut out = format!("{},ycopy\n", lines.next().unwrap());
    for l in lines {
        let y = l.split(',').next().unwrap();
        out.push_str(&format!("{l},{y}\n"));
    }
    fs::write(&data, out).unwrap();
    let res = run(&[
        "screen",
        "--input",
        s(&data),
        "--screen-k",
        "4",
        "--output-dir",
        s(dir.path()),
    ]);
    assert!(res.status.success());
    let rows = data_lines(&dir.path().join("screen.csv"));
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[1][1], "ycopy");
    assert_eq!(rows[2][1], "x1");
    let corr: Vec<f64> = rows[1..].iter().map(|r| r[2].parse::<f64>().unwrap().abs()).collect();
    assert!(corr.windows(2).all(|w| w[0] >= w[1]));

    let res = run(&[
        "screen",
        "--input",
        s(&data),
        "--screen-k",
        "2",
        "--output-dir",
        s(dir.path()),
    ]);
    assert!(res.status.success());
    let screened = dir.path().join("screened.csv");
    assert_eq!(data_lines(&screened)[0], ["y", "ycopy", "x1"]);
    let fit_dir = dir.path().join("fit");
    assert!(run(&["fit", "--input", s(&screened), "--output-dir", s(&fit_dir)])
        .status
        .success());
}

#[test]
fn env_overrides_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let out = bin()
        .args(["fit", "--input", s(&fixture())])
        .env("GRALASSO_SEED", "5")
        .env("GRALASSO_OUTPUT_DIR", s(&a))
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(lookup(&kv(&a.join("report.kv")), "seed"), "5");
    let out = bin()
        .args(["fit", "--input", s(&fixture()), "--seed", "6"])
        .env("GRALASSO_SEED", "5")
        .env("GRALASSO_OUTPUT_DIR", s(&a))
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(lookup(&kv(&a.join("report.kv")), "seed"), "6");
}

#[test]
fn protocol_on_synthetic_stand_in() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "protocol",
        "--replicates",
        "4",
        "--n-lambda",
        "30",
        "--output-dir",
        s(dir.path()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_lines(&dir.path().join("selection_rates.csv"));
    assert_eq!(rows.len(), 1 + 13 + 10);
    assert_eq!(rows[14][0], "noise1");
    let meta = kv(&dir.path().join("protocol.kv"));
    assert_eq!(lookup(&meta, "input"), "synthetic");
}
