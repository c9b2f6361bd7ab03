#![allow(clippy::needless_range_loop)]

use gralasso::covariance::{assemble_covariance, gaussian_rank_corr_matrix, pearson_corr_matrix, CorrelationEstimator};
use gralasso::linalg::symmetric_eigen;
use gralasso::simulation::{gaussian_columns, gen_design, gen_response, SimDesign};
use gralasso::{fit_gr_alasso, DataMatrix, FitOptions};
use proptest::prelude::*;

fn dataset(n: usize, p: usize, seed: u64) -> DataMatrix {
    let d = SimDesign::standard(n, p).with_seed(seed);
    let x = gen_design(&d).unwrap();
    let y = gen_response(&x, &d.beta_true, 1.0, seed ^ 0xABCD).unwrap();
    DataMatrix::from_parts(y, x).unwrap()
}

fn ols(data: &DataMatrix) -> Vec<f64> {
    // normal equations of [1, X], Gauss-Jordan with partial pivoting
    let q = data.p() + 1;
    let mut a = vec![vec![0.0; q + 1]; q];
    for i in 0..data.n() {
        let mut row = vec![1.0];
        row.extend((0..data.p()).map(|j| data.predictor(j)[i]));
        for r in 0..q {
            for c in 0..q {
                a[r][c] += row[r] * row[c];
            }
            a[r][q] += row[r] * data.response()[i];
        }
    }
    for k in 0..q {
        let piv = (k..q).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
        a.swap(k, piv);
        for i in 0..q {
            if i != k {
                let f = a[i][k] / a[k][k];
                for j in k..=q {
                    a[i][j] -= f * a[k][j];
                }
            }
        }
    }
    (0..q).map(|k| a[k][q] / a[k][k]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pearson_at_zero_penalty_is_ols(seed in 0u64..10_000, p in 1usize..6, n in 30usize..120) {
        let data = dataset(n, p, seed);
        let opts = FitOptions {
            estimator: CorrelationEstimator::Pearson,
            lambda: Some(0.0),
            ..FitOptions::default()
        };
        let fit = fit_gr_alasso(&data, &opts).unwrap();
        let want = ols(&data);
        prop_assert!((fit.intercept - want[0]).abs() < 1e-6);
        for j in 0..p {
            prop_assert!((fit.beta[j] - want[j + 1]).abs() < 1e-6);
        }
    }

    #[test]
    fn monotone_transforms_keep_supports(seed in 0u64..10_000, shift in -3.0f64..3.0, scale in 0.1f64..10.0) {
        let data = dataset(60, 6, seed);
        let warped: Vec<Vec<f64>> = (0..data.p())
            .map(|j| {
                data.predictor(j)
                    .iter()
                    .map(|v| match j % 3 {
                        0 => (scale * v + shift).exp(),
                        1 => v.powi(3) * scale - shift,
                        _ => (v / scale).tanh(),
                    })
                    .collect()
            })
            .collect();
        let warped = DataMatrix::from_parts(data.response().to_vec(), warped).unwrap();
        let opts = FitOptions { n_lambda: 40, seed, ..FitOptions::default() };
        let a = fit_gr_alasso(&data, &opts).unwrap();
        let b = fit_gr_alasso(&warped, &opts).unwrap();
        prop_assert_eq!(&a.correlation.matrix, &b.correlation.matrix);
        prop_assert_eq!(&a.path.supports, &b.path.supports);
        prop_assert_eq!(a.support, b.support);
    }

    #[test]
    fn covariance_square_root_reproduces_partitions(seed in 0u64..10_000, p in 1usize..10) {
        let data = dataset(40, p, seed);
        let r = gaussian_rank_corr_matrix(&data).unwrap();
        let model = assemble_covariance(&r, &CorrelationEstimator::GaussianRank.summaries(&data).unwrap()).unwrap();
        let wt = model.sqrt_w.transpose();
        let scale = model.sigma.max_abs();
        prop_assert!(wt.matmul(&model.sqrt_w).unwrap().sub(&model.partitions.xx).max_abs() <= 1e-8 * scale);
        let wtv = wt.matvec(&model.sqrt_v).unwrap();
        for (a, b) in wtv.iter().zip(&model.partitions.xy) {
            prop_assert!((a - b).abs() <= 1e-8 * scale);
        }
        let b: Vec<f64> = (0..p).map(|j| (j as f64 * 0.37).sin()).collect();
        let l1 = model.sqrt_loss(&b, 40).unwrap();
        let l2 = model.covariance_loss(&b, 40).unwrap();
        prop_assert!((l1 - l2).abs() <= 1e-8 * l1.abs().max(1.0));
    }
}

#[test]
fn gaussian_rank_matrices_are_psd() {
    let mut worst = f64::INFINITY;
    for s in 0..1000u64 {
        let n = 10 + (s % 50) as usize;
        let p = 2 + (s % 7) as usize;
        let mut cols = gaussian_columns(n, &gralasso::linalg::Matrix::identity(p), s).unwrap();
        if s % 3 == 0 {
            cols.iter_mut()
                .for_each(|c| c.iter_mut().for_each(|v| *v = (2.0 * *v).round()));
        }
        if s % 5 == 0 {
            cols[0][0] = 1e9;
        }
        for c in &mut cols {
            if c.iter().all(|v| *v == c[0]) {
                c[1] += 1.0;
            }
        }
        let names = (0..p).map(|j| format!("c{j}")).collect();
        let r = gaussian_rank_corr_matrix(&DataMatrix::new(names, cols).unwrap()).unwrap();
        worst = worst.min(symmetric_eigen(&r.matrix).unwrap().min_eigenvalue());
    }
    assert!(worst >= -1e-10, "{worst}");
}

#[test]
fn gaussian_rank_agrees_with_pearson_on_clean_normal_data() {
    let d = SimDesign::standard(50_000, 4).with_seed(12);
    let x = gen_design(&d).unwrap();
    let y = gen_response(&x, &d.beta_true[..4], 1.0, 13).unwrap();
    let data = DataMatrix::from_parts(y, x).unwrap();
    let gr = gaussian_rank_corr_matrix(&data).unwrap();
    let pe = pearson_corr_matrix(&data).unwrap();
    assert!(gr.matrix.sub(&pe.matrix).max_abs() < 0.01);
}
